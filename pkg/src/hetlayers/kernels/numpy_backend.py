"""Vectorized numpy implementations of the hot kernels.

These accept any PotentialDescriptor (including plug-ins) and mirror the
quadrature of the numba backend term for term.  Cell contributions group
corner sums as (left-pair) + (right-pair) so that mirror reflections of a
field reproduce every cell value exactly.
"""

from __future__ import annotations

import numpy as np


def _sq(d: np.ndarray) -> np.ndarray:
    # |d|^2 over the trailing component axis
    return np.einsum("...k,...k->...", d, d)


def action_cells(p, v: np.ndarray, h: float) -> np.ndarray:
    dv = (v[1:] - v[:-1]) / h
    kin = 0.5 * _sq(dv)
    w = p.w_raw(v)
    return h * (kin + 0.5 * (w[:-1] + w[1:]))


def action_grad(p, v: np.ndarray, h: float) -> np.ndarray:
    g = np.zeros_like(v)
    lap = (v[2:] - 2.0 * v[1:-1] + v[:-2]) / (h * h)
    g[1:-1] = h * (-lap + p.grad_raw(v[1:-1]))
    return g


def energy_rows2(p, u: np.ndarray, ht: float, hx: float) -> np.ndarray:
    w = p.w_raw(u)
    wcell = 0.25 * ((w[:-1, :-1] + w[1:, :-1]) + (w[:-1, 1:] + w[1:, 1:]))

    dt2 = _sq((u[1:] - u[:-1]) / ht)          # (n_t-1, n_x)
    kin_t = 0.25 * (dt2[:, :-1] + dt2[:, 1:])

    dx2 = _sq((u[:, 1:] - u[:, :-1]) / hx)    # (n_t, n_x-1)
    kin_x = 0.25 * (dx2[:-1, :] + dx2[1:, :])

    cells = (ht * hx) * (kin_t + kin_x + wcell)
    return cells.sum(axis=1)


def grad2(p, u: np.ndarray, ht: float, hx: float) -> np.ndarray:
    g = np.zeros_like(u)
    lap = (u[2:, 1:-1] - 2.0 * u[1:-1, 1:-1] + u[:-2, 1:-1]) / (ht * ht)
    lap = lap + (u[1:-1, 2:] - 2.0 * u[1:-1, 1:-1] + u[1:-1, :-2]) / (hx * hx)
    g[1:-1, 1:-1] = (ht * hx) * (-lap + p.grad_raw(u[1:-1, 1:-1]))
    return g


def _cross(u: np.ndarray, ht: float, hx: float) -> np.ndarray:
    return (u[1:, 1:] - u[1:, :-1] - u[:-1, 1:] + u[:-1, :-1]) / (ht * hx)


def energy_rows4(p, u: np.ndarray, ht: float, hx: float) -> np.ndarray:
    rows = energy_rows2(p, u, ht, hx)
    x2 = _sq(_cross(u, ht, hx))
    rows = rows + (ht * hx) * 0.5 * x2.sum(axis=1)
    return rows


def grad4(p, u: np.ndarray, ht: float, hx: float) -> np.ndarray:
    g = grad2(p, u, ht, hx)
    s9 = (
        u[2:, 2:] - 2.0 * u[2:, 1:-1] + u[2:, :-2]
        - 2.0 * u[1:-1, 2:] + 4.0 * u[1:-1, 1:-1] - 2.0 * u[1:-1, :-2]
        + u[:-2, 2:] - 2.0 * u[:-2, 1:-1] + u[:-2, :-2]
    )
    g[1:-1, 1:-1] += s9 / (ht * hx)
    return g


def dot(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.einsum("i,i->", a, b))
