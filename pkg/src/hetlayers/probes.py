"""Compactly supported bumps: minimality probes and weak-form test functions.

The profile is b(s) = ((1 + cos(pi s))/2)^2 on |s| <= 1, zero outside; it is
twice continuously differentiable, so the same family serves both the
energy-comparison probes and the weak-residual tests (which need analytic
first derivatives).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .grids import Grid2D
from .kernels import numpy_backend, total


def bump(s: np.ndarray) -> np.ndarray:
    s = np.asarray(s, dtype=np.float64)
    inside = np.abs(s) < 1.0
    q = np.where(inside, 0.5 * (1.0 + np.cos(np.pi * s)), 0.0)
    return q * q


def bump_prime(s: np.ndarray) -> np.ndarray:
    s = np.asarray(s, dtype=np.float64)
    inside = np.abs(s) < 1.0
    q = 0.5 * (1.0 + np.cos(np.pi * s))
    dq = -0.5 * np.pi * np.sin(np.pi * s)
    return np.where(inside, 2.0 * q * dq, 0.0)


@dataclass(frozen=True)
class Bump2D:
    """phi(t, x) = amp * b((t-t0)/wt) * b((x-x0)/wx) * direction."""

    t0: float
    x0: float
    wt: float
    wx: float
    amp: float
    direction: np.ndarray

    def profile_t(self, t: np.ndarray) -> np.ndarray:
        return bump((t - self.t0) / self.wt)

    def profile_x(self, x: np.ndarray) -> np.ndarray:
        return bump((x - self.x0) / self.wx)

    def values(self, t: np.ndarray, x: np.ndarray) -> np.ndarray:
        """phi on the tensor grid t (rows) x x (columns); shape (nt, nx, m)."""
        f = self.amp * np.outer(self.profile_t(t), self.profile_x(x))
        return f[:, :, None] * self.direction[None, None, :]

    def partials(self, t: np.ndarray, x: np.ndarray):
        """(phi, phi_t, phi_x, phi_tx) with analytic derivatives."""
        bt = self.profile_t(t)
        bx = self.profile_x(x)
        dbt = bump_prime((t - self.t0) / self.wt) / self.wt
        dbx = bump_prime((x - self.x0) / self.wx) / self.wx
        mk = lambda ft, fx: (self.amp * np.outer(ft, fx))[:, :, None] * self.direction
        return mk(bt, bx), mk(dbt, bx), mk(bt, dbx), mk(dbt, dbx)

    def node_box(self, grid: Grid2D, pad: int = 1):
        """Node index ranges [i0, i1] x [j0, j1] covering the support plus padding."""
        t = grid.t_nodes()
        x = grid.x_nodes()
        i0 = int(np.searchsorted(t, self.t0 - self.wt, side="left"))
        i1 = int(np.searchsorted(t, self.t0 + self.wt, side="right")) - 1
        j0 = int(np.searchsorted(x, self.x0 - self.wx, side="left"))
        j1 = int(np.searchsorted(x, self.x0 + self.wx, side="right")) - 1
        i0 = max(i0 - pad, 0)
        j0 = max(j0 - pad, 0)
        i1 = min(i1 + pad, grid.n_t - 1)
        j1 = min(j1 + pad, grid.n_x - 1)
        return i0, i1, j0, j1

    def check_interior(self, grid: Grid2D, margin_cells: int = 2) -> None:
        t_lo = -grid.half_length_t + margin_cells * grid.h_t
        t_hi = grid.half_length_t - margin_cells * grid.h_t
        x_lo = -grid.half_length_x + margin_cells * grid.h_x
        x_hi = grid.half_length_x - margin_cells * grid.h_x
        if (self.t0 - self.wt < t_lo or self.t0 + self.wt > t_hi
                or self.x0 - self.wx < x_lo or self.x0 + self.wx > x_hi):
            raise ValueError("probe support touches the boundary margin")


def random_bumps(
    grid: Grid2D,
    m: int,
    count: int,
    rng: np.random.Generator,
    amp_range=(0.02, 0.2),
    width_range=(0.3, 1.5),
    margin_cells: int = 2,
) -> list:
    """Seeded random bumps with supports inside the margin."""
    out = []
    T, L = grid.half_length_t, grid.half_length_x
    for _ in range(count):
        wt = rng.uniform(*width_range)
        wx = rng.uniform(*width_range)
        t_room = T - margin_cells * grid.h_t - wt
        x_room = L - margin_cells * grid.h_x - wx
        t0 = rng.uniform(-t_room, t_room)
        x0 = rng.uniform(-x_room, x_room)
        amp = rng.uniform(*amp_range)
        direction = rng.normal(size=m)
        direction = direction / np.linalg.norm(direction)
        b = Bump2D(t0, x0, wt, wx, amp, direction)
        b.check_interior(grid, margin_cells)
        out.append(b)
    return out


def weak_test_functions(
    grid: Grid2D,
    m: int,
    count: int,
    rng: np.random.Generator,
    margin_cells: int = 2,
) -> list:
    """Normalized tensor-cosine tests: 3 random widths, centers on a coarse lattice.

    Each test is scaled to unit discrete norm sum_cells ht hx (|phi|^2 +
    |phi_t|^2 + |phi_x|^2 + |phi_tx|^2) evaluated at cell centers.
    """
    T, L = grid.half_length_t, grid.half_length_x
    widths = rng.uniform(0.5, 2.0, size=3)
    tests = []
    for _ in range(count):
        wt = float(rng.choice(widths))
        wx = float(rng.choice(widths))
        t_room = T - margin_cells * grid.h_t - wt
        x_room = L - margin_cells * grid.h_x - wx
        lattice_t = np.linspace(-t_room, t_room, 9)
        lattice_x = np.linspace(-x_room, x_room, 9)
        t0 = float(rng.choice(lattice_t))
        x0 = float(rng.choice(lattice_x))
        direction = rng.normal(size=m)
        direction = direction / np.linalg.norm(direction)
        b = Bump2D(t0, x0, wt, wx, 1.0, direction)
        b.check_interior(grid, margin_cells)

        i0, i1, j0, j1 = b.node_box(grid)
        tc = grid.t_nodes()[i0:i1] + 0.5 * grid.h_t
        xc = grid.x_nodes()[j0:j1] + 0.5 * grid.h_x
        phi, phi_t, phi_x, phi_tx = b.partials(tc, xc)
        nrm2 = grid.h_t * grid.h_x * (
            np.einsum("ijk,ijk->", phi, phi)
            + np.einsum("ijk,ijk->", phi_t, phi_t)
            + np.einsum("ijk,ijk->", phi_x, phi_x)
            + np.einsum("ijk,ijk->", phi_tx, phi_tx)
        )
        tests.append(Bump2D(t0, x0, wt, wx, 1.0 / math.sqrt(nrm2), direction))
    return tests


# ---------------------------------------------------------------------------
# energy comparison over the support


def energy_over_box(p, u: np.ndarray, ht: float, hx: float,
                    i0: int, i1: int, j0: int, j1: int, order: int = 2) -> float:
    """Energy restricted to the cells of the node box [i0, i1] x [j0, j1]."""
    sub = u[i0:i1 + 1, j0:j1 + 1]
    if order == 2:
        rows = numpy_backend.energy_rows2(p, sub, ht, hx)
    elif order == 4:
        rows = numpy_backend.energy_rows4(p, sub, ht, hx)
    else:
        raise ValueError("order must be 2 or 4")
    return total(rows)


@dataclass
class ProbeLedger:
    deltas: np.ndarray
    tol: float
    order: int

    @property
    def min_delta(self) -> float:
        return float(np.min(self.deltas)) if self.deltas.size else 0.0

    @property
    def all_pass(self) -> bool:
        return bool(np.all(self.deltas >= -self.tol))

    def as_dict(self) -> dict:
        return {
            "count": int(self.deltas.size),
            "min_delta": self.min_delta,
            "tol": self.tol,
            "all_pass": self.all_pass,
            "order": self.order,
        }


def minimality_probes(p, field, bumps, tol: float, order: int = 2,
                      margin_cells: int = 2) -> ProbeLedger:
    """Energy change over each bump's support; a minimizer never loses energy.

    delta E = E_supp(u + phi) - E_supp(u), recorded per probe; the ledger
    passes when every delta is >= -tol.
    """
    grid = field.grid
    u = field.values
    deltas = np.empty(len(bumps))
    for k, b in enumerate(bumps):
        b.check_interior(grid, margin_cells)
        i0, i1, j0, j1 = b.node_box(grid)
        phi = b.values(grid.t_nodes()[i0:i1 + 1], grid.x_nodes()[j0:j1 + 1])
        e0 = energy_over_box(p, u, grid.h_t, grid.h_x, i0, i1, j0, j1, order)
        up = u[i0:i1 + 1, j0:j1 + 1] + phi
        if order == 2:
            rows = numpy_backend.energy_rows2(p, up, grid.h_t, grid.h_x)
        else:
            rows = numpy_backend.energy_rows4(p, up, grid.h_t, grid.h_x)
        deltas[k] = total(rows) - e0
    return ProbeLedger(deltas=deltas, tol=tol, order=order)
