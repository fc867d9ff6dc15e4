"""Heteroclinic double layers: 2D fields connecting the two orbit families.

A field u(t, x) on [-T, T] x [-L, L] is clamped to the minus-labeled orbit at
t = -T, the plus-labeled orbit at t = +T, and the wells at x = +-L.  The cell
quadrature of the energy makes its nodal gradient the exact 5-point residual,
so gradient descent, the PDE residual, and the minimality probes all refer to
one discrete functional.  The renormalized action subtracts the strip's share
of the 1D action minimum row by row and satisfies the identity
renormalized = energy - 2T * min_action at quadrature level.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np

from . import kernels
from .descent import DescentResult, SpectralPreconditioner2D, descend
from .effective import dist_to_set
from .errors import NonConvergenceError, PartitionError, UnsupportedOperation
from .grids import Grid1D, Grid2D
from .heteroclinic import ActionRef, DecayFit, HeteroclinicSet, Path1D, _fit_tail
from .potential import PotentialDescriptor

DEFAULT_TOL3 = 1e-6       # contract: grad sup <= tol3 * (1 + |E|)
DEFAULT_INTERNAL_GTOL = 1e-9


@dataclass
class Field2D:
    """Discrete map [-T,T] x [-L,L] -> R^m; rows follow t, columns follow x."""

    grid: Grid2D
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        expected = (self.grid.n_t, self.grid.n_x)
        if self.values.shape[:2] != expected or self.values.ndim != 3:
            raise ValueError(f"field values must have shape {expected} + (m,)")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field values must be finite")

    @property
    def m(self) -> int:
        return self.values.shape[2]

    def row_path(self, i: int) -> Path1D:
        return Path1D(self.grid.x_grid(), self.values[i].copy())

    def content_hash(self) -> str:
        return hashlib.sha256(np.ascontiguousarray(self.values).tobytes()).hexdigest()


# ---------------------------------------------------------------------------
# energies


def strip_energy(p: PotentialDescriptor, field: Field2D) -> float:
    """Cell-quadrature energy of the field (gradient part + W)."""
    g = field.grid
    return kernels.total(kernels.energy_rows2(p, field.values, g.h_t, g.h_x))


def row_actions(p: PotentialDescriptor, field: Field2D) -> np.ndarray:
    """1D action of every row, with the row grid's own quadrature."""
    g = field.grid
    out = np.empty(g.n_t)
    for i in range(g.n_t):
        out[i] = kernels.total(kernels.action_cells(p, field.values[i], g.h_x))
    return out


def renormalized_action(p: PotentialDescriptor, field: Field2D, ref: ActionRef) -> float:
    """Row-wise action of the orbit reading of the field:

        sum_i h_t [ 1/2 ||row difference / h_t||^2 + (row action - min action) ]

    with trapezoid row weights.  Equals strip_energy - 2T * min_action up to
    roundoff; the two sides are computed by independent sweeps.
    """
    g = field.grid
    if not ref.grid.matches(g.x_grid()):
        raise ValueError("action reference was computed on a different x-grid")
    u = field.values
    h_t, h_x = g.h_t, g.h_x

    dt = (u[1:] - u[:-1]) / h_t
    dt2 = np.einsum("ijk,ijk->ij", dt, dt)
    xw = np.full(g.n_x, h_x)
    xw[0] = xw[-1] = 0.5 * h_x
    kin_terms = 0.5 * h_t * (dt2 @ xw)

    tw = np.full(g.n_t, h_t)
    tw[0] = tw[-1] = 0.5 * h_t
    pot_terms = tw * (row_actions(p, field) - ref.value)

    return math.fsum(np.concatenate([kin_terms, pot_terms]))


# ---------------------------------------------------------------------------
# boundary data and initializer


def _resample_member(path: Path1D, x_grid: Grid1D) -> np.ndarray:
    if path.grid.matches(x_grid):
        return path.values.copy()
    raise ValueError("heteroclinic set must be built on the layer's x-grid")


def smoothstep_init(e_minus: np.ndarray, e_plus: np.ndarray, grid: Grid2D,
                    half_width: float = 2.0) -> np.ndarray:
    """Blend the two boundary orbits across |t| <= half_width (cubic smoothstep)."""
    t = grid.t_nodes()
    s = np.clip((t + half_width) / (2.0 * half_width), 0.0, 1.0)
    s = s * s * (3.0 - 2.0 * s)
    vals = (1.0 - s)[:, None, None] * e_minus[None, :, :] + s[:, None, None] * e_plus[None, :, :]
    return vals


def _clamp_boundaries(vals: np.ndarray, e_minus: np.ndarray, e_plus: np.ndarray,
                      a_minus: np.ndarray, a_plus: np.ndarray) -> None:
    vals[0] = e_minus
    vals[-1] = e_plus
    vals[:, 0] = a_minus
    vals[:, -1] = a_plus


def boundary_pair(hset: HeteroclinicSet):
    """The pinned (minus, plus) representatives realizing the L2 gap."""
    if hset is None:
        raise PartitionError("no heteroclinic set supplied and no explicit pair")
    if not hset.partition_ok:
        raise PartitionError(
            "the heteroclinic set does not split into two labeled families; "
            "the double-layer problem does not apply",
            found_labels=hset.labels(),
        )
    e_m, e_p = hset.representative_pair()
    return e_m, e_p


# ---------------------------------------------------------------------------
# solve


def minimize_layer(
    p: PotentialDescriptor,
    hset: Optional[HeteroclinicSet],
    grid: Grid2D,
    *,
    pair=None,
    init: Optional[Field2D] = None,
    gtol: Optional[float] = None,
    contract_tol: float = DEFAULT_TOL3,
    sigma: float = 1.0,
    max_iter: int = 200_000,
    order: int = 2,
):
    """Minimize the strip energy with clamped boundary rows/columns.

    ``pair`` overrides the boundary orbits (used for degenerate same-orbit
    runs); otherwise the set's gap-realizing representatives are used.
    Returns (field, descent info, init hash).
    """
    if pair is None:
        e_m_het, e_p_het = boundary_pair(hset)
        e_minus = _resample_member(e_m_het.path, grid.x_grid())
        e_plus = _resample_member(e_p_het.path, grid.x_grid())
    else:
        e_minus = np.asarray(pair[0], dtype=np.float64)
        e_plus = np.asarray(pair[1], dtype=np.float64)

    if init is None:
        vals = smoothstep_init(e_minus, e_plus, grid)
    else:
        if not init.grid.matches(grid):
            raise ValueError("init grid mismatch")
        vals = init.values.copy()
    _clamp_boundaries(vals, e_minus, e_plus, p.a_minus, p.a_plus)
    init_hash = hashlib.sha256(np.ascontiguousarray(vals).tobytes()).hexdigest()

    h_t, h_x = grid.h_t, grid.h_x
    if order == 2:
        energy_rows, grad = kernels.energy_rows2, kernels.grad2
        mixed = False
    else:
        energy_rows, grad = kernels.energy_rows4, kernels.grad4
        mixed = True

    def value_fn(u):
        return kernels.total(energy_rows(p, u, h_t, h_x))

    def grad_fn(u):
        return grad(p, u, h_t, h_x)

    e0 = value_fn(vals)
    target = gtol if gtol is not None else DEFAULT_INTERNAL_GTOL * (1.0 + abs(e0))
    precond = SpectralPreconditioner2D(grid.n_t, grid.n_x, h_t, h_x, sigma, mixed=mixed)

    res = descend(vals, value_fn, grad_fn, precond, target, max_iter)

    limit = contract_tol * (1.0 + abs(res.value))
    if res.grad_sup > limit:
        raise NonConvergenceError(
            f"layer gradient sup-norm {res.grad_sup:.3e} above contract {limit:.3e} "
            f"after {res.iterations} iterations",
            last_iterate=Field2D(grid, res.x),
            grad_sup=res.grad_sup,
            iterations=res.iterations,
        )
    return Field2D(grid, res.x), res, init_hash


# ---------------------------------------------------------------------------
# diagnostics


def ball_project(p: PotentialDescriptor, field: Field2D) -> Field2D:
    """Radial projection of every value onto |v| <= rho; never raises the energy."""
    if p.rho is None:
        raise UnsupportedOperation("potential carries no invariant-ball radius")
    norms = np.linalg.norm(field.values, axis=-1)
    scale = np.ones_like(norms)
    outside = norms > p.rho
    scale[outside] = p.rho / norms[outside]
    return Field2D(field.grid, field.values * scale[:, :, None])


def pde_residual(p: PotentialDescriptor, field: Field2D):
    """5-point laplacian minus grad W at interior nodes: (sup-norm, residual field)."""
    g = field.grid
    u = field.values
    res = np.zeros_like(u)
    lap = (u[2:, 1:-1] - 2.0 * u[1:-1, 1:-1] + u[:-2, 1:-1]) / (g.h_t ** 2)
    lap = lap + (u[1:-1, 2:] - 2.0 * u[1:-1, 1:-1] + u[1:-1, :-2]) / (g.h_x ** 2)
    res[1:-1, 1:-1] = lap - p.grad_raw(u[1:-1, 1:-1])
    return float(np.max(np.abs(res))), res


@dataclass
class EquipartitionProfile:
    t: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    rel_residual: np.ndarray

    @property
    def max_rel(self) -> float:
        return float(np.max(self.rel_residual)) if self.rel_residual.size else 0.0

    def as_dict(self) -> dict:
        return {"max_rel_residual": self.max_rel,
                "n_rows": int(self.t.size)}


def equipartition_profile(p: PotentialDescriptor, field: Field2D,
                          ref: ActionRef) -> EquipartitionProfile:
    """Row-wise balance: t-kinetic energy against excess row action.

    LHS_i = 1/2 int |u_t(t_i, x)|^2 dx (central difference in t), RHS_i =
    row action - min action.  The relative residual divides by
    |LHS| + |RHS| + eps; eps is floored at 1e-3 of the profile peak so rows
    whose content sits at truncation scale (both sides ~ e^{-2kT}) stay
    finite while genuine violations anywhere still read as O(1) or larger.
    """
    g = field.grid
    if not ref.grid.matches(g.x_grid()):
        raise ValueError("action reference was computed on a different x-grid")
    u = field.values
    ut = (u[2:] - u[:-2]) / (2.0 * g.h_t)
    ut2 = np.einsum("ijk,ijk->ij", ut, ut)
    xw = np.full(g.n_x, g.h_x)
    xw[0] = xw[-1] = 0.5 * g.h_x
    lhs = 0.5 * (ut2 @ xw)
    rhs = row_actions(p, field)[1:-1] - ref.value
    eps = 1e-3 * float(np.max(np.abs(lhs) + np.abs(rhs))) + 1e-12
    rel = np.abs(lhs - rhs) / (np.abs(lhs) + np.abs(rhs) + eps)
    return EquipartitionProfile(t=g.t_nodes()[1:-1], lhs=lhs, rhs=rhs, rel_residual=rel)


@dataclass
class ClassCertificate:
    """Post-hoc constrained-class check against the set's gap threshold."""

    threshold: float
    t_lower: Optional[float]
    t_upper: Optional[float]
    ok: bool
    domain_too_small: bool
    half_t_ok: bool            # distance condition holds for all |t| >= T/2
    dist_minus: np.ndarray = dc_field(repr=False, default=None)
    dist_plus: np.ndarray = dc_field(repr=False, default=None)

    def as_dict(self) -> dict:
        return {
            "threshold": self.threshold,
            "t_lower": self.t_lower,
            "t_upper": self.t_upper,
            "ok": self.ok,
            "domain_too_small": self.domain_too_small,
            "half_t_ok": self.half_t_ok,
        }


def class_certificate(field: Field2D, hset: HeteroclinicSet,
                      metric: str = "l2") -> ClassCertificate:
    """Certify d(row, F-) <= gap/4 for small t and d(row, F+) <= gap/4 for large t."""
    gap = hset.l2_gap if metric == "l2" else hset.h1_gap
    if gap is None:
        raise PartitionError("certificate needs a two-part set", hset.labels())
    threshold = gap / 4.0
    g = field.grid
    t = g.t_nodes()
    n_t = g.n_t
    dist_minus = np.empty(n_t)
    dist_plus = np.empty(n_t)
    for i in range(n_t):
        dist_minus[i] = dist_to_set(field.values[i], hset, metric, label="-")[0]
        dist_plus[i] = dist_to_set(field.values[i], hset, metric, label="+")[0]

    ok_minus = dist_minus <= threshold
    ok_plus = dist_plus <= threshold

    idx = np.nonzero(~ok_minus)[0]
    t_lower = float(t[idx[0] - 1]) if idx.size and idx[0] > 0 else (
        float(t[-1]) if not idx.size else None)
    idx = np.nonzero(~ok_plus)[0]
    t_upper = float(t[idx[-1] + 1]) if idx.size and idx[-1] < n_t - 1 else (
        float(t[0]) if not idx.size else None)

    ok = t_lower is not None and t_upper is not None and t_lower < t_upper
    half = 0.5 * g.half_length_t
    half_t_ok = bool(np.all(ok_minus[t <= -half]) and np.all(ok_plus[t >= half]))
    domain_too_small = not (np.any(ok_minus[t <= -half]) and np.any(ok_plus[t >= half]))
    return ClassCertificate(
        threshold=threshold,
        t_lower=t_lower,
        t_upper=t_upper,
        ok=bool(ok),
        domain_too_small=bool(domain_too_small),
        half_t_ok=half_t_ok,
        dist_minus=dist_minus,
        dist_plus=dist_plus,
    )


@dataclass
class LayerDecayFits:
    t_minus: DecayFit
    t_plus: DecayFit
    x_minus: DecayFit
    x_plus: DecayFit

    def all_ok(self) -> bool:
        return all(f.ok and f.k > 0 for f in
                   (self.t_minus, self.t_plus, self.x_minus, self.x_plus))

    def as_dict(self) -> dict:
        return {"t_minus": self.t_minus.as_dict(), "t_plus": self.t_plus.as_dict(),
                "x_minus": self.x_minus.as_dict(), "x_plus": self.x_plus.as_dict()}


def _h1_row_distance(row: np.ndarray, target: np.ndarray, h_x: float) -> float:
    d = row - target
    w = np.full(row.shape[0], h_x)
    w[0] = w[-1] = 0.5 * h_x
    l2 = float(np.einsum("j,jk,jk->", w, d, d))
    dd = (d[1:] - d[:-1]) / h_x
    return math.sqrt(l2 + h_x * float(np.einsum("jk,jk->", dd, dd)))


def layer_decay_fit(field: Field2D, e_minus: np.ndarray, e_plus: np.ndarray,
                    a_minus: np.ndarray, a_plus: np.ndarray) -> LayerDecayFits:
    """Exponential tail fits of the layer.

    In t: H1-in-x distance of each row to the boundary orbit, fitted on
    [T/2, T-1] and its mirror.  In x: sup over t of the pointwise distance to
    each well, fitted on [L/2, L-1] and its mirror.
    """
    g = field.grid
    t = g.t_nodes()
    x = g.x_nodes()
    T, L = g.half_length_t, g.half_length_x

    mask = (t >= T / 2.0) & (t <= T - 1.0)
    d = np.array([_h1_row_distance(field.values[i], e_plus, g.h_x)
                  for i in np.nonzero(mask)[0]])
    t_plus = _fit_tail(t[mask], d, "right")

    mask = (t <= -T / 2.0) & (t >= -(T - 1.0))
    d = np.array([_h1_row_distance(field.values[i], e_minus, g.h_x)
                  for i in np.nonzero(mask)[0]])
    t_minus = _fit_tail(t[mask], d, "left")

    mask = (x >= L / 2.0) & (x <= L - 1.0)
    prof = np.max(np.linalg.norm(field.values - a_plus[None, None, :], axis=-1), axis=0)
    x_plus = _fit_tail(x[mask], prof[mask], "right")

    mask = (x <= -L / 2.0) & (x >= -(L - 1.0))
    prof = np.max(np.linalg.norm(field.values - a_minus[None, None, :], axis=-1), axis=0)
    x_minus = _fit_tail(x[mask], prof[mask], "left")

    return LayerDecayFits(t_minus=t_minus, t_plus=t_plus, x_minus=x_minus, x_plus=x_plus)


def reflect_layer(field: Field2D, component: int = 1) -> Field2D:
    """Mirror image: t -> -t combined with negating one component."""
    vals = field.values[::-1].copy()
    vals[:, :, component] = -vals[:, :, component]
    return Field2D(field.grid, vals)
