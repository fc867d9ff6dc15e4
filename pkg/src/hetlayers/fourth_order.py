"""Fourth-order double layers: u_ttxx = laplacian u - grad W(u) in weak form.

The energy adds the squared mixed difference (exact mixed derivative of the
bilinear interpolant) to the second-order strip energy.  The minimizer is
checked against the weak formulation with twice-differentiable test bumps
rather than a pointwise fourth-order stencil: only a weak solution is
claimed.  Boundary clamping and diagnostics mirror the second-order layer,
with H1 row distances and the gap measured in the H1 metric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .effective import dist_to_set
from .errors import PartitionError
from .grids import Grid2D
from .heteroclinic import ActionRef, HeteroclinicSet
from .layer2d import (
    Field2D,
    LayerDecayFits,
    _h1_row_distance,
    class_certificate,
    layer_decay_fit,
    minimize_layer,
    row_actions,
)
from .potential import PotentialDescriptor


@dataclass
class Field2D4(Field2D):
    """Field with cell-centered mixed differences cached on demand."""

    _utx: Optional[np.ndarray] = None

    def mixed_diffs(self) -> np.ndarray:
        if self._utx is None or self._utx.shape[0] != self.grid.n_t - 1:
            g = self.grid
            u = self.values
            self._utx = (u[1:, 1:] - u[1:, :-1] - u[:-1, 1:] + u[:-1, :-1]) / (g.h_t * g.h_x)
        return self._utx


def strip_energy4(p: PotentialDescriptor, field: Field2D) -> float:
    """Energy with the mixed term: int 1/2(|u_tx|^2 + |grad u|^2) + W."""
    g = field.grid
    return kernels.total(kernels.energy_rows4(p, field.values, g.h_t, g.h_x))


def renormalized_action4(p: PotentialDescriptor, field: Field2D, ref: ActionRef) -> float:
    """Row-wise H1-metric action: t-kinetic term carries |u_t|^2 + |u_tx|^2.

    Equals strip_energy4 - 2T * min_action up to roundoff (independent sweeps).
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
    kin_t = 0.5 * h_t * (dt2 @ xw)

    utx = (u[1:, 1:] - u[1:, :-1] - u[:-1, 1:] + u[:-1, :-1]) / (h_t * h_x)
    utx2 = np.einsum("ijk,ijk->ij", utx, utx)
    kin_tx = 0.5 * h_t * h_x * utx2.sum(axis=1)

    tw = np.full(g.n_t, h_t)
    tw[0] = tw[-1] = 0.5 * h_t
    pot_terms = tw * (row_actions(p, field) - ref.value)

    return math.fsum(np.concatenate([kin_t, kin_tx, pot_terms]))


def minimize_layer4(
    p: PotentialDescriptor,
    hset: Optional[HeteroclinicSet],
    grid: Grid2D,
    *,
    pair=None,
    init: Optional[Field2D] = None,
    gtol: Optional[float] = None,
    sigma: float = 1.0,
    max_iter: int = 200_000,
):
    """Minimize the fourth-order strip energy; the set must split in the H1 metric."""
    if pair is None and hset is not None:
        if not hset.partition_ok or hset.h1_gap is None or not hset.h1_gap > 0:
            raise PartitionError(
                "fourth-order layer needs the set partitioned with a positive H1 gap",
                found_labels=hset.labels() if hset else (),
            )
    field, res, init_hash = minimize_layer(
        p, hset, grid, pair=pair, init=init, gtol=gtol,
        sigma=sigma, max_iter=max_iter, order=4,
    )
    return Field2D4(field.grid, field.values), res, init_hash


def weak_residual(p: PotentialDescriptor, field: Field2D, tests) -> float:
    """max over tests of | int u_tx . phi_tx + grad u . grad phi + grad W(u) . phi |.

    Cell quadrature: mixed differences and bilinear cell-average gradients for
    u, analytic derivatives of the test bumps at cell centers.
    """
    g = field.grid
    u = field.values
    h_t, h_x = g.h_t, g.h_x
    worst = 0.0
    for b in tests:
        b.check_interior(g, 2)
        i0, i1, j0, j1 = b.node_box(g)
        sub = u[i0:i1 + 1, j0:j1 + 1]
        utx = (sub[1:, 1:] - sub[1:, :-1] - sub[:-1, 1:] + sub[:-1, :-1]) / (h_t * h_x)
        dt = (sub[1:] - sub[:-1]) / h_t
        ut = 0.5 * (dt[:, 1:] + dt[:, :-1])
        dx = (sub[:, 1:] - sub[:, :-1]) / h_x
        ux = 0.5 * (dx[1:] + dx[:-1])
        uc = 0.25 * ((sub[:-1, :-1] + sub[1:, :-1]) + (sub[:-1, 1:] + sub[1:, 1:]))
        gw = p.grad_raw(uc)

        tc = g.t_nodes()[i0:i1] + 0.5 * h_t
        xc = g.x_nodes()[j0:j1] + 0.5 * h_x
        phi, phi_t, phi_x, phi_tx = b.partials(tc, xc)

        integrand = (
            np.einsum("ijk,ijk->", utx, phi_tx)
            + np.einsum("ijk,ijk->", ut, phi_t)
            + np.einsum("ijk,ijk->", ux, phi_x)
            + np.einsum("ijk,ijk->", gw, phi)
        )
        worst = max(worst, abs(h_t * h_x * float(integrand)))
    return worst


@dataclass
class EquipartitionProfile4:
    t: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    rel_residual: np.ndarray

    @property
    def max_rel(self) -> float:
        return float(np.max(self.rel_residual)) if self.rel_residual.size else 0.0

    def as_dict(self) -> dict:
        return {"max_rel_residual": self.max_rel, "n_rows": int(self.t.size)}


def equipartition_profile4(p: PotentialDescriptor, field: Field2D,
                           ref: ActionRef) -> EquipartitionProfile4:
    """Row balance with the H1 kinetic reading: 1/2 int |u_t|^2 + |u_tx|^2 dx."""
    g = field.grid
    if not ref.grid.matches(g.x_grid()):
        raise ValueError("action reference was computed on a different x-grid")
    u = field.values
    h_t, h_x = g.h_t, g.h_x

    ut = (u[2:] - u[:-2]) / (2.0 * h_t)
    ut2 = np.einsum("ijk,ijk->ij", ut, ut)
    xw = np.full(g.n_x, h_x)
    xw[0] = xw[-1] = 0.5 * h_x
    lhs = 0.5 * (ut2 @ xw)

    # central-in-t, cell-centered-in-x mixed derivative at interior rows
    dx = (u[:, 1:] - u[:, :-1]) / h_x
    utx = (dx[2:] - dx[:-2]) / (2.0 * h_t)
    utx2 = np.einsum("ijk,ijk->ij", utx, utx)
    lhs = lhs + 0.5 * h_x * utx2.sum(axis=1)

    rhs = row_actions(p, field)[1:-1] - ref.value
    eps = 1e-12 * (1.0 + float(np.max(np.abs(lhs) + np.abs(rhs))))
    rel = np.abs(lhs - rhs) / (np.abs(lhs) + np.abs(rhs) + eps)
    return EquipartitionProfile4(t=g.t_nodes()[1:-1], lhs=lhs, rhs=rhs, rel_residual=rel)


@dataclass
class UniformTailCheck:
    """Uniform-in-t x-decay: sup over all rows at the fit window's far edge."""

    x_at: float
    sup_value: float
    fitted_bound: float

    @property
    def ok(self) -> bool:
        return self.sup_value <= 1.5 * self.fitted_bound

    def as_dict(self) -> dict:
        return {"x_at": self.x_at, "sup_value": self.sup_value,
                "fitted_bound": self.fitted_bound, "ok": self.ok}


def layer_decay_fit4(field: Field2D, e_minus: np.ndarray, e_plus: np.ndarray,
                     a_minus: np.ndarray, a_plus: np.ndarray):
    """H1 t-tail fits plus the uniform-in-t check of the x-tail bound."""
    fits = layer_decay_fit(field, e_minus, e_plus, a_minus, a_plus)
    g = field.grid
    x = g.x_nodes()
    j = int(np.argmin(np.abs(x - (g.half_length_x - 1.0))))
    sup_val = float(np.max(np.linalg.norm(
        field.values[:, j] - a_plus[None, :], axis=-1)))
    xf = fits.x_plus
    bound = xf.K * math.exp(-xf.k * x[j]) if xf.ok else float("nan")
    return fits, UniformTailCheck(x_at=float(x[j]), sup_value=sup_val, fitted_bound=bound)
