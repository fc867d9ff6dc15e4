"""Excess action of curves over the action minimum, and distances to the minimal set.

The excess action (action minus its minimum over connecting paths) vanishes
exactly on the minimal orbits and plays the role of a potential for the
strip problems.  Its quadratic expansion around a minimal orbit and its
Frechet derivative are evaluated with the same quadrature as the action, so
the algebraic identities between the two routes hold to roundoff.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import math

import numpy as np

from .errors import InternalConsistencyError
from .grids import Grid1D
from .heteroclinic import (
    ActionRef,
    Heteroclinic,
    HeteroclinicSet,
    Path1D,
    discrete_action,
    min_translation_distance,
    segment_profile,
)
from .potential import PotentialDescriptor

DEFAULT_TOL2 = 1e-6
ENDPOINT_TOL = 1e-10


def baseline_profile(p: PotentialDescriptor, grid: Grid1D) -> Path1D:
    """The fixed affine ramp between the wells (constant outside [-1, 1])."""
    return segment_profile(p, grid)


@dataclass
class AffineCurvePoint:
    """A path read as baseline + square-integrable offset; caches its excess action."""

    path: Path1D
    baseline: Path1D
    excess: Optional[float] = None

    def __post_init__(self):
        if not self.path.grid.matches(self.baseline.grid):
            raise ValueError("path and baseline live on different grids")
        dev = max(
            float(np.linalg.norm(self.path.values[0] - self.baseline.values[0])),
            float(np.linalg.norm(self.path.values[-1] - self.baseline.values[-1])),
        )
        if dev > ENDPOINT_TOL:
            raise ValueError("offset from the baseline must vanish at the grid ends")

    def offset(self) -> np.ndarray:
        return self.path.values - self.baseline.values


def _check_grid(path: Path1D, grid: Grid1D, what: str) -> None:
    if not path.grid.matches(grid):
        raise ValueError(f"{what}: grid mismatch (value computed on a different grid)")


def _check_endpoints(p: PotentialDescriptor, path: Path1D) -> None:
    if (np.linalg.norm(path.values[0] - p.a_minus) > ENDPOINT_TOL
            or np.linalg.norm(path.values[-1] - p.a_plus) > ENDPOINT_TOL):
        raise ValueError("path must be clamped to the wells at the grid ends")


def excess_action(
    p: PotentialDescriptor,
    path: Path1D,
    ref: ActionRef,
    tol: float = DEFAULT_TOL2,
) -> float:
    """Action of the path minus the grid-matched action minimum; clamped at 0.

    A value below -tol means the reference minimum was not minimal on this
    grid and raises InternalConsistencyError.  Mixing grids is an error: the
    discretization bias only cancels when both sides share one quadrature.
    """
    _check_grid(path, ref.grid, "excess_action")
    _check_endpoints(p, path)
    val = discrete_action(p, path) - ref.value
    if val < -tol:
        raise InternalConsistencyError(
            f"excess action {val:.3e} below -{tol:.1e}; reference minimum is not minimal")
    return max(val, 0.0)


def excess_action_expanded(
    p: PotentialDescriptor,
    path: Path1D,
    around: Heteroclinic,
) -> float:
    """Excess action via the expansion around a minimal orbit e:

        int [ 1/2 |u' - e'|^2 + W(u) - W(e) - grad W(e) . (u - e) ]

    evaluated with the action's own quadrature.  Must agree with
    :func:`excess_action` up to quadrature-consistency tolerance.
    """
    _check_grid(path, around.path.grid, "excess_action_expanded")
    grid = path.grid
    h = grid.h
    u = path.values
    e = around.path.values

    du = (u[1:] - u[:-1]) / h
    de = (e[1:] - e[:-1]) / h
    diff = du - de
    kin_cells = 0.5 * h * np.einsum("jk,jk->j", diff, diff)

    nodes = p.w_raw(u) - p.w_raw(e) - np.einsum("jk,jk->j", p.grad_raw(e), u - e)
    weights = np.full(grid.n, h)
    weights[0] = weights[-1] = 0.5 * h
    return math.fsum(np.concatenate([kin_cells, weights * nodes]))


def frechet_apply(
    p: PotentialDescriptor,
    path: Path1D,
    direction: np.ndarray,
) -> float:
    """Directional derivative of the excess action: int [u'.h' + grad W(u).h].

    The direction must vanish at the grid ends.
    """
    direction = np.asarray(direction, dtype=np.float64)
    if direction.shape != path.values.shape:
        raise ValueError("direction must match the path shape")
    if (np.linalg.norm(direction[0]) > 1e-12
            or np.linalg.norm(direction[-1]) > 1e-12):
        raise ValueError("direction must vanish at the grid ends")
    grid = path.grid
    h = grid.h
    u = path.values
    du = (u[1:] - u[:-1]) / h
    dh = (direction[1:] - direction[:-1]) / h
    kin = h * np.einsum("jk,jk->j", du, dh)
    node = np.einsum("jk,jk->j", p.grad_raw(u), direction)
    weights = np.full(grid.n, h)
    weights[0] = weights[-1] = 0.5 * h
    return math.fsum(np.concatenate([kin, weights * node]))


def dist_to_set(
    u: Path1D | np.ndarray,
    hset: HeteroclinicSet,
    metric: str = "l2",
    label: Optional[str] = None,
):
    """Distance of a path to the minimal set under the chosen metric.

    Minimizes over members (optionally one label) and over relative
    translation.  Returns (distance, member index, optimal translation).
    """
    if not hset.members:
        raise ValueError("empty heteroclinic set")
    values = u.values if isinstance(u, Path1D) else np.asarray(u, dtype=np.float64)
    grid = hset.grid
    if values.shape[0] != grid.n:
        raise ValueError("path is sampled on a different grid than the set")

    best = (np.inf, -1, 0.0)
    for idx, member in enumerate(hset.members):
        if label is not None and member.label != label:
            continue
        d, tau = min_translation_distance(values, member.path.values, grid, metric)
        if d < best[0]:
            best = (d, idx, tau)
    if best[1] < 0:
        raise ValueError(f"no members with label {label!r}")
    return best
