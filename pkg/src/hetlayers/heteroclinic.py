"""Minimal connecting orbits of v'' = grad W(v) on a truncated grid.

An orbit is found by minimizing the discrete action

    sum_j h [ 1/2 |(v_{j+1}-v_j)/h|^2 + (W(v_j)+W(v_{j+1}))/2 ]

over paths clamped to the wells at x = +-L; translations are removed by
shifting the zero of the well-axis projection to x = 0.  A multistart build
collects the distinct minimizers into a labeled set with its action minimum
and the translation-minimized distances between the two labeled parts.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

from . import kernels
from .descent import SpectralPreconditioner1D, descend
from .errors import NonConvergenceError, PinningError
from .grids import Grid1D
from .potential import PotentialDescriptor

DEFAULT_CONTRACT_GTOL = 1e-8       # contract: grad sup <= this * max(1, |J|)
DEFAULT_INTERNAL_GTOL = 1e-12      # internal stop target, same scaling
DEFAULT_ACTION_TOL = 1e-6          # tol for membership in the minimal set
DEFAULT_DEDUP_TOL = 1e-3           # L2 distance under which two orbits are one
AXIS_TOL = 1e-8                    # |u2| below this counts as on-axis


@dataclass
class Path1D:
    """Discrete curve R -> R^m sampled on a uniform grid."""

    grid: Grid1D
    values: np.ndarray
    clamped: bool = True

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape[0] != self.grid.n or self.values.ndim != 2:
            raise ValueError("path values must have shape (grid.n, m)")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("path values must be finite")

    @property
    def m(self) -> int:
        return self.values.shape[1]

    def copy(self) -> "Path1D":
        return Path1D(self.grid, self.values.copy(), self.clamped)


@dataclass(frozen=True)
class DecayFit:
    """Log-linear tail fit |v(x) - well| ~ K exp(-k |x|)."""

    k: float
    K: float
    residual: float
    n_points: int
    ok: bool
    side: str

    def as_dict(self) -> dict:
        return {"k": self.k, "K": self.K, "residual": self.residual,
                "n_points": self.n_points, "ok": self.ok, "side": self.side}


@dataclass
class Heteroclinic:
    """A converged, pinned connecting orbit with its diagnostics."""

    path: Path1D
    action: float
    grad_sup: float
    iterations: int
    decay_left: Optional[DecayFit] = None
    decay_right: Optional[DecayFit] = None
    first_integral: float = float("nan")
    label: Optional[str] = None


@dataclass(frozen=True)
class ActionRef:
    """An action minimum bound to the grid and quadrature it was computed on."""

    value: float
    grid: Grid1D


@dataclass
class HeteroclinicSet:
    """The set of minimal connecting orbits with its two-part labeling."""

    potential_name: str
    grid: Grid1D
    members: list
    min_action: float
    l2_gap: Optional[float] = None
    h1_gap: Optional[float] = None
    gap_pair: Optional[tuple] = None
    partition_ok: bool = False
    notes: tuple = ()

    def labels(self) -> list:
        return [m.label for m in self.members]

    def members_with(self, label: str) -> list:
        return [m for m in self.members if m.label == label]

    def action_ref(self) -> ActionRef:
        return ActionRef(self.min_action, self.grid)

    def representative_pair(self):
        """The (minus, plus) members realizing the L2 gap."""
        if not self.partition_ok or self.gap_pair is None:
            return None
        i, j = self.gap_pair
        return self.members[i], self.members[j]


# ---------------------------------------------------------------------------
# action and gradient


def discrete_action(p: PotentialDescriptor, path: Path1D) -> float:
    """Discrete action of the path (exact energy of its linear interpolant)."""
    return kernels.total(kernels.action_cells(p, path.values, path.grid.h))


def action_gradient(p: PotentialDescriptor, path: Path1D) -> np.ndarray:
    """Gradient of the discrete action w.r.t. interior nodes; zero at the ends."""
    return kernels.action_grad(p, path.values, path.grid.h)


# ---------------------------------------------------------------------------
# initial profiles


def segment_profile(p: PotentialDescriptor, grid: Grid1D) -> Path1D:
    """Baseline ramp: a- below x=-1, affine on [-1, 1], a+ above x=1."""
    x = grid.nodes()
    s = np.clip((x + 1.0) * 0.5, 0.0, 1.0)
    vals = p.a_minus[None, :] + s[:, None] * (p.a_plus - p.a_minus)[None, :]
    vals[0] = p.a_minus
    vals[-1] = p.a_plus
    return Path1D(grid, vals)


def bumped_profile(p: PotentialDescriptor, grid: Grid1D, amplitude: float,
                   component: int = 1) -> Path1D:
    """Segment profile plus a Gaussian bump pushing one component off axis."""
    path = segment_profile(p, grid)
    x = grid.nodes()
    path.values[:, component] += amplitude * np.exp(-0.5 * x * x)
    path.values[0] = p.a_minus
    path.values[-1] = p.a_plus
    return path


def default_multistart(p: PotentialDescriptor, grid: Grid1D,
                       bump_amplitude: float = 1.0) -> list:
    """Segment start, plus +-bumped starts for symmetric planar potentials."""
    starts = [("segment", segment_profile(p, grid))]
    if p.m == 2 and p.u2_symmetric:
        starts.append(("bump+", bumped_profile(p, grid, +bump_amplitude)))
        starts.append(("bump-", bumped_profile(p, grid, -bump_amplitude)))
    return starts


# ---------------------------------------------------------------------------
# translation pinning


def _axis_projection(path: Path1D) -> np.ndarray:
    a_minus = path.values[0]
    a_plus = path.values[-1]
    direction = a_plus - a_minus
    l0 = float(np.linalg.norm(direction))
    if l0 == 0.0:
        raise PinningError("path endpoints coincide; no well axis")
    direction = direction / l0
    mid = 0.5 * (a_minus + a_plus)
    return (path.values - mid) @ direction


def translated_values(values: np.ndarray, grid: Grid1D, tau: float) -> np.ndarray:
    """Sample v(x + tau) on the grid; constant extension past the ends."""
    x = grid.nodes()
    out = np.empty_like(values)
    for k in range(values.shape[1]):
        out[:, k] = np.interp(x + tau, x, values[:, k])
    return out


def pin_translation(path: Path1D) -> Path1D:
    """Shift the path so the well-axis projection crosses zero at x = 0."""
    proj = _axis_projection(path)
    sign_change = np.nonzero((proj[:-1] <= 0.0) & (proj[1:] > 0.0))[0]
    if sign_change.size == 0:
        raise PinningError("no sign change of the axis projection")
    x = path.grid.nodes()
    # crossing nearest the origin, per the monotone-near-crossing contract
    j = sign_change[np.argmin(np.abs(x[sign_change]))]
    denom = proj[j + 1] - proj[j]
    root = x[j] if denom == 0.0 else x[j] - proj[j] * path.grid.h / denom
    vals = translated_values(path.values, path.grid, root)
    vals[0] = path.values[0]
    vals[-1] = path.values[-1]
    return Path1D(path.grid, vals, path.clamped)


# ---------------------------------------------------------------------------
# solver


def _check_clamped(p: PotentialDescriptor, path: Path1D) -> None:
    if not (np.array_equal(path.values[0], p.a_minus)
            and np.array_equal(path.values[-1], p.a_plus)):
        raise ValueError("path must be clamped to the wells at the grid ends")


def minimize_heteroclinic(
    p: PotentialDescriptor,
    grid: Grid1D,
    init: Path1D,
    *,
    gtol: Optional[float] = None,
    contract_gtol: float = DEFAULT_CONTRACT_GTOL,
    max_iter: int = 100_000,
    sigma: Optional[float] = None,
    pin: bool = True,
) -> Heteroclinic:
    """Minimize the discrete action from ``init``; returns the pinned orbit.

    The internal stop target is far below the contract tolerance so that
    downstream identities hold to their stated accuracy; the contract itself
    (grad sup-norm <= contract_gtol * max(1, |J|)) is what is enforced.
    """
    if not init.grid.matches(grid):
        raise ValueError("init grid does not match the requested grid")
    _check_clamped(p, init)

    h = grid.h
    sigma = sigma if sigma is not None else max(p.c, 0.1)
    precond = SpectralPreconditioner1D(grid.n, h, sigma)

    j0 = kernels.total(kernels.action_cells(p, init.values, h))
    target = gtol if gtol is not None else DEFAULT_INTERNAL_GTOL * max(1.0, abs(j0))

    def value_fn(v):
        return kernels.total(kernels.action_cells(p, v, h))

    def grad_fn(v):
        return kernels.action_grad(p, v, h)

    res = descend(init.values, value_fn, grad_fn, precond, target, max_iter)
    iterations = res.iterations
    vals = res.x

    if pin:
        for _ in range(3):
            pinned = pin_translation(Path1D(grid, vals))
            vals = pinned.values
            res = descend(vals, value_fn, grad_fn, precond, target, max_iter)
            vals = res.x
            iterations += res.iterations
            if abs(float(np.interp(0.0, grid.nodes(),
                                   _axis_projection(Path1D(grid, vals))))) <= 1e-9:
                break

    action = value_fn(vals)
    limit = contract_gtol * max(1.0, abs(action))
    if res.grad_sup > limit:
        raise NonConvergenceError(
            f"gradient sup-norm {res.grad_sup:.3e} above contract {limit:.3e} "
            f"after {iterations} iterations",
            last_iterate=Path1D(grid, vals),
            grad_sup=res.grad_sup,
            iterations=iterations,
        )

    path = Path1D(grid, vals)
    het = Heteroclinic(
        path=path,
        action=action,
        grad_sup=res.grad_sup,
        iterations=iterations,
        first_integral=first_integral_residual(p, path),
    )
    het.decay_left, het.decay_right = fit_decay(path)
    return het


def first_integral_residual(p: PotentialDescriptor, path: Path1D) -> float:
    """sup over interior nodes of | 1/2 |v'|^2 - W(v) | with central differences."""
    v = path.values
    h = path.grid.h
    dv = (v[2:] - v[:-2]) / (2.0 * h)
    kin = 0.5 * np.einsum("jk,jk->j", dv, dv)
    return float(np.max(np.abs(kin - p.w_raw(v[1:-1]))))


# ---------------------------------------------------------------------------
# tail decay fits


def _fit_tail(x: np.ndarray, dist: np.ndarray, side: str) -> DecayFit:
    usable = dist > 1e-13
    n_pts = int(np.count_nonzero(usable))
    if n_pts < 5:
        return DecayFit(k=float("nan"), K=float("nan"), residual=float("nan"),
                        n_points=n_pts, ok=False, side=side)
    xs = x[usable]
    ys = np.log(dist[usable])
    slope, intercept = np.polyfit(xs, ys, 1)
    k = -slope if side == "right" else slope
    resid = float(np.sqrt(np.mean((intercept + slope * xs - ys) ** 2)))
    return DecayFit(k=float(k), K=float(np.exp(intercept)), residual=resid,
                    n_points=n_pts, ok=True, side=side)


def fit_decay(path: Path1D, window: Optional[tuple] = None):
    """Fit exponential tail rates toward each well.

    Windows default to [L/2, L-1] on the right and its mirror on the left.
    Returns (left, right) fits; a fit with too few usable points (tail
    underflow) comes back with ok=False.
    """
    L = path.grid.half_length
    lo, hi = window if window is not None else (L / 2.0, L - 1.0)
    x = path.grid.nodes()
    a_minus, a_plus = path.values[0], path.values[-1]

    right_mask = (x >= lo) & (x <= hi)
    dist_right = np.linalg.norm(path.values[right_mask] - a_plus, axis=1)
    right = _fit_tail(x[right_mask], dist_right, "right")

    left_mask = (x >= -hi) & (x <= -lo)
    dist_left = np.linalg.norm(path.values[left_mask] - a_minus, axis=1)
    left = _fit_tail(x[left_mask], dist_left, "left")
    return left, right


# ---------------------------------------------------------------------------
# distances under translation


def path_distance(u: np.ndarray, v: np.ndarray, grid: Grid1D, metric: str = "l2") -> float:
    """Discrete L2 or H1 distance between two sampled paths."""
    h = grid.h
    d = u - v
    w = np.full(grid.n, h)
    w[0] = w[-1] = 0.5 * h
    l2sq = float(np.einsum("j,jk,jk->", w, d, d))
    if metric == "l2":
        return np.sqrt(l2sq)
    if metric == "h1":
        dd = (d[1:] - d[:-1]) / h
        return np.sqrt(l2sq + h * float(np.einsum("jk,jk->", dd, dd)))
    raise ValueError(f"unknown metric {metric!r}")


def min_translation_distance(
    u: np.ndarray,
    e: np.ndarray,
    grid: Grid1D,
    metric: str = "l2",
    tau_half: Optional[float] = None,
    refine_tol: float = 1e-6,
):
    """min over tau of ||u - e(. - tau)||, coarse scan then golden-section.

    Returns (distance, tau).  The search range is |tau| <= L/2 by default.
    """
    L = grid.half_length
    tau_half = tau_half if tau_half is not None else L / 2.0
    coarse = 10.0 * grid.h

    def dist_at(tau: float) -> float:
        return path_distance(u, translated_values(e, grid, -tau), grid, metric)

    taus = np.arange(-tau_half, tau_half + 0.5 * coarse, coarse)
    vals = np.array([dist_at(t) for t in taus])
    k = int(np.argmin(vals))
    lo = taus[max(k - 1, 0)]
    hi = taus[min(k + 1, len(taus) - 1)]

    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = dist_at(c), dist_at(d)
    while b - a > refine_tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = dist_at(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = dist_at(d)
    tau = 0.5 * (a + b)
    return dist_at(tau), tau


# ---------------------------------------------------------------------------
# set construction


def _label_member(het: Heteroclinic, labeler: Optional[Callable]) -> str:
    if labeler is not None:
        return labeler(het)
    u2 = het.path.values[:, 1] if het.path.m >= 2 else np.zeros(1)
    peak = u2[np.argmax(np.abs(u2))]
    if abs(peak) <= AXIS_TOL:
        return "-"
    return "+" if peak > 0 else "-"


def build_heteroclinic_set(
    p: PotentialDescriptor,
    grid: Grid1D,
    multistart: Optional[Sequence] = None,
    *,
    labeler: Optional[Callable] = None,
    dedup_tol: float = DEFAULT_DEDUP_TOL,
    action_tol: float = DEFAULT_ACTION_TOL,
    bump_amplitude: float = 1.0,
    max_iter: int = 100_000,
) -> HeteroclinicSet:
    """Run the multistart solves and assemble the labeled minimal set.

    Results are deduplicated by pinned L2 distance, members above
    min_action + action_tol are dropped, and when both labels appear the
    translation-minimized L2/H1 gaps between the parts are computed.
    A one-sided outcome is reported (partition_ok=False), not raised.
    """
    starts = list(multistart) if multistart is not None else default_multistart(
        p, grid, bump_amplitude)

    solved = []
    for name, init in starts:
        het = minimize_heteroclinic(p, grid, init, max_iter=max_iter)
        solved.append((name, het))

    members: list = []
    for name, het in solved:
        duplicate = False
        for other in members:
            if path_distance(het.path.values, other.path.values, grid, "l2") <= dedup_tol:
                duplicate = True
                break
        if not duplicate:
            members.append(het)

    min_action = min(h.action for h in members)
    members = [h for h in members if h.action <= min_action + action_tol]
    for h in members:
        h.label = _label_member(h, labeler)

    notes = ["continuum_limitation: dedup cannot distinguish non-translation continua"]
    minus = [i for i, h in enumerate(members) if h.label == "-"]
    plus = [i for i, h in enumerate(members) if h.label == "+"]
    partition_ok = bool(minus and plus)

    l2_gap = h1_gap = None
    gap_pair = None
    if partition_ok:
        best = np.inf
        for i in minus:
            for j in plus:
                d, _ = min_translation_distance(
                    members[i].path.values, members[j].path.values, grid, "l2")
                if d < best:
                    best, gap_pair = d, (i, j)
        l2_gap = float(best)
        i, j = gap_pair
        h1_gap = float(min_translation_distance(
            members[i].path.values, members[j].path.values, grid, "h1")[0])
    else:
        notes.append(f"partition failure: labels found {sorted(set(h.label for h in members))}")

    return HeteroclinicSet(
        potential_name=p.name,
        grid=grid,
        members=members,
        min_action=float(min_action),
        l2_gap=l2_gap,
        h1_gap=h1_gap,
        gap_pair=gap_pair,
        partition_ok=partition_ok,
        notes=tuple(notes),
    )
