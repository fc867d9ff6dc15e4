"""Vector double-well potentials with exact gradients and Hessian quadratic forms.

A potential is described by a :class:`PotentialDescriptor` holding the two
wells, nondegeneracy constants, and vectorized evaluators for W, its gradient,
and the quadratic form of its Hessian.  Two builtin families are provided:

* ``decoupled_quartic``: W = 1/4 (1 - u1^2)^2 + 1/2 u2^2, wells (+-1, 0).
  Admits the closed-form connecting orbit (tanh(x/sqrt(2)), 0).
* ``elliptic_well``: W = 1/4 (u1^2 - 1)^2 + 1/2 (u2^2 - a(1 - u1^2))^2
  + mu/2 u2^2, wells (+-1, 0), symmetric in u2.  For the default (a=2,
  mu=0.1) the straight on-axis connection is not minimal and two mirror
  off-axis connections appear.

User potentials plug in by constructing a descriptor with their own
vectorized evaluators (``pot_id=-1``); those always run on the numpy kernel
backend.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

POT_QUARTIC = 1
POT_ELLIPTIC = 2


@dataclass(frozen=True)
class PotentialDescriptor:
    """A double-well potential W on R^m.

    Fields
    ------
    m : dimension (>= 2)
    a_minus, a_plus : the two wells, W(a-) = W(a+) = 0
    r : radius of the balls around the wells on which the Hessian bound is claimed
    c : claimed convexity lower bound on those balls (measured, not trusted)
    rho : optional invariant-ball radius for the radial growth condition
    pot_id : builtin kernel id (>= 0) or -1 for plug-in potentials
    params : numeric parameters consumed by the fast kernels
    u2_symmetric : True when W(u1, u2) = W(u1, -u2) exactly
    """

    name: str
    m: int
    a_minus: np.ndarray
    a_plus: np.ndarray
    r: float
    c: float
    rho: Optional[float]
    pot_id: int
    params: np.ndarray
    u2_symmetric: bool
    _w: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    _grad: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    _hess_quad: Callable[[np.ndarray, np.ndarray], np.ndarray] = field(repr=False)

    # -- raw evaluators (no input validation; used by the kernels) --

    def w_raw(self, u: np.ndarray) -> np.ndarray:
        return self._w(np.asarray(u, dtype=np.float64))

    def grad_raw(self, u: np.ndarray) -> np.ndarray:
        return self._grad(np.asarray(u, dtype=np.float64))

    # -- checked evaluators --

    def w(self, u: np.ndarray) -> np.ndarray:
        """Evaluate W(u); u has shape (..., m)."""
        u = np.asarray(u, dtype=np.float64)
        _check_point(u, self.m)
        return self._w(u)

    def grad(self, u: np.ndarray) -> np.ndarray:
        """Exact gradient of W at u."""
        u = np.asarray(u, dtype=np.float64)
        _check_point(u, self.m)
        return self._grad(u)

    def hessian_quadform(self, u: np.ndarray, nu: np.ndarray) -> np.ndarray:
        """Quadratic form sum_ij d2W/du_i du_j nu_i nu_j for a unit vector nu."""
        u = np.asarray(u, dtype=np.float64)
        nu = np.asarray(nu, dtype=np.float64)
        _check_point(u, self.m)
        norms = np.sqrt(np.sum(nu * nu, axis=-1))
        if not np.all(np.abs(norms - 1.0) <= 1e-12):
            raise ValueError("hessian_quadform requires unit directions (|nu| = 1 within 1e-12)")
        return self._hess_quad(u, nu)


def _check_point(u: np.ndarray, m: int) -> None:
    if u.shape[-1] != m:
        raise ValueError(f"expected points in R^{m}, got trailing dimension {u.shape[-1]}")
    if not np.all(np.isfinite(u)):
        raise ValueError("non-finite input point")


def decoupled_quartic() -> PotentialDescriptor:
    """W = 1/4 (1 - u1^2)^2 + 1/2 u2^2 with wells (+-1, 0)."""

    def w(u):
        q = 1.0 - u[..., 0] ** 2
        return 0.25 * q * q + 0.5 * u[..., 1] ** 2

    def grad(u):
        g = np.empty_like(u)
        g[..., 0] = u[..., 0] ** 3 - u[..., 0]
        g[..., 1] = u[..., 1]
        return g

    def hess_quad(u, nu):
        h11 = 3.0 * u[..., 0] ** 2 - 1.0
        return h11 * nu[..., 0] ** 2 + nu[..., 1] ** 2

    return PotentialDescriptor(
        name="quartic",
        m=2,
        a_minus=np.array([-1.0, 0.0]),
        a_plus=np.array([1.0, 0.0]),
        r=0.15,
        c=1.0,
        rho=1.5,
        pot_id=POT_QUARTIC,
        params=np.zeros(0),
        u2_symmetric=True,
        _w=w,
        _grad=grad,
        _hess_quad=hess_quad,
    )


def elliptic_well(a: float = 2.0, mu: float = 0.1, r: Optional[float] = None,
                  rho: float = 2.5) -> PotentialDescriptor:
    """W = 1/4 (u1^2-1)^2 + 1/2 (u2^2 - a(1-u1^2))^2 + mu/2 u2^2, wells (+-1, 0).

    The u2 curvature at distance d inward from a well is mu - 4 a d, so the
    nondegeneracy radius must satisfy r < mu/(4a); the default keeps the
    measured bound at about 0.9 mu.
    """
    if a <= 0 or mu <= 0:
        raise ValueError("elliptic_well requires a > 0 and mu > 0")
    if r is None:
        r = min(1e-3, 0.1 * mu / (4.0 * a))
        r = max(r, 1e-4)

    def w(u):
        u1, u2 = u[..., 0], u[..., 1]
        g = u2 * u2 - a * (1.0 - u1 * u1)
        q = u1 * u1 - 1.0
        return 0.25 * q * q + 0.5 * g * g + 0.5 * mu * u2 * u2

    def grad(u):
        u1, u2 = u[..., 0], u[..., 1]
        g = u2 * u2 - a * (1.0 - u1 * u1)
        out = np.empty_like(u)
        out[..., 0] = u1 * (u1 * u1 - 1.0) + 2.0 * a * u1 * g
        out[..., 1] = 2.0 * u2 * g + mu * u2
        return out

    def hess_quad(u, nu):
        u1, u2 = u[..., 0], u[..., 1]
        g = u2 * u2 - a * (1.0 - u1 * u1)
        h11 = 3.0 * u1 * u1 - 1.0 + 2.0 * a * g + 4.0 * a * a * u1 * u1
        h12 = 4.0 * a * u1 * u2
        h22 = 2.0 * g + 4.0 * u2 * u2 + mu
        n1, n2 = nu[..., 0], nu[..., 1]
        return h11 * n1 * n1 + 2.0 * h12 * n1 * n2 + h22 * n2 * n2

    return PotentialDescriptor(
        name="elliptic_well",
        m=2,
        a_minus=np.array([-1.0, 0.0]),
        a_plus=np.array([1.0, 0.0]),
        r=r,
        c=0.9 * mu,
        rho=rho,
        pot_id=POT_ELLIPTIC,
        params=np.array([a, mu]),
        u2_symmetric=True,
        _w=w,
        _grad=grad,
        _hess_quad=hess_quad,
    )


BUILTINS = {
    "quartic": decoupled_quartic,
    "elliptic_well": elliptic_well,
}


@dataclass(frozen=True)
class SampleSpec:
    """Sampling plan for the standing-hypothesis check."""

    box_half: float = 3.0
    step: float = 0.05
    sphere_radius: float = 5.0
    n_sphere: int = 256
    n_ball_radii: int = 4
    n_ball_angles: int = 24
    n_directions: int = 48
    zero_tol: float = 1e-9
    seed: int = 0


@dataclass(frozen=True)
class HypothesisReport:
    """Outcome of the sampled double-well checks; never mutates the potential."""

    nonneg_ok: bool
    two_zeros_ok: bool
    hessian_ok: bool
    sphere_ok: bool
    measured_c: float
    sphere_inf: float
    min_w_outside_wells: float
    n_zero_samples_off_wells: int

    @property
    def all_ok(self) -> bool:
        return self.nonneg_ok and self.two_zeros_ok and self.hessian_ok and self.sphere_ok

    def as_dict(self) -> dict:
        return {
            "nonneg_ok": self.nonneg_ok,
            "two_zeros_ok": self.two_zeros_ok,
            "hessian_ok": self.hessian_ok,
            "sphere_ok": self.sphere_ok,
            "all_ok": self.all_ok,
            "measured_c": self.measured_c,
            "sphere_inf": self.sphere_inf,
            "min_w_outside_wells": self.min_w_outside_wells,
            "n_zero_samples_off_wells": self.n_zero_samples_off_wells,
        }


def _sample_box(p: PotentialDescriptor, spec: SampleSpec) -> np.ndarray:
    axis = np.arange(-spec.box_half, spec.box_half + 0.5 * spec.step, spec.step)
    if p.m == 2:
        g1, g2 = np.meshgrid(axis, axis, indexing="ij")
        return np.stack([g1.ravel(), g2.ravel()], axis=-1)
    rng = np.random.default_rng(spec.seed)
    n = min(len(axis) ** 2, 200_000)
    return rng.uniform(-spec.box_half, spec.box_half, size=(n, p.m))


def _unit_directions(m: int, count: int, seed: int) -> np.ndarray:
    if m == 2:
        th = np.linspace(0.0, np.pi, count, endpoint=False)
        return np.stack([np.cos(th), np.sin(th)], axis=-1)
    rng = np.random.default_rng(seed)
    d = rng.normal(size=(count, m))
    return d / np.linalg.norm(d, axis=-1, keepdims=True)


def _sphere_points(m: int, radius: float, count: int, seed: int) -> np.ndarray:
    if m == 2:
        th = np.linspace(0.0, 2.0 * np.pi, count, endpoint=False)
        return radius * np.stack([np.cos(th), np.sin(th)], axis=-1)
    rng = np.random.default_rng(seed)
    d = rng.normal(size=(count, m))
    return radius * d / np.linalg.norm(d, axis=-1, keepdims=True)


def verify_double_well(p: PotentialDescriptor, spec: SampleSpec = SampleSpec()) -> HypothesisReport:
    """Sampled verification of the standing hypotheses.

    Checks, on the given sampling plan: nonnegativity with exactly two zeros
    (all near-zero samples cluster at the wells), the Hessian lower bound on
    the r-balls around the wells, and a positive infimum of W on the sphere
    |u| = sphere_radius.  Returns the measured constants; report only.
    """
    pts = _sample_box(p, spec)
    w_vals = p.w(pts)

    nonneg_ok = bool(np.all(w_vals >= -1e-12)) and float(p.w(p.a_minus)) == 0.0 and float(p.w(p.a_plus)) == 0.0

    near = w_vals <= spec.zero_tol
    ball = 2.0 * spec.step
    d_minus = np.linalg.norm(pts - p.a_minus, axis=-1)
    d_plus = np.linalg.norm(pts - p.a_plus, axis=-1)
    off_wells = near & (d_minus > ball) & (d_plus > ball)
    n_off = int(np.count_nonzero(off_wells))
    has_minus = bool(np.any(near & (d_minus <= ball)))
    has_plus = bool(np.any(near & (d_plus <= ball)))
    two_zeros_ok = nonneg_ok and n_off == 0 and has_minus and has_plus

    outside = (d_minus > ball) & (d_plus > ball)
    min_w_outside = float(np.min(w_vals[outside])) if np.any(outside) else float("nan")

    dirs = _unit_directions(p.m, spec.n_directions, spec.seed)
    radii = np.linspace(0.0, p.r, spec.n_ball_radii + 1)
    angles = _unit_directions(p.m, spec.n_ball_angles, spec.seed + 1)
    measured_c = np.inf
    for well in (p.a_minus, p.a_plus):
        centers = [well + rad * ang for rad in radii for ang in angles]
        centers = np.unique(np.round(np.array(centers), 15), axis=0)
        q = p.hessian_quadform(centers[:, None, :], dirs[None, :, :])
        measured_c = min(measured_c, float(np.min(q)))
    hessian_ok = measured_c > 0.0

    sphere = _sphere_points(p.m, spec.sphere_radius, spec.n_sphere, spec.seed + 2)
    sphere_inf = float(np.min(p.w(sphere)))
    sphere_ok = sphere_inf > 0.0

    return HypothesisReport(
        nonneg_ok=nonneg_ok,
        two_zeros_ok=two_zeros_ok,
        hessian_ok=hessian_ok,
        sphere_ok=sphere_ok,
        measured_c=measured_c,
        sphere_inf=sphere_inf,
        min_w_outside_wells=min_w_outside,
        n_zero_samples_off_wells=n_off,
    )
