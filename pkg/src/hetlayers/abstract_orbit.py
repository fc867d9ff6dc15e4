"""Connecting orbits in a finite-dimensional surrogate of a Hilbert space.

Orbits are stored as exact piecewise-linear curves (knot times plus values in
R^d, constant outside the knot span) with a scalar inner-product weight, so
the closed-form constructions (the indicator-potential orbit, the segment
initializer, the window reparameterization) and their action identities are
evaluated to roundoff rather than through grid quadrature.  Uniform-grid
export goes through linear resampling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np


@dataclass(frozen=True)
class MembershipResult:
    member: bool
    t_lower: Optional[float]       # largest threshold below which the projection stays <= 3 l0/4
    t_upper: Optional[float]       # smallest threshold above which it stays >= l0/4
    truncation_suspect: bool = False


@dataclass
class AbstractOrbit:
    """Piecewise-linear curve t -> R^d with endpoints e- and e+.

    The inner product is <u, v> = weight * sum(u_i v_i); weight = spacing of
    the discretized x-grid gives the discrete-L2 surrogate, weight = 1 the
    Euclidean one.
    """

    knots: np.ndarray
    values: np.ndarray
    e_minus: np.ndarray
    e_plus: np.ndarray
    weight: float = 1.0

    def __post_init__(self):
        self.knots = np.asarray(self.knots, dtype=np.float64)
        self.values = np.asarray(self.values, dtype=np.float64)
        self.e_minus = np.asarray(self.e_minus, dtype=np.float64)
        self.e_plus = np.asarray(self.e_plus, dtype=np.float64)
        if self.knots.ndim != 1 or self.values.shape[0] != self.knots.shape[0]:
            raise ValueError("values must carry one row per knot")
        if np.any(np.diff(self.knots) <= 0):
            raise ValueError("knots must be strictly increasing")
        if self.l0 == 0.0:
            raise ValueError("orbit endpoints coincide")

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    def norm(self, v: np.ndarray) -> float:
        return math.sqrt(self.weight * float(np.dot(v, v)))

    def inner(self, u: np.ndarray, v: np.ndarray) -> float:
        return self.weight * float(np.dot(u, v))

    @property
    def l0(self) -> float:
        return self.norm(self.e_plus - self.e_minus)

    @property
    def direction(self) -> np.ndarray:
        return (self.e_plus - self.e_minus) / self.l0

    def value_at(self, t: float) -> np.ndarray:
        if t <= self.knots[0]:
            return self.values[0].copy()
        if t >= self.knots[-1]:
            return self.values[-1].copy()
        j = int(np.searchsorted(self.knots, t) - 1)
        s = (t - self.knots[j]) / (self.knots[j + 1] - self.knots[j])
        return (1.0 - s) * self.values[j] + s * self.values[j + 1]

    def sample(self, times: np.ndarray) -> np.ndarray:
        """Linear resampling onto an arbitrary time grid (constant extension)."""
        times = np.asarray(times, dtype=np.float64)
        out = np.empty((times.shape[0], self.dim))
        for k in range(self.dim):
            out[:, k] = np.interp(times, self.knots, self.values[:, k])
        return out

    def projections(self) -> np.ndarray:
        """<V(t_k) - e-, n> at the knots; the natural transition coordinate."""
        n = self.direction
        return self.weight * (self.values - self.e_minus) @ n


def segment_orbit(e_minus: np.ndarray, e_plus: np.ndarray, weight: float = 1.0) -> AbstractOrbit:
    """The linear initializer: e- before 0, affine on [0, 1], e+ after."""
    e_minus = np.asarray(e_minus, dtype=np.float64)
    e_plus = np.asarray(e_plus, dtype=np.float64)
    if np.array_equal(e_minus, e_plus):
        raise ValueError("segment orbit needs distinct endpoints")
    return AbstractOrbit(
        knots=np.array([0.0, 1.0]),
        values=np.stack([e_minus, e_plus]),
        e_minus=e_minus,
        e_plus=e_plus,
        weight=weight,
    )


def nonsmooth_orbit(e_minus: np.ndarray, e_plus: np.ndarray, weight: float = 1.0) -> AbstractOrbit:
    """Closed-form orbit for the indicator potential (1 off the endpoints).

    Transitions along the axis at speed sqrt(2); transit time l0/sqrt(2).
    """
    e_minus = np.asarray(e_minus, dtype=np.float64)
    e_plus = np.asarray(e_plus, dtype=np.float64)
    if np.array_equal(e_minus, e_plus):
        raise ValueError("orbit needs distinct endpoints")
    probe = AbstractOrbit(
        knots=np.array([0.0, 1.0]),
        values=np.stack([e_minus, e_plus]),
        e_minus=e_minus,
        e_plus=e_plus,
        weight=weight,
    )
    transit = probe.l0 / math.sqrt(2.0)
    return AbstractOrbit(
        knots=np.array([0.0, transit]),
        values=np.stack([e_minus, e_plus]),
        e_minus=e_minus,
        e_plus=e_plus,
        weight=weight,
    )


def class_membership(orbit: AbstractOrbit) -> MembershipResult:
    """Constrained-class test on the axis projection.

    Membership requires the projection to stay <= 3 l0/4 up to some time and
    >= l0/4 from some later time on.  Returns the extremal thresholds: the
    first up-crossing of 3 l0/4 (largest admissible lower threshold) and the
    last up-crossing of l0/4 (smallest admissible upper threshold).
    """
    p = orbit.projections()
    l0 = orbit.l0
    hi_thresh = 0.75 * l0
    lo_thresh = 0.25 * l0
    knots = orbit.knots

    truncation_suspect = p[0] > lo_thresh

    if p[0] > hi_thresh:
        return MembershipResult(False, None, None, truncation_suspect=True)

    t_lower: Optional[float] = None
    for j in range(len(knots) - 1):
        if p[j] <= hi_thresh < p[j + 1]:
            t_lower = float(knots[j] + (hi_thresh - p[j])
                            * (knots[j + 1] - knots[j]) / (p[j + 1] - p[j]))
            break

    if p[-1] < lo_thresh:
        return MembershipResult(False, t_lower, None,
                                truncation_suspect=truncation_suspect)

    t_upper = float(knots[0])
    for j in range(len(knots) - 1):
        if p[j] < lo_thresh <= p[j + 1]:
            t_upper = float(knots[j] + (lo_thresh - p[j])
                            * (knots[j + 1] - knots[j]) / (p[j + 1] - p[j]))
    if p[0] >= lo_thresh and np.all(p >= lo_thresh):
        t_upper = float(knots[0])

    return MembershipResult(True, t_lower, t_upper,
                            truncation_suspect=truncation_suspect)


def reparameterize(orbit: AbstractOrbit, a: float, b: float, kappa: float) -> AbstractOrbit:
    """Dilate time by kappa on [a, b], shift what follows; identity elsewhere.

    The image window is [a, a + kappa (b - a)].  Exact on the piecewise-linear
    representation; stays in the constrained class whenever the input is.
    """
    if kappa <= 0.0:
        raise ValueError("kappa must be positive")
    if not a < b:
        raise ValueError("window requires a < b")

    shift = (kappa - 1.0) * (b - a)
    new_knots = []
    new_values = []

    def push(t, v):
        if new_knots and t <= new_knots[-1] + 0.0:
            return
        new_knots.append(t)
        new_values.append(v)

    for t, v in zip(orbit.knots, orbit.values):
        if t < a:
            push(float(t), v)
    push(a, orbit.value_at(a))
    for t, v in zip(orbit.knots, orbit.values):
        if a < t < b:
            push(a + kappa * (float(t) - a), v)
    push(a + kappa * (b - a), orbit.value_at(b))
    for t, v in zip(orbit.knots, orbit.values):
        if t > b:
            push(float(t) + shift, v)

    return AbstractOrbit(
        knots=np.array(new_knots),
        values=np.stack(new_values),
        e_minus=orbit.e_minus,
        e_plus=orbit.e_plus,
        weight=orbit.weight,
    )


# ---------------------------------------------------------------------------
# exact piecewise actions


def kinetic_sq_integral(orbit: AbstractOrbit, lo: Optional[float] = None,
                        hi: Optional[float] = None) -> float:
    """int ||V'||^2 dt over [lo, hi] (defaults to the knot span); exact."""
    lo = orbit.knots[0] if lo is None else lo
    hi = orbit.knots[-1] if hi is None else hi
    total = 0.0
    for j in range(len(orbit.knots) - 1):
        t0, t1 = float(orbit.knots[j]), float(orbit.knots[j + 1])
        seg_lo, seg_hi = max(t0, lo), min(t1, hi)
        if seg_hi <= seg_lo:
            continue
        dv = orbit.values[j + 1] - orbit.values[j]
        speed_sq = orbit.weight * float(np.dot(dv, dv)) / (t1 - t0) ** 2
        total += speed_sq * (seg_hi - seg_lo)
    return total


def indicator_potential_integral(orbit: AbstractOrbit, lo: Optional[float] = None,
                                 hi: Optional[float] = None) -> float:
    """int chi(V(t)) dt for the indicator potential (0 only at e-, e+); exact.

    A piece contributes its full length unless it sits identically at an
    endpoint well (a moving piece passes through a well only on a null set).
    """
    lo = orbit.knots[0] if lo is None else lo
    hi = orbit.knots[-1] if hi is None else hi
    total = 0.0
    for j in range(len(orbit.knots) - 1):
        t0, t1 = float(orbit.knots[j]), float(orbit.knots[j + 1])
        seg_lo, seg_hi = max(t0, lo), min(t1, hi)
        if seg_hi <= seg_lo:
            continue
        v0, v1 = orbit.values[j], orbit.values[j + 1]
        at_zero = (np.array_equal(v0, v1)
                   and (np.array_equal(v0, orbit.e_minus) or np.array_equal(v0, orbit.e_plus)))
        if not at_zero:
            total += seg_hi - seg_lo
    return total


def potential_integral_trapz(orbit: AbstractOrbit, w_fn: Callable[[np.ndarray], float],
                             lo: Optional[float] = None, hi: Optional[float] = None) -> float:
    """int w(V(t)) dt by the trapezoid rule over the knot partition."""
    lo = orbit.knots[0] if lo is None else lo
    hi = orbit.knots[-1] if hi is None else hi
    total = 0.0
    for j in range(len(orbit.knots) - 1):
        t0, t1 = float(orbit.knots[j]), float(orbit.knots[j + 1])
        seg_lo, seg_hi = max(t0, lo), min(t1, hi)
        if seg_hi <= seg_lo:
            continue
        v_lo = orbit.value_at(seg_lo)
        v_hi = orbit.value_at(seg_hi)
        total += (seg_hi - seg_lo) * 0.5 * (float(w_fn(v_lo)) + float(w_fn(v_hi)))
    return total


def orbit_action(orbit: AbstractOrbit, w_fn: Callable[[np.ndarray], float] | str = "chi",
                 lo: Optional[float] = None, hi: Optional[float] = None) -> float:
    """Action int [ 1/2 ||V'||^2 + w(V) ] over [lo, hi].

    Pass w_fn="chi" for the indicator potential (evaluated exactly); any
    callable is integrated by the trapezoid rule on the knot partition.
    """
    kin = 0.5 * kinetic_sq_integral(orbit, lo, hi)
    if w_fn == "chi":
        pot = indicator_potential_integral(orbit, lo, hi)
    else:
        pot = potential_integral_trapz(orbit, w_fn, lo, hi)
    return kin + pot


def reparameterization_delta(orbit: AbstractOrbit, a: float, b: float, kappa: float,
                             w_fn: Callable[[np.ndarray], float] | str = "chi") -> float:
    """Predicted action change of the window dilation:

        (1 - kappa)/(2 kappa) int_a^b ||V'||^2 + (kappa - 1) int_a^b w(V).
    """
    kin = kinetic_sq_integral(orbit, a, b)
    if w_fn == "chi":
        pot = indicator_potential_integral(orbit, a, b)
    else:
        pot = potential_integral_trapz(orbit, w_fn, a, b)
    return (1.0 - kappa) / (2.0 * kappa) * kin + (kappa - 1.0) * pot


def orbit_from_samples(times: np.ndarray, values: np.ndarray,
                       e_minus: np.ndarray, e_plus: np.ndarray,
                       weight: float = 1.0) -> AbstractOrbit:
    """Wrap uniformly sampled data (e.g. strip rows over t) as an orbit."""
    return AbstractOrbit(
        knots=np.asarray(times, dtype=np.float64),
        values=np.asarray(values, dtype=np.float64),
        e_minus=np.asarray(e_minus, dtype=np.float64),
        e_plus=np.asarray(e_plus, dtype=np.float64),
        weight=weight,
    )
