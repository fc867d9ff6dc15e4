"""Hot numeric kernels: numba fast path with a pure-numpy fallback.

The backend is chosen by the ``HETLAYERS_BACKEND`` environment variable
("numba" or "numpy"; default "numba" when importable).  Plug-in potentials
(``pot_id < 0``) always run on the numpy path since their evaluators are
arbitrary Python callables.

Energy kernels return per-row partial sums; callers combine them with
:func:`total` (exact summation), so totals do not depend on the reduction
order and mirror-reflected fields reproduce energies bit for bit.
"""

from __future__ import annotations

import math
import os

import numpy as np

from . import numpy_backend

try:
    from . import numba_backend

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba_backend = None
    _HAVE_NUMBA = False


def active_backend() -> str:
    """Resolve the kernel backend from the environment."""
    choice = os.environ.get("HETLAYERS_BACKEND", "numba").strip().lower()
    if choice not in ("numba", "numpy"):
        raise ValueError(f"HETLAYERS_BACKEND must be 'numba' or 'numpy', got {choice!r}")
    if choice == "numba" and not _HAVE_NUMBA:
        return "numpy"
    return choice


def _use_numba(p) -> bool:
    return active_backend() == "numba" and p.pot_id >= 0 and p.m == 2


def total(partials) -> float:
    """Exactly rounded sum of partial results (order independent)."""
    return math.fsum(np.asarray(partials, dtype=np.float64))


def action_cells(p, v: np.ndarray, h: float) -> np.ndarray:
    """Per-cell contributions to the 1D action (piecewise-linear derivative, trapezoid W)."""
    if _use_numba(p):
        return numba_backend.action_cells(v, h, p.pot_id, p.params)
    return numpy_backend.action_cells(p, v, h)


def action_grad(p, v: np.ndarray, h: float) -> np.ndarray:
    """Gradient of the discrete 1D action w.r.t. interior nodes (zero at the ends)."""
    if _use_numba(p):
        return numba_backend.action_grad(v, h, p.pot_id, p.params)
    return numpy_backend.action_grad(p, v, h)


def energy_rows2(p, u: np.ndarray, ht: float, hx: float) -> np.ndarray:
    """Per-cell-row partial sums of the second-order strip energy."""
    if _use_numba(p):
        return numba_backend.energy_rows2(u, ht, hx, p.pot_id, p.params)
    return numpy_backend.energy_rows2(p, u, ht, hx)


def grad2(p, u: np.ndarray, ht: float, hx: float) -> np.ndarray:
    """Gradient of the second-order strip energy (zero on the clamped boundary)."""
    if _use_numba(p):
        return numba_backend.grad2(u, ht, hx, p.pot_id, p.params)
    return numpy_backend.grad2(p, u, ht, hx)


def energy_rows4(p, u: np.ndarray, ht: float, hx: float) -> np.ndarray:
    """Per-cell-row partials of the fourth-order strip energy (adds the mixed term)."""
    if _use_numba(p):
        return numba_backend.energy_rows4(u, ht, hx, p.pot_id, p.params)
    return numpy_backend.energy_rows4(p, u, ht, hx)


def grad4(p, u: np.ndarray, ht: float, hx: float) -> np.ndarray:
    """Gradient of the fourth-order strip energy."""
    if _use_numba(p):
        return numba_backend.grad4(u, ht, hx, p.pot_id, p.params)
    return numpy_backend.grad4(p, u, ht, hx)


def dot(a: np.ndarray, b: np.ndarray) -> float:
    """Deterministic inner product (fixed sequential reduction, no BLAS threading)."""
    af = np.ascontiguousarray(a, dtype=np.float64).ravel()
    bf = np.ascontiguousarray(b, dtype=np.float64).ravel()
    if active_backend() == "numba" and _HAVE_NUMBA:
        return numba_backend.dot(af, bf)
    return numpy_backend.dot(af, bf)


def warmup() -> None:
    """Trigger numba compilation on tiny inputs so timed runs stay honest."""
    if not _HAVE_NUMBA or active_backend() != "numba":
        return
    v = np.zeros((4, 2))
    u = np.zeros((4, 4, 2))
    params = np.array([2.0, 0.1])
    for pid, prm in ((1, np.zeros(0)), (2, params)):
        numba_backend.action_cells(v, 0.5, pid, prm)
        numba_backend.action_grad(v, 0.5, pid, prm)
        numba_backend.energy_rows2(u, 0.5, 0.5, pid, prm)
        numba_backend.grad2(u, 0.5, 0.5, pid, prm)
        numba_backend.energy_rows4(u, 0.5, 0.5, pid, prm)
        numba_backend.grad4(u, 0.5, 0.5, pid, prm)
    numba_backend.dot(v.ravel(), v.ravel())
