"""Monotone first-order descent with a two-point adaptive step.

The step direction is the gradient preconditioned by a fixed Dirichlet
operator (-laplacian + sigma)^-1, applied exactly through discrete sine
transforms.  The step size follows a two-point (secant) rule computed in the
preconditioned metric, with monotone halving as fallback; accepted iterates
never increase the objective.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import scipy.fft

from . import kernels


def _dirichlet_eigenvalues(n: int, h: float) -> np.ndarray:
    """Eigenvalues of the 1D second-difference operator on n-2 interior nodes."""
    k = np.arange(1, n - 1)
    return (2.0 - 2.0 * np.cos(np.pi * k / (n - 1))) / (h * h)


class SpectralPreconditioner1D:
    """Inverse of h * (-d2/dx2 + sigma) on interior nodes, zero at the ends."""

    def __init__(self, n: int, h: float, sigma: float):
        self.denom = (h * (_dirichlet_eigenvalues(n, h) + sigma))[:, None]
        self.scale = 2.0 * (n - 1)

    def apply(self, g: np.ndarray) -> np.ndarray:
        z = np.zeros_like(g)
        spec = scipy.fft.dst(g[1:-1], type=1, axis=0) / self.denom
        z[1:-1] = scipy.fft.idst(spec, type=1, axis=0)
        return z


class SpectralPreconditioner2D:
    """Inverse of ht*hx*(-laplacian [+ mixed term] + sigma) on interior nodes."""

    def __init__(self, n_t: int, n_x: int, h_t: float, h_x: float, sigma: float,
                 mixed: bool = False):
        lt = _dirichlet_eigenvalues(n_t, h_t)
        lx = _dirichlet_eigenvalues(n_x, h_x)
        sym = lt[:, None] + lx[None, :]
        if mixed:
            sym = sym + lt[:, None] * lx[None, :]
        self.denom = (h_t * h_x * (sym + sigma))[:, :, None]

    def apply(self, g: np.ndarray) -> np.ndarray:
        z = np.zeros_like(g)
        spec = scipy.fft.dstn(g[1:-1, 1:-1], type=1, axes=(0, 1)) / self.denom
        z[1:-1, 1:-1] = scipy.fft.idstn(spec, type=1, axes=(0, 1))
        return z


@dataclass
class DescentResult:
    x: np.ndarray
    value: float
    grad_sup: float
    iterations: int
    converged: bool
    n_value: int
    n_grad: int
    initial_value: float

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "grad_sup": self.grad_sup,
            "iterations": self.iterations,
            "converged": self.converged,
            "n_value_evals": self.n_value,
            "n_grad_evals": self.n_grad,
            "initial_value": self.initial_value,
        }


def descend(
    x0: np.ndarray,
    value_fn: Callable[[np.ndarray], float],
    grad_fn: Callable[[np.ndarray], np.ndarray],
    precond,
    gtol: float,
    max_iter: int,
    alpha_max: float = 1e8,
    monitor: Optional[Callable[[int, float, float], None]] = None,
) -> DescentResult:
    """Minimize value_fn from x0; stop when the gradient sup-norm reaches gtol.

    Accepted steps never increase the objective.  Returns the last iterate
    whether or not the tolerance was reached; the caller enforces its own
    convergence contract.
    """
    x = np.array(x0, dtype=np.float64)
    energy = float(value_fn(x))
    n_value, n_grad = 1, 0
    initial_value = energy

    g = grad_fn(x)
    n_grad += 1
    gsup = float(np.max(np.abs(g))) if g.size else 0.0

    alpha = 1.0
    z_prev = None
    g_prev = None
    zg_prev = 0.0
    alpha_used = 1.0
    stalls = 0

    it = 0
    while it < max_iter and gsup > gtol:
        z = precond.apply(g)
        zg = kernels.dot(z, g)
        if not np.isfinite(zg) or zg <= 0.0:
            z = g
            zg = kernels.dot(g, g)

        if z_prev is not None:
            denom = kernels.dot(z_prev, g) - zg_prev
            alpha = -alpha_used * zg_prev / denom if denom != 0.0 else alpha_used
            if not np.isfinite(alpha) or alpha <= 0.0:
                alpha = alpha_used
            alpha = min(alpha, alpha_max)

        # monotone fallback: halve until the energy does not increase
        accepted = False
        for _ in range(60):
            x_new = x - alpha * z
            e_new = float(value_fn(x_new))
            n_value += 1
            if e_new <= energy:
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            break

        if e_new == energy:
            stalls += 1
            if stalls >= 10:
                break
        else:
            stalls = 0
        z_prev, g_prev, zg_prev, alpha_used = z, g, zg, alpha
        x = x_new
        energy = e_new
        g = grad_fn(x)
        n_grad += 1
        gsup = float(np.max(np.abs(g)))
        it += 1
        if monitor is not None:
            monitor(it, energy, gsup)

    return DescentResult(
        x=x,
        value=energy,
        grad_sup=gsup,
        iterations=it,
        converged=gsup <= gtol,
        n_value=n_value,
        n_grad=n_grad,
        initial_value=initial_value,
    )
