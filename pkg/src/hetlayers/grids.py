"""Uniform truncation grids for the line and the strip."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid on [-L, L] with n nodes, symmetric about 0."""

    half_length: float
    n: int

    def __post_init__(self):
        if self.n < 3:
            raise ValueError("Grid1D needs at least 3 nodes")
        if not (self.half_length > 0):
            raise ValueError("Grid1D half_length must be positive")

    @property
    def h(self) -> float:
        return 2.0 * self.half_length / (self.n - 1)

    def nodes(self) -> np.ndarray:
        return np.linspace(-self.half_length, self.half_length, self.n)

    def matches(self, other: "Grid1D") -> bool:
        return self.n == other.n and self.half_length == other.half_length

    @staticmethod
    def from_spacing(half_length: float, h: float) -> "Grid1D":
        """Grid whose spacing is as close as possible to h (exact when 2L/h is integral)."""
        n = int(round(2.0 * half_length / h)) + 1
        return Grid1D(half_length, n)


@dataclass(frozen=True)
class Grid2D:
    """Tensor grid on [-T, T] x [-L, L]; t indexes rows, x indexes columns."""

    half_length_t: float
    half_length_x: float
    n_t: int
    n_x: int

    def __post_init__(self):
        if self.n_t < 3 or self.n_x < 3:
            raise ValueError("Grid2D needs at least 3 nodes per direction")
        if not (self.half_length_t > 0 and self.half_length_x > 0):
            raise ValueError("Grid2D half-lengths must be positive")

    @property
    def h_t(self) -> float:
        return 2.0 * self.half_length_t / (self.n_t - 1)

    @property
    def h_x(self) -> float:
        return 2.0 * self.half_length_x / (self.n_x - 1)

    def t_nodes(self) -> np.ndarray:
        return np.linspace(-self.half_length_t, self.half_length_t, self.n_t)

    def x_nodes(self) -> np.ndarray:
        return np.linspace(-self.half_length_x, self.half_length_x, self.n_x)

    def x_grid(self) -> Grid1D:
        """The 1D grid underlying each row."""
        return Grid1D(self.half_length_x, self.n_x)

    def matches(self, other: "Grid2D") -> bool:
        return (
            self.n_t == other.n_t
            and self.n_x == other.n_x
            and self.half_length_t == other.half_length_t
            and self.half_length_x == other.half_length_x
        )

    @staticmethod
    def from_spacing(half_length_t: float, half_length_x: float, h_t: float, h_x: float) -> "Grid2D":
        n_t = int(round(2.0 * half_length_t / h_t)) + 1
        n_x = int(round(2.0 * half_length_x / h_x)) + 1
        return Grid2D(half_length_t, half_length_x, n_t, n_x)
