"""Angle conventions, oriented lines and the (omega, p) sampling grid.

A direction is stored as an angle in radians normalized to ``[0, 2*pi)``.
The line ``l(omega, p)`` is the set ``{x : <x, e(omega)> = p}``, traversed in
the direction ``perp(omega) = (-sin omega, cos omega)``.  Points on it are
written ``x = p * e(omega) + u * perp(omega)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi


def normalize_angle(omega):
    """Map an angle (scalar or array) into ``[0, 2*pi)``."""
    out = np.mod(omega, TWO_PI)
    # np.mod can return exactly 2*pi for tiny negative inputs
    out = np.where(out >= TWO_PI, 0.0, out)
    if np.ndim(out) == 0:
        return float(out)
    return out


def unit_vector(omega):
    """Return ``(cos omega, sin omega)``; works elementwise on arrays."""
    return np.cos(omega), np.sin(omega)


def perp(omega):
    """Return ``(-sin omega, cos omega)``, the direction along ``l(omega, p)``."""
    return -np.sin(omega), np.cos(omega)


@dataclass(frozen=True)
class LineCoord:
    """Oriented line ``<x, e(omega)> = p``."""

    omega: float
    p: float

    def __post_init__(self):
        object.__setattr__(self, "omega", normalize_angle(float(self.omega)))
        object.__setattr__(self, "p", float(self.p))

    def reversed(self) -> "LineCoord":
        """Same point set, opposite orientation."""
        return LineCoord(self.omega + math.pi, -self.p)


def point_on_line(line: LineCoord, u):
    """Return ``p * e(omega) + u * perp(omega)`` as an ``(x, y)`` pair."""
    c, s = unit_vector(line.omega)
    u = np.asarray(u, dtype=float)
    return line.p * c - u * s, line.p * s + u * c


def line_coords_of_point(x, y, omega):
    """Inverse of :func:`point_on_line`: ``p = <x, e(omega)>``, ``u = <x, perp(omega)>``."""
    c, s = unit_vector(omega)
    return x * c + y * s, -x * s + y * c


@dataclass(frozen=True)
class SinogramGrid:
    """Uniform sampling of ``[0, 2*pi) x [-p_max, p_max]``.

    Angles are ``2*pi*k/n_angles`` (full circle, endpoint excluded) and
    offsets are ``n_p`` equispaced values including both endpoints.
    """

    n_angles: int
    n_p: int
    p_max: float

    def __post_init__(self):
        if int(self.n_angles) != self.n_angles or self.n_angles < 2:
            raise ValueError(f"n_angles must be an integer >= 2, got {self.n_angles}")
        if int(self.n_p) != self.n_p or self.n_p < 2:
            raise ValueError(f"n_p must be an integer >= 2, got {self.n_p}")
        if not self.p_max > 0 or not math.isfinite(self.p_max):
            raise ValueError(f"p_max must be positive and finite, got {self.p_max}")
        object.__setattr__(self, "n_angles", int(self.n_angles))
        object.__setattr__(self, "n_p", int(self.n_p))
        object.__setattr__(self, "p_max", float(self.p_max))

    @property
    def angles(self) -> np.ndarray:
        return TWO_PI * np.arange(self.n_angles) / self.n_angles

    @property
    def offsets(self) -> np.ndarray:
        return np.linspace(-self.p_max, self.p_max, self.n_p)

    @property
    def d_omega(self) -> float:
        return TWO_PI / self.n_angles

    @property
    def d_p(self) -> float:
        return 2.0 * self.p_max / (self.n_p - 1)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_angles, self.n_p)

    def refined(self, factor: int = 2) -> "SinogramGrid":
        """Grid with ``factor`` times denser offsets; the original offsets are
        every ``factor``-th node of the result.  Angles are unchanged."""
        return SinogramGrid(self.n_angles, factor * (self.n_p - 1) + 1, self.p_max)

    def angle_index(self, omega) -> np.ndarray:
        """Index of the nearest grid angle (periodic)."""
        k = np.rint(normalize_angle(omega) / self.d_omega).astype(int)
        return np.mod(k, self.n_angles)
