"""Divergent-beam transform: attenuation integrated along a half-line."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import cumulative_simpson

from .fields import ScalarField

_CHUNK_POINTS = 4_000_000


@dataclass(frozen=True)
class BeamQuadratureConfig:
    """Composite Simpson settings for ``int_0^T a(x + t*omega) dt``.

    ``step=None`` uses ``support_radius / 1024`` of the attenuation.  A
    ``cutoff`` shorter than the ray's exit from the support is an error.
    """

    step: Optional[float] = None
    cutoff: Optional[float] = None

    def __post_init__(self):
        if self.step is not None and not self.step > 0:
            raise ValueError("beam step must be positive")
        if self.cutoff is not None and not self.cutoff > 0:
            raise ValueError("beam cutoff must be positive")


def simpson_weights(n_intervals: int) -> np.ndarray:
    """Composite Simpson weights on ``n_intervals + 1`` unit-spaced nodes."""
    if n_intervals < 2 or n_intervals % 2:
        raise ValueError("Simpson needs an even number of intervals")
    w = np.ones(n_intervals + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w / 3.0


def ray_disc_interval(x, y, omega, center, radius):
    """Parameter interval ``[t0, t1]`` (``t0 >= 0``) where ``x + t*e(omega)``
    lies in the disc; ``t1 <= t0`` marks a miss."""
    c, s = math.cos(omega), math.sin(omega)
    dx, dy = center[0] - x, center[1] - y
    tc = dx * c + dy * s
    d2 = dx * dx + dy * dy - tc * tc
    half = np.sqrt(np.maximum(radius * radius - d2, 0.0))
    hit = d2 < radius * radius
    t0 = np.maximum(tc - half, 0.0)
    t1 = np.where(hit, tc + half, 0.0)
    return t0, t1


def divergent_beam(a: ScalarField, x, y, omega: float,
                   cfg: Optional[BeamQuadratureConfig] = None):
    """``Da(x, omega) = int_0^inf a(x + t*e(omega)) dt``.

    ``x``, ``y`` may be arrays.  The integral is truncated to the part of the
    ray inside ``a``'s support disc and evaluated with composite Simpson on a
    node set shared by all points (same relative placement), so results are
    linear in ``a`` to rounding.  Rays that miss the support give exactly 0.
    """
    cfg = cfg or BeamQuadratureConfig()
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    shape = np.broadcast(x, y).shape
    if a.is_zero:
        return np.zeros(shape) if shape else 0.0
    x, y = np.broadcast_to(x, shape).ravel(), np.broadcast_to(y, shape).ravel()
    t0, t1 = ray_disc_interval(x, y, omega, a.center, a.support_radius)
    if cfg.cutoff is not None and np.any(t1 > cfg.cutoff):
        raise ValueError(f"beam cutoff {cfg.cutoff} is shorter than the support exit "
                         f"distance {float(t1.max()):.6g}")
    length = np.maximum(t1 - t0, 0.0)
    out = np.zeros(x.shape)
    live = length > 0
    if np.any(live):
        step = cfg.step or a.support_radius / 1024.0
        n = max(2, int(math.ceil(length[live].max() / step)))
        n += n % 2
        s = np.linspace(0.0, 1.0, n + 1)
        w = simpson_weights(n)
        c, sn = math.cos(omega), math.sin(omega)
        idx = np.flatnonzero(live)
        chunk = max(1, _CHUNK_POINTS // (n + 1))
        for i in range(0, len(idx), chunk):
            sel = idx[i:i + chunk]
            t = t0[sel, None] + length[sel, None] * s
            vals = a(x[sel, None] + t * c, y[sel, None] + t * sn)
            out[sel] = (vals @ w) * (length[sel] / n)
    out = out.reshape(shape)
    return float(out) if not shape else out


def attenuation_weight(a: ScalarField, x, y, omega: float,
                       cfg: Optional[BeamQuadratureConfig] = None):
    """``exp(-Da(x, perp(omega)))``, the weight of ``f(x)`` on ``l(omega, p)``."""
    return np.exp(-divergent_beam(a, x, y, omega + 0.5 * math.pi, cfg))


def tail_integral(values: np.ndarray, du: float) -> np.ndarray:
    """``T[..., m] = int_{u_m}^{u_end}`` of samples on a uniform grid (last axis).

    This is the divergent beam evaluated at every node of a line, in the
    line's own direction.  Cumulative Simpson; ``T[..., -1] == 0``.
    """
    cum = cumulative_simpson(values, dx=du, axis=-1, initial=0.0)
    return cum[..., -1:] - cum
