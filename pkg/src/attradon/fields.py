"""Scalar fields on the plane: analytic phantoms, sampled grids, quadrature.

Every field is evaluated as ``field(x, y)`` on coordinate arrays of any
(broadcastable) shape.  A field carries a support disc ``(center, radius)``
outside of which it is treated as exactly zero; line integrals are truncated
against this disc.  Gaussians get an *effective* radius at which the
amplitude has dropped below ``AMPLITUDE_CUTOFF`` of its peak.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field, replace
from typing import Callable, Optional

import numpy as np
from scipy.integrate import simpson
from scipy.special import erfc

AMPLITUDE_CUTOFF = 1e-12
# exp(-r**2) == AMPLITUDE_CUTOFF at r == _DECAY_RADIUS
_DECAY_RADIUS = math.sqrt(-math.log(AMPLITUDE_CUTOFF))

Evaluator = Callable[[np.ndarray, np.ndarray], np.ndarray]
Gradient = Callable[[np.ndarray, np.ndarray], tuple]


class UnsupportedOperationError(ValueError):
    """Raised when a field lacks the gradient an operation needs."""


@dataclass(frozen=True)
class ScalarField:
    """Evaluable real function on R^2 with a declared support disc.

    ``scale`` is the smallest length over which the field varies (Gaussian
    width, mollifier width); quadrature defaults are derived from it.
    """

    evaluator: Evaluator
    gradient: Optional[Gradient] = None
    support_radius: float = math.inf
    center: tuple = (0.0, 0.0)
    scale: float = 1.0
    name: str = "field"
    smoothness: str = "C-infinity"

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return self.evaluator(x, y)

    @property
    def is_zero(self) -> bool:
        return self.support_radius == 0.0

    @property
    def has_gradient(self) -> bool:
        return self.gradient is not None

    def grad(self, x, y):
        if self.gradient is None:
            raise UnsupportedOperationError(f"field {self.name!r} has no analytic gradient")
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return self.gradient(x, y)

    def directional(self, omega: float, fallback: bool = False) -> "ScalarField":
        """The field ``x -> d/d(omega) self(x)`` as a new field (no gradient)."""
        c, s = math.cos(omega), math.sin(omega)
        if self.gradient is None:
            if not fallback:
                raise UnsupportedOperationError(
                    f"field {self.name!r} has no analytic gradient")

            def ev(x, y):
                return _fd_directional(self, c, s, x, y)
        else:
            def ev(x, y):
                gx, gy = self.gradient(x, y)
                return c * gx + s * gy
        return ScalarField(ev, None, self.support_radius, self.center, self.scale,
                           f"d_{omega:.6g} {self.name}", "derivative")

    def __add__(self, other: "ScalarField") -> "ScalarField":
        if not isinstance(other, ScalarField):
            return NotImplemented
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        center, radius = _enclosing_disc(self.center, self.support_radius,
                                         other.center, other.support_radius)
        grad = None
        if self.gradient is not None and other.gradient is not None:
            def grad(x, y, g1=self.gradient, g2=other.gradient):
                a1, b1 = g1(x, y)
                a2, b2 = g2(x, y)
                return a1 + a2, b1 + b2
        return ScalarField(lambda x, y: self.evaluator(x, y) + other.evaluator(x, y),
                           grad, radius, center, min(self.scale, other.scale),
                           f"({self.name} + {other.name})", "sum")

    def __rmul__(self, c: float) -> "ScalarField":
        c = float(c)
        if c == 0.0:
            return zero_field()
        grad = None
        if self.gradient is not None:
            def grad(x, y, g=self.gradient):
                gx, gy = g(x, y)
                return c * gx, c * gy
        return replace(self, evaluator=lambda x, y: c * self.evaluator(x, y),
                       gradient=grad, name=f"{c:g}*{self.name}")

    def __neg__(self) -> "ScalarField":
        return -1.0 * self

    def __sub__(self, other: "ScalarField") -> "ScalarField":
        return self + (-other)

    def product(self, other: "ScalarField") -> "ScalarField":
        """Pointwise product; the support is the smaller of the two discs."""
        if self.is_zero or other.is_zero:
            return zero_field()
        small = self if self.support_radius <= other.support_radius else other
        return ScalarField(lambda x, y: self.evaluator(x, y) * other.evaluator(x, y),
                           None, small.support_radius, small.center,
                           min(self.scale, other.scale),
                           f"({self.name} * {other.name})", "product")


def _enclosing_disc(c1, r1, c2, r2):
    c1 = np.asarray(c1, float)
    c2 = np.asarray(c2, float)
    d = float(np.hypot(*(c2 - c1)))
    if not (math.isfinite(r1) and math.isfinite(r2)):
        return (0.0, 0.0), math.inf
    if d + r2 <= r1:
        return tuple(c1), r1
    if d + r1 <= r2:
        return tuple(c2), r2
    radius = 0.5 * (d + r1 + r2)
    center = c1 + (c2 - c1) * ((radius - r1) / d)
    return (float(center[0]), float(center[1])), radius


def _fd_directional(field, c, s, x, y):
    h = 1e-5 * np.maximum(1.0, np.hypot(x, y))
    plus = field.evaluator(x + h * c, y + h * s)
    minus = field.evaluator(x - h * c, y - h * s)
    return (plus - minus) / (2.0 * h)


def directional_derivative(field: ScalarField, omega: float, x, y, fallback: bool = False):
    """``cos(omega) * d1 field + sin(omega) * d2 field`` at ``(x, y)``.

    Uses the analytic gradient when available.  With ``fallback=True`` a
    central difference with step ``1e-5 * max(1, |x|)`` is used instead;
    otherwise a missing gradient raises :class:`UnsupportedOperationError`.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    c, s = math.cos(omega), math.sin(omega)
    if field.gradient is not None:
        gx, gy = field.gradient(x, y)
        return c * gx + s * gy
    if not fallback:
        raise UnsupportedOperationError(f"field {field.name!r} has no analytic gradient")
    return _fd_directional(field, c, s, x, y)


# ---------------------------------------------------------------------------
# phantoms

def zero_field() -> ScalarField:
    return ScalarField(lambda x, y: np.zeros(np.broadcast(x, y).shape),
                       lambda x, y: (np.zeros(np.broadcast(x, y).shape),) * 2,
                       0.0, (0.0, 0.0), math.inf, "zero", "C-infinity")


def gaussian(amplitude: float = 1.0, sigma: float = 1.0, center=(0.0, 0.0)) -> ScalarField:
    """``amplitude * exp(-|x - center|**2 / sigma**2)``."""
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    cx, cy = map(float, center)
    inv = 1.0 / sigma**2

    def ev(x, y):
        return amplitude * np.exp(-((x - cx) ** 2 + (y - cy) ** 2) * inv)

    def grad(x, y):
        v = -2.0 * inv * ev(x, y)
        return v * (x - cx), v * (y - cy)

    radius = 0.0 if amplitude == 0 else sigma * _DECAY_RADIUS
    return ScalarField(ev, grad, radius, (cx, cy), sigma,
                       f"gaussian(A={amplitude:g},sigma={sigma:g},c=({cx:g},{cy:g}))")


def smoothed_disc(radius: float = 1.0, eps: Optional[float] = None, amplitude: float = 1.0,
                  center=(0.0, 0.0)) -> ScalarField:
    """Disc indicator with an erfc edge: ``A/2 * erfc((|x - c| - R) / eps)``."""
    if not radius > 0:
        raise ValueError(f"radius must be positive, got {radius}")
    if eps is None:
        eps = 0.05 * radius
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    cx, cy = map(float, center)

    def ev(x, y):
        r = np.hypot(x - cx, y - cy)
        return 0.5 * amplitude * erfc((r - radius) / eps)

    def grad(x, y):
        dx, dy = x - cx, y - cy
        r = np.hypot(dx, dy)
        dr = -amplitude / (eps * math.sqrt(math.pi)) * np.exp(-(((r - radius) / eps) ** 2))
        safe = np.where(r > 0, r, 1.0)
        factor = np.where(r > 0, dr / safe, 0.0)
        return factor * dx, factor * dy

    support = radius + eps * _DECAY_RADIUS
    return ScalarField(ev, grad, support if amplitude != 0 else 0.0, (cx, cy), eps,
                       f"smoothed_disc(R={radius:g},eps={eps:g},A={amplitude:g})",
                       "C-infinity (erfc edge)")


def gaussian_mixture(amplitudes, sigmas, centers) -> ScalarField:
    """Sum of :func:`gaussian` components."""
    amplitudes = np.atleast_1d(np.asarray(amplitudes, float))
    sigmas = np.atleast_1d(np.asarray(sigmas, float))
    centers = np.atleast_2d(np.asarray(centers, float))
    n = max(len(amplitudes), len(sigmas), len(centers))
    amplitudes, sigmas = np.broadcast_to(amplitudes, n), np.broadcast_to(sigmas, n)
    centers = np.broadcast_to(centers, (n, 2))
    parts = [gaussian(a, s, c) for a, s, c in zip(amplitudes, sigmas, centers)]

    def ev(x, y):
        return sum(part.evaluator(x, y) for part in parts)

    def grad(x, y):
        gx = gy = 0.0
        for part in parts:
            a, b = part.gradient(x, y)
            gx, gy = gx + a, gy + b
        return gx, gy

    # disc about the origin so the mixture reads as one shifted blob family
    radius = max(float(np.hypot(*c)) + part.support_radius
                 for c, part in zip(centers, parts))
    return ScalarField(ev, grad, radius, (0.0, 0.0), float(sigmas.min()),
                       f"gaussian_mixture(n={n})")


_DEFAULT_MIXTURE = dict(A=[1.0, 0.6, 0.8], sigma=[0.6, 0.45, 0.7],
                        cx=[0.4, -0.7, 0.1], cy=[0.2, 0.3, -0.6])


def make_phantom(name: str, params: Optional[dict] = None) -> ScalarField:
    """Build a registry phantom.

    ``gaussian``                 A, sigma, cx, cy
    ``smoothed_disc``            R, eps (default 0.05 R), A, cx, cy
    ``constant_disc_smoothed``   R (default 3), eps, cx, cy; unit height
    ``shifted_gaussian_mixture`` A, sigma, cx, cy as equal-length lists
    ``zero``                     no parameters
    """
    params = dict(params or {})

    def take(allowed):
        unknown = set(params) - set(allowed)
        if unknown:
            raise ValueError(f"unknown parameter(s) for {name}: {sorted(unknown)}")
        return {k: params.get(k, v) for k, v in allowed.items()}

    if name == "zero":
        take({})
        return zero_field()
    if name == "gaussian":
        p = take(dict(A=1.0, sigma=1.0, cx=0.0, cy=0.0))
        return gaussian(float(p["A"]), float(p["sigma"]), (p["cx"], p["cy"]))
    if name == "smoothed_disc":
        p = take(dict(R=1.0, eps=None, A=1.0, cx=0.0, cy=0.0))
        return smoothed_disc(float(p["R"]), p["eps"], float(p["A"]), (p["cx"], p["cy"]))
    if name == "constant_disc_smoothed":
        p = take(dict(R=3.0, eps=None, cx=0.0, cy=0.0))
        return smoothed_disc(float(p["R"]), p["eps"], 1.0, (p["cx"], p["cy"]))
    if name == "shifted_gaussian_mixture":
        p = take(_DEFAULT_MIXTURE)
        cols = [np.atleast_1d(np.asarray(p[k], float)) for k in ("A", "sigma", "cx", "cy")]
        if len({len(c) for c in cols}) != 1:
            raise ValueError("mixture parameter lists must have equal length")
        if np.any(cols[1] <= 0):
            raise ValueError("mixture sigmas must be positive")
        return gaussian_mixture(cols[0], cols[1], np.column_stack(cols[2:]))
    raise ValueError(f"unknown phantom {name!r}")


PHANTOMS = ("gaussian", "smoothed_disc", "zero", "constant_disc_smoothed",
            "shifted_gaussian_mixture")


def parse_phantom_spec(spec: str) -> ScalarField:
    """Parse ``name:key=val,key=val``; list values are ``;``-separated."""
    name, _, rest = spec.strip().partition(":")
    params = {}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, sep, val = item.partition("=")
        if not sep:
            raise ValueError(f"malformed phantom parameter {item!r} in {spec!r}")
        vals = [float(v) for v in val.split(";")]
        params[key.strip()] = vals if len(vals) > 1 or ";" in val else vals[0]
    return make_phantom(name.strip(), params)


# ---------------------------------------------------------------------------
# quadrature

def integrate_2d(field: ScalarField, extent, n: int = 512) -> float:
    """Tensor-product composite Simpson rule over a box.

    ``extent`` is a half-width ``L`` (box ``[-L, L]^2``) or
    ``(x0, x1, y0, y1)``; ``n`` is the number of intervals per axis.
    """
    if n < 16:
        raise ValueError("integrate_2d needs n >= 16")
    if np.ndim(extent) == 0:
        x0, x1, y0, y1 = -extent, extent, -extent, extent
    else:
        x0, x1, y0, y1 = map(float, extent)
    if not (x1 > x0 and y1 > y0):
        raise ValueError(f"degenerate integration box {extent!r}")
    if field.is_zero:
        return 0.0
    xs = np.linspace(x0, x1, n + 1)
    ys = np.linspace(y0, y1, n + 1)
    chunk = max(1, 2_000_000 // len(xs))
    inner = np.empty(len(ys))
    for i in range(0, len(ys), chunk):
        Y, X = np.meshgrid(ys[i:i + chunk], xs, indexing="ij")
        inner[i:i + chunk] = simpson(field(X, Y), x=xs, axis=1)
    return float(simpson(inner, x=ys))


# ---------------------------------------------------------------------------
# sampled fields

@dataclass
class GridField:
    """Node values on ``linspace(-L, L, n_x) x linspace(-L, L, n_y)``.

    ``values`` has shape ``(n_y, n_x)`` (row index is y).  Evaluation is
    bilinear inside the box and zero outside.
    """

    values: np.ndarray
    L: float
    interpolation: str = dc_field(default="bilinear")

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype=np.float64)
        if self.values.ndim != 2 or min(self.values.shape) < 2:
            raise ValueError("GridField values must be a 2-D array with at least 2x2 nodes")
        if not self.L > 0:
            raise ValueError("GridField half-extent L must be positive")

    @property
    def n_x(self) -> int:
        return self.values.shape[1]

    @property
    def n_y(self) -> int:
        return self.values.shape[0]

    @property
    def xs(self) -> np.ndarray:
        return np.linspace(-self.L, self.L, self.n_x)

    @property
    def ys(self) -> np.ndarray:
        return np.linspace(-self.L, self.L, self.n_y)

    @classmethod
    def sample(cls, field: ScalarField, n_x: int, n_y: int, L: float) -> "GridField":
        X, Y = np.meshgrid(np.linspace(-L, L, n_x), np.linspace(-L, L, n_y))
        return cls(field(X, Y), L)

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        tx = _node_coordinate(x, self.L, self.n_x)
        ty = _node_coordinate(y, self.L, self.n_y)
        inside = (tx >= 0) & (tx <= self.n_x - 1) & (ty >= 0) & (ty <= self.n_y - 1)
        tx = np.where(inside, tx, 0.0)
        ty = np.where(inside, ty, 0.0)
        i0 = np.minimum(np.floor(tx).astype(int), self.n_x - 2)
        j0 = np.minimum(np.floor(ty).astype(int), self.n_y - 2)
        fx, fy = tx - i0, ty - j0
        v = self.values
        out = ((1 - fy) * ((1 - fx) * v[j0, i0] + fx * v[j0, i0 + 1])
               + fy * ((1 - fx) * v[j0 + 1, i0] + fx * v[j0 + 1, i0 + 1]))
        return np.where(inside, out, 0.0)

    def to_field(self) -> ScalarField:
        return ScalarField(self.__call__, None, self.L * math.sqrt(2.0), (0.0, 0.0),
                           2.0 * self.L / (max(self.n_x, self.n_y) - 1), "grid",
                           "C0 (bilinear)")


def _node_coordinate(x, L, n):
    t = (x + L) / (2.0 * L) * (n - 1)
    r = np.rint(t)
    return np.where(np.abs(t - r) < 1e-9, r, t)
