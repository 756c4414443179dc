"""Pairing ``int f g dx`` from attenuated data of ``f`` and a known probe ``g``.

::

    int f g dx = 1/(4 pi) int_{S^1} int R_a f(omega, p) K(omega, p) dp d omega
    K = Re[ exp(h) H_p( exp(-h) B(omega, .) ) ]

where ``h = (Ra + i H Ra)/2`` and ``B(omega, p)`` is the line integral of the
directional derivative ``d/d omega g`` weighted by ``exp(+Da(x, perp omega))``.
The weight sign is positive: moving the derivative and the Hilbert
transform from ``f`` onto ``g`` carries over the *back-projection* weight of
the inversion formula, not the forward attenuation.

Only the probe side is filtered.  The data ``R_a f`` enters the pairing as
raw samples, so no derivative or Hilbert transform of measured data is ever
formed.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .beam import BeamQuadratureConfig, divergent_beam
from .fields import ScalarField, UnsupportedOperationError, directional_derivative, zero_field
from .geometry import TWO_PI, SinogramGrid, normalize_angle
from .hilbert import HilbertConfig, compute_h, hilbert_1d
from .novikov import filtered_data
from .radon import (LineQuadratureConfig, Sinogram, check_same_grid, forward_sinogram,
                    line_integrals)

MC_BLOCK = 1024


@dataclass(frozen=True)
class PairingResult:
    value: float
    method: str
    stderr: float = 0.0
    n_samples: int = 0
    seed: Optional[int] = None

    def record(self) -> str:
        seed = "none" if self.seed is None else str(self.seed)
        return (f"value={self.value!r} stderr={self.stderr!r} method={self.method} "
                f"n={self.n_samples} seed={seed}")

    def csv(self, header: bool = True) -> str:
        seed = "" if self.seed is None else str(self.seed)
        row = f"{self.value!r},{self.stderr!r},{self.method},{self.n_samples},{seed}"
        return ("value,stderr,method,n,seed\n" + row) if header else row


def _require_gradient(g: ScalarField):
    if g.gradient is None:
        raise UnsupportedOperationError(
            f"probe {g.name!r} has no analytic gradient; sampled probes are not accepted")


def kernel_rows(g: ScalarField, a: ScalarField, omegas, offsets,
                line_cfg: Optional[LineQuadratureConfig] = None,
                hilbert_cfg: HilbertConfig = HilbertConfig()) -> np.ndarray:
    """``K(omega, p)`` for each angle in ``omegas`` on the uniform ``offsets``.

    Each row is built from scratch: the classical transform of ``a`` for
    ``h``, the back-weighted transform of ``d/d omega g``, one Hilbert
    transform of the complex product.
    """
    _require_gradient(g)
    cfg = line_cfg or LineQuadratureConfig()
    step = cfg.resolve_step(g, a)
    a_cfg = LineQuadratureConfig(cfg.resolve_step(a), cfg.u_max)
    g_cfg = LineQuadratureConfig(step, cfg.u_max)
    offsets = np.asarray(offsets, dtype=float)
    omegas = np.atleast_1d(omegas)
    back = np.array([line_integrals(g.directional(w), a, w, offsets, g_cfg, +1.0)
                     for w in omegas])
    if a.is_zero:
        return hilbert_1d(back, hilbert_cfg)
    ra = np.array([line_integrals(a, zero_field(), w, offsets, a_cfg) for w in omegas])
    h = 0.5 * (ra + 1j * hilbert_1d(ra, hilbert_cfg))
    return np.real(np.exp(h) * hilbert_1d(np.exp(-h) * back, hilbert_cfg))


def pairing_kernel(g: ScalarField, a: ScalarField, grid: SinogramGrid,
                   line_cfg: Optional[LineQuadratureConfig] = None,
                   hilbert_cfg: HilbertConfig = HilbertConfig(),
                   refine: int = 2, workers: int = 1) -> Sinogram:
    """``K`` on ``grid``, computed on offsets ``refine`` times denser (and
    with ``refine`` times finer line sampling) and restricted back."""
    _require_gradient(g)
    fine = grid.refined(refine)
    cfg = line_cfg or LineQuadratureConfig()
    cfg = LineQuadratureConfig(cfg.resolve_step(g, a) / refine, cfg.u_max)
    offsets = fine.offsets

    def row(w):
        return kernel_rows(g, a, w, offsets, cfg, hilbert_cfg)[0]

    angles = grid.angles
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            rows = list(pool.map(row, angles))
    else:
        rows = [row(w) for w in angles]
    return Sinogram(grid, np.array(rows)[:, ::refine])


def pair_quadrature(sino_f: Sinogram, g: ScalarField, a: ScalarField,
                    line_cfg: Optional[LineQuadratureConfig] = None,
                    hilbert_cfg: HilbertConfig = HilbertConfig(),
                    refine: int = 2, kernel: Optional[Sinogram] = None,
                    workers: int = 1) -> PairingResult:
    """Uniform-grid quadrature of the pairing formula.

    ``kernel`` may be passed in to reuse one probe-side computation for many
    data sinograms.
    """
    if kernel is None:
        kernel = pairing_kernel(g, a, sino_f.grid, line_cfg, hilbert_cfg, refine, workers)
    check_same_grid(sino_f.grid, kernel.grid)
    grid = sino_f.grid
    value = np.sum(sino_f.values * kernel.values) * grid.d_omega * grid.d_p / (4 * math.pi)
    return PairingResult(float(value), "quadrature")


# ---------------------------------------------------------------------------
# Monte Carlo over random lines

class SinogramInterpolator:
    """``R_a f`` at arbitrary lines from a stored sinogram: linear in ``p``,
    periodic linear in ``omega``, zero outside ``[-p_max, p_max]``."""

    def __init__(self, sino: Sinogram):
        self.sino = sino

    def __call__(self, omega, p):
        return _bilinear(self.sino, omega, p)


def _bilinear(sino: Sinogram, omega, p):
    grid = sino.grid
    t = normalize_angle(np.asarray(omega, float)) / grid.d_omega
    k0 = np.floor(t).astype(int) % grid.n_angles
    k1 = (k0 + 1) % grid.n_angles
    ft = t - np.floor(t)
    s = (np.asarray(p, float) + grid.p_max) / grid.d_p
    inside = (s >= 0) & (s <= grid.n_p - 1)
    s = np.clip(s, 0, grid.n_p - 1)
    j0 = np.minimum(np.floor(s).astype(int), grid.n_p - 2)
    fs = s - j0
    v = sino.values
    row0 = (1 - fs) * v[k0, j0] + fs * v[k0, j0 + 1]
    row1 = (1 - fs) * v[k1, j0] + fs * v[k1, j0 + 1]
    return np.where(inside, (1 - ft) * row0 + ft * row1, 0.0)


def direct_evaluator(f: ScalarField, a: ScalarField,
                     line_cfg: Optional[LineQuadratureConfig] = None) -> Callable:
    """``R_a f`` at arbitrary lines by direct forward evaluation (one line at a time)."""
    def evaluate(omega, p):
        omega = np.atleast_1d(omega)
        p = np.atleast_1d(p)
        return np.array([line_integrals(f, a, w, [q], line_cfg)[0] for w, q in zip(omega, p)])
    return evaluate


def _row_interp(values, grid, k, p):
    s = np.clip((p + grid.p_max) / grid.d_p, 0, grid.n_p - 1)
    j0 = np.minimum(np.floor(s).astype(int), grid.n_p - 2)
    fs = s - j0
    return (1 - fs) * values[k, j0] + fs * values[k, j0 + 1]


def pair_monte_carlo(sino_f_evaluator: Callable, g: ScalarField, a: ScalarField,
                     n_samples: int, seed: int, p_max: float,
                     kernel: Optional[Sinogram] = None, row_n_p: int = 1025,
                     line_cfg: Optional[LineQuadratureConfig] = None,
                     hilbert_cfg: HilbertConfig = HilbertConfig(),
                     workers: int = 1) -> PairingResult:
    """Monte Carlo estimate over lines ``(omega, p)`` uniform on
    ``[0, 2 pi) x [-p_max, p_max]``.

    Samples are drawn in fixed blocks of ``MC_BLOCK`` lines, each block with
    its own stream spawned from ``seed``, so the result is the same for any
    ``workers``.  ``K`` at a sampled line comes from ``kernel`` (nearest
    stored angle, linear in ``p``) when given, otherwise from an exact row
    computed at the sampled angle on ``row_n_p`` offsets.
    """
    if int(n_samples) != n_samples or n_samples < 1:
        raise ValueError(f"n_samples must be a positive integer, got {n_samples}")
    if not p_max > 0:
        raise ValueError("p_max must be positive")
    _require_gradient(g)
    n_samples = int(n_samples)
    if kernel is not None and kernel.grid.p_max != p_max:
        raise ValueError("stored kernel covers a different offset range")
    n_blocks = -(-n_samples // MC_BLOCK)
    streams = np.random.SeedSequence(seed).spawn(n_blocks)
    offsets = np.linspace(-p_max, p_max, row_n_p)

    def block(b):
        m = min(MC_BLOCK, n_samples - b * MC_BLOCK)
        rng = np.random.default_rng(streams[b])
        omega = rng.uniform(0.0, TWO_PI, m)
        p = rng.uniform(-p_max, p_max, m)
        data = np.asarray(sino_f_evaluator(omega, p), dtype=float)
        if kernel is not None:
            k = _row_interp(kernel.values, kernel.grid, kernel.grid.angle_index(omega), p)
        else:
            k = np.empty(m)
            live = np.flatnonzero(data != 0.0)
            for i in live:
                row = kernel_rows(g, a, omega[i], offsets, line_cfg, hilbert_cfg)[0]
                k[i] = np.interp(p[i], offsets, row)
            k[data == 0.0] = 0.0
        return data * k

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(block, range(n_blocks)))
    else:
        parts = [block(b) for b in range(n_blocks)]
    terms = np.concatenate(parts) * (TWO_PI * 2 * p_max / (4 * math.pi))
    value = float(np.mean(terms))
    stderr = float(np.std(terms, ddof=1) / math.sqrt(n_samples)) if n_samples > 1 else math.inf
    return PairingResult(value, "monte_carlo", stderr, n_samples, seed)


# ---------------------------------------------------------------------------
# consistency of the derivation steps

@dataclass
class IdentityReport:
    """``max_deviation`` is the figure of merit; ``residuals`` holds the
    per-line or per-row values it was taken over."""

    name: str
    max_deviation: float
    residuals: np.ndarray
    details: dict = field(default_factory=dict)

    def passed(self, tol: float) -> bool:
        return bool(self.max_deviation < tol)


def _beam_weight(a, omega, p, u, beam_cfg):
    """``exp(Da(p e + u perp, perp))`` for arrays ``p``, ``u`` at angle ``omega``."""
    c, s = math.cos(omega), math.sin(omega)
    x = p * c - u * s
    y = p * s + u * c
    return np.exp(divergent_beam(a, x, y, omega + 0.5 * math.pi, beam_cfg))


def _default_beam(a: ScalarField) -> BeamQuadratureConfig:
    return BeamQuadratureConfig(step=(a.scale / 32.0) if not a.is_zero else None)


def _filtered(f, a, grid, line_cfg, hilbert_cfg, sino_f):
    if sino_f is None:
        sino_f = forward_sinogram(f, a, grid, line_cfg)
    h = compute_h(a, grid, hilbert_cfg, line_cfg)
    return filtered_data(sino_f, h, hilbert_cfg).values


def identity_check_total_derivative(f: ScalarField, g: ScalarField, a: ScalarField,
                                    grid: SinogramGrid,
                                    line_cfg: Optional[LineQuadratureConfig] = None,
                                    hilbert_cfg: HilbertConfig = HilbertConfig(),
                                    beam_cfg: Optional[BeamQuadratureConfig] = None,
                                    lines=None, n_lines: int = 100, seed: int = 0,
                                    sino_f: Optional[Sinogram] = None) -> IdentityReport:
    """Product rule for ``W = exp(Da) G`` along random lines.

    Compares the centered difference of ``W`` with ``D(exp(Da)) G + exp(Da) D(G)``,
    all differences over ``p_{j +- 1}``.  Lines are ``(angle index, p, u)``
    triples with ``p`` on the grid; by default they are drawn from ``seed``
    with ``p`` and ``u`` inside the probe's support.  The deviation is taken
    relative to ``max |D W|`` over the lines.
    """
    beam_cfg = beam_cfg or _default_beam(a)
    G = _filtered(f, a, grid, line_cfg, hilbert_cfg, sino_f)
    P = grid.offsets
    if lines is None:
        lines = random_lines(grid, g, n_lines, seed)
    ks, ps, us = (np.asarray(v) for v in lines)
    js = np.rint((ps + grid.p_max) / grid.d_p).astype(int)
    if np.any(np.abs(P[js] - ps) > 1e-9 * grid.p_max) or np.any((js < 1) | (js > grid.n_p - 2)):
        raise ValueError("identity lines must sit on interior grid offsets")
    two_h = 2 * grid.d_p
    lhs = np.empty(len(ks))
    rhs = np.empty(len(ks))
    for i, (k, j, u) in enumerate(zip(ks, js, us)):
        w = grid.angles[k]
        E = _beam_weight(a, w, P[j - 1:j + 2], np.full(3, u), beam_cfg)
        Gm, G0, Gp = G[k, j - 1:j + 2]
        lhs[i] = (E[2] * Gp - E[0] * Gm) / two_h
        rhs[i] = (E[2] - E[0]) / two_h * G0 + E[1] * (Gp - Gm) / two_h
    scale = np.max(np.abs(lhs))
    dev = np.abs(lhs - rhs) / scale if scale > 0 else np.abs(lhs - rhs)
    return IdentityReport("total_derivative", float(dev.max()), dev,
                          dict(lhs=lhs, rhs=rhs, d_p=grid.d_p))


def random_lines(grid: SinogramGrid, g: ScalarField, n: int, seed: int):
    """``n`` random ``(angle index, p, u)`` with ``|p|, |u|`` inside ``g``'s support
    (capped by the grid) and ``p`` on the grid offsets."""
    rng = np.random.default_rng(seed)
    reach = min(g.support_radius, grid.p_max - 2 * grid.d_p)
    j_lo = int(math.ceil((grid.p_max - reach) / grid.d_p))
    j_hi = grid.n_p - 1 - j_lo
    ks = rng.integers(0, grid.n_angles, n)
    js = rng.integers(j_lo, j_hi + 1, n)
    us = rng.uniform(-reach, reach, n)
    return ks, grid.offsets[js], us


def identity_check_ibp(f: ScalarField, g: ScalarField, a: ScalarField, grid: SinogramGrid,
                       line_cfg: Optional[LineQuadratureConfig] = None,
                       hilbert_cfg: HilbertConfig = HilbertConfig(),
                       beam_cfg: Optional[BeamQuadratureConfig] = None,
                       u=None, rows=None, seed: int = 0,
                       sino_f: Optional[Sinogram] = None) -> IdentityReport:
    """Integration by parts in ``p`` on each angle row at a fixed ``u``.

    ``sum_j D(W)_j g_j = - sum_j W_j (d_omega g)_j`` with ``W = exp(Da) G``,
    ``D`` the centered difference and ``g_j = g(p_j e + u perp)``.  The
    probe's derivative is analytic, so the residual measures the
    discretization of ``D`` (second order in ``d_p``) plus the boundary term
    ``[W g]`` at the row ends, which is reported separately.  Each row's
    residual is relative to ``d_p * sum |W d_omega g|``.
    """
    beam_cfg = beam_cfg or _default_beam(a)
    G = _filtered(f, a, grid, line_cfg, hilbert_cfg, sino_f)
    P = grid.offsets
    rows = np.arange(grid.n_angles) if rows is None else np.asarray(rows)
    if u is None:
        rng = np.random.default_rng(seed)
        reach = 0.5 * min(g.support_radius, grid.p_max)
        u = rng.uniform(-reach, reach, len(rows))
    u = np.broadcast_to(np.asarray(u, float), rows.shape)
    resid = np.empty(len(rows))
    boundary = np.empty(len(rows))
    lhs = np.empty(len(rows))
    for i, (k, uk) in enumerate(zip(rows, u)):
        w = grid.angles[k]
        c, s = math.cos(w), math.sin(w)
        E = _beam_weight(a, w, P, np.full(P.shape, uk), beam_cfg)
        W = E * G[k]
        x, y = P * c - uk * s, P * s + uk * c
        gt = g(x, y)
        dgt = directional_derivative(g, w, x, y)
        dW = np.gradient(W, grid.d_p, edge_order=2)
        left = grid.d_p * np.sum(dW * gt)
        right = -grid.d_p * np.sum(W * dgt)
        mag = grid.d_p * np.sum(np.abs(W * dgt))
        lhs[i] = left
        resid[i] = abs(left - right) / mag if mag > 0 else abs(left - right)
        boundary[i] = max(abs(W[0] * gt[0]), abs(W[-1] * gt[-1]))
    return IdentityReport("integration_by_parts", float(resid.max()), resid,
                          dict(boundary=boundary, lhs=lhs, u=np.asarray(u), d_p=grid.d_p))
