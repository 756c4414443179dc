"""Reduced-resolution invariant suite behind ``attradon selftest``."""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .fields import integrate_2d, make_phantom, zero_field
from .geometry import SinogramGrid
from .hilbert import hilbert_1d
from .plancherel import identity_check_ibp, identity_check_total_derivative, pair_quadrature
from .radon import classical_sinogram, forward_sinogram


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float


def _adjointness(quick):
    rng = np.random.default_rng(7)
    p = np.linspace(-12, 12, 512 if quick else 1024)
    worst = 0.0
    for _ in range(10 if quick else 50):
        c1, c2 = rng.uniform(-2, 2, 2)
        s1, s2 = rng.uniform(0.5, 1.5, 2)
        f = rng.uniform(0.5, 2) * np.exp(-((p - c1) / s1) ** 2) * np.cos(rng.uniform(0, 3) * p)
        g = (rng.uniform(0.5, 2) * np.exp(-((p - c2) / s2) ** 2)
             * np.sin(rng.uniform(0, 3) * p + 0.3))
        lhs = np.sum(f * hilbert_1d(g))
        rhs = -np.sum(hilbert_1d(f) * g)
        worst = max(worst, abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300))
    return worst < 1e-6, f"max relative mismatch {worst:.2e}"


def _closed_form(quick):
    p = np.linspace(-20, 20, 2048)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        hp = hilbert_1d(1.0 / (1.0 + p**2))
    mask = np.abs(p) <= 5
    err = np.max(np.abs(hp - p / (1 + p**2))[mask])
    return err < 1e-3, f"max abs error {err:.2e} on |p| <= 5"


def _a0_reduction(quick):
    grid = SinogramGrid(16 if quick else 32, 128, 6.0)
    f = make_phantom("shifted_gaussian_mixture")
    d = np.max(np.abs(forward_sinogram(f, zero_field(), grid).values
                      - classical_sinogram(f, grid).values))
    return d <= 1e-12, f"max |R_0 f - R f| = {d:.1e}"


def _fubini(quick):
    grid = SinogramGrid(8, 256 if quick else 512, 6.0)
    f = make_phantom("gaussian")
    s = classical_sinogram(f, grid)
    mass = integrate_2d(f, 6.0, 512)
    err = np.max(np.abs(grid.d_p * s.values.sum(axis=1) / mass - 1))
    return err < 1e-4, f"max relative row-mass error {err:.2e}"


def _identities(quick):
    grid = SinogramGrid(90 if quick else 180, 512, 6.0)
    f = make_phantom("gaussian")
    g = make_phantom("gaussian", dict(cx=0.5))
    a = make_phantom("gaussian", dict(A=0.3, sigma=1.5))
    sino = forward_sinogram(f, a, grid)
    td = identity_check_total_derivative(f, g, a, grid, n_lines=40, sino_f=sino)
    ibp = identity_check_ibp(f, g, a, grid, rows=np.arange(0, grid.n_angles, 9), sino_f=sino)
    ok = td.max_deviation < 1e-3 and ibp.max_deviation < 1e-3
    return ok, (f"product rule {td.max_deviation:.1e}, "
                f"integration by parts {ibp.max_deviation:.1e}")


def _pairing(quick):
    grid = SinogramGrid(60 if quick else 120, 256 if quick else 512, 8.0)
    f = make_phantom("gaussian")
    g = make_phantom("gaussian", dict(cx=0.5))
    truth = integrate_2d(f.product(g), 6.0, 512)
    value = pair_quadrature(classical_sinogram(f, grid), g, zero_field()).value
    err = abs(value / truth - 1)
    return err < 1e-3, f"pairing {value:.6f} vs oracle {truth:.6f} (rel {err:.1e})"


CHECKS: list[tuple[str, Callable]] = [
    ("hilbert_adjointness", _adjointness),
    ("hilbert_closed_form", _closed_form),
    ("a0_reduction", _a0_reduction),
    ("fubini_mass", _fubini),
    ("derivation_identities", _identities),
    ("pairing_vs_oracle", _pairing),
]


def run_selftest(quick: bool = False) -> list[CheckResult]:
    results = []
    for name, check in CHECKS:
        t0 = time.perf_counter()
        try:
            ok, detail = check(quick)
        except Exception as exc:  # a crash is a failed check, keep going
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        results.append(CheckResult(name, bool(ok), detail, time.perf_counter() - t0))
    return results


def format_report(results) -> str:
    lines = [f"{'PASS' if r.passed else 'FAIL'}  {r.name:<24} {r.detail}  [{r.seconds:.1f}s]"
             for r in results]
    n_ok = sum(r.passed for r in results)
    lines.append(f"{n_ok}/{len(results)} checks passed")
    return "\n".join(lines)

