import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import dawsn

from attradon.fields import gaussian, make_phantom, zero_field
from attradon.geometry import SinogramGrid
from attradon.hilbert import HilbertConfig, compute_h, hilbert_rows
from attradon.novikov import (ReconstructionConfig, filtered_data, reconstruct,
                              reconstruct_divergence_form, relative_l2_error)
from attradon.radon import GridMismatchError, Sinogram, classical_sinogram, forward_sinogram

ATTEN = dict(A=0.3, sigma=1.5, cx=0.4, cy=-0.2)


def analytic_h(omega, t):
    """h for a Gaussian attenuation, from its closed-form Radon transform and
    H exp(-t^2) = 2 D(t) / sqrt(pi) (D = Dawson's integral)."""
    A, s = ATTEN["A"], ATTEN["sigma"]
    cp = ATTEN["cx"] * math.cos(omega) + ATTEN["cy"] * math.sin(omega)
    z = (t - cp) / s
    return 0.5 * (A * s * math.sqrt(math.pi) * np.exp(-z * z) + 1j * 2 * A * s * dawsn(z))


def random_rows(rng, n_angles, p):
    params = [(rng.uniform(0.5, 1.5), rng.uniform(-2, 2), rng.uniform(0.6, 1.4))
              for _ in range(n_angles)]
    rows = np.array([A * np.exp(-((p - c) / w) ** 2) for A, c, w in params])
    return params, rows


def pv(func, q, lo, hi):
    return -quad(func, lo, hi, weight="cauchy", wvar=q, limit=400)[0] / math.pi


def test_filtered_data_without_attenuation_is_hilbert():
    grid = SinogramGrid(8, 256, 6.0)
    s = classical_sinogram(make_phantom("shifted_gaussian_mixture"), grid)
    G = filtered_data(s, compute_h(zero_field(), grid))
    assert np.array_equal(G.values, hilbert_rows(s).values)


def test_filtered_data_of_zero():
    grid = SinogramGrid(8, 64, 6.0)
    h = compute_h(gaussian(0.3, 1.5), grid)
    assert not np.any(filtered_data(Sinogram(grid, np.zeros(grid.shape)), h).values)


def test_filtered_data_matches_direct_pv_oracle():
    rng = np.random.default_rng(11)
    grid = SinogramGrid(8, 1025, 10.0)
    params, rows = random_rows(rng, grid.n_angles, grid.offsets)
    G = filtered_data(Sinogram(grid, rows), compute_h(make_phantom("gaussian", ATTEN), grid))
    for _ in range(10):
        k = int(rng.integers(grid.n_angles))
        j = int(rng.integers(grid.n_p // 4, 3 * grid.n_p // 4))
        w, q = grid.angles[k], grid.offsets[j]
        A, c, width = params[k]

        def weighted(t, part):
            v = np.exp(analytic_h(w, t)) * A * math.exp(-((t - c) / width) ** 2)
            return float(getattr(v, part))

        inner = pv(lambda t: weighted(t, "real"), q, -10, 10) \
            + 1j * pv(lambda t: weighted(t, "imag"), q, -10, 10)
        oracle = (np.exp(-analytic_h(w, q)) * inner).real
        assert G.values[k, j] == pytest.approx(oracle, abs=1e-3 * np.max(np.abs(G.values[k])))


def test_filtered_data_grid_mismatch():
    g1, g2 = SinogramGrid(8, 64, 6.0), SinogramGrid(8, 64, 5.0)
    with pytest.raises(GridMismatchError):
        filtered_data(Sinogram(g1, np.zeros(g1.shape)), compute_h(zero_field(), g2))


class TestReconstruct:
    grid = SinogramGrid(90, 192, 6.0)
    cfg = ReconstructionConfig(40, 40, 3.0)
    a = make_phantom("gaussian", ATTEN)

    def test_zero_sinogram(self):
        r = reconstruct(Sinogram(self.grid, np.zeros(self.grid.shape)), self.a, self.cfg)
        assert not np.any(r.values)

    def test_linear(self):
        s1 = forward_sinogram(make_phantom("gaussian", dict(cx=0.5)), self.a, self.grid)
        s2 = forward_sinogram(make_phantom("smoothed_disc", dict(R=1, eps=0.2)), self.a,
                              self.grid)
        lhs = reconstruct(s1 + (-2.0) * s2, self.a, self.cfg).values
        rhs = (reconstruct(s1, self.a, self.cfg).values
               - 2.0 * reconstruct(s2, self.a, self.cfg).values)
        assert np.max(np.abs(lhs - rhs)) <= 1e-10 * np.max(np.abs(lhs))

    @pytest.mark.parametrize("attenuated", [False, True])
    def test_expanded_form_matches_divergence_form(self, attenuated):
        grid = SinogramGrid(360, 512, 6.0)
        f = make_phantom("gaussian")
        a = self.a if attenuated else zero_field()
        s = forward_sinogram(f, a, grid)
        cfg = ReconstructionConfig(48, 48, 3.0)
        r1 = reconstruct(s, a, cfg).values
        r2 = reconstruct_divergence_form(s, a, cfg).values
        assert np.linalg.norm(r1 - r2) / np.linalg.norm(r1) < 1e-3

    @pytest.mark.parametrize("attenuated", [False, True])
    def test_error_decreases_under_refinement(self, attenuated):
        f = make_phantom("shifted_gaussian_mixture")
        a = self.a if attenuated else zero_field()
        cfg = ReconstructionConfig(40, 40, 3.0)
        errs = []
        for n_angles, n_p in ((32, 48), (64, 96), (128, 192)):
            grid = SinogramGrid(n_angles, n_p, 6.0)
            errs.append(relative_l2_error(reconstruct(forward_sinogram(f, a, grid), a, cfg), f))
        assert errs[0] > errs[1] > errs[2]
        assert errs[1] / errs[2] > 3  # second order in (d_omega, d_p)

    def test_precomputed_h_is_used(self):
        s = forward_sinogram(make_phantom("gaussian"), self.a, self.grid)
        h = compute_h(self.a, self.grid)
        assert np.array_equal(reconstruct(s, self.a, self.cfg, h=h).values,
                              reconstruct(s, self.a, self.cfg).values)

    def test_points_outside_offset_range_rejected(self):
        grid = SinogramGrid(16, 64, 2.0)
        s = Sinogram(grid, np.zeros(grid.shape))
        with pytest.raises(ValueError, match="outside the sampled offset range"):
            reconstruct(s, zero_field(), ReconstructionConfig(16, 16, 3.0))

    def test_direct_pv_hilbert_option(self):
        f = make_phantom("gaussian")
        s = forward_sinogram(f, self.a, self.grid)
        r = reconstruct(s, self.a, self.cfg, HilbertConfig(method="direct_pv"))
        assert relative_l2_error(r, f) < 0.02


def test_config_validation():
    with pytest.raises(ValueError):
        ReconstructionConfig(1, 16)
    with pytest.raises(ValueError):
        ReconstructionConfig(16, 16, 0.0)
