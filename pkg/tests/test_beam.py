import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import erf

from attradon.beam import (BeamQuadratureConfig, attenuation_weight, divergent_beam,
                           simpson_weights, tail_integral)
from attradon.fields import gaussian, make_phantom, smoothed_disc, zero_field

SQRT_PI = math.sqrt(math.pi)


def test_zero_attenuation():
    assert divergent_beam(zero_field(), 0.3, -1.0, 1.2) == 0.0


@pytest.mark.parametrize("omega", [0.0, 1.0, math.pi, 4.5])
def test_unit_gaussian_from_center(omega):
    assert divergent_beam(gaussian(), 0.0, 0.0, omega) == pytest.approx(SQRT_PI / 2, abs=1e-8)


def test_weight_from_center():
    w = attenuation_weight(gaussian(), 0.0, 0.0, 0.0)
    assert w == pytest.approx(math.exp(-SQRT_PI / 2), abs=1e-8)
    # the commonly quoted 0.41222 is exp(-sqrt(pi)/2) = 0.412208 to its last digit
    assert w == pytest.approx(0.41222, abs=2e-5)


@pytest.mark.parametrize("R,c", [(1.0, 1.0), (2.0, 0.5), (0.7, 3.0)])
def test_disc_half_chord(R, c):
    # from the center, the smoothed profile integrates to exactly c*R
    a = smoothed_disc(R, None, c)
    assert divergent_beam(a, 0.0, 0.0, 0.9) == pytest.approx(c * R, abs=1e-8)


def test_off_center_gaussian():
    a = gaussian(center=(1.0, 0.0))
    expected = SQRT_PI / 2 * (1 + erf(1.0))
    assert divergent_beam(a, 0.0, 0.0, 0.0) == pytest.approx(expected, abs=1e-8)
    # looking away from the bump only sees its tail
    assert divergent_beam(a, 0.0, 0.0, math.pi) == pytest.approx(
        SQRT_PI / 2 * (1 - erf(1.0)), abs=1e-8)


def test_ray_missing_support_is_zero():
    a = gaussian()
    assert divergent_beam(a, 10.0, 0.0, 0.0) == 0.0


def test_nonnegative_for_nonnegative_attenuation():
    rng = np.random.default_rng(0)
    a = make_phantom("shifted_gaussian_mixture")
    x, y = rng.uniform(-4, 4, (2, 200))
    assert np.all(divergent_beam(a, x, y, 2.2) >= 0.0)


@pytest.mark.parametrize("t", [0.3, 1.0, 2.5])
def test_additivity_along_ray(t):
    a = make_phantom("gaussian", dict(A=0.3, sigma=1.5, cx=0.4, cy=-0.1))
    x, y, omega = -1.0, 0.5, 0.4
    c, s = math.cos(omega), math.sin(omega)
    head, _ = quad(lambda r: float(a(x + r * c, y + r * s)), 0.0, t, epsabs=1e-13)
    total = divergent_beam(a, x, y, omega)
    rest = divergent_beam(a, x + t * c, y + t * s, omega)
    assert total == pytest.approx(head + rest, abs=1e-8)


def test_linear_in_attenuation():
    a = make_phantom("shifted_gaussian_mixture")
    x, y = np.linspace(-2, 2, 7), np.linspace(1, -1, 7)
    base = divergent_beam(a, x, y, 0.8)
    scaled = divergent_beam(3.5 * a, x, y, 0.8)
    assert np.max(np.abs(scaled - 3.5 * base)) <= 1e-14 * np.max(np.abs(scaled))


def test_array_shapes():
    x = np.zeros((3, 4))
    assert divergent_beam(gaussian(), x, 0.0, 0.0).shape == (3, 4)


def test_cutoff_shorter_than_support_is_error():
    with pytest.raises(ValueError):
        divergent_beam(gaussian(), 0.0, 0.0, 0.0, BeamQuadratureConfig(cutoff=1.0))
    v = divergent_beam(gaussian(), 0.0, 0.0, 0.0, BeamQuadratureConfig(cutoff=10.0))
    assert v == pytest.approx(SQRT_PI / 2, abs=1e-8)


def test_config_validation():
    with pytest.raises(ValueError):
        BeamQuadratureConfig(step=0.0)
    with pytest.raises(ValueError):
        BeamQuadratureConfig(cutoff=-1.0)


def test_simpson_weights():
    assert np.allclose(simpson_weights(4) * 3, [1, 4, 2, 4, 1])
    with pytest.raises(ValueError):
        simpson_weights(3)


def test_tail_integral_of_exponential():
    u = np.linspace(0, 3, 301)
    tail = tail_integral(np.exp(-u), u[1] - u[0])
    assert tail[-1] == 0.0
    assert np.max(np.abs(tail - (np.exp(-u) - np.exp(-3)))) < 1e-9
