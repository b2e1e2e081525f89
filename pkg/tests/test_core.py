import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from droplet_fall.core import (ComplexField, DimensionalInputs, SpatialGrid, centered_grid,
                               dimensionless_couplings, integrate, make_grid, second_derivative,
                               spectral_derivative)


class TestSpatialGrid:
    def test_coordinates(self):
        g = make_grid(8, -1.0, 0.25)
        np.testing.assert_allclose(g.x, -1.0 + 0.25 * np.arange(8))
        assert g.x_max == pytest.approx(0.75)
        assert g.length == pytest.approx(2.0)
        assert g.k_max == pytest.approx(np.pi / 0.25)

    def test_wavenumbers_match_fftfreq(self):
        g = make_grid(16, 0.0, 0.1)
        np.testing.assert_allclose(g.k_values, 2 * np.pi * np.fft.fftfreq(16, 0.1))

    @pytest.mark.parametrize("n", [0, 3, 100, -4])
    def test_rejects_non_power_of_two(self, n):
        with pytest.raises(ValueError):
            SpatialGrid(n, 0.0, 0.1)

    @pytest.mark.parametrize("dx", [0.0, -0.1, float("nan")])
    def test_rejects_bad_spacing(self, dx):
        with pytest.raises(ValueError):
            SpatialGrid(8, 0.0, dx)

    def test_arrays_read_only(self):
        g = make_grid(8, 0.0, 1.0)
        with pytest.raises(ValueError):
            g.x[0] = 5.0

    def test_centered_grid_puts_center_on_middle_sample(self):
        g = centered_grid(64, 0.5, center=3.0)
        assert g.x[32] == pytest.approx(3.0)


def test_complex_field_density_and_shape_check():
    g = make_grid(4, 0.0, 1.0)
    f = ComplexField(g, [1, 1j, 2, 0])
    np.testing.assert_allclose(f.density, [1, 1, 4, 0])
    with pytest.raises(ValueError):
        ComplexField(g, np.zeros(3))


def test_integrate_needs_two_samples():
    assert integrate([1.0, 1.0, 1.0], 0.5) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        integrate([1.0], 0.1)


def test_spectral_derivative_of_gaussian():
    g = centered_grid(512, 0.05)
    f = np.exp(-g.x**2)
    np.testing.assert_allclose(spectral_derivative(f, g, 1), -2 * g.x * f, atol=1e-11)
    np.testing.assert_allclose(second_derivative(f, g), (4 * g.x**2 - 2) * f, atol=1e-10)


def test_second_derivative_agrees_with_five_point_stencil():
    # independent finite-difference cross-check, error O(dx^4)
    g = centered_grid(4096, 0.02)   # sech has decayed to 1e-17 at the ends
    f = 1.0 / np.cosh(g.x)
    h = g.dx
    fd = (-np.roll(f, 2) + 16 * np.roll(f, 1) - 30 * f + 16 * np.roll(f, -1)
          - np.roll(f, -2)) / (12 * h * h)
    inner = slice(2, -2)
    np.testing.assert_allclose(second_derivative(f, g)[inner], fd[inner], atol=1e-7)


def _couplings_mp(m, w, g, dg):
    mpmath.mp.dps = 40
    # exact SI Planck constant over 2 pi
    hbar = mpmath.mpf("6.62607015e-34") / (2 * mpmath.pi)
    m, w, g, dg = map(mpmath.mpf, (m, w, g, dg))
    g2 = dg / 2 * mpmath.sqrt(m / (w**3 * hbar**3))
    g1 = (m * g**2 / (w * hbar**3)) ** mpmath.mpf(0.75) / mpmath.pi
    return float(g1), float(g2)


@pytest.mark.parametrize("inputs", [
    (6.47e-26, 2 * np.pi * 1e3, 2.5e-38, 1.0e-39),   # 39K-like scales
    (1.44e-25, 2 * np.pi * 250.0, 1.0e-37, 3.0e-40),
])
def test_dimensionless_couplings_match_high_precision(inputs):
    got = dimensionless_couplings(DimensionalInputs(*inputs))
    want = _couplings_mp(*inputs)
    np.testing.assert_allclose(got, want, rtol=1e-12)


def test_couplings_scaling_properties():
    base = DimensionalInputs(6.47e-26, 2e3, 2.5e-38, 1e-39)
    g1, g2 = dimensionless_couplings(base)
    g1b, g2b = dimensionless_couplings(DimensionalInputs(6.47e-26, 2e3, 2.5e-38, 2e-39))
    assert g2b == pytest.approx(2 * g2, rel=1e-14)
    assert g1b == pytest.approx(g1, rel=1e-14)


@pytest.mark.parametrize("field", ["mass", "omega_perp", "g_intra", "delta_g"])
def test_dimensional_inputs_must_be_positive(field):
    kw = dict(mass=1.0, omega_perp=1.0, g_intra=1.0, delta_g=1.0)
    kw[field] = 0.0
    with pytest.raises(ValueError):
        DimensionalInputs(**kw)


@settings(max_examples=30, deadline=None)
@given(shift=st.integers(-20, 20), scale=st.floats(0.1, 10.0))
def test_integrate_is_linear_and_shift_invariant(shift, scale):
    g = centered_grid(256, 0.1)
    f = np.exp(-(g.x / 2) ** 2)
    base = integrate(f, g.dx)
    assert integrate(scale * np.roll(f, shift), g.dx) == pytest.approx(scale * base, rel=1e-10)
