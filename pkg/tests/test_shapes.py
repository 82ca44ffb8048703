"""Shape-function transforms versus quadrature oracles and known limits."""

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import j0

from freepif.shapes import (
    RadialBSpline,
    TruncatedGaussian,
    bspline_fourier_raw,
)


def radial_transform(shape, s):
    """Oracle: Shat(s) = int_0^R S(r) J0(s r) 2 pi r dr by adaptive quadrature."""
    val, _ = quad(
        lambda r: shape.realspace(np.array([r]))[0] * j0(s * r) * 2 * np.pi * r,
        0.0,
        shape.support_radius,
        limit=200,
    )
    return val


class TestRawFormula:
    def test_zero_limit(self):
        # the unscaled textbook form tends to (1/2)^l at s -> 0
        for l in (1, 2, 3):
            assert bspline_fourier_raw(np.array([0.0]), l)[0] == pytest.approx(0.5**l)
            assert bspline_fourier_raw(np.array([1e-9]), l)[0] == pytest.approx(0.5**l)


class TestRadialBSpline:
    @pytest.mark.parametrize("order", [1, 2, 3])
    def test_unit_mass(self, order):
        sh = RadialBSpline(order, support_radius=0.2)
        mass, _ = quad(
            lambda r: sh.realspace(np.array([r]))[0] * 2 * np.pi * r,
            0.0,
            sh.support_radius,
            limit=200,
        )
        assert mass == pytest.approx(1.0, abs=5e-9)

    def test_fourier_normalized(self):
        for order in (1, 2, 3):
            sh = RadialBSpline(order, 0.1)
            assert sh.fourier(np.array([0.0]))[0] == pytest.approx(1.0)

    @pytest.mark.parametrize("order", [1, 2, 3])
    def test_fourier_matches_quadrature(self, order):
        # closed-form transform vs numerical radial transform of realspace
        sh = RadialBSpline(order, support_radius=0.25)
        for s in (0.7, 5.0, 22.0, 61.0):
            assert sh.fourier(np.array([s]))[0] == pytest.approx(
                radial_transform(sh, s), abs=2e-7
            )

    def test_support_is_exact(self):
        sh = RadialBSpline(2, 0.125)
        r = np.array([0.1249, 0.125, 0.2])
        vals = sh.realspace(r)
        assert vals[0] > 0 and vals[1] == 0 and vals[2] == 0

    def test_monotone_decay_to_first_zero(self):
        # |Shat| decays monotonically from s=0 down to its first zero
        sh = RadialBSpline(2, 1.0)
        first_zero = 3.8317 * sh.order / sh.support_radius  # argument of J1's first zero
        s = np.linspace(0.0, first_zero * 0.999, 400)
        vals = sh.fourier(s)
        assert np.all(np.diff(vals) < 1e-12)
        assert np.all(vals >= 0)

    def test_disk_value(self):
        # order 1 with R = 1/2 is the bare disk of height 4/pi
        sh = RadialBSpline(1, 0.5)
        assert sh.realspace(np.array([0.3]))[0] == pytest.approx(4.0 / np.pi)
        assert sh.realspace(np.array([0.51]))[0] == 0.0

    def test_rejects_bad_args(self):
        with pytest.raises(ValueError):
            RadialBSpline(0, 0.1)
        with pytest.raises(ValueError):
            RadialBSpline(2, -0.1)


class TestTruncatedGaussian:
    def test_k0_is_one_and_raw_value(self):
        sh = TruncatedGaussian(sigma=0.01, support_radius=0.125)
        assert sh.fourier(np.array([0.0]))[0] == pytest.approx(1.0)
        # raw (unnormalized) k=0 value is erf(R / (sqrt2 sigma)), here 1 - O(1e-34)
        from scipy.special import erf

        assert erf(0.125 / (np.sqrt(2) * 0.01)) == pytest.approx(1.0, abs=1e-15)

    def test_unit_mass(self):
        sh = TruncatedGaussian(sigma=0.03, support_radius=0.2)
        mass, _ = quad(
            lambda r: sh.realspace(np.array([r]))[0] * 2 * np.pi * r, 0, 0.2, limit=200
        )
        assert mass == pytest.approx(1.0, abs=1e-10)

    @pytest.mark.parametrize(
        "sigma,R", [(0.01, 0.125), (0.04, 0.25), (0.02, 0.14)]
    )
    def test_fourier_matches_quadrature(self, sigma, R):
        # regime R >= 6 sigma where the erf form matches the 2D transform
        sh = TruncatedGaussian(sigma, R)
        for s in (0.9, 12.0, 45.0, 90.0):
            assert sh.fourier(np.array([s]))[0] == pytest.approx(
                radial_transform(sh, s), abs=3e-8
            )

    def test_gaussian_envelope(self):
        # far inside the validity regime the transform is the pure Gaussian
        sh = TruncatedGaussian(sigma=0.01, support_radius=0.125)
        s = np.array([10.0, 50.0, 120.0])
        assert np.max(np.abs(sh.fourier(s) - np.exp(-0.5 * (0.01 * s) ** 2))) < 1e-13

    def test_zero_outside_support(self):
        sh = TruncatedGaussian(0.05, 0.25)
        assert np.all(sh.realspace(np.array([0.25, 0.3, 1.0])) == 0.0)

    def test_rejects_bad_args(self):
        with pytest.raises(ValueError):
            TruncatedGaussian(-0.1, 0.2)
        with pytest.raises(ValueError):
            TruncatedGaussian(0.1, 0.0)


class TestCacheKeys:
    def test_keys_distinguish_shapes(self):
        a = RadialBSpline(2, 0.1).cache_key
        b = RadialBSpline(3, 0.1).cache_key
        c = TruncatedGaussian(0.01, 0.1).cache_key
        assert len({a, b, c}) == 3
