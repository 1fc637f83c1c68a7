import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from contphase.core import (
    NumericsError,
    PhaseResult,
    PhysicalConstants,
    QuadratureScheme,
    SpectralBand,
    TimeWindow,
    gauss_legendre_integrate,
    gauss_legendre_nodes,
    richardson_extrapolate,
)


class TestDomainTypes:
    def test_constants_defaults(self):
        c = PhysicalConstants()
        assert c.hbar == 1.0 and c.c == 1.0

    @pytest.mark.parametrize("kwargs", [{"hbar": 0.0}, {"hbar": -1.0},
                                        {"c": 0.0}, {"c": float("nan")}])
    def test_constants_rejects_nonpositive(self, kwargs):
        with pytest.raises(ValueError):
            PhysicalConstants(**kwargs)

    def test_band_values(self):
        band = SpectralBand(1.0, 3.0, 5)
        assert np.allclose(band.values(), [1.0, 1.5, 2.0, 2.5, 3.0])
        assert band.center == 2.0

    def test_band_rejects_bad_interval(self):
        with pytest.raises(ValueError):
            SpectralBand(2.0, 1.0, 4)
        with pytest.raises(ValueError):
            SpectralBand(0.0, 1.0, 1)

    def test_window_zero_length_ok_reversed_not(self):
        assert TimeWindow(1.0, 1.0).is_degenerate
        with pytest.raises(ValueError):
            TimeWindow(2.0, 1.0)

    def test_scheme_validation(self):
        with pytest.raises(ValueError):
            QuadratureScheme(time_panels=0)
        with pytest.raises(ValueError):
            QuadratureScheme(kprime_truncation=-1.0)
        with pytest.raises(ValueError):
            QuadratureScheme(extrapolation_levels=0)

    def test_scheme_doubling_overflow_guard(self):
        with pytest.raises(ValueError, match="grid cap"):
            QuadratureScheme(space_points=2 ** 20, extrapolation_levels=12)

    def test_phase_result_consistency(self):
        c = PhysicalConstants(hbar=2.0)
        r = PhaseResult.from_actions(3.0, 1.0, c, 0.0, 10)
        assert r.phase_dynamical_rad == 1.5
        assert r.phase_geometric_rad == 0.5

    def test_phase_result_rejects_mixed_hbar(self):
        with pytest.raises(ValueError):
            PhaseResult(gamma_dynamical=1.0, gamma_geometric=1.0,
                        phase_dynamical_rad=1.0, phase_geometric_rad=0.5,
                        estimated_error=0.0, evaluations=1)

    @given(gd=st.floats(-10, 10, allow_nan=False),
           gg=st.floats(-10, 10, allow_nan=False),
           hbar=st.floats(0.1, 10, allow_nan=False))
    @settings(max_examples=50, deadline=None)
    def test_phase_result_radians_exact(self, gd, gg, hbar):
        c = PhysicalConstants(hbar=hbar)
        r = PhaseResult.from_actions(gd, gg, c, 0.0, 1)
        assert r.phase_dynamical_rad == gd / hbar
        assert r.phase_geometric_rad == gg / hbar


class TestGaussLegendre:
    def test_constant(self):
        val = gauss_legendre_integrate(lambda t: 1.0, TimeWindow(0.0, 1.0),
                                       QuadratureScheme())
        assert val == pytest.approx(1.0, abs=1e-14)

    def test_linear(self):
        val = gauss_legendre_integrate(lambda t: t, TimeWindow(0.0, 2.0),
                                       QuadratureScheme(time_panels=1,
                                                        time_order=2))
        assert val == pytest.approx(2.0, abs=1e-14)

    def test_complex_exponential(self):
        # antiderivative -i e^{it}: integral over [0, pi] is exactly 2i
        val = gauss_legendre_integrate(
            lambda t: np.exp(1j * t), TimeWindow(0.0, np.pi),
            QuadratureScheme(time_panels=8, time_order=8))
        assert abs(val - 2j) < 1e-12

    def test_nonfinite_integrand_names_node(self):
        def f(t):
            return float("nan") if t > 0.5 else 1.0

        with pytest.raises(NumericsError, match="node"):
            gauss_legendre_integrate(f, TimeWindow(0.0, 1.0),
                                     QuadratureScheme())

    def test_degenerate_window_is_zero(self):
        val = gauss_legendre_integrate(lambda t: 123.0, TimeWindow(1.0, 1.0),
                                       QuadratureScheme())
        assert val == 0.0

    @pytest.mark.parametrize("order", [2, 4, 8])
    def test_polynomial_exactness_up_to_design_order(self, order):
        # Gauss-Legendre of order n is exact through degree 2n-1; the design
        # guarantee (degrees 0..order-1) is a strict subset
        rng = np.random.default_rng(7)
        for deg in range(order):
            coeffs = rng.uniform(-1, 1, deg + 1)
            exact = sum(c / (j + 1) * (2.0 ** (j + 1))
                        for j, c in enumerate(coeffs))
            val = gauss_legendre_integrate(
                lambda t: sum(c * t ** j for j, c in enumerate(coeffs)),
                TimeWindow(0.0, 2.0),
                QuadratureScheme(time_panels=1, time_order=order))
            assert val.real == pytest.approx(exact, abs=1e-12)

    def test_refinement_monotonicity(self):
        # oscillatory integrand under-resolved at 2 panels: doubling panels
        # must shrink the error at least 4x once resolved
        exact = (np.exp(1j * 37.0) - 1.0) / 37j
        errs = []
        for panels in (4, 8, 16):
            val = gauss_legendre_integrate(
                lambda t: np.exp(37j * t), TimeWindow(0.0, 1.0),
                QuadratureScheme(time_panels=panels, time_order=4))
            errs.append(abs(val - exact))
        assert errs[1] < errs[0] / 4.0
        assert errs[2] < errs[1] / 4.0

    def test_nodes_ascending(self):
        x, w = gauss_legendre_nodes(-1.0, 3.0, 7, 5)
        assert np.all(np.diff(x) > 0)
        assert w.sum() == pytest.approx(4.0, abs=1e-13)


class TestRichardson:
    def test_geometric_sequence(self):
        val, err = richardson_extrapolate([1.1, 1.01, 1.001], 10.0)
        assert abs(val - 1.0) < 1e-12
        assert err < 1e-3

    def test_converged_pair(self):
        val, err = richardson_extrapolate([2.0, 2.0], 3.0)
        assert val == 2.0 and err == 0.0

    def test_trapezoid_ladder(self):
        # trapezoid estimates of the integral of x^3 on [0,1]; h^2 error
        # halves the mesh -> ratio 4
        def trap(n):
            x = np.linspace(0.0, 1.0, n + 1)
            y = x ** 3
            return float(np.trapezoid(y, x))

        val, err = richardson_extrapolate([trap(4), trap(8), trap(16)], 4.0)
        assert abs(val - 0.25) < 1e-9

    def test_needs_two_estimates(self):
        with pytest.raises(ValueError):
            richardson_extrapolate([1.0], 2.0)

    def test_bad_ratio(self):
        with pytest.raises(ValueError):
            richardson_extrapolate([1.0, 2.0], 1.0)
