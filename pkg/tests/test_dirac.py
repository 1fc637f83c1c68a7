import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from contphase.core import (
    PhysicalConstants,
    QuadratureScheme,
    TimeWindow,
    gauss_legendre_nodes,
)
from contphase.dirac import (
    DiracContinuumModel,
    DiracMode,
    DiracParameters,
    GaugeSingularityError,
    constant_theta_circle,
    dirac_connection,
    dirac_eigensystem,
    solid_angle,
    spherical_parameters,
)
from contphase.engine import geometric_phase

WINDOW = TimeWindow(0.0, 1.0)
SCHEME = QuadratureScheme()


def static_params(m, f, branch=+1, sector=+1):
    return DiracParameters(
        mass_path=lambda t: m, mass_dot=lambda t: 0.0,
        coupling_path=lambda t: complex(f), coupling_dot=lambda t: 0.0j,
        sigma3_sector=sector, branch=branch)


class TestEigensystem:
    def test_energy_direct_substitution(self):
        # m=1, f=0, k=1, upper branch: E = sqrt(m^2 + |g|^2) = sqrt(2)
        eig = dirac_eigensystem(static_params(1.0, 0.0, branch=+1), 1.0, 0.0)
        assert eig.energy == pytest.approx(np.sqrt(2.0), abs=1e-14)

    def test_lower_branch_energy_negative(self):
        eig = dirac_eigensystem(static_params(1.0, 0.0, branch=-1), 1.0, 0.0)
        assert eig.energy == pytest.approx(-np.sqrt(2.0), abs=1e-14)

    def test_pole_lower_branch_limit_spinor(self):
        # g = 0 with m > 0: the lower branch has the exact limit (0, 1)
        eig = dirac_eigensystem(static_params(1.0, 2.0, branch=-1), 2.0, 0.0)
        assert eig.spinor == pytest.approx(np.array([0.0, 1.0]), abs=1e-14)
        assert eig.gauge_flag == "north-pole gauge singularity"

    def test_pole_upper_branch_raises(self):
        with pytest.raises(GaugeSingularityError, match="gauge singularity"):
            dirac_eigensystem(static_params(1.0, 2.0, branch=+1), 2.0, 0.0)

    def test_plane_wave_factor(self):
        c = PhysicalConstants(hbar=2.0)
        eig = dirac_eigensystem(static_params(1.0, 0.5j, branch=+1), 0.3, 0.0, c)
        z = np.array([0.0, 1.0])
        vals = eig.plane_wave.value(z)
        assert vals[0] == pytest.approx(1.0 / np.sqrt(4.0 * np.pi), abs=1e-14)
        assert abs(vals[1]) == pytest.approx(abs(vals[0]), abs=1e-14)

    @given(m=st.floats(0.1, 5.0), fre=st.floats(-3.0, 3.0),
           fim=st.floats(-3.0, 3.0), k=st.floats(-3.0, 3.0),
           branch=st.sampled_from([+1, -1]))
    @settings(max_examples=40, deadline=None)
    def test_spinor_normalization(self, m, fre, fim, k, branch):
        g = complex(fre, fim) - k
        if abs(g) < 1e-6 and branch == +1:
            return  # gauge singularity
        eig = dirac_eigensystem(static_params(m, complex(fre, fim),
                                              branch=branch), k, 0.0)
        assert np.sum(np.abs(eig.spinor) ** 2) == pytest.approx(1.0, abs=1e-12)

    @given(m=st.floats(0.0, 5.0), fre=st.floats(-3.0, 3.0),
           fim=st.floats(-3.0, 3.0), k=st.floats(-3.0, 3.0))
    @settings(max_examples=40, deadline=None)
    def test_frequency_dominates_rest_mass(self, m, fre, fim, k):
        mode = DiracMode.at(static_params(m, complex(fre, fim)), k, 0.0)
        assert mode.omega >= m - 1e-12


class TestConnection:
    def test_static_coupling_vanishes(self):
        assert dirac_connection(static_params(1.0, 0.7 + 0.2j), 0.3, 0.0) == 0.0

    def test_rotating_coupling_closed_form(self):
        # g = r e^{i phi(t)}, constant r: connection = -hbar c^2 r^2
        # phidot / D^2
        r, rate, m = 0.8, 2.0, 1.2
        params = DiracParameters(
            mass_path=lambda t: m, mass_dot=lambda t: 0.0,
            coupling_path=lambda t: r * np.exp(1j * rate * t),
            coupling_dot=lambda t: 1j * rate * r * np.exp(1j * rate * t),
            branch=+1)
        hw = np.sqrt(m ** 2 + r ** 2)
        d2 = (m - hw) ** 2 + r ** 2
        expected = -r ** 2 * rate / d2
        assert dirac_connection(params, 0.0, 0.4) == pytest.approx(expected,
                                                                   rel=1e-12)

    def test_matches_stencil_spinor_derivative(self):
        path = constant_theta_circle(np.pi / 3, omega0=1.3, window=WINDOW)
        for branch in (+1, -1):
            params = spherical_parameters(path, 0.7, branch=branch)
            t0, h = 0.23, 1e-6
            sp = dirac_eigensystem(params, 0.7, t0 + h).spinor
            sm = dirac_eigensystem(params, 0.7, t0 - h).spinor
            s0 = dirac_eigensystem(params, 0.7, t0).spinor
            numeric = (1j * np.vdot(s0, (sp - sm) / (2 * h))).real
            assert dirac_connection(params, 0.7, t0) == pytest.approx(
                numeric, abs=1e-7)

    def test_pole_raises(self):
        with pytest.raises(GaugeSingularityError):
            dirac_connection(static_params(1.0, 2.0, branch=+1), 2.0, 0.0)

    @given(shift=st.floats(-2.0, 2.0))
    @settings(max_examples=25, deadline=None)
    def test_k_translation_covariance(self, shift):
        # shifting k and f together leaves g = f - k unchanged
        def params_at(delta):
            return DiracParameters(
                mass_path=lambda t: 1.0, mass_dot=lambda t: 0.0,
                coupling_path=lambda t: delta + 0.5 * np.exp(2j * t),
                coupling_dot=lambda t: 1j * np.exp(2j * t),
                branch=-1)

        a0 = dirac_connection(params_at(0.0), 0.0, 0.3)
        a1 = dirac_connection(params_at(shift), shift, 0.3)
        assert a1 == pytest.approx(a0, rel=1e-12, abs=1e-15)


class TestSolidAngle:
    def test_equator(self):
        path = constant_theta_circle(np.pi / 2, window=WINDOW)
        assert solid_angle(path, WINDOW) == pytest.approx(2.0 * np.pi,
                                                          abs=1e-12)

    def test_shrinking_cap(self):
        path = constant_theta_circle(0.01, window=WINDOW)
        assert solid_angle(path, WINDOW) == pytest.approx(
            2.0 * np.pi * (1.0 - np.cos(0.01)), abs=1e-12)

    def test_open_circuit_rejected(self):
        path = constant_theta_circle(np.pi / 3, window=WINDOW)
        with pytest.raises(ValueError, match="closed"):
            solid_angle(path, TimeWindow(0.0, 0.5))

    def test_theta_range_enforced(self):
        with pytest.raises(ValueError):
            constant_theta_circle(0.0)
        with pytest.raises(ValueError):
            constant_theta_circle(np.pi)

    @pytest.mark.parametrize("theta", [np.pi / 6, np.pi / 3, np.pi / 2,
                                       2 * np.pi / 3])
    def test_circuit_identity(self, theta):
        # numeric circuit phase equals -(hbar/2) x solid angle, including
        # circuits dipping below the m = 0 plane (theta > pi/2)
        path = constant_theta_circle(theta, omega0=1.0, window=WINDOW)
        model = DiracContinuumModel(spherical_parameters(path, 0.0, branch=-1))
        res = geometric_phase(model, 0.0, WINDOW, SCHEME)
        omega = solid_angle(path, WINDOW)
        assert abs(res.gamma_geometric + 0.5 * omega) < 1e-10
        assert omega == pytest.approx(2 * np.pi * (1 - np.cos(theta)),
                                      abs=1e-10)

    def test_branch_antisymmetry_mod_2pi(self):
        # upper and lower circuit phases are conjugate phase factors; their
        # raw sum is -2 pi hbar per winding
        theta = np.pi / 3
        path = constant_theta_circle(theta, omega0=1.0, window=WINDOW)
        gammas = {}
        for branch in (+1, -1):
            model = DiracContinuumModel(
                spherical_parameters(path, 0.0, branch=branch))
            gammas[branch] = geometric_phase(model, 0.0, WINDOW,
                                             SCHEME).gamma_geometric
        total = gammas[+1] + gammas[-1]
        assert total == pytest.approx(-2.0 * np.pi, abs=1e-10)
        assert abs(np.exp(1j * total) - 1.0) < 1e-10


class TestContinuumModel:
    def test_connection_kernel_diagonal_only(self):
        path = constant_theta_circle(np.pi / 3, window=WINDOW)
        model = DiracContinuumModel(spherical_parameters(path, 0.7, branch=-1))
        assert model.connection_kernel(0.6, 0.7, 0.3) == 0.0
        assert model.connection_kernel(0.7, 0.7, 0.3) != 0.0

    def test_box_off_diagonal_vanishes(self):
        # commensurate box: plane waves are exact modes; matrix elements
        # between distinct modes vanish at machine precision
        path = constant_theta_circle(np.pi / 3, window=WINDOW)
        model = DiracContinuumModel(spherical_parameters(path, 1.0, branch=-1))
        box_len = 2.0 * np.pi * 16.0
        ks = model.box_wavenumbers(box_len, 0.5, 1.5)
        km = float(ks[np.argmin(np.abs(ks - 1.0))])
        x, w = gauss_legendre_nodes(-box_len / 2, box_len / 2, 64, 8)
        h = 1e-5
        dket = (model.eigenfunction_value(km, 0.3 + h, x)
                - model.eigenfunction_value(km, 0.3 - h, x)) / (2 * h)
        worst = 0.0
        for kn in ks:
            if kn == km:
                continue
            bra = model.eigenfunction_value(float(kn), 0.3, x)
            el = abs(np.sum(w * np.sum(np.conj(bra) * dket, axis=0)))
            worst = max(worst, el)
        # bounded by stencil/quadrature noise, ~10 orders below the diagonal
        assert worst < 1e-10

    def test_closed_circuit_detection(self):
        path = constant_theta_circle(np.pi / 4, window=WINDOW)
        params = spherical_parameters(path, 0.0)
        assert params.is_closed(WINDOW)
        assert not params.is_closed(TimeWindow(0.0, 0.7))
