import numpy as np
import pytest

from contphase.core import (
    NumericsError,
    QuadratureScheme,
    SpectralBand,
    TimeWindow,
    gauss_legendre_nodes,
    richardson_extrapolate,
)
from contphase.dirac import (
    DiracContinuumModel,
    constant_theta_circle,
    dirac_connection,
    spherical_parameters,
)
from contphase.engine import FreeParticleModel
from contphase.oracles import (
    BoxDiscretization,
    TwoLevelSystem,
    WavepacketGrid,
    adiabatic_phase_from_evolution,
    box_berry_phase,
    kernel_x_quadrature,
    reflectionless_box_basis,
    two_level_evolve,
    wavepacket_transmission_phase,
)
from contphase.reflectionless import (
    ReflectionlessParameters,
    bound_state_value,
    crossing_model,
    crossing_sweep,
)

WINDOW = TimeWindow(0.0, 1.0)
SCHEME = QuadratureScheme()


def moving_well(k1=1.0, half=16.0):
    path, dot = crossing_sweep(half)
    return ReflectionlessParameters(k1=k1, mass=1.0, x0_path=path, x0_dot=dot)


class TestBoxDiscretization:
    def test_validation(self):
        with pytest.raises(ValueError):
            BoxDiscretization(-1.0, 10)
        with pytest.raises(ValueError):
            BoxDiscretization(10.0, 0)
        assert BoxDiscretization(100.0, 10).delta_k == pytest.approx(
            2.0 * np.pi / 100.0)

    def test_under_resolved_band_rejected(self):
        model = crossing_model(1.0, 1.0, 10.0)
        with pytest.raises(NumericsError, match="under-resolved"):
            box_berry_phase(model, SpectralBand(0.9, 1.1, 2),
                            BoxDiscretization(100.0, 1000), WINDOW, SCHEME)

    def test_band_coverage_rejected(self):
        model = crossing_model(1.0, 1.0, 10.0)
        with pytest.raises(NumericsError, match="cover"):
            box_berry_phase(model, SpectralBand(-11.0, 13.0, 2),
                            BoxDiscretization(200.0, 8), WINDOW, SCHEME)

    def test_sweep_must_fit_in_box(self):
        model = crossing_model(1.0, 1.0, 120.0)
        with pytest.raises(NumericsError, match="leaves the box"):
            box_berry_phase(model, SpectralBand(-11.0, 13.0, 2),
                            BoxDiscretization(200.0, 4000), WINDOW, SCHEME)


class TestBoxBerryPhase:
    def test_static_model_zero(self):
        val = box_berry_phase(FreeParticleModel(), SpectralBand(0.5, 1.5, 2),
                              BoxDiscretization(100.0, 100), WINDOW, SCHEME)
        assert abs(val) < 1e-9

    def test_dirac_box_equals_diagonal_closed_form(self):
        # commensurate box: the target wavenumber is itself a box mode and
        # the sum collapses onto the closed-form diagonal connection
        path = constant_theta_circle(np.pi / 3, omega0=1.0, window=WINDOW)
        params = spherical_parameters(path, 1.0, branch=-1)
        model = DiracContinuumModel(params)
        box_len = 2.0 * np.pi * 16.0
        val = box_berry_phase(model, SpectralBand(0.5, 1.5, 2),
                              BoxDiscretization(box_len, 40), WINDOW, SCHEME)
        x, w = gauss_legendre_nodes(0.0, 1.0, 64, 8)
        direct = sum(wi * dirac_connection(params, 1.0, float(ti))
                     for ti, wi in zip(x, w))
        assert val == pytest.approx(direct, abs=1e-10)

    def test_reflectionless_ladder_converges(self):
        vals = []
        for box_len in (200.0, 400.0):
            model = crossing_model(1.0, 1.0, box_len / 4.0)
            band = SpectralBand(1.0 - 12.0, 1.0 + 12.0, 2)
            vals.append(box_berry_phase(model, band,
                                        BoxDiscretization(box_len, 8000),
                                        WINDOW, SCHEME))
        value, _ = richardson_extrapolate(vals, 2.0)
        assert abs(value.real - 1.0) < 2e-3


class TestTwoLevelEvolve:
    def test_constant_diagonal_phases(self):
        e0 = 0.8
        sys = TwoLevelSystem(
            hamiltonian=lambda s: np.diag([e0, -e0]).astype(complex),
            slowness=1.0)
        t_final = 2.0
        psi = two_level_evolve(sys, np.array([1.0, 1.0]) / np.sqrt(2),
                               TimeWindow(0.0, t_final), ode_steps=400)
        expected = np.array([np.exp(-1j * e0 * t_final),
                             np.exp(1j * e0 * t_final)]) / np.sqrt(2)
        assert np.max(np.abs(psi - expected)) < 1e-8

    def test_norm_preserved(self):
        sys = TwoLevelSystem(
            hamiltonian=lambda s: np.array([[np.cos(s), 0.3],
                                            [0.3, -np.cos(s)]], dtype=complex),
            slowness=5.0)
        psi0 = np.array([0.6, 0.8], dtype=complex)
        psi = two_level_evolve(sys, psi0, TimeWindow(0.0, 5.0), ode_steps=2000)
        assert abs(np.linalg.norm(psi) - 1.0) < 1e-8

    def test_step_size_precondition(self):
        sys = TwoLevelSystem(
            hamiltonian=lambda s: np.diag([5.0, -5.0]).astype(complex))
        with pytest.raises(ValueError, match="insufficient"):
            two_level_evolve(sys, np.array([1.0, 0.0]), TimeWindow(0.0, 10.0),
                             ode_steps=10)

    def test_hermiticity_enforced(self):
        sys = TwoLevelSystem(
            hamiltonian=lambda s: np.array([[0.0, 1.0], [0.5, 0.0]],
                                           dtype=complex))
        with pytest.raises(ValueError, match="Hermitian"):
            two_level_evolve(sys, np.array([1.0, 0.0]), TimeWindow(0.0, 1.0),
                             ode_steps=100)

    def test_fourth_order_convergence(self):
        # circularly driven two-level problem with a rotating-frame closed
        # form; halving the step cuts the error ~16x
        delta, rabi, drive = 1.0, 0.7, 0.9

        def h(t):
            return 0.5 * np.array(
                [[delta, rabi * np.exp(-1j * drive * t)],
                 [rabi * np.exp(1j * drive * t), -delta]], dtype=complex)

        def exact(t):
            # psi = e^{-i drive t sz/2} e^{-i H' t} psi0 in the rotating frame
            sz = np.diag([1.0, -1.0])
            sx = np.array([[0.0, 1.0], [1.0, 0.0]])
            hp = 0.5 * ((delta - drive) * sz + rabi * sx)
            evals, evecs = np.linalg.eigh(hp)
            expm = evecs @ np.diag(np.exp(-1j * evals * t)) @ evecs.conj().T
            rot = np.diag(np.exp(-0.5j * drive * t * np.array([1.0, -1.0])))
            return rot @ expm @ np.array([1.0, 0.0], dtype=complex)

        sys = TwoLevelSystem(hamiltonian=h, slowness=1.0)
        t_final = 3.0
        errs = []
        for steps in (60, 120):
            psi = two_level_evolve(sys, np.array([1.0, 0.0], dtype=complex),
                                   TimeWindow(0.0, t_final), ode_steps=steps)
            errs.append(float(np.max(np.abs(psi - exact(t_final)))))
        ratio = errs[0] / errs[1]
        assert 16.0 * 0.7 < ratio < 16.0 * 1.3

    def test_adiabatic_circuit_error_halves(self):
        path = constant_theta_circle(np.pi / 3, omega0=1.0, window=WINDOW)
        params = spherical_parameters(path, 1.0, branch=-1)
        from contphase.dirac import dirac_two_level_hamiltonian

        h = dirac_two_level_hamiltonian(params, 1.0)
        errs = []
        for slowness in (50.0, 100.0):
            sys = TwoLevelSystem(hamiltonian=h, slowness=slowness)
            ph = adiabatic_phase_from_evolution(sys, ode_steps=int(60 * slowness))
            errs.append(abs(ph + np.pi / 2.0))
        assert errs[1] < 0.7 * errs[0]


class TestKernelQuadrature:
    def test_static_zero(self):
        params = ReflectionlessParameters(
            k1=1.0, mass=1.0, x0_path=lambda t: 0.3, x0_dot=lambda t: 0.0)
        val = kernel_x_quadrature(params, 0.7, 1.3, 0.2, truncation=80.0,
                                  points=2000)
        assert abs(val) < 1e-12

    def test_truncation_guard(self):
        with pytest.raises(ValueError, match="truncation"):
            kernel_x_quadrature(moving_well(), 0.7, 1.3, 0.2, truncation=10.0,
                                points=2000)

    def test_exponential_decay_slope(self):
        # |K| ~ exp(-pi |q| / 2 k1); fitted log-slope within 10%
        params = moving_well()
        q1, q2 = 10.0, 14.0
        v1 = abs(kernel_x_quadrature(params, 2.0 - q1, 2.0, 0.4, 80.0, 4000))
        v2 = abs(kernel_x_quadrature(params, 2.0 - q2, 2.0, 0.4, 80.0, 4000))
        slope = (np.log(v2) - np.log(v1)) / (q2 - q1)
        assert abs(slope + np.pi / 2.0) / (np.pi / 2.0) < 0.10


class TestBoxCompleteness:
    def test_packet_resolution_with_bound_state(self):
        # scattering modes + the single bound state resolve a localized
        # packet: summed projections recover its norm
        params = ReflectionlessParameters(
            k1=1.0, mass=1.0, x0_path=lambda t: 0.0, x0_dot=lambda t: 0.0)
        box_len = 200.0
        x, w = gauss_legendre_nodes(-box_len / 2, box_len / 2, 220, 8)
        ks, basis = reflectionless_box_basis(params, box_len, k_max=4.0,
                                             x=x, w=w)
        sx, k0, xc = 5.0, 1.5, 20.0
        packet = ((2 * np.pi * sx ** 2) ** -0.25
                  * np.exp(-(x - xc) ** 2 / (4 * sx ** 2) + 1j * k0 * x))
        norm = float(np.sum(w * np.abs(packet) ** 2))
        proj = basis.conj() @ (w * packet)
        recovered = float(np.sum(np.abs(proj) ** 2))
        assert abs(recovered - norm) < 1e-4

    def test_bound_state_is_in_the_basis_span(self):
        params = ReflectionlessParameters(
            k1=1.0, mass=1.0, x0_path=lambda t: 0.0, x0_dot=lambda t: 0.0)
        box_len = 100.0
        x, w = gauss_legendre_nodes(-box_len / 2, box_len / 2, 150, 8)
        _, basis = reflectionless_box_basis(params, box_len, k_max=3.0,
                                            x=x, w=w)
        b = bound_state_value(params, 0.0, x).astype(complex)
        proj = basis.conj() @ (w * b)
        assert float(np.sum(np.abs(proj) ** 2)) == pytest.approx(1.0, abs=1e-6)


class TestWavepacket:
    def test_grid_validation(self):
        with pytest.raises(ValueError):
            WavepacketGrid(length=-1.0)
        with pytest.raises(ValueError, match="broad"):
            wavepacket_transmission_phase(moving_well(), 1.0, 0.5)

    def test_free_propagation_zero_phase(self):
        params = moving_well()
        grid = WavepacketGrid(length=300.0, points=2048, time_step=0.01)
        ph = wavepacket_transmission_phase(params, 1.0, 0.1, grid,
                                           include_potential=False)
        assert abs(ph) < 1e-6

    @pytest.mark.full
    def test_matching_wavenumber(self):
        ph = wavepacket_transmission_phase(moving_well(), 1.0, 0.1)
        assert abs(ph - np.pi / 2.0) < 0.05

    @pytest.mark.full
    def test_three_k1(self):
        ph = wavepacket_transmission_phase(moving_well(), 3.0, 0.1)
        assert abs(ph - 2.0 * np.arctan(1.0 / 3.0)) < 0.05
