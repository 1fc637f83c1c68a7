"""
Moving reflectionless sech^2 well and its closed-form geometric phase.

The potential

    V(x; t) = -(hbar^2 k1^2 / m) sech^2( k1 (x - x0(t)) )

transmits every incident energy with unit probability.  It carries a single
bound state of energy -hbar^2 k1^2 / (2 m); its positive-energy scattering
states

    phi(x, k; x0) = [ i k - k1 tanh(k1 (x - x0)) ] e^{ikx}
                    / ( sqrt(2 pi) (k1 + i k) )

are delta-normalized in k and asymptotically pure plane waves of amplitude
1/sqrt(2 pi) on both sides (the reflected component vanishes identically).

Connection kernel
-----------------
Only the tanh factor depends on t, so

    <phi(k')| i hbar d/dt |phi(k)> = x0dot(t) e^{i q x0(t)} K(q; k', k),
    q = k - k',

with the envelope assembled from two spatial Fourier transforms evaluated by
residue calculus (and locked in by an x-quadrature oracle before use):

    int sech^2(k1 u) e^{iqu} du            = pi q / (k1^2 sinh(pi q / 2 k1))
    int tanh(k1 u) sech^2(k1 u) e^{iqu} du = (i q / 2 k1) * the line above

    K(q; k', k) = hbar q (k + k') /
                  [ 4 sinh(pi q / 2 k1) (k1 - i k') (k1 + i k) ]

with the finite q -> 0 limit K = hbar k k1 / (pi (k^2 + k1^2)).  The envelope
decays like exp(-pi |q| / 2 k1), so a modest k' window suffices.

Full crossing
-------------
The infinite sweep is realized as a finite monotone traversal of [-X, +X] in
ascending order; the time integral of x0dot e^{iqx0} then localizes the k'
integral at q = 0 and the phase converges to the closed form

    gamma_G(k; full crossing) = 2 hbar k1 k / (k^2 + k1^2)

with an error that decays rapidly in X (tails are sign-alternating);
Richardson extrapolation over X, 2X, 4X produces the reported value.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import (
    NumericsError,
    PhaseResult,
    PhysicalConstants,
    QuadratureScheme,
    TimeWindow,
    kval,
    richardson_extrapolate,
)
from .engine import ContinuumModel, geometric_phase

__all__ = [
    "ReflectionlessParameters",
    "ScatteringState",
    "reflectionless_eigenfunction",
    "kernel_envelope",
    "connection_kernel_smooth",
    "reflectionless_phase_closed_form",
    "transmission_phase_exact",
    "bound_state_energy",
    "bound_state_value",
    "scattering_phase_shift",
    "ReflectionlessContinuumModel",
    "crossing_sweep",
    "crossing_model",
    "extrapolated_crossing_phase",
]

# sinh argument beyond which the envelope underflows to 0 (already < 1e-28)
_SINH_CUTOFF = 70.0


@dataclass(frozen=True)
class ReflectionlessParameters:
    """Well depth scale k1 > 0, particle mass, and the monotone center path
    x0(t) with its exact derivative."""

    k1: float
    mass: float
    x0_path: Callable[[float], float]
    x0_dot: Callable[[float], float]

    def __post_init__(self):
        if not (self.k1 > 0.0 and np.isfinite(self.k1)):
            raise ValueError(f"k1 must be > 0, got {self.k1}")
        if not (self.mass > 0.0 and np.isfinite(self.mass)):
            raise ValueError(f"mass must be > 0, got {self.mass}")

    def check_monotone(self, window: TimeWindow, samples: int = 17) -> None:
        if window.is_degenerate:
            return
        ts = np.linspace(window.t0, window.t1, samples)
        d = np.array([self.x0_dot(t) for t in ts])
        if np.any(d == 0.0) or np.any(np.sign(d) != np.sign(d[0])):
            raise ValueError("x0(t) must be strictly monotone on the window")


@dataclass(frozen=True)
class ScatteringState:
    """Positive-energy scattering state phi(., k; x0(t)) of the moving well."""

    k: float
    params: ReflectionlessParameters

    def __post_init__(self):
        if self.k == 0.0:
            raise ValueError("zero-energy threshold state unsupported")

    def energy(self, constants: PhysicalConstants = PhysicalConstants()) -> float:
        return (constants.hbar * self.k) ** 2 / (2.0 * self.params.mass)

    def value(self, t: float, x: np.ndarray) -> np.ndarray:
        return reflectionless_eigenfunction(self.params, self.k, t, x)


def reflectionless_eigenfunction(params: ReflectionlessParameters, k, t: float,
                                 x: np.ndarray) -> np.ndarray:
    """phi(x, k; x0(t)); |phi| -> 1/sqrt(2 pi) as |x - x0| -> infinity."""
    kk = kval(k)
    if kk == 0.0:
        raise ValueError("zero-energy threshold state unsupported")
    x = np.asarray(x, dtype=float)
    x0 = params.x0_path(t)
    k1 = params.k1
    return ((1j * kk - k1 * np.tanh(k1 * (x - x0))) * np.exp(1j * kk * x)
            / (np.sqrt(2.0 * np.pi) * (k1 + 1j * kk)))


def _q_over_sinh(q: np.ndarray, k1: float) -> np.ndarray:
    """q / sinh(pi q / 2 k1), evaluated without 0/0 division or overflow.

    Small arguments use the series of s/sinh(s); large ones the exp-scaled
    form 2 s e^{-|s|} / (1 - e^{-2|s|}).
    """
    q = np.asarray(q, dtype=float)
    s = np.pi * q / (2.0 * k1)
    out = np.empty_like(s)
    small = np.abs(s) < 1e-5
    big = np.abs(s) > _SINH_CUTOFF
    mid = ~(small | big)
    ssm = s[small]
    out[small] = (2.0 * k1 / np.pi) * (1.0 - ssm * ssm / 6.0
                                       + 7.0 * ssm ** 4 / 360.0)
    out[big] = 0.0
    sm = s[mid]
    e = np.exp(-np.abs(sm))
    out[mid] = (2.0 * k1 / np.pi) * 2.0 * sm * np.sign(sm) * e / (1.0 - e * e)
    return out


def kernel_envelope(params: ReflectionlessParameters, k_prime, k,
                    constants: PhysicalConstants = PhysicalConstants()):
    """Envelope K(q; k', k) of the factored connection kernel (vectorized in
    k').  Finite everywhere; exponentially small for |q| >> k1."""
    kk = kval(k)
    kp = np.asarray(k_prime, dtype=float) if not np.isscalar(k_prime) \
        else float(kval(k_prime))
    q = kk - kp
    k1 = params.k1
    env = (constants.hbar * (kk + kp) * _q_over_sinh(q, k1)
           / (4.0 * (k1 - 1j * kp) * (k1 + 1j * kk)))
    if not np.all(np.isfinite(np.atleast_1d(env))):
        raise NumericsError(f"kernel envelope non-finite at q = {q}")
    return env


def connection_kernel_smooth(params: ReflectionlessParameters, k_prime, k,
                             t: float,
                             constants: PhysicalConstants = PhysicalConstants()
                             ) -> complex:
    """Full kernel value x0dot(t) e^{i(k-k')x0(t)} K(q; k', k).

    The degenerate point k' = k is the finite q -> 0 limit, never a 0/0
    division.
    """
    kk, kp = kval(k), kval(k_prime)
    if kk == 0.0 or kp == 0.0:
        raise ValueError("zero-energy threshold state unsupported")
    x0 = params.x0_path(t)
    v = params.x0_dot(t)
    return complex(v * cmath.exp(1j * (kk - kp) * x0)
                   * kernel_envelope(params, kp, kk, constants))


def reflectionless_phase_closed_form(params: ReflectionlessParameters, k,
                                     constants: PhysicalConstants = PhysicalConstants()
                                     ) -> float:
    """Closed-form full-crossing geometric phase 2 hbar k1 k / (k^2 + k1^2)."""
    kk = kval(k)
    if kk == 0.0:
        raise ValueError("zero-energy threshold state unsupported")
    k1 = params.k1
    return 2.0 * constants.hbar * k1 * kk / (kk * kk + k1 * k1)


def scattering_phase_shift(params: ReflectionlessParameters, k) -> float:
    """Transmission phase 2 arctan(k1/k) of the static well (odd in k)."""
    kk = kval(k)
    if kk == 0.0:
        raise ValueError("zero-energy threshold state unsupported")
    return float(2.0 * np.arctan(params.k1 / kk))


def transmission_phase_exact(params: ReflectionlessParameters, k) -> float:
    """Exact transmission phase delta = 2 arctan(k1/k) for incident k > 0."""
    kk = kval(k)
    if kk <= 0.0:
        raise ValueError(f"transmission phase requires k > 0, got {kk}")
    return float(2.0 * np.arctan(params.k1 / kk))


def bound_state_energy(params: ReflectionlessParameters,
                       constants: PhysicalConstants = PhysicalConstants()) -> float:
    """Energy of the single bound state, -(hbar k1)^2 / 2m.  The interval
    of (signed) wavenumbers |k| < k1 maps to the discrete-spectrum region in
    sweep comparisons and is excluded there."""
    return -(constants.hbar * params.k1) ** 2 / (2.0 * params.mass)


def bound_state_value(params: ReflectionlessParameters, t: float,
                      x: np.ndarray) -> np.ndarray:
    """Normalized bound state sqrt(k1/2) sech(k1 (x - x0(t)))."""
    x = np.asarray(x, dtype=float)
    u = params.k1 * (x - params.x0_path(t))
    return np.sqrt(params.k1 / 2.0) / np.cosh(u)


# ---------------------------------------------------------------------------
# Continuum model and crossing sweeps
# ---------------------------------------------------------------------------

class ReflectionlessContinuumModel(ContinuumModel):
    """Moving reflectionless well as a ContinuumModel with a smooth,
    self-localizing connection kernel."""

    def __init__(self, params: ReflectionlessParameters,
                 constants: PhysicalConstants = PhysicalConstants()):
        self.params = params
        self.constants = constants

    @property
    def spatial_components(self) -> int:
        return 1

    @property
    def kernel_shape(self) -> str:
        return "smooth"

    @property
    def envelope_frequency(self) -> float:
        return 2.0 * self.params.k1

    def eigenvalue(self, k, t):
        return (self.constants.hbar * kval(k)) ** 2 / (2.0 * self.params.mass)

    def eigenfunction_value(self, k, t, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return reflectionless_eigenfunction(self.params, k, t, x)[None, :]

    def connection_kernel(self, k_prime, k, t):
        return connection_kernel_smooth(self.params, k_prime, k, t,
                                        self.constants)

    def localization_value(self, t):
        return self.params.x0_path(t)

    def kernel_envelope(self, k_prime, k):
        return kernel_envelope(self.params, k_prime, k, self.constants)

    def box_wavenumbers(self, box_length, k_lo, k_hi):
        # quantization k L + 2 arctan(k1/k) = 2 pi n, exact for periodic
        # boundary conditions because the well reflects nothing
        from scipy.optimize import brentq

        k1, L = self.params.k1, box_length

        def roots(sign: float) -> list[float]:
            out = []
            n = 1
            while True:
                lo = (2.0 * np.pi * n - np.pi) / L + 1e-14
                hi = 2.0 * np.pi * n / L
                if lo > max(abs(k_lo), abs(k_hi)):
                    break
                kn = brentq(lambda k: k * L + 2.0 * np.arctan(k1 / k)
                            - 2.0 * np.pi * n, lo, hi, xtol=1e-14)
                out.append(sign * kn)
                n += 1
            return out

        ks = np.array(sorted(roots(-1.0) + roots(+1.0)))
        return ks[(ks >= k_lo) & (ks <= k_hi)]


def crossing_sweep(half_length: float, ascending: bool = True,
                   window: TimeWindow = TimeWindow(0.0, 1.0)
                   ) -> tuple[Callable[[float], float], Callable[[float], float]]:
    """Linear center path traversing [-X, +X] (ascending) over the window.

    The full-crossing orientation is ascending: it reproduces the positive
    closed-form phase and hence the exact transmission phase; the descending
    traversal yields the opposite sign.
    """
    if half_length <= 0.0:
        raise ValueError("half_length must be > 0")
    v = 2.0 * half_length / window.duration
    if not ascending:
        v = -v
    t0 = window.t0
    x_start = -half_length if ascending else half_length
    return (lambda t: x_start + v * (t - t0), lambda t: v)


def crossing_model(k1: float, mass: float, half_length: float,
                   constants: PhysicalConstants = PhysicalConstants(),
                   window: TimeWindow = TimeWindow(0.0, 1.0),
                   ascending: bool = True) -> ReflectionlessContinuumModel:
    """Reflectionless model whose well crosses the line once over the window."""
    path, dot = crossing_sweep(half_length, ascending, window)
    params = ReflectionlessParameters(k1=k1, mass=mass, x0_path=path, x0_dot=dot)
    return ReflectionlessContinuumModel(params, constants)


def extrapolated_crossing_phase(k1: float, mass: float, k,
                                scheme: QuadratureScheme,
                                base_half_length: float = 16.0,
                                constants: PhysicalConstants = PhysicalConstants()
                                ) -> PhaseResult:
    """Full-crossing geometric phase, Richardson-extrapolated over sweep
    half-lengths X, 2X, 4X, ... (extrapolation_levels of them)."""
    window = TimeWindow(0.0, 1.0)
    levels = max(2, scheme.extrapolation_levels)
    inner = QuadratureScheme(
        time_panels=scheme.time_panels, time_order=scheme.time_order,
        space_truncation=scheme.space_truncation,
        space_points=scheme.space_points,
        kprime_truncation=scheme.kprime_truncation,
        kprime_points=scheme.kprime_points, extrapolation_levels=2)
    estimates = []
    evaluations = 0
    for j in range(levels):
        model = crossing_model(k1, mass, base_half_length * 2 ** j,
                               constants, window)
        res = geometric_phase(model, k, window, inner)
        estimates.append(res.gamma_geometric)
        evaluations += res.evaluations
    value, err = richardson_extrapolate(estimates, 2.0)
    return PhaseResult.from_actions(0.0, float(value.real), constants,
                                    float(err), evaluations)
