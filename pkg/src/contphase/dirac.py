"""
Relativistic spinning particle in a slowly varying electromagnetic field.

The Hamiltonian acts on a 4-dimensional space spanned by |1>, |2> (each a
sigma^3 doublet) with a time-dependent mass m(t) and complex coupling f(t):

    H(t) = m c^2 (|1><1| - |2><2|)
         + c sigma^3 (p - f(t)) |1><2| + c sigma^3 (p - f*(t)) |2><1|.

For momentum k and sigma^3 sector s the problem reduces to the 2x2 matrix

    H_2(k, t) = [[ m c^2,      -c s g ],      g(k; t) = f(t) - k,
                 [ -c s g*,   -m c^2 ]]

with eigenvalues +/- hbar*omega, hbar*omega = c sqrt(m^2 c^2 + |g|^2), and
delta-normalized spinor eigenstates

    ( c s g,  m c^2 -/+ hbar*omega ) / D  *  e^{ikz/hbar} / sqrt(2 pi hbar),
    D^2 = (m c^2 -/+ hbar*omega)^2 + |g|^2 c^2.

The plane-wave factor is time independent, so the connection kernel is
exactly diagonal, delta(k'-k) * a(k,t), with

    a(k, t) = (i hbar c^2 / 2) (g* gdot - gdot* g) / D^2
            = -hbar c^2 Im(g* gdot) / D^2           (purely real).

In the spherical representation (Re f - k) c = hbar*omega sin(theta) cos(phi),
Im f c = hbar*omega sin(theta) sin(phi), m c^2 = hbar*omega cos(theta), the
lower branch satisfies a dt = -(hbar/2)(1 - cos theta) dphi identically, so
its phase over a closed circuit equals -(hbar/2) * Omega with Omega the solid
angle subtended by the circuit as seen from (k, 0, 0).  The upper branch
accumulates -(hbar/2)(4 pi - Omega) per winding instead; the two phase
factors are complex conjugates.

Paths are supplied as (value, derivative) callable pairs; the module never
differentiates user paths numerically.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import (
    NumericsError,
    PhysicalConstants,
    QuadratureScheme,
    TimeWindow,
    gauss_legendre_nodes,
    kval,
)
from .engine import ContinuumModel

__all__ = [
    "GaugeSingularityError",
    "DiracParameters",
    "DiracMode",
    "DiracEigensystem",
    "PlaneWaveFactor",
    "SphericalPath",
    "dirac_eigensystem",
    "dirac_connection",
    "solid_angle",
    "DiracContinuumModel",
    "dirac_two_level_hamiltonian",
    "constant_theta_circle",
    "spherical_parameters",
]

CLOSED_CIRCUIT_TOL = 1e-12


class GaugeSingularityError(NumericsError):
    """The requested spinor/connection sits at the gauge's singular point
    (g = 0 on the branch whose denominator vanishes there)."""


@dataclass(frozen=True)
class DiracParameters:
    """Mass and coupling paths of the driven Dirac family.

    mass_path / coupling_path map t to m(t) (real) and f(t) (complex);
    *_dot are their exact time derivatives.  sigma3_sector selects the
    sigma^3 eigenvalue (+1 or -1) of the reduced 2x2 problem; branch selects
    the +hbar*omega (+1) or -hbar*omega (-1) eigenvalue.

    Negative or vanishing mass values are accepted: circuits are specified in
    the (Re f, Im f, m c) parameter space and may cross the m = 0 plane.  The
    gauge singularity g = 0 with vanishing denominator is a hard error at
    evaluation time, never a limit.
    """

    mass_path: Callable[[float], float]
    mass_dot: Callable[[float], float]
    coupling_path: Callable[[float], complex]
    coupling_dot: Callable[[float], complex]
    sigma3_sector: int = +1
    branch: int = +1

    def __post_init__(self):
        if self.sigma3_sector not in (+1, -1):
            raise ValueError(f"sigma3_sector must be +1 or -1, got {self.sigma3_sector}")
        if self.branch not in (+1, -1):
            raise ValueError(f"branch must be +1 (upper) or -1 (lower), got {self.branch}")

    def is_closed(self, window: TimeWindow, tol: float = CLOSED_CIRCUIT_TOL) -> bool:
        """Endpoint values of (Re f, Im f, m) match within tol."""
        f0, f1 = self.coupling_path(window.t0), self.coupling_path(window.t1)
        m0, m1 = self.mass_path(window.t0), self.mass_path(window.t1)
        return (abs(f1.real - f0.real) <= tol and abs(f1.imag - f0.imag) <= tol
                and abs(m1 - m0) <= tol)


@dataclass(frozen=True)
class DiracMode:
    """Instantaneous mode data at (k, t): g = f(t) - k and the positive
    frequency omega with hbar*omega = c sqrt(m^2 c^2 + |g|^2)."""

    k: float
    g: complex
    omega: float

    @classmethod
    def at(cls, params: DiracParameters, k, t: float,
           constants: PhysicalConstants = PhysicalConstants()) -> "DiracMode":
        kk = kval(k)
        g = complex(params.coupling_path(t)) - kk
        m = params.mass_path(t)
        hw = constants.c * np.sqrt((m * constants.c) ** 2 + abs(g) ** 2)
        return cls(k=kk, g=g, omega=hw / constants.hbar)


@dataclass(frozen=True)
class PlaneWaveFactor:
    """Descriptor of the spatial factor e^{ikz/hbar} / sqrt(2 pi hbar)."""

    k: float
    hbar: float

    def value(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        return np.exp(1j * self.k * z / self.hbar) / np.sqrt(2.0 * np.pi * self.hbar)


@dataclass(frozen=True)
class DiracEigensystem:
    """Energy, unit spinor, spatial factor, and gauge diagnostics."""

    energy: float
    spinor: np.ndarray
    plane_wave: PlaneWaveFactor
    gauge_flag: Optional[str] = None


def dirac_eigensystem(params: DiracParameters, k, t: float,
                      constants: PhysicalConstants = PhysicalConstants()
                      ) -> DiracEigensystem:
    """Instantaneous eigenvalue and delta-normalized eigenstate at (k, t).

    The spinor is the unit vector (c s g, m c^2 -/+ hbar omega)/D; the full
    state is spinor x e^{ikz/hbar}/sqrt(2 pi hbar).  At g = 0 the branch with
    vanishing denominator has no limiting spinor direction and raises
    GaugeSingularityError; the regular branch returns the exact limit spinor
    and flags the point.
    """
    kk = kval(k)
    mode = DiracMode.at(params, kk, t, constants)
    c, hbar = constants.c, constants.hbar
    m = params.mass_path(t)
    hw = hbar * mode.omega
    dcomp = m * c ** 2 - params.branch * hw
    d2 = dcomp ** 2 + abs(mode.g) ** 2 * c ** 2
    if d2 <= 0.0 or not np.isfinite(d2):
        raise GaugeSingularityError(
            f"gauge singularity at g = 0 (branch {params.branch:+d}, t = {t}): "
            f"spinor direction undefined")
    d = np.sqrt(d2)
    spinor = np.array([c * params.sigma3_sector * mode.g / d, dcomp / d],
                      dtype=complex)
    flag = None
    if abs(mode.g) == 0.0:
        flag = "north-pole gauge singularity"
    return DiracEigensystem(
        energy=params.branch * hw,
        spinor=spinor,
        plane_wave=PlaneWaveFactor(k=kk, hbar=hbar),
        gauge_flag=flag,
    )


def dirac_connection(params: DiracParameters, k, t: float,
                     constants: PhysicalConstants = PhysicalConstants()
                     ) -> float:
    """Diagonal connection a(k, t) with kernel = delta(k'-k) a(k, t).

        a = (i hbar c^2 / 2) (g* gdot - gdot* g) / D^2
          = -hbar c^2 Im(g* gdot) / D^2.

    Real by construction (the sigma^3 sector drops out).  Raises
    GaugeSingularityError when D = 0.
    """
    kk = kval(k)
    c, hbar = constants.c, constants.hbar
    g = complex(params.coupling_path(t)) - kk
    gdot = complex(params.coupling_dot(t))
    m = params.mass_path(t)
    hw = c * np.sqrt((m * c) ** 2 + abs(g) ** 2)
    d2 = (m * c ** 2 - params.branch * hw) ** 2 + abs(g) ** 2 * c ** 2
    if d2 <= 0.0:
        raise GaugeSingularityError(
            f"gauge singularity at g = 0 (branch {params.branch:+d}, t = {t})")
    a = -hbar * c ** 2 * (np.conj(g) * gdot).imag / d2
    if not np.isfinite(a):
        raise NumericsError(f"non-finite connection at t = {t}")
    return float(a)


# ---------------------------------------------------------------------------
# Spherical circuits and the solid angle
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SphericalPath:
    """Circuit in the (Re f - k, Im f, m c) parameter space, in spherical
    coordinates about the viewpoint (k, 0, 0):

        (Re f - k) c = hbar w sin(theta) cos(phi)
        Im f c       = hbar w sin(theta) sin(phi)
        m c^2        = hbar w cos(theta)

    Each coordinate is a callable of t with an exact derivative callable.
    theta must stay in (0, pi) and w > 0 (the circuit never touches the
    viewpoint).
    """

    omega: Callable[[float], float]
    omega_dot: Callable[[float], float]
    theta: Callable[[float], float]
    theta_dot: Callable[[float], float]
    phi: Callable[[float], float]
    phi_dot: Callable[[float], float]

    def validate(self, window: TimeWindow, samples: int = 33) -> None:
        ts = np.linspace(window.t0, window.t1, samples)
        th = np.array([self.theta(t) for t in ts])
        om = np.array([self.omega(t) for t in ts])
        if np.any(th <= 0.0) or np.any(th >= np.pi):
            raise ValueError("theta must stay inside (0, pi) on the window")
        if np.any(om <= 0.0):
            raise ValueError("omega must stay positive on the window")

    def is_closed(self, window: TimeWindow, tol: float = CLOSED_CIRCUIT_TOL) -> bool:
        dw = abs(self.omega(window.t1) - self.omega(window.t0))
        dth = abs(self.theta(window.t1) - self.theta(window.t0))
        dphi = self.phi(window.t1) - self.phi(window.t0)
        winding_defect = abs(dphi / (2.0 * np.pi) - round(dphi / (2.0 * np.pi)))
        return dw <= tol and dth <= tol and winding_defect <= tol


def solid_angle(path: SphericalPath, window: TimeWindow,
                scheme: QuadratureScheme = QuadratureScheme()) -> float:
    """Solid angle Omega = closed-path integral of (1 - cos theta) dphi.

    Requires a closed circuit; raises ValueError otherwise.
    """
    path.validate(window)
    if not path.is_closed(window):
        raise ValueError("solid angle requires a closed circuit "
                         "(endpoint omega/theta/phi values do not match)")
    x, w = gauss_legendre_nodes(window.t0, window.t1,
                                scheme.time_panels, scheme.time_order)
    total = 0.0
    for xi, wi in zip(x, w):
        total += wi * (1.0 - np.cos(path.theta(float(xi)))) * path.phi_dot(float(xi))
    return float(total)


def spherical_parameters(path: SphericalPath, k, branch: int = -1,
                         sigma3_sector: int = +1,
                         constants: PhysicalConstants = PhysicalConstants()
                         ) -> DiracParameters:
    """Mass/coupling paths (with exact derivatives) realizing a spherical
    circuit about the viewpoint (k, 0, 0)."""
    kk = kval(k)
    hbar, c = constants.hbar, constants.c

    def mass(t: float) -> float:
        return hbar * path.omega(t) * np.cos(path.theta(t)) / c ** 2

    def mass_dot(t: float) -> float:
        return hbar * (path.omega_dot(t) * np.cos(path.theta(t))
                       - path.omega(t) * np.sin(path.theta(t)) * path.theta_dot(t)
                       ) / c ** 2

    def coupling(t: float) -> complex:
        r = hbar * path.omega(t) * np.sin(path.theta(t)) / c
        return kk + r * cmath.exp(1j * path.phi(t))

    def coupling_dot(t: float) -> complex:
        w, th = path.omega(t), path.theta(t)
        rdot = hbar * (path.omega_dot(t) * np.sin(th)
                       + w * np.cos(th) * path.theta_dot(t)) / c
        r = hbar * w * np.sin(th) / c
        return (rdot + 1j * r * path.phi_dot(t)) * cmath.exp(1j * path.phi(t))

    return DiracParameters(mass_path=mass, mass_dot=mass_dot,
                           coupling_path=coupling, coupling_dot=coupling_dot,
                           sigma3_sector=sigma3_sector, branch=branch)


def constant_theta_circle(theta: float, omega0: float = 1.0,
                          window: TimeWindow = TimeWindow(0.0, 1.0),
                          turns: int = 1) -> SphericalPath:
    """Cone circuit: fixed polar angle, phi winding `turns` times."""
    if not (0.0 < theta < np.pi):
        raise ValueError(f"theta must lie in (0, pi), got {theta}")
    if omega0 <= 0.0:
        raise ValueError("omega0 must be positive")
    rate = 2.0 * np.pi * turns / window.duration

    return SphericalPath(
        omega=lambda t: omega0, omega_dot=lambda t: 0.0,
        theta=lambda t: theta, theta_dot=lambda t: 0.0,
        phi=lambda t, _t0=window.t0: rate * (t - _t0),
        phi_dot=lambda t: rate,
    )


# ---------------------------------------------------------------------------
# Continuum model and the two-level reduction
# ---------------------------------------------------------------------------

class DiracContinuumModel(ContinuumModel):
    """Driven Dirac family as a ContinuumModel with an exactly diagonal
    connection kernel (time-independent plane-wave factors)."""

    def __init__(self, params: DiracParameters,
                 constants: PhysicalConstants = PhysicalConstants()):
        self.params = params
        self.constants = constants

    @property
    def spatial_components(self) -> int:
        return 2

    @property
    def kernel_shape(self) -> str:
        return "diagonal"

    @property
    def plane_wave_hbar(self) -> float:
        return self.constants.hbar

    @property
    def envelope_frequency(self) -> float:
        # the spinor factor carries no x dependence
        return 0.0

    def eigenvalue(self, k, t):
        mode = DiracMode.at(self.params, k, t, self.constants)
        return self.params.branch * self.constants.hbar * mode.omega

    def eigenfunction_value(self, k, t, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        eig = dirac_eigensystem(self.params, k, t, self.constants)
        return eig.spinor[:, None] * eig.plane_wave.value(x)[None, :]

    def connection_kernel(self, k_prime, k, t):
        # off-diagonal elements vanish identically: the spatial factors are
        # orthogonal and time independent
        if kval(k_prime) != kval(k):
            return 0.0 + 0.0j
        return complex(dirac_connection(self.params, k, t, self.constants))


def dirac_two_level_hamiltonian(params: DiracParameters, k,
                                constants: PhysicalConstants = PhysicalConstants()
                                ) -> Callable[[float], np.ndarray]:
    """The reduced 2x2 Hamiltonian H_2(k, t) as a callable of t.

    Feeds the independent ODE oracle; shares only the Hamiltonian definition
    with the closed-form connection, not its derivation.
    """
    kk = kval(k)
    c = constants.c
    s = params.sigma3_sector

    def h(t: float) -> np.ndarray:
        g = complex(params.coupling_path(t)) - kk
        m = params.mass_path(t)
        return np.array([[m * c ** 2, -c * s * g],
                         [-c * s * np.conj(g), -m * c ** 2]], dtype=complex)

    return h
