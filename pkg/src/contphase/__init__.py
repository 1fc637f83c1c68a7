"""Geometric phases for continuous-spectrum quantum systems under slow
parameter transport: phase engine, closed-form models, S-matrix layer, and
brute-force oracles."""

__version__ = "0.1.0"

from .core import (
    NumericsError,
    PhaseResult,
    PhysicalConstants,
    QuadratureScheme,
    SpectralBand,
    SpectralParameter,
    TimeWindow,
    gauss_legendre_integrate,
    richardson_extrapolate,
)
from .engine import (
    AdiabaticCoefficient,
    ContinuumModel,
    Eigendifferential,
    EvolvedState,
    FreeParticleModel,
    adiabatic_coefficient,
    dynamical_phase,
    eigendifferential_norm,
    evolved_state,
    geometric_phase,
)
from .dirac import (
    DiracContinuumModel,
    DiracParameters,
    GaugeSingularityError,
    SphericalPath,
    constant_theta_circle,
    dirac_connection,
    dirac_eigensystem,
    solid_angle,
    spherical_parameters,
)
from .reflectionless import (
    ReflectionlessContinuumModel,
    ReflectionlessParameters,
    connection_kernel_smooth,
    crossing_model,
    extrapolated_crossing_phase,
    reflectionless_eigenfunction,
    reflectionless_phase_closed_form,
    transmission_phase_exact,
)
from .scattering import (
    SMatrixEigenvalue,
    SplitHamiltonian,
    reflectionless_split,
    s_matrix_eigenvalue,
    transmission_comparison,
)
from .oracles import (
    BoxDiscretization,
    TwoLevelSystem,
    box_berry_phase,
    kernel_x_quadrature,
    two_level_evolve,
    wavepacket_transmission_phase,
)

__all__ = [name for name in dir() if not name.startswith("_")]
