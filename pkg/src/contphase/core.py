"""
Shared domain types and deterministic quadrature.

Conventions used throughout the package
---------------------------------------
- Physics sign convention i^2 = -1 with time dependence exp(-i E t / hbar).
- Inner products conjugate the FIRST (bra) argument.
- Phases are carried in two forms: action-valued gamma and radian-valued
  gamma / hbar.  Defaults are hbar = c = 1.
- All integrals are composite Gauss-Legendre with fixed, input-derived panel
  counts (never error-driven subdivision), and reductions accumulate in
  ascending index order, so results are bit-stable across runs and worker
  counts.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss

__all__ = [
    "NumericsError",
    "PhysicalConstants",
    "SpectralParameter",
    "SpectralBand",
    "TimeWindow",
    "QuadratureScheme",
    "PhaseResult",
    "gauss_legendre_nodes",
    "gauss_legendre_integrate",
    "richardson_extrapolate",
]

# Grid sizes after doubling `extrapolation_levels` times must stay well clear
# of memory blowup; this caps panels * order * 2**levels.
_MAX_GRID = 2 ** 26


class NumericsError(RuntimeError):
    """A numerical evaluation produced an unusable result (non-finite value,
    violated tolerance, insufficient resolution)."""


@dataclass(frozen=True)
class PhysicalConstants:
    """Unit system: reduced Planck constant and speed of light."""

    hbar: float = 1.0
    c: float = 1.0

    def __post_init__(self):
        if not (self.hbar > 0.0 and np.isfinite(self.hbar)):
            raise ValueError(f"hbar must be strictly positive, got {self.hbar}")
        if not (self.c > 0.0 and np.isfinite(self.c)):
            raise ValueError(f"c must be strictly positive, got {self.c}")


@dataclass(frozen=True)
class SpectralParameter:
    """Real wavenumber/momentum label k of a continuum eigenstate."""

    k: float

    def __post_init__(self):
        if not np.isfinite(self.k):
            raise ValueError(f"spectral parameter must be finite, got {self.k}")


def kval(k: "float | SpectralParameter") -> float:
    """Accept either a bare float or a SpectralParameter."""
    return float(k.k) if isinstance(k, SpectralParameter) else float(k)


@dataclass(frozen=True)
class SpectralBand:
    """Closed wavenumber interval [k_lo, k_hi] sampled with n_points values."""

    k_lo: float
    k_hi: float
    n_points: int

    def __post_init__(self):
        if not (np.isfinite(self.k_lo) and np.isfinite(self.k_hi)):
            raise ValueError("band edges must be finite")
        if not self.k_lo < self.k_hi:
            raise ValueError(f"need k_lo < k_hi, got [{self.k_lo}, {self.k_hi}]")
        if self.n_points < 2:
            raise ValueError(f"n_points must be >= 2, got {self.n_points}")

    def values(self) -> np.ndarray:
        return np.linspace(self.k_lo, self.k_hi, self.n_points)

    @property
    def width(self) -> float:
        return self.k_hi - self.k_lo

    @property
    def center(self) -> float:
        return 0.5 * (self.k_lo + self.k_hi)


@dataclass(frozen=True)
class TimeWindow:
    """Transport interval [t0, t1]. A zero-length window (t0 == t1) is the
    degenerate no-evolution case; t0 > t1 is rejected."""

    t0: float
    t1: float

    def __post_init__(self):
        if not (np.isfinite(self.t0) and np.isfinite(self.t1)):
            raise ValueError("window endpoints must be finite")
        if self.t0 > self.t1:
            raise ValueError(f"need t0 <= t1, got [{self.t0}, {self.t1}]")

    @property
    def duration(self) -> float:
        return self.t1 - self.t0

    @property
    def is_degenerate(self) -> bool:
        return self.t0 == self.t1


@dataclass(frozen=True)
class QuadratureScheme:
    """Resolution settings governing every integral in the package.

    Panel/point counts are totals; composite rules derive their panel counts
    from these and from a-priori oscillation frequencies of the integrand
    (never from runtime error estimates).

    Attributes
    ----------
    time_panels : panels of the composite rule on the time axis.
    time_order : Gauss-Legendre order per panel (all axes).
    space_truncation : half-length L of spatial integration domains.
    space_points : total node budget for spatial integrals.
    kprime_truncation : half-width Q of the k' window about k in the
        spectral integral of the geometric phase.
    kprime_points : minimum total node budget for the k' integral.
    extrapolation_levels : number of systematically refined estimates fed to
        Richardson extrapolation (1 disables extrapolation).
    """

    time_panels: int = 16
    time_order: int = 8
    space_truncation: float = 40.0
    space_points: int = 2000
    kprime_truncation: float = 12.0
    kprime_points: int = 512
    extrapolation_levels: int = 2

    def __post_init__(self):
        for name in ("time_panels", "time_order", "space_points", "kprime_points"):
            v = getattr(self, name)
            if not (isinstance(v, (int, np.integer)) and v > 0):
                raise ValueError(f"{name} must be a positive integer, got {v!r}")
        for name in ("space_truncation", "kprime_truncation"):
            v = getattr(self, name)
            if not (v > 0.0 and np.isfinite(v)):
                raise ValueError(f"{name} must be > 0, got {v!r}")
        if self.extrapolation_levels < 1:
            raise ValueError("extrapolation_levels must be >= 1")
        worst = max(self.time_panels * self.time_order, self.space_points,
                    self.kprime_points) * 2 ** (self.extrapolation_levels - 1)
        if worst > _MAX_GRID:
            raise ValueError(
                f"doubling {self.extrapolation_levels} levels would exceed the "
                f"grid cap ({worst} > {_MAX_GRID})")


@dataclass(frozen=True)
class PhaseResult:
    """Dynamical and geometric phase of one transported continuum state.

    gamma_* carry action units; phase_*_rad are gamma_*/hbar.  The radian
    fields must equal the action fields divided by one common hbar; this is
    enforced where both gammas are nonzero.
    """

    gamma_dynamical: float
    gamma_geometric: float
    phase_dynamical_rad: float
    phase_geometric_rad: float
    estimated_error: float
    evaluations: int

    def __post_init__(self):
        if not (np.isfinite(self.estimated_error) and self.estimated_error >= 0.0):
            raise ValueError(f"estimated_error must be finite and >= 0, "
                             f"got {self.estimated_error}")
        # cross-check skips subnormal magnitudes where division is lossy
        if abs(self.gamma_dynamical) > 1e-100 and abs(self.gamma_geometric) > 1e-100:
            h1 = self.gamma_dynamical / self.phase_dynamical_rad
            h2 = self.gamma_geometric / self.phase_geometric_rad
            if not np.isclose(h1, h2, rtol=1e-12, atol=0.0):
                raise ValueError("inconsistent hbar between action and radian fields")

    @classmethod
    def from_actions(cls, gamma_dynamical: float, gamma_geometric: float,
                     constants: PhysicalConstants, estimated_error: float,
                     evaluations: int) -> "PhaseResult":
        """Build a result with the radian fields derived exactly as gamma/hbar."""
        return cls(
            gamma_dynamical=gamma_dynamical,
            gamma_geometric=gamma_geometric,
            phase_dynamical_rad=gamma_dynamical / constants.hbar,
            phase_geometric_rad=gamma_geometric / constants.hbar,
            estimated_error=estimated_error,
            evaluations=evaluations,
        )


# ---------------------------------------------------------------------------
# Composite Gauss-Legendre quadrature
# ---------------------------------------------------------------------------

def gauss_legendre_nodes(a: float, b: float, panels: int, order: int
                         ) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the composite Gauss-Legendre rule on [a, b].

    Nodes are returned in ascending order so that weighted reductions are
    reproducible independent of the caller's threading.
    """
    if panels < 1 or order < 1:
        raise ValueError("panels and order must be >= 1")
    xg, wg = leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    x = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
    w = (half[:, None] * wg[None, :]).ravel()
    return x, w


def panels_for_oscillation(length: float, frequency: float, order: int,
                           minimum: int = 1) -> int:
    """Panel count resolving exp(i * frequency * x) on an interval.

    Sized so each panel spans at most ~order/3 radians of phase, which keeps
    Gauss-Legendre of that order in its spectrally accurate regime.
    """
    if length <= 0.0:
        return max(1, minimum)
    need = int(np.ceil(3.0 * abs(frequency) * length / (np.pi * order)))
    return max(minimum, need, 1)


def gauss_legendre_integrate(f: Callable[[float], complex], window: TimeWindow,
                             scheme: QuadratureScheme) -> complex:
    """Composite Gauss-Legendre estimate of the integral of f over the window.

    Deterministic for fixed inputs: scheme.time_panels panels of order
    scheme.time_order, nodes evaluated and summed in ascending order.

    Raises
    ------
    NumericsError
        If f returns a non-finite value at any node (the node is named).
    """
    if window.is_degenerate:
        return 0.0 + 0.0j
    x, w = gauss_legendre_nodes(window.t0, window.t1,
                                scheme.time_panels, scheme.time_order)
    total = 0.0 + 0.0j
    for xi, wi in zip(x, w):
        fi = complex(f(float(xi)))
        if not (np.isfinite(fi.real) and np.isfinite(fi.imag)):
            raise NumericsError(f"integrand returned non-finite value {fi} "
                                f"at node t = {xi}")
        total += wi * fi
    return total


def integrate_sampled(fvec: Callable[[np.ndarray], np.ndarray], a: float,
                      b: float, panels: int, order: int) -> complex:
    """Vectorized composite Gauss-Legendre for array-valued integrands."""
    if a == b:
        return 0.0 + 0.0j
    x, w = gauss_legendre_nodes(a, b, panels, order)
    vals = np.asarray(fvec(x))
    if not np.all(np.isfinite(vals)):
        bad = x[~np.isfinite(vals)][:1]
        raise NumericsError(f"integrand non-finite near node {bad}")
    return complex(np.sum(w * vals))


# ---------------------------------------------------------------------------
# Richardson extrapolation
# ---------------------------------------------------------------------------

def richardson_extrapolate(estimates: Sequence[complex], ratio: float
                           ) -> tuple[complex, float]:
    """Accelerate a sequence of systematically refined estimates.

    `ratio` is the factor by which the leading error term shrinks from one
    estimate to the next (e.g. 4 for an h^2 rule under mesh doubling).  The
    triangular table eliminates error terms decaying like ratio^-1, ratio^-2,
    ... in succession.

    Returns
    -------
    (value, error_estimate)
        The highest-order extrapolant and the magnitude of the difference
        between the two most refined extrapolants (0 for an already
        converged pair).
    """
    est = [complex(e) for e in estimates]
    if len(est) < 2:
        raise ValueError("need at least 2 estimates to extrapolate")
    if not (ratio > 1.0 and np.isfinite(ratio)):
        raise ValueError(f"refinement ratio must be > 1, got {ratio}")
    rows = [est]
    for j in range(1, len(est)):
        r = ratio ** j
        prev = rows[-1]
        rows.append([(r * prev[i + 1] - prev[i]) / (r - 1.0)
                     for i in range(len(prev) - 1)])
    value = rows[-1][0]
    penultimate = rows[-2][-1]
    return value, abs(value - penultimate)
