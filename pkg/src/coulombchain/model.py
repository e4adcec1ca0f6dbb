"""Parameters, units and critical-point bookkeeping for the ring chain.

Model: N identical ions of mass m and charge Q sit on a ring with uniform
axial spacing a. A harmonic potential of frequency nu_t confines the ions
transversally; along the ring the ions are free. The natural frequency unit
is

    omega_0 = sqrt(Q^2 / (m a^3))        (Gaussian units)

and everything downstream of this module is dimensionless:

    frequencies in omega_0, times in 1/omega_0, lengths in a,
    wave numbers in 1/a, temperature theta = k_B T / (hbar omega_0).

SI inputs are converted once at the boundary (`derive_parameters`) with the
explicit Coulomb factor 1/(4 pi eps_0); no other function in the package
sees dimensional quantities.

The linear chain is stable for nu_t above the critical frequency

    nu_c = omega_0 * sqrt(7 zeta(3) / 2) = 2.05114582... omega_0,

below which the chain buckles into a planar zigzag. The distance to the
transition is Delta = nu_t - nu_c; for Delta >= 0 the soft transverse mode
at the zone edge has gap delta = sqrt(Delta (2 nu_c + Delta)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InvalidParameter, UnstableLinearPhase

# SI constants used only at the input boundary.
HBAR = 1.054571817e-34        # J s
K_B = 1.380649e-23            # J / K
COULOMB_K = 8.9875517923e9    # 1/(4 pi eps_0), N m^2 / C^2

# Near-zone-edge stiffness of the transverse dispersion, omega_0 * a units:
# omega_y(q)^2 ~ delta^2 + h^2 q^2 with q measured from the zone edge.
H_STIFFNESS = math.sqrt(math.log(2.0))

_ZETA3_TERMS = 10 ** 6


@lru_cache(maxsize=1)
def zeta3() -> float:
    """Riemann zeta(3) by direct summation plus an Euler-Maclaurin tail.

    Sums 10^6 terms in ascending order and closes the tail with the
    asymptotic correction through M^-6, which is exact to double precision.
    Kept free of special-function libraries on purpose: this value fixes the
    critical frequency and is cross-checked against an independent oracle in
    the tests.
    """
    M = _ZETA3_TERMS
    j = np.arange(M, 0, -1, dtype=np.float64)   # ascending magnitudes
    s = float(np.sum(j ** -3))
    tail = 1.0 / (2 * M ** 2) - 1.0 / (2 * M ** 3) + 1.0 / (4 * M ** 4) \
        - 1.0 / (12 * M ** 6)
    return s + tail


@lru_cache(maxsize=1)
def critical_frequency_infinite() -> float:
    """Critical transverse frequency of the infinite chain, in omega_0 units."""
    return math.sqrt(3.5 * zeta3())


@dataclass(frozen=True)
class PhysicalInput:
    """Dimensional description of an experiment, SI throughout.

    Attributes
    ----------
    mass_kg : ion mass.
    charge_c : ion charge in coulomb; the Gaussian-unit charge squared is
        obtained internally as COULOMB_K * charge_c**2.
    spacing_m : axial inter-ion spacing a.
    transverse_frequency_rad_s : trap frequency nu_t (angular).
    laser_wavenumber_per_m : probe wave number k_L (angular, 2 pi / lambda).
    temperature_k : initial motional temperature.
    """

    mass_kg: float
    charge_c: float
    spacing_m: float
    transverse_frequency_rad_s: float
    laser_wavenumber_per_m: float
    temperature_k: float = 0.0

    def __post_init__(self):
        for name in ("mass_kg", "charge_c", "spacing_m",
                     "transverse_frequency_rad_s", "laser_wavenumber_per_m"):
            if getattr(self, name) <= 0:
                raise InvalidParameter(f"{name} must be positive")
        if self.temperature_k < 0:
            raise InvalidParameter("temperature_k must be >= 0")

    def omega0(self) -> float:
        """Natural frequency sqrt(Q^2/(m a^3)) in rad/s."""
        return math.sqrt(COULOMB_K * self.charge_c ** 2
                         / (self.mass_kg * self.spacing_m ** 3))


@dataclass(frozen=True)
class ChainParams:
    """Dimensionless chain parameters.

    N      -- even ion count >= 4
    nu_t   -- transverse confinement in omega_0 units
    eta_c  -- Lamb-Dicke parameter referred to the critical frequency,
              eta_c = k_L sqrt(hbar / (2 m nu_c))
    theta  -- temperature k_B T / (hbar omega_0); 0 means ground state
    """

    N: int
    nu_t: float
    eta_c: float
    theta: float = 0.0

    def __post_init__(self):
        if not isinstance(self.N, (int, np.integer)) or isinstance(self.N, bool):
            raise InvalidParameter("N must be an integer")
        if self.N < 4 or self.N % 2 != 0:
            raise InvalidParameter("N must be an even integer >= 4")
        if self.nu_t <= 0:
            raise InvalidParameter("nu_t must be positive")
        if self.eta_c < 0:
            raise InvalidParameter("eta_c must be >= 0")
        if self.theta < 0:
            raise InvalidParameter("theta must be >= 0")

    @property
    def delta_trans(self) -> float:
        """Distance to the infinite-chain transition, Delta = nu_t - nu_c."""
        return self.nu_t - critical_frequency_infinite()

    @property
    def eta0(self) -> float:
        """Lamb-Dicke parameter at the actual confinement, k_L sqrt(hbar/(2 m nu_t)).

        Related to eta_c by eta0 = eta_c sqrt(nu_c / nu_t); the combination
        eta0^2 nu_t = eta_c^2 nu_c is therefore independent of nu_t.
        """
        return self.eta_c * math.sqrt(critical_frequency_infinite() / self.nu_t)

    @classmethod
    def from_delta(cls, N: int, delta: float, eta_c: float,
                   theta: float = 0.0) -> "ChainParams":
        """Build params from the detuning Delta = nu_t - nu_c."""
        return cls(N=N, nu_t=critical_frequency_infinite() + delta,
                   eta_c=eta_c, theta=theta)


@dataclass(frozen=True)
class GapParams:
    """Soft-mode bookkeeping near the transition (omega_0 / a units).

    Delta -- nu_t - nu_c, may be negative (zigzag side).
    h     -- zone-edge dispersion stiffness sqrt(ln 2).
    """

    Delta: float
    h: float = H_STIFFNESS

    @property
    def delta(self) -> float:
        """Soft-mode gap sqrt(Delta (2 nu_c + Delta)); linear side only."""
        if self.Delta < 0:
            raise UnstableLinearPhase(
                "soft-mode gap is defined only for Delta >= 0")
        nu_c = critical_frequency_infinite()
        return math.sqrt(self.Delta * (2.0 * nu_c + self.Delta))


def gap_parameters(params: ChainParams) -> GapParams:
    """Gap parameters for a given chain; Delta is carried signed."""
    return GapParams(Delta=params.delta_trans)


@dataclass(frozen=True)
class DerivedScales:
    """Result of converting a PhysicalInput to dimensionless form."""

    omega0_rad_s: float
    nu_t: float          # in omega_0 units
    eta0: float
    eta_c: float
    theta: float
    chain: ChainParams


def derive_parameters(phys: PhysicalInput, N: int) -> DerivedScales:
    """Convert SI inputs to the dimensionless parameter set.

    Returns omega_0 in rad/s together with nu_t/omega_0, the Lamb-Dicke
    parameters eta0 (at nu_t) and eta_c (at the critical frequency), and the
    dimensionless temperature theta.
    """
    omega0 = phys.omega0()
    nu_t = phys.transverse_frequency_rad_s / omega0
    eta0 = phys.laser_wavenumber_per_m * math.sqrt(
        HBAR / (2.0 * phys.mass_kg * phys.transverse_frequency_rad_s))
    nu_c = critical_frequency_infinite()
    eta_c = eta0 * math.sqrt(nu_t / nu_c)
    theta = K_B * phys.temperature_k / (HBAR * omega0)
    chain = ChainParams(N=N, nu_t=nu_t, eta_c=eta_c, theta=theta)
    return DerivedScales(omega0_rad_s=omega0, nu_t=nu_t, eta0=eta0,
                         eta_c=eta_c, theta=theta, chain=chain)
