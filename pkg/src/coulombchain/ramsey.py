"""Ramsey signal of a spin kicked by the chain's transverse phonons.

The probe drives ion 1 with a state-dependent recoil along y. Between the
two Ramsey pulses each mode is displaced in phase space by

    alpha_m = i * eta0 * sqrt(nu_t / omega_m) * R[probe, m],

so only the weights |alpha_m|^2 and frequencies omega_m enter the signal.
With A(t) = 2 sum_m |alpha_m|^2 sin^2(omega_m t / 2):

    overlap      S(t) = prod_m exp(i |a_m|^2 sin w_m t) exp(-2 |a_m|^2 sin^2(w_m t/2))
    visibility   V(t) = exp(-A_T(t)),  A_T = thermal A with coth(w/(2 theta))
    probability  P_g  = (1 + Re[e^{i phi} S]) / 2

These formulas are phase agnostic: any orthogonal mode basis with positive
frequencies and probe-row weights works, which is how the zigzag phase
reuses this module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter, SoftModeSingularity
from .linear_modes import ModeMatrix, ModeSet, mode_matrix, transverse_mode_set
from .model import ChainParams

# Target size of one t-by-mode block in the chunked trig sums (~64 MB).
_CHUNK_ELEMENTS = 8_000_000


@dataclass(frozen=True)
class DisplacementAmplitudes:
    """Per-mode displacement data for one probe configuration.

    omega  -- mode frequencies, omega_0 units, all > 0
    alpha  -- complex displacement amplitudes (purely imaginary here)
    weight -- |alpha|^2
    eta0   -- Lamb-Dicke parameter at nu_t
    nu_t   -- confinement, omega_0 units
    probe_site -- 1-based ion index that is kicked
    kind   -- 'linear' or 'zigzag'; the mean-frequency identities of the
              asymptotics module hold only for 'linear'
    """

    omega: np.ndarray
    alpha: np.ndarray
    weight: np.ndarray
    eta0: float
    nu_t: float
    probe_site: int
    kind: str = "linear"

    def __post_init__(self):
        if np.any(self.omega <= 0.0):
            raise SoftModeSingularity(
                "displacement amplitudes need strictly positive frequencies")

    def __len__(self):
        return len(self.omega)


def displacement_amplitudes(params: ChainParams, modes: ModeSet,
                            R: ModeMatrix, probe_site: int = 1
                            ) -> DisplacementAmplitudes:
    """Amplitudes alpha_m = i eta0 sqrt(nu_t/omega_m) R[probe, m] for the y branch."""
    if modes.branch != "y":
        raise InvalidParameter("recoil couples to the transverse branch only")
    if len(modes) != params.N or R.N != params.N:
        raise InvalidParameter("modes/matrix size does not match params.N")
    omega = np.asarray(modes.omega, dtype=np.float64)
    if np.any(omega == 0.0):
        raise SoftModeSingularity(
            "zero-frequency transverse mode: chain is at the transition")
    row = R.row(probe_site)
    alpha = 1j * params.eta0 * np.sqrt(params.nu_t / omega) * row
    weight = np.abs(alpha) ** 2
    return DisplacementAmplitudes(omega=omega, alpha=alpha, weight=weight,
                                  eta0=params.eta0, nu_t=params.nu_t,
                                  probe_site=probe_site, kind="linear")


def linear_chain_amplitudes(params: ChainParams,
                            probe_site: int = 1) -> DisplacementAmplitudes:
    """Convenience: enumerate modes, build R, and return the amplitudes."""
    return displacement_amplitudes(params, transverse_mode_set(params),
                                   mode_matrix(params.N), probe_site)


def weighted_trig_sum(t, omega: np.ndarray, weight: np.ndarray,
                      kind: str) -> np.ndarray:
    """sum_m weight_m * f(omega_m t) with f per `kind`, chunked over t.

    kind: 'sin2half' -> sin^2(w t / 2); 'sin' -> sin(w t); 'cos' -> cos(w t).
    Scalar t in, scalar out.
    """
    t_arr = np.atleast_1d(np.asarray(t, dtype=np.float64))
    out = np.empty_like(t_arr)
    chunk = max(1, _CHUNK_ELEMENTS // max(len(omega), 1))
    for i in range(0, len(t_arr), chunk):
        phase = np.multiply.outer(t_arr[i:i + chunk], omega)
        if kind == "sin2half":
            block = np.sin(0.5 * phase)
            np.square(block, out=block)
        elif kind == "sin":
            block = np.sin(phase)
        elif kind == "cos":
            block = np.cos(phase)
        else:
            raise InvalidParameter(f"unknown kernel kind {kind!r}")
        out[i:i + chunk] = block @ weight
    return out if np.ndim(t) else float(out[0])


def exponent_A(t, amps: DisplacementAmplitudes):
    """Decoherence exponent A(t) = 2 sum_m |alpha_m|^2 sin^2(omega_m t / 2)."""
    return 2.0 * weighted_trig_sum(t, amps.omega, amps.weight, "sin2half")


def thermal_weights(amps: DisplacementAmplitudes, theta: float) -> np.ndarray:
    """|alpha|^2 coth(omega / (2 theta)); theta = 0 returns |alpha|^2."""
    if theta < 0:
        raise InvalidParameter("theta must be >= 0")
    if theta == 0.0:
        return amps.weight
    return amps.weight / np.tanh(amps.omega / (2.0 * theta))


def exponent_A_thermal(t, amps: DisplacementAmplitudes, theta: float):
    """Thermal exponent A_T(t); reduces to exponent_A at theta = 0."""
    return 2.0 * weighted_trig_sum(t, amps.omega,
                                   thermal_weights(amps, theta), "sin2half")


def visibility(t, amps: DisplacementAmplitudes, theta: float = 0.0):
    """Ramsey fringe visibility V(t) = exp(-A_T(t))."""
    return np.exp(-exponent_A_thermal(t, amps, theta))


def overlap(t, amps: DisplacementAmplitudes, theta: float = 0.0):
    """Complex overlap S(t); |S| equals the visibility.

    The phase sum_m |alpha_m|^2 sin(omega_m t) is temperature independent;
    only the magnitude picks up the coth factor.
    """
    phase = weighted_trig_sum(t, amps.omega, amps.weight, "sin")
    mag = exponent_A_thermal(t, amps, theta)
    return np.exp(-mag + 1j * phase)


def ramsey_probability(phi, t, amps: DisplacementAmplitudes,
                       theta: float = 0.0):
    """Ground-state probability P_g = (1 + Re[e^{i phi} S(t)]) / 2."""
    s = overlap(t, amps, theta)
    return 0.5 * (1.0 + np.real(np.exp(1j * phi) * s))


def autocorrelation_G(t, amps: DisplacementAmplitudes):
    """Displacement autocorrelation G(t) = <[y(t) - y(0)]^2>.

    Returned in units of hbar / (2 m omega_0), where it equals
    2 A(t) / (eta0^2 nu_t); the recoil identity A = (k_L^2 / 2) G then holds
    by construction.
    """
    return 2.0 * exponent_A(t, amps) / (amps.eta0 ** 2 * amps.nu_t)


def distinguishability(V):
    """Which-path distinguishability D = sqrt(1 - V^2) for V in [0, 1]."""
    v = np.asarray(V, dtype=np.float64)
    if np.any(v < -1e-12) or np.any(v > 1.0 + 1e-12):
        raise InvalidParameter("visibility must lie in [0, 1]")
    d = np.sqrt(np.clip(1.0 - np.clip(v, 0.0, 1.0) ** 2, 0.0, None))
    return d if np.ndim(V) else float(d)


@dataclass(frozen=True)
class VisibilityTrace:
    """Sampled Ramsey signal on a time grid.

    t, A, V are equal-length arrays; S is the complex overlap (None when the
    producer skipped it). nu_t is carried along so downstream fits can build
    dimensionless windows like t * nu_t <= 0.1.
    """

    t: np.ndarray
    A: np.ndarray
    V: np.ndarray
    S: np.ndarray | None
    theta: float
    nu_t: float

    def __post_init__(self):
        if not (len(self.t) == len(self.A) == len(self.V)):
            raise InvalidParameter("trace arrays must have equal length")


def evaluate_trace(amps: DisplacementAmplitudes, t: np.ndarray,
                   theta: float = 0.0, with_overlap: bool = True
                   ) -> VisibilityTrace:
    """Evaluate A, V (and optionally S) on an arbitrary time grid."""
    t = np.asarray(t, dtype=np.float64)
    A = exponent_A_thermal(t, amps, theta)
    V = np.exp(-A)
    S = overlap(t, amps, theta) if with_overlap else None
    return VisibilityTrace(t=t, A=A, V=V, S=S, theta=theta, nu_t=amps.nu_t)
