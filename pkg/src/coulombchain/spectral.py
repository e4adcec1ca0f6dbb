"""Sampling V(t) and its discrete Fourier transform.

The visibility is sampled on the symmetric interval t in [-T_F/2, T_F/2)
with spacing dt = T_F / n_s and transformed with a plain rectangular window
(no apodization); numpy's FFT evaluates the exact DFT for any sample count,
power of two or not. The magnitude is folded to omega >= 0 and normalized
to its DC value.

Band confinement is measured as the fraction of DC-excluded *power*
(|F|^2) inside a frequency interval. Power weighting is deliberate: with a
rectangular window the |F| leakage tails of lines near a band edge decay
only like 1/|omega - omega_line| and would dominate an amplitude-weighted
fraction, while the power tails converge fast and measure the physical line
content. The transverse band of the linear chain is [omega_y(pi/a), nu_t];
its large-N lower edge is the soft gap delta of `model.GapParams`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks as _scipy_find_peaks

from .errors import InvalidParameter, NumericalFailure, ResourceLimit
from .model import ChainParams
from .ramsey import (DisplacementAmplitudes, VisibilityTrace,
                     evaluate_trace, linear_chain_amplitudes)

DEFAULT_T_F = 1e4      # 1/omega_0
DEFAULT_N_S = 100_000
DC_FLOOR_BINS = 3      # band metrics ignore the first bins: V has a large mean
_MIN_SAMPLES = 1 << 10
_DEFAULT_BUDGET = 2_000_000_000   # n_s * n_modes guard


def visibility_trace(params: ChainParams, T_F: float = DEFAULT_T_F,
                     n_s: int = DEFAULT_N_S, theta: float | None = None,
                     amps: DisplacementAmplitudes | None = None,
                     budget: int = _DEFAULT_BUDGET) -> VisibilityTrace:
    """Sample V(t) on t_n = -T_F/2 + n dt, n = 0..n_s-1, dt = T_F/n_s."""
    if T_F <= 0:
        raise InvalidParameter("T_F must be positive")
    if n_s < _MIN_SAMPLES:
        raise InvalidParameter(f"n_s must be >= {_MIN_SAMPLES}")
    if amps is None:
        amps = linear_chain_amplitudes(params)
    if n_s * len(amps) > budget:
        raise ResourceLimit(
            f"mode sum of {n_s} x {len(amps)} exceeds budget {budget}")
    if theta is None:
        theta = params.theta
    dt = T_F / n_s
    t = -0.5 * T_F + dt * np.arange(n_s)
    return evaluate_trace(amps, t, theta=theta, with_overlap=False)


@dataclass(frozen=True)
class FourierSpectrum:
    """One-sided DFT magnitude of a sampled signal, normalized to F(0) = 1."""

    omega: np.ndarray
    F: np.ndarray
    bin_width: float

    def __post_init__(self):
        if len(self.omega) != len(self.F):
            raise InvalidParameter("omega and F must have equal length")


def fourier_spectrum(trace: VisibilityTrace) -> FourierSpectrum:
    """Normalized |DFT| of V(t), folded to omega >= 0.

    The time grid must be uniform; the magnitude is invariant under the
    circular shift that maps the symmetric interval onto DFT order.
    """
    t = trace.t
    if len(t) < 2:
        raise InvalidParameter("trace too short")
    dt = float(t[1] - t[0])
    steps = np.diff(t)
    if dt <= 0 or not np.allclose(steps, dt, rtol=1e-9, atol=1e-12):
        raise InvalidParameter("fourier_spectrum requires a uniform grid")
    F = np.abs(np.fft.rfft(trace.V))
    if F[0] == 0.0:
        raise NumericalFailure("zero DC component; cannot normalize")
    F = F / F[0]
    T_F = dt * len(t)
    omega = 2.0 * math.pi * np.arange(len(F)) / T_F
    return FourierSpectrum(omega=omega, F=F, bin_width=2.0 * math.pi / T_F)


def spectral_band_check(spectrum: FourierSpectrum, omega_min: float,
                        omega_max: float,
                        dc_floor_bins: int = DC_FLOOR_BINS) -> float:
    """Fraction of DC-excluded spectral power lying inside [omega_min, omega_max]."""
    if not omega_min < omega_max:
        raise InvalidParameter("need omega_min < omega_max")
    floor = spectrum.omega > dc_floor_bins * spectrum.bin_width
    total = float(np.sum(spectrum.F[floor] ** 2))
    if total == 0.0:
        return 0.0
    band = floor & (spectrum.omega >= omega_min) & (spectrum.omega <= omega_max)
    return float(np.sum(spectrum.F[band] ** 2)) / total


def find_peaks(spectrum: FourierSpectrum, prominence: float,
               dc_floor_bins: int = DC_FLOOR_BINS) -> list[tuple[float, float]]:
    """Local maxima of F above `prominence`, DC floor excluded.

    Returns (omega, F) pairs sorted by descending amplitude.
    """
    if prominence <= 0:
        raise InvalidParameter("prominence must be positive")
    idx, _ = _scipy_find_peaks(spectrum.F, prominence=prominence)
    idx = idx[idx > dc_floor_bins]
    pairs = [(float(spectrum.omega[i]), float(spectrum.F[i])) for i in idx]
    pairs.sort(key=lambda p: -p[1])
    return pairs


def transverse_band(params: ChainParams) -> tuple[float, float]:
    """Infinite-chain transverse band [delta, nu_t] used for confinement checks."""
    from .model import gap_parameters
    return gap_parameters(params).delta, params.nu_t


def overlay_band(params: ChainParams) -> tuple[float, float]:
    """Band overlay variant sqrt(2 Delta nu_t + Delta^2): differs from the
    soft gap delta at order Delta^2; kept for figure annotation only."""
    d = params.delta_trans
    if d < 0:
        raise InvalidParameter("band overlay is defined on the linear side")
    return math.sqrt(2.0 * d * params.nu_t + d * d), params.nu_t
