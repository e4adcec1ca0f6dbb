"""Short- and long-time asymptotics of the decoherence exponent.

Short times: A(t) ~ Gamma t^2 with Gamma = (1/2) sum |alpha|^2 omega^2;
for the linear chain the sum collapses to (eta0^2 nu_t / 2) times the mean
transverse frequency, and d Gamma / d Delta diverges logarithmically at the
transition.

Long times: A(t) = A_inf - B(t) with A_inf = sum |alpha|^2 and
B(t) = sum |alpha|^2 cos(omega t). Near the transition the mode sum is
dominated by the soft zone-edge region where omega(q)^2 ~ delta^2 + h^2 q^2,
giving the closed forms

    A_inf ~ -(eta0^2 nu_t / (2 pi h)) ln Delta + c
    B(t)  ~ -(eta0^2 nu_t / (2 h)) Y0(delta t)

with h = sqrt(ln 2) and Y0 the irregular Bessel function, implemented here
from scratch (power series below x = 12, Hankel asymptotics above). The
finite chain deviates from the continuum at the revival time t* = N / v_max
set by the fastest transverse wave packet.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (InvalidParameter, NumericalFailure, UnstableLinearPhase)
from .linear_modes import max_group_velocity
from .model import ChainParams, H_STIFFNESS, critical_frequency_infinite, \
    gap_parameters
from .ramsey import (DisplacementAmplitudes, VisibilityTrace,
                     linear_chain_amplitudes, weighted_trig_sum)

EULER_GAMMA = 0.5772156649015329

# Hankel expansion coefficients c_m = prod_{i<=m} (2i-1)^2 / (m! 8^m).
_HANKEL_C = (1.0, 0.125, 0.0703125, 0.0732421875, 0.112152099609375,
             0.22710800170898438, 0.5725014209747314, 1.7277275025844574)
_SERIES_CUT = 12.0


@dataclass(frozen=True)
class GammaForms:
    """Curvature Gamma of A(t): direct sum and mean-frequency reduction.

    mean_frequency is None for amplitude sets where the probe-row sum rule
    does not reduce to a uniform 1/N weight (zigzag phase).
    """

    direct: float
    mean_frequency: float | None

    @property
    def value(self) -> float:
        return self.direct


def gamma_coefficient(amps: DisplacementAmplitudes) -> GammaForms:
    """Gamma = (1/2) sum_m |alpha_m|^2 omega_m^2, plus the mean-frequency form."""
    direct = 0.5 * float(np.sum(amps.weight * amps.omega ** 2))
    mean = None
    if amps.kind == "linear":
        mean = 0.5 * amps.eta0 ** 2 * amps.nu_t * float(np.mean(amps.omega))
    return GammaForms(direct=direct, mean_frequency=mean)


def gamma_fit(trace: VisibilityTrace) -> tuple[float, float]:
    """Least-squares Gamma from A(t) ~ Gamma t^2 on the early-time window.

    Uses samples with |t| nu_t <= 0.1 (at least 50 of them) and returns
    (gamma, rms residual of the fit on that window).
    """
    if trace.nu_t <= 0:
        raise InvalidParameter("trace must carry a positive nu_t")
    mask = np.abs(trace.t) * trace.nu_t <= 0.1 + 1e-15
    if int(np.sum(mask)) < 50:
        raise InvalidParameter(
            f"fit window holds {int(np.sum(mask))} samples; need >= 50 "
            "with |t| nu_t <= 0.1")
    t2 = trace.t[mask] ** 2
    A = trace.A[mask]
    denom = float(np.sum(t2 ** 2))
    if denom == 0.0:
        raise InvalidParameter("fit window has no nonzero times")
    gamma = float(np.sum(A * t2)) / denom
    resid = A - gamma * t2
    return gamma, float(np.sqrt(np.mean(resid ** 2)))


def _gamma_of_delta(delta: float, N: int, eta_c: float) -> float:
    params = ChainParams.from_delta(N, delta, eta_c)
    return gamma_coefficient(linear_chain_amplitudes(params)).direct


@dataclass(frozen=True)
class DerivativeScan:
    """d Gamma / d Delta on a grid, with the log fit a + b ln(Delta)."""

    deltas: np.ndarray
    dgamma: np.ndarray
    a: float
    b: float
    r_squared: float


def gamma_derivative_scan(deltas, N: int, eta_c: float,
                          log_step: float = 1e-2) -> DerivativeScan:
    """d Gamma / d Delta over a positive Delta grid, then fit a + b ln Delta.

    The derivative at each grid point is a centered difference in ln(Delta)
    with one Richardson halving (steps log_step and log_step/2), so the
    estimate is independent of the grid spacing.
    """
    d = np.asarray(deltas, dtype=np.float64)
    if np.any(d <= 0):
        raise UnstableLinearPhase("derivative scan requires Delta > 0")
    if len(d) < 3:
        raise InvalidParameter("need at least 3 grid points")

    def dgamma_dlog(x: float, h: float) -> float:
        return (_gamma_of_delta(x * math.exp(h), N, eta_c)
                - _gamma_of_delta(x * math.exp(-h), N, eta_c)) / (2.0 * h)

    out = np.empty_like(d)
    for i, x in enumerate(d):
        g_h = dgamma_dlog(float(x), log_step)
        g_h2 = dgamma_dlog(float(x), 0.5 * log_step)
        out[i] = (4.0 * g_h2 - g_h) / (3.0 * x)

    ln = np.log(d)
    coeffs = np.polyfit(ln, out, 1)
    b, a = float(coeffs[0]), float(coeffs[1])
    pred = a + b * ln
    ss_res = float(np.sum((out - pred) ** 2))
    ss_tot = float(np.sum((out - np.mean(out)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return DerivativeScan(deltas=d, dgamma=out, a=a, b=b, r_squared=r2)


def gamma_slope_analytic(params: ChainParams) -> float:
    """Predicted |b| prefactor: dGamma/dDelta ~ -(eta0^2 nu_t nu_c / (4 pi h)) ln Delta."""
    return params.eta0 ** 2 * params.nu_t * critical_frequency_infinite() \
        / (4.0 * math.pi * H_STIFFNESS)


@dataclass(frozen=True)
class AInfinityForms:
    """Saturation value A_inf: direct sum and mean-inverse-frequency form."""

    direct: float
    mean_inverse: float | None

    @property
    def value(self) -> float:
        return self.direct


def a_infinity(amps: DisplacementAmplitudes) -> AInfinityForms:
    """A_inf = sum_m |alpha_m|^2; linear chains also get the 1/omega mean form."""
    direct = float(np.sum(amps.weight))
    mean = None
    if amps.kind == "linear":
        mean = amps.eta0 ** 2 * amps.nu_t * float(np.mean(1.0 / amps.omega))
    return AInfinityForms(direct=direct, mean_inverse=mean)


def b_of_t(t, amps: DisplacementAmplitudes):
    """Oscillatory part B(t) = sum_m |alpha_m|^2 cos(omega_m t); A = A_inf - B."""
    return weighted_trig_sum(t, amps.omega, amps.weight, "cos")


@dataclass(frozen=True)
class AnalyticAInfinity:
    """Continuum form A_inf(Delta) = -slope ln Delta + offset.

    slope is eta0^2 nu_t / (2 pi h); offset is calibrated by matching the
    exact mode sum once at delta_ref.
    """

    slope: float
    offset: float
    delta_ref: float

    def evaluate(self, delta):
        d = np.asarray(delta, dtype=np.float64)
        if np.any(d <= 0):
            raise UnstableLinearPhase("analytic A_inf is defined for Delta > 0")
        out = -self.slope * np.log(d) + self.offset
        return out if np.ndim(delta) else float(out)


def a_infinity_analytic(params: ChainParams,
                        delta_ref: float = 1e-2) -> AnalyticAInfinity:
    """Calibrated continuum approximation to A_inf(Delta) at fixed eta_c and N."""
    if delta_ref <= 0:
        raise InvalidParameter("delta_ref must be positive")
    slope = params.eta0 ** 2 * params.nu_t / (2.0 * math.pi * H_STIFFNESS)
    ref = ChainParams(N=params.N, nu_t=critical_frequency_infinite() + delta_ref,
                      eta_c=params.eta_c, theta=params.theta)
    a_ref = a_infinity(linear_chain_amplitudes(ref)).direct
    offset = a_ref + slope * math.log(delta_ref)
    return AnalyticAInfinity(slope=slope, offset=offset, delta_ref=delta_ref)


def _y0_series(x: np.ndarray) -> np.ndarray:
    """Power series for Y0, valid (and accurate) for 0 < x <= ~15.

    Y0 = (2/pi) [(ln(x/2) + gamma) J0(x) + sum_{m>=1} (-1)^{m+1} H_m q^m/(m!)^2]
    with q = x^2/4 and H_m the harmonic numbers.
    """
    q = 0.25 * x * x
    j0 = np.ones_like(x)
    corr = np.zeros_like(x)
    term = np.ones_like(x)       # q^m / (m!)^2, starting at m = 0
    harmonic = 0.0
    for m in range(1, 200):
        term = term * q / (m * m)
        harmonic += 1.0 / m
        sign = 1.0 if m % 2 == 1 else -1.0
        j0 += -sign * term       # J0 alternates starting negative
        corr += sign * harmonic * term
        if np.all(term < 1e-18 * (1.0 + np.abs(corr))):
            break
    else:
        raise NumericalFailure("Y0 series did not converge")
    return (2.0 / math.pi) * ((np.log(0.5 * x) + EULER_GAMMA) * j0 + corr)


def _y0_asymptotic(x: np.ndarray) -> np.ndarray:
    """Hankel expansion sqrt(2/(pi x)) [sin(x - pi/4) P(x) + cos(x - pi/4) Q(x)]."""
    c = _HANKEL_C
    ix2 = 1.0 / (x * x)
    P = 1.0 + ix2 * (-c[2] + ix2 * (c[4] + ix2 * -c[6]))
    Q = (1.0 / x) * (-c[1] + ix2 * (c[3] + ix2 * (-c[5] + ix2 * c[7])))
    w = x - 0.25 * math.pi
    return np.sqrt(2.0 / (math.pi * x)) * (np.sin(w) * P + np.cos(w) * Q)


def bessel_Y0(x):
    """Irregular Bessel function Y0(x) for x > 0.

    Series below x = 12, Hankel asymptotics above; absolute error below
    1e-7 over (0, 1e3] (verified against an independent oracle in tests).
    """
    arr = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if np.any(arr <= 0.0):
        raise InvalidParameter("Y0 requires x > 0")
    out = np.empty_like(arr)
    small = arr <= _SERIES_CUT
    if np.any(small):
        out[small] = _y0_series(arr[small])
    if np.any(~small):
        out[~small] = _y0_asymptotic(arr[~small])
    return out if np.ndim(x) else float(out[0])


def b_analytic(t, params: ChainParams):
    """Continuum B(t) = -(eta0^2 nu_t / (2 h)) Y0(delta t); needs Delta > 0, t > 0."""
    gaps = gap_parameters(params)
    if gaps.Delta <= 0:
        raise UnstableLinearPhase(
            "continuum B(t) is defined on the linear side, Delta > 0")
    t_arr = np.asarray(t, dtype=np.float64)
    if np.any(t_arr <= 0):
        raise InvalidParameter("b_analytic requires t > 0")
    pref = -params.eta0 ** 2 * params.nu_t / (2.0 * H_STIFFNESS)
    return pref * bessel_Y0(t_arr * gaps.delta)


@dataclass(frozen=True)
class GammaScan:
    """Gamma(Delta) across the transition; kind records which phase served each point."""

    deltas: np.ndarray
    gamma: np.ndarray
    kinds: tuple


def gamma_transition_scan(deltas, N: int, eta_c: float,
                          zigzag_N: int | None = None) -> GammaScan:
    """Gamma over a Delta grid spanning both phases.

    Points with Delta >= 0 use the linear chain of size N; negative Delta
    uses the zigzag Hessian spectrum (size zigzag_N, default N) with the
    probe on the transverse coordinate of ion 1. The combination
    eta0^2 nu_t is Delta-independent at fixed eta_c, so the two sides join
    continuously at Delta = 0.
    """
    from .zigzag import zigzag_displacement_amplitudes, zigzag_spectrum
    if zigzag_N is None:
        zigzag_N = N
    d = np.asarray(deltas, dtype=np.float64)
    gam = np.empty_like(d)
    kinds = []
    for i, x in enumerate(d):
        if x >= 0.0:
            gam[i] = _gamma_of_delta(float(x), N, eta_c)
            kinds.append("linear")
        else:
            params = ChainParams.from_delta(zigzag_N, float(x), eta_c)
            amps = zigzag_displacement_amplitudes(params,
                                                  zigzag_spectrum(params))
            gam[i] = gamma_coefficient(amps).direct
            kinds.append("zigzag")
    return GammaScan(deltas=d, gamma=gam, kinds=tuple(kinds))


@dataclass(frozen=True)
class CuspReport:
    """Secant slopes of Gamma(Delta) on each side of Delta = 0."""

    left_slope: float
    right_slope: float
    left_stderr: float
    right_stderr: float

    @property
    def separation(self) -> float:
        """|slope difference| in units of the combined standard error."""
        se = math.hypot(self.left_stderr, self.right_stderr)
        return abs(self.right_slope - self.left_slope) / se if se > 0 \
            else math.inf


def _line_fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Least-squares slope and its standard error."""
    n = len(x)
    if n < 3:
        raise InvalidParameter("need at least 3 points per side")
    coeffs, residuals, *_ = np.polyfit(x, y, 1, full=True)
    slope = float(coeffs[0])
    ss = float(residuals[0]) if len(residuals) else 0.0
    sxx = float(np.sum((x - np.mean(x)) ** 2))
    se = math.sqrt(max(ss, 1e-300) / ((n - 2) * sxx))
    return slope, se


def cusp_secant_slopes(scan: GammaScan, n_side: int = 5) -> CuspReport:
    """Fit straight lines to the n_side points nearest Delta = 0 on each side.

    The zero point (if present) joins both fits. A genuine cusp shows up as
    slopes separated by many standard errors.
    """
    d, g = scan.deltas, scan.gamma
    order = np.argsort(np.abs(d))
    left_idx = [i for i in order if d[i] < 0][:n_side]
    right_idx = [i for i in order if d[i] > 0][:n_side]
    zero_idx = [i for i in order if d[i] == 0.0][:1]
    if len(left_idx) < 3 or len(right_idx) < 3:
        raise InvalidParameter("scan must hold >= 3 points on each side of 0")
    li = np.array(left_idx + zero_idx, dtype=int)
    ri = np.array(right_idx + zero_idx, dtype=int)
    ls, lse = _line_fit(d[li], g[li])
    rs, rse = _line_fit(d[ri], g[ri])
    return CuspReport(left_slope=ls, right_slope=rs,
                      left_stderr=lse, right_stderr=rse)


@dataclass(frozen=True)
class RevivalEstimate:
    """Finite-chain revival time t* = N / v_max and where the maximum sits."""

    t_star: float
    v_max: float
    k_star: float


def revival_time(N: int, nu_t: float) -> RevivalEstimate:
    v_max, k_star = max_group_velocity(nu_t, N)
    if v_max <= 0:
        raise NumericalFailure("vanishing maximum group velocity")
    return RevivalEstimate(t_star=N / v_max, v_max=v_max, k_star=k_star)


def find_revival_burst(t: np.ndarray, V: np.ndarray, window: float = 50.0,
                       baseline_gap: float = 50.0, baseline_span: float = 200.0,
                       factor: float = 2.0) -> float | None:
    """First time the local oscillation amplitude jumps above its own past.

    The trace is scanned with a rolling window of width `window`; the
    oscillation amplitude is max - min of V inside the window. The baseline
    at time t is the median amplitude over [t - gap - span, t - gap]. The
    detector fires at the first sample whose amplitude exceeds factor *
    baseline, and returns None if that never happens. Heuristic, reported
    alongside the raw trace rather than instead of it.
    """
    t = np.asarray(t, dtype=np.float64)
    V = np.asarray(V, dtype=np.float64)
    if t.ndim != 1 or t.shape != V.shape or len(t) < 8:
        raise InvalidParameter("need matching 1-d t and V arrays")
    dt = float(t[1] - t[0])
    if dt <= 0 or not np.allclose(np.diff(t), dt, rtol=1e-6, atol=1e-12):
        raise InvalidParameter("revival detection expects a uniform time grid")
    half = max(1, int(round(0.5 * window / dt)))
    from scipy.ndimage import maximum_filter1d, minimum_filter1d
    size = 2 * half + 1
    amp = maximum_filter1d(V, size=size, mode="nearest") \
        - minimum_filter1d(V, size=size, mode="nearest")
    gap_n = int(round(baseline_gap / dt))
    span_n = int(round(baseline_span / dt))
    start = gap_n + span_n
    for i in range(start, len(t)):
        base = float(np.median(amp[i - gap_n - span_n:i - gap_n]))
        if base > 0 and amp[i] > factor * base:
            return float(t[i])
    return None
