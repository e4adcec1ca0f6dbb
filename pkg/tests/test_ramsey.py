"""Recoil amplitudes and the Ramsey signal, checked against a from-scratch
N = 4 oracle and random parameter sweeps."""

import cmath
import math

import mpmath
import numpy as np
import pytest

from coulombchain import (ChainParams, DisplacementAmplitudes,
                          autocorrelation_G, displacement_amplitudes,
                          distinguishability, evaluate_trace, exponent_A,
                          exponent_A_thermal, linear_chain_amplitudes,
                          mode_matrix, overlap, ramsey_probability,
                          thermal_weights, transverse_mode_set, visibility)
from coulombchain.errors import InvalidParameter, SoftModeSingularity

T_GRID = [0.0, 0.37, 1.0, 2.5, 7.3, 31.4]


def brute_force_n4(nu_t, eta_c, t):
    """Everything from first principles for N = 4, probe on ion 1.

    Mode order (0,+), (1,+), (1,-), (2,-). Duplicates no package code: the
    dispersion sums, mode matrix and critical frequency are written out by
    hand, zeta(3) comes from mpmath.
    """
    s = {0.0: 0.0,
         math.pi / 2: math.sin(math.pi / 4) ** 2 + math.sin(math.pi / 2) ** 2 / 8,
         math.pi: math.sin(math.pi / 2) ** 2 + math.sin(math.pi) ** 2 / 8}
    ks = [0.0, math.pi / 2, math.pi / 2, math.pi]
    omegas = [math.sqrt(nu_t ** 2 - 4 * s[k]) for k in ks]
    row = [0.5, math.sqrt(0.5) * math.cos(math.pi / 2),
           math.sqrt(0.5) * math.sin(math.pi / 2), -0.5]
    nu_c = float(mpmath.sqrt(3.5 * mpmath.zeta(3)))
    eta0 = eta_c * math.sqrt(nu_c / nu_t)
    alphas = [1j * eta0 * math.sqrt(nu_t / w) * r
              for w, r in zip(omegas, row)]
    weights = [abs(a) ** 2 for a in alphas]
    A = sum(2 * w * math.sin(0.5 * om * t) ** 2
            for w, om in zip(weights, omegas))
    phi = sum(w * math.sin(om * t) for w, om in zip(weights, omegas))
    S = cmath.exp(-A + 1j * phi)
    return omegas, alphas, weights, A, S


@pytest.mark.parametrize("nu_t,eta_c", [(2.5, 0.25), (2.3, 0.1), (3.0, 0.05)])
def test_n4_oracle(nu_t, eta_c):
    p = ChainParams(N=4, nu_t=nu_t, eta_c=eta_c)
    amps = linear_chain_amplitudes(p)
    om_ref, al_ref, w_ref, _, _ = brute_force_n4(nu_t, eta_c, 0.0)
    assert amps.omega == pytest.approx(om_ref, abs=1e-12)
    assert amps.alpha == pytest.approx(al_ref, abs=1e-12)
    assert amps.weight == pytest.approx(w_ref, abs=1e-12)
    for t in T_GRID:
        _, _, _, A_ref, S_ref = brute_force_n4(nu_t, eta_c, t)
        assert float(exponent_A(t, amps)) == pytest.approx(A_ref, abs=1e-12)
        assert complex(overlap(t, amps)) == pytest.approx(S_ref, abs=1e-12)
        assert float(visibility(t, amps)) == pytest.approx(
            abs(S_ref), abs=1e-12)


def test_amplitude_sum_rule():
    # sum |alpha|^2 omega = eta0^2 nu_t for any stable chain
    rng = np.random.default_rng(20260816)
    for _ in range(25):
        N = int(rng.choice([4, 6, 16, 64, 100]))
        nu_t = 2.06 + float(rng.uniform(0.0, 2.0))
        eta_c = float(rng.uniform(0.01, 0.5))
        p = ChainParams(N=N, nu_t=nu_t, eta_c=eta_c)
        amps = linear_chain_amplitudes(p)
        lhs = float(np.sum(amps.weight * amps.omega))
        assert lhs == pytest.approx(p.eta0 ** 2 * p.nu_t, rel=1e-10)


def test_overlap_modulus_is_visibility():
    p = ChainParams.from_delta(16, 0.05, 0.3)
    amps = linear_chain_amplitudes(p)
    t = np.linspace(0.0, 40.0, 500)
    S = overlap(t, amps)
    V = visibility(t, amps)
    A = exponent_A(t, amps)
    assert np.max(np.abs(np.abs(S) - V)) < 1e-12
    assert np.max(np.abs(V - np.exp(-A))) < 1e-12


def test_evenness_and_initial_value():
    p = ChainParams.from_delta(16, 0.1, 0.2)
    amps = linear_chain_amplitudes(p)
    t = np.linspace(0.5, 20.0, 40)
    assert visibility(t, amps) == pytest.approx(visibility(-t, amps))
    assert float(visibility(0.0, amps)) == 1.0
    assert float(exponent_A(0.0, amps)) == 0.0


def test_thermal_weights_and_reduction():
    p = ChainParams.from_delta(16, 0.1, 0.2)
    amps = linear_chain_amplitudes(p)
    # theta = 0 reduction is exact, same array object semantics aside
    assert np.array_equal(thermal_weights(amps, 0.0), amps.weight)
    theta = 0.8
    wt = thermal_weights(amps, theta)
    ref = amps.weight / np.tanh(amps.omega / (2.0 * theta))
    assert wt == pytest.approx(ref, rel=1e-14)
    assert np.all(wt > amps.weight)    # thermal occupation only adds noise
    t = np.linspace(0.0, 10.0, 50)
    A0 = exponent_A(t, amps)
    AT = exponent_A_thermal(t, amps, theta)
    assert np.all(AT >= A0 - 1e-15)
    assert exponent_A_thermal(t, amps, 0.0) == pytest.approx(A0, rel=1e-15)


def test_thermal_visibility_drops():
    p = ChainParams.from_delta(16, 0.1, 0.2)
    amps = linear_chain_amplitudes(p)
    t = np.linspace(0.1, 10.0, 30)
    assert np.all(visibility(t, amps, theta=1.0) <= visibility(t, amps) + 1e-15)


def test_phase_is_temperature_independent():
    p = ChainParams.from_delta(16, 0.1, 0.2)
    amps = linear_chain_amplitudes(p)
    t = np.linspace(0.1, 10.0, 30)
    ph_cold = np.angle(overlap(t, amps))
    ph_hot = np.angle(overlap(t, amps, theta=2.0))
    assert ph_hot == pytest.approx(ph_cold, abs=1e-12)


def test_ramsey_probability():
    p = ChainParams.from_delta(16, 0.1, 0.2)
    amps = linear_chain_amplitudes(p)
    assert float(ramsey_probability(0.0, 0.0, amps)) == pytest.approx(1.0)
    assert float(ramsey_probability(math.pi, 0.0, amps)) == pytest.approx(0.0)
    t = np.linspace(0.0, 10.0, 101)
    for phi in (0.0, 0.7, math.pi / 2):
        pg = ramsey_probability(phi, t, amps)
        assert np.all((pg >= -1e-12) & (pg <= 1 + 1e-12))
        S = overlap(t, amps)
        ref = 0.5 * (1.0 + (np.exp(1j * phi) * S).real)
        assert pg == pytest.approx(ref, abs=1e-14)


def test_autocorrelation_relation():
    # G = 2 A / (eta0^2 nu_t): A in units of the recoil coupling
    p = ChainParams.from_delta(16, 0.1, 0.2)
    amps = linear_chain_amplitudes(p)
    t = np.linspace(0.0, 10.0, 101)
    G = autocorrelation_G(t, amps)
    A = exponent_A(t, amps)
    assert G == pytest.approx(2.0 * A / (p.eta0 ** 2 * p.nu_t), rel=1e-12)


def test_distinguishability():
    assert distinguishability(1.0) == pytest.approx(0.0)
    assert distinguishability(0.0) == pytest.approx(1.0)
    v = np.array([0.2, 0.6, 1.0])
    d = distinguishability(v)
    assert d ** 2 + v ** 2 == pytest.approx(np.ones(3), abs=1e-12)
    with pytest.raises(InvalidParameter):
        distinguishability(1.5)


def test_probe_site_equivalence():
    # the ring is translation invariant: every probe site gives the same A
    p = ChainParams.from_delta(16, 0.1, 0.2)
    t = np.linspace(0.0, 10.0, 64)
    base = exponent_A(t, linear_chain_amplitudes(p, probe_site=1))
    for site in (2, 7, 16):
        other = exponent_A(t, linear_chain_amplitudes(p, probe_site=site))
        assert other == pytest.approx(base, abs=1e-12)


def test_zero_frequency_mode_rejected():
    with pytest.raises(SoftModeSingularity):
        DisplacementAmplitudes(omega=np.array([0.0, 1.0]),
                               alpha=np.array([0.1j, 0.1j]),
                               weight=np.array([0.01, 0.01]),
                               eta0=0.1, nu_t=2.5, probe_site=1)


def test_random_sweep_invariants():
    rng = np.random.default_rng(7)
    t = np.linspace(0.0, 25.0, 100)
    for _ in range(20):
        N = int(rng.choice([4, 8, 16, 32]))
        p = ChainParams(N=N, nu_t=2.06 + float(rng.uniform(0, 1.5)),
                        eta_c=float(rng.uniform(0.01, 0.4)),
                        theta=float(rng.choice([0.0, 0.5, 2.0])))
        amps = linear_chain_amplitudes(p)
        assert np.all(amps.weight >= 0)
        tr = evaluate_trace(amps, t, theta=p.theta)
        assert np.all((tr.V > 0) & (tr.V <= 1.0 + 1e-12))
        assert np.all(tr.A >= -1e-15)
        assert np.max(np.abs(np.abs(tr.S) - np.exp(-tr.A))) < 1e-12


def test_displacement_amplitudes_explicit_modes():
    # wiring displacement_amplitudes by hand equals the convenience path
    p = ChainParams.from_delta(12, 0.2, 0.15)
    ms = transverse_mode_set(p)
    R = mode_matrix(p.N)
    a1 = displacement_amplitudes(p, ms, R)
    a2 = linear_chain_amplitudes(p)
    assert a1.omega == pytest.approx(a2.omega)
    assert a1.alpha == pytest.approx(a2.alpha)
