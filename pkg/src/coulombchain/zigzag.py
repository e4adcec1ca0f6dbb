"""Zigzag phase: equilibrium amplitude, phonon spectrum, mode labels.

Below the finite-N critical frequency the ring buckles into the planar
zigzag y_j = (-1)^j b / 2 at fixed axial spacing. Interactions run over the
ring separations d = 1..N/2 in both directions, which double-counts the
diametral pair; this is exactly the pair convention under which the linear
dispersion sums of `linear_modes` are recovered term by term, so the b -> 0
spectrum matches the folded linear branches to machine precision.

The 2N x 2N dynamical matrix in coordinates (q_1, w_1, ..., q_N, w_N) is
assembled from the analytic second derivatives of 1/r and diagonalized
exactly. Modes are labeled by the folded wave number k = 2 pi n / (N a),
n = 0..N/4, and parity, by projecting eigenvectors onto the cos/sin Bloch
patterns of the doubled cell; the structural modes (uniform rotation, bulk
transverse, and the two staggered zigzag modes) are tagged by name.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import (InvalidParameter, NumericalFailure, SoftModeSingularity,
                     UnstableConfiguration)
from .linear_modes import (critical_frequency_finite, dispersion_axial,
                           dispersion_transverse, enumerate_modes)
from .model import ChainParams
from .ramsey import DisplacementAmplitudes

GRAD_TOL = 1e-10          # |dE/db| at the returned equilibrium
EIG_CLAMP = 1e-10         # |eigenvalue| below this snaps to zero
_PROJ_INT_TOL = 1e-6      # subspace occupancies must be near-integers


def _check_zigzag_n(N: int) -> None:
    if not isinstance(N, (int, np.integer)) or isinstance(N, bool):
        raise InvalidParameter("N must be an integer")
    if N < 8 or N % 4 != 0:
        raise InvalidParameter(
            "zigzag routines need N divisible by 4 (commensurate pattern)")


@dataclass(frozen=True)
class ZigzagEquilibrium:
    """Equilibrium transverse splitting b (in units of a) at given nu_t."""

    N: int
    nu_t: float
    b: float
    energy_per_ion: float
    grad: float


def _energy_per_ion(b: float, nu_t: float, N: int) -> float:
    d = np.arange(1, N // 2 + 1, dtype=np.float64)
    off = np.where(d % 2 == 1, b * b, 0.0)
    return 0.125 * nu_t ** 2 * b * b + float(np.sum(1.0 / np.sqrt(d * d + off)))


def _grad_per_ion(b: float, nu_t: float, N: int) -> float:
    d_odd = np.arange(1, N // 2 + 1, dtype=np.float64)[::2]
    return b * (0.25 * nu_t ** 2
                - float(np.sum((d_odd * d_odd + b * b) ** -1.5)))


def zigzag_equilibrium(params: ChainParams) -> ZigzagEquilibrium:
    """Minimize the ring energy over the staggered amplitude b >= 0.

    Returns the b = 0 branch whenever that is the energy minimum (nu_t at or
    above the finite-N critical frequency).
    """
    N, nu_t = params.N, params.nu_t
    _check_zigzag_n(N)
    nu_cn = critical_frequency_finite(N)
    if nu_t >= nu_cn:
        return ZigzagEquilibrium(N=N, nu_t=nu_t, b=0.0,
                                 energy_per_ion=_energy_per_ion(0.0, nu_t, N),
                                 grad=0.0)

    # Stationarity of E/N in b, scaled by 1/b: monotone increasing in b.
    def g(b):
        d_odd = np.arange(1, N // 2 + 1, dtype=np.float64)[::2]
        return 0.25 * nu_t ** 2 - float(np.sum((d_odd ** 2 + b * b) ** -1.5))

    hi = 0.1
    while g(hi) <= 0.0:
        hi *= 2.0
        if hi > 1e3:
            raise NumericalFailure("no bracket for the zigzag amplitude")
    b = brentq(g, 0.0, hi, xtol=1e-15, rtol=8.9e-16, maxiter=200)
    grad = _grad_per_ion(b, nu_t, N)
    if abs(grad) > GRAD_TOL:
        raise NumericalFailure(
            f"zigzag equilibrium gradient {grad:.2e} exceeds {GRAD_TOL}")
    e_zz = _energy_per_ion(b, nu_t, N)
    if e_zz > _energy_per_ion(0.0, nu_t, N):
        b, e_zz = 0.0, _energy_per_ion(0.0, nu_t, N)
    return ZigzagEquilibrium(N=N, nu_t=nu_t, b=b, energy_per_ion=e_zz,
                             grad=grad if b else 0.0)


def _hessian(N: int, nu_t: float, b: float) -> np.ndarray:
    """Analytic 2N x 2N Hessian at the staggered configuration, omega_0^2 units."""
    H = np.zeros((2 * N, 2 * N))
    i = np.arange(N)
    # Sites are 1-based: y0_site = (-1)^(i+1) b/2, so an odd-separation bond
    # has y_j0 - y_i0 = -2 y_i0 = (-1)^i b.
    sign_i = np.where(i % 2 == 0, 1.0, -1.0)
    for d in range(1, N // 2 + 1):
        j = (i + d) % N
        if d % 2 == 1:
            dy = sign_i * b                        # y_j0 - y_i0 for odd separation
        else:
            dy = np.zeros(N)
        r2 = d * d + dy * dy
        r5 = r2 ** 2.5
        kxx = (3.0 * d * d - r2) / r5
        kyy = (3.0 * dy * dy - r2) / r5
        kxy = 3.0 * d * dy / r5
        qi, wi = 2 * i, 2 * i + 1
        qj, wj = 2 * j, 2 * j + 1
        np.add.at(H, (qi, qi), kxx)
        np.add.at(H, (qj, qj), kxx)
        np.add.at(H, (qi, qj), -kxx)
        np.add.at(H, (qj, qi), -kxx)
        np.add.at(H, (wi, wi), kyy)
        np.add.at(H, (wj, wj), kyy)
        np.add.at(H, (wi, wj), -kyy)
        np.add.at(H, (wj, wi), -kyy)
        np.add.at(H, (qi, wi), kxy)
        np.add.at(H, (wi, qi), kxy)
        np.add.at(H, (qj, wj), kxy)
        np.add.at(H, (wj, qj), kxy)
        np.add.at(H, (qi, wj), -kxy)
        np.add.at(H, (wj, qi), -kxy)
        np.add.at(H, (wi, qj), -kxy)
        np.add.at(H, (qj, wi), -kxy)
    H[np.arange(1, 2 * N, 2), np.arange(1, 2 * N, 2)] += nu_t ** 2
    return H


@dataclass(frozen=True)
class ZigzagSpectrum:
    """Eigen-decomposition of the zigzag dynamical matrix.

    omega is ascending; vectors[:, m] is the orthonormal eigenvector of
    omega[m] in (q_1, w_1, ..., q_N, w_N) order.
    """

    N: int
    nu_t: float
    b: float
    omega: np.ndarray
    vectors: np.ndarray

    def probe_row(self, site: int = 1, coordinate: str = "w") -> np.ndarray:
        """Eigenvector components of one site coordinate across all modes."""
        if not 1 <= site <= self.N:
            raise InvalidParameter("site must lie in 1..N")
        if coordinate not in ("q", "w"):
            raise InvalidParameter("coordinate must be 'q' or 'w'")
        idx = 2 * (site - 1) + (1 if coordinate == "w" else 0)
        return self.vectors[idx]


def zigzag_spectrum(params: ChainParams) -> ZigzagSpectrum:
    """Phonon spectrum at the zigzag (or, above the transition, linear) minimum."""
    eq = zigzag_equilibrium(params)
    H = _hessian(params.N, params.nu_t, eq.b)
    lam, vec = np.linalg.eigh(H)
    if lam[0] < -EIG_CLAMP:
        raise UnstableConfiguration(
            f"negative Hessian eigenvalue {lam[0]:.3e}: the staggered ansatz "
            "is not a stable configuration here")
    # Zero modes (rotation; the soft mode exactly at the transition) come out
    # of eigh as +/- rounding noise; snap them so omega is exactly zero.
    lam = np.where(np.abs(lam) < EIG_CLAMP, 0.0, lam)
    return ZigzagSpectrum(N=params.N, nu_t=params.nu_t, b=eq.b,
                          omega=np.sqrt(lam), vectors=vec)


def folded_linear_frequencies(params: ChainParams) -> np.ndarray:
    """Both planar linear-chain branches on the full mode set, sorted.

    This is what the zigzag spectrum must reduce to at b = 0: the x and y
    branches folded together into one list of 2N frequencies.
    """
    modes = enumerate_modes(params.N)
    k = np.array([m.k for m in modes])
    wx = dispersion_axial(k, params.N)
    wy = dispersion_transverse(k, params.nu_t, params.N)
    return np.sort(np.concatenate([wx, wy]))


@dataclass(frozen=True)
class ZigzagMode:
    """One labeled zigzag mode.

    beta ranks branches within (n, sigma) by descending frequency. residual
    is 1 - (projection onto the assigned Bloch subspace)^2. special is one
    of '', 'bulk_x', 'bulk_y', 'zigzag_x', 'zigzag_y'.
    """

    n: int
    k: float
    sigma: str
    beta: int
    omega: float
    residual: float
    cluster: int
    degenerate: bool
    special: str
    vector: np.ndarray = field(repr=False)


def _bloch_basis(N: int):
    """Orthonormal cos/sin pattern basis, grouped by (n, sigma).

    For each folded n (k = 2 pi n / N, partner kb = pi - k) the sigma = '+'
    subspace is spanned by {cos(k j)|q, sin(kb j)|w, cos(kb j)|q, sin(k j)|w}
    and sigma = '-' by {sin(k j)|q, cos(kb j)|w, sin(kb j)|q, cos(k j)|w};
    zero and duplicate patterns are dropped.
    """
    j = np.arange(1, N + 1, dtype=np.float64)
    cols, groups = [], []
    seen = []

    def push(vals: np.ndarray, which: str, n: int, sigma: str):
        norm = float(np.linalg.norm(vals))
        if norm < 1e-9:
            return
        v = np.zeros(2 * N)
        v[slice(0, None, 2) if which == "q" else slice(1, None, 2)] = vals / norm
        for u in seen:
            if abs(float(u @ v)) > 1.0 - 1e-9:
                return
        seen.append(v)
        cols.append(v)
        groups.append((n, sigma))

    for n in range(0, N // 4 + 1):
        k = 2.0 * math.pi * n / N
        kb = math.pi - k
        push(np.cos(k * j), "q", n, "+")
        push(np.sin(kb * j), "w", n, "+")
        push(np.cos(kb * j), "q", n, "+")
        push(np.sin(k * j), "w", n, "+")
        push(np.sin(k * j), "q", n, "-")
        push(np.cos(kb * j), "w", n, "-")
        push(np.sin(kb * j), "q", n, "-")
        push(np.cos(k * j), "w", n, "-")
    B = np.column_stack(cols)
    return B, groups


def _special_patterns(N: int) -> dict[str, np.ndarray]:
    stag = np.where(np.arange(1, N + 1) % 2 == 0, 1.0, -1.0) / math.sqrt(N)
    unif = np.ones(N) / math.sqrt(N)
    out = {}
    for name, vals, which in (("bulk_x", unif, "q"), ("bulk_y", unif, "w"),
                              ("zigzag_x", stag, "q"), ("zigzag_y", stag, "w")):
        v = np.zeros(2 * N)
        v[slice(0, None, 2) if which == "q" else slice(1, None, 2)] = vals
        out[name] = v
    return out


def classify_zigzag_modes(spectrum: ZigzagSpectrum) -> list[ZigzagMode]:
    """Label every mode with folded wave number, parity, branch and residual.

    Degenerate eigenvalue clusters are rotated inside their eigenspace so
    that each resulting vector lies in a single (n, sigma) Bloch subspace.
    Clusters whose subspace occupancies are not clean integers are flagged
    degenerate=True and assigned best-effort labels instead of erroring.
    """
    N = spectrum.N
    _check_zigzag_n(N)
    B, groups = _bloch_basis(N)
    group_keys = sorted(set(groups))
    gindex = {g: [c for c, gg in enumerate(groups) if gg == g]
              for g in group_keys}

    omega, V = spectrum.omega, spectrum.vectors
    # Occupancy of each Bloch subspace by each eigenvector.
    M = B.T @ V                       # basis x modes
    occ = {g: np.sum(M[cols, :] ** 2, axis=0) for g, cols in gindex.items()}

    # Cluster equal frequencies (on omega^2 scale to keep zeros together).
    lam = omega ** 2
    clusters, start = [], 0
    for m in range(1, 2 * N + 1):
        if m == 2 * N or lam[m] - lam[m - 1] > 1e-8 * max(1.0, lam[m]):
            clusters.append(list(range(start, m)))
            start = m
    specials = _special_patterns(N)

    labeled: list[tuple] = []
    for cid, idx in enumerate(clusters):
        occ_c = {g: float(np.sum(occ[g][idx])) for g in group_keys}
        mults = {g: int(round(p)) for g, p in occ_c.items() if round(p) >= 1}
        clean = (sum(mults.values()) == len(idx)
                 and all(abs(occ_c[g] - mults[g]) < _PROJ_INT_TOL
                         for g in mults))
        degenerate = not clean
        Vc = V[:, idx]
        if clean:
            for g, mult in mults.items():
                Mg = B[:, gindex[g]].T @ Vc
                _, s, wt = np.linalg.svd(Mg, full_matrices=False)
                for r in range(mult):
                    vec = Vc @ wt[r]
                    labeled.append((g, float(omega[idx[0]]),
                                    1.0 - float(s[r]) ** 2, cid, False, vec))
        else:
            for col in range(len(idx)):
                v = Vc[:, col]
                best, best_p = None, -1.0
                for g in group_keys:
                    p = float(np.sum((B[:, gindex[g]].T @ v) ** 2))
                    if p > best_p:
                        best, best_p = g, p
                labeled.append((best, float(omega[idx[col]]),
                                1.0 - best_p, cid, True, v))

    # Branch index within (n, sigma): descending frequency.
    out: list[ZigzagMode] = []
    for g in group_keys:
        members = [rec for rec in labeled if rec[0] == g]
        members.sort(key=lambda rec: -rec[1])
        for beta, (gg, w, res, cid, deg, vec) in enumerate(members, start=1):
            special = ""
            if gg[0] == 0:
                for name, pat in specials.items():
                    if abs(float(pat @ vec)) ** 2 > 0.5:
                        special = name
                        break
            out.append(ZigzagMode(n=gg[0], k=2.0 * math.pi * gg[0] / N,
                                  sigma=gg[1], beta=beta, omega=w,
                                  residual=res, cluster=cid, degenerate=deg,
                                  special=special, vector=vec))
    out.sort(key=lambda m: (m.n, m.sigma, m.beta))
    return out


def zigzag_displacement_amplitudes(params: ChainParams,
                                   spectrum: ZigzagSpectrum | None = None,
                                   probe_site: int = 1
                                   ) -> DisplacementAmplitudes:
    """Recoil amplitudes for a transverse kick on one ion of the zigzag.

    The kick couples to the fluctuation w of the probed ion; the static
    offset (-1)^j b/2 only contributes a global phase and drops out of the
    visibility. Zero-frequency modes must not couple (the uniform rotation
    is purely axial); a zero mode with transverse weight is an error.
    """
    if spectrum is None:
        spectrum = zigzag_spectrum(params)
    row = spectrum.probe_row(probe_site, "w")
    zero = spectrum.omega < 1e-12
    if np.any(zero & (row ** 2 > 1e-12)):
        raise SoftModeSingularity(
            "zero-frequency mode couples to the probe: at the transition "
            "the displacement picture breaks down")
    keep = ~zero
    omega = spectrum.omega[keep]
    alpha = 1j * params.eta0 * np.sqrt(params.nu_t / omega) * row[keep]
    return DisplacementAmplitudes(omega=omega, alpha=alpha,
                                  weight=np.abs(alpha) ** 2,
                                  eta0=params.eta0, nu_t=params.nu_t,
                                  probe_site=probe_site, kind="zigzag")
