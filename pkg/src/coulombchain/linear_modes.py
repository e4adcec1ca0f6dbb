"""Normal modes of the linear (unbuckled) ring chain.

Wave numbers are discrete, k_n = 2 pi n / (N a) with n = 0 .. N/2, and each
interior k carries two parity partners (sigma = +/-) that are degenerate in
frequency. The planar branches are

    omega_x(k)^2 = 8 omega_0^2 sum_{j=1}^{N/2} j^-3 sin^2(j k a / 2)   (axial)
    omega_y(k)^2 = nu_t^2 - 4 omega_0^2 sum_{j=1}^{N/2} j^-3 sin^2(j k a / 2)

in the units of `model` (omega_0 = a = 1). The out-of-plane branch equals
omega_y and is not duplicated here. The transverse branch softens at the
zone edge k = pi/a; omega_y(pi/a) = 0 defines the finite-N critical
frequency returned by `critical_frequency_finite`.

The mode matrix R is the real orthogonal transformation between site
displacements and normal coordinates; its first row fixes how strongly each
mode couples to a probe on ion 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter, SoftModeSingularity, UnstableLinearPhase
from .model import ChainParams

# Radicand more negative than this is treated as a genuine instability;
# anything in (-RADICAND_CLAMP, 0) is rounded up to zero.
RADICAND_CLAMP = 1e-12

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _check_even_n(N: int) -> None:
    if not isinstance(N, (int, np.integer)) or isinstance(N, bool):
        raise InvalidParameter("N must be an integer")
    if N < 4 or N % 2 != 0:
        raise InvalidParameter("N must be an even integer >= 4")


@dataclass(frozen=True)
class ModeIndex:
    """One normal mode of the linear chain: integer wave index and parity.

    n runs 0..N/2; sigma is '+' (cosine-like) or '-' (sine-like). n = 0
    exists only as '+' and n = N/2 only as '-'. Physical wave number is
    k = 2 pi n / (N a).
    """

    n: int
    N: int
    sigma: str

    def __post_init__(self):
        _check_even_n(self.N)
        if not 0 <= self.n <= self.N // 2:
            raise InvalidParameter("mode index n must lie in 0..N/2")
        if self.sigma not in ("+", "-"):
            raise InvalidParameter("sigma must be '+' or '-'")
        if self.n == 0 and self.sigma != "+":
            raise InvalidParameter("n = 0 carries only the '+' parity")
        if self.n == self.N // 2 and self.sigma != "-":
            raise InvalidParameter("n = N/2 carries only the '-' parity")

    @property
    def k(self) -> float:
        """Wave number in 1/a units."""
        return 2.0 * math.pi * self.n / self.N


def enumerate_modes(N: int) -> list[ModeIndex]:
    """All N transverse (or axial) mode labels in canonical column order.

    Order: (0,+), then (n,+),(n,-) for n = 1..N/2-1, then (N/2,-).
    """
    _check_even_n(N)
    modes = [ModeIndex(0, N, "+")]
    for n in range(1, N // 2):
        modes.append(ModeIndex(n, N, "+"))
        modes.append(ModeIndex(n, N, "-"))
    modes.append(ModeIndex(N // 2, N, "-"))
    return modes


def _dispersion_sum(k, N: int):
    """sum_{j=1}^{N/2} j^-3 sin^2(j k / 2), vectorized and chunked over k."""
    j = np.arange(N // 2, 0, -1, dtype=np.float64)   # descending j: ascending terms
    w = j ** -3
    karr = np.atleast_1d(np.asarray(k, dtype=np.float64))
    out = np.empty_like(karr)
    # Chunk so the outer product stays below ~32 MB.
    chunk = max(1, int(4e6 / max(len(j), 1)))
    for i in range(0, len(karr), chunk):
        kc = karr[i:i + chunk]
        out[i:i + chunk] = np.einsum(
            "j,jk->k", w, np.sin(np.multiply.outer(j, kc) * 0.5) ** 2)
    return out if np.ndim(k) else float(out[0])


def dispersion_axial(k, N: int):
    """Axial phonon frequency omega_x(k) in omega_0 units; k in 1/a units."""
    _check_even_n(N)
    s = _dispersion_sum(k, N)
    return np.sqrt(8.0 * s) if np.ndim(k) else math.sqrt(8.0 * s)


def dispersion_transverse(k, nu_t: float, N: int):
    """Transverse phonon frequency omega_y(k); raises below the instability.

    Radicands in (-1e-12, 0) are clamped to zero; anything lower means the
    linear phase is not a valid expansion point for this nu_t.
    """
    _check_even_n(N)
    if nu_t <= 0:
        raise InvalidParameter("nu_t must be positive")
    rad = nu_t ** 2 - 4.0 * np.asarray(_dispersion_sum(k, N))
    bad = rad < -RADICAND_CLAMP
    if np.any(bad):
        raise UnstableLinearPhase(
            f"omega_y^2 = {float(np.min(rad)):.3e} at nu_t = {nu_t}: "
            "linear chain unstable (nu_t below the finite-N critical frequency)")
    # Symmetric snap: exactly at the critical point the radicand is rounding
    # noise of either sign, and the zero must be exact for both phases' mode
    # lists to agree there.
    rad = np.where(np.abs(rad) < RADICAND_CLAMP, 0.0, rad)
    return np.sqrt(rad) if np.ndim(k) else math.sqrt(float(rad))


def critical_frequency_finite(N: int) -> float:
    """nu_t at which omega_y(pi/a) vanishes: sqrt(4 sum_{j odd <= N/2} j^-3)."""
    _check_even_n(N)
    j = np.arange(1, N // 2 + 1, dtype=np.float64)
    odd = j[::2]                       # 1, 3, 5, ...
    return math.sqrt(4.0 * float(np.sum(odd[::-1] ** -3)))


@dataclass(frozen=True)
class ModeSet:
    """Frequencies for every mode label of one branch ('x' or 'y')."""

    branch: str
    modes: tuple
    omega: np.ndarray

    def __post_init__(self):
        if self.branch not in ("x", "y"):
            raise InvalidParameter("branch must be 'x' or 'y'")
        if len(self.modes) != len(self.omega):
            raise InvalidParameter("modes and omega must have equal length")

    def __len__(self):
        return len(self.modes)


def transverse_mode_set(params: ChainParams) -> ModeSet:
    """ModeSet of the y branch for the given chain parameters."""
    modes = enumerate_modes(params.N)
    k = np.array([m.k for m in modes])
    omega = dispersion_transverse(k, params.nu_t, params.N)
    return ModeSet(branch="y", modes=tuple(modes), omega=omega)


def axial_mode_set(N: int) -> ModeSet:
    """ModeSet of the x branch (confinement-independent)."""
    modes = enumerate_modes(N)
    k = np.array([m.k for m in modes])
    return ModeSet(branch="x", modes=tuple(modes), omega=dispersion_axial(k, N))


@dataclass(frozen=True)
class ModeMatrix:
    """Orthogonal site-to-mode matrix R, columns ordered as enumerate_modes.

    Rows are ion sites j = 1..N (row index j-1). Entries:
        R[j, 0]        = sqrt(1/N)                       (n = 0)
        R[j, (n,+)]    = sqrt(2/N) cos(j k_n)            (0 < n < N/2)
        R[j, (n,-)]    = sqrt(2/N) sin(j k_n)
        R[j, (N/2,-)]  = (-1)^j sqrt(1/N)
    """

    N: int
    R: np.ndarray
    modes: tuple

    def row(self, site: int) -> np.ndarray:
        """Probe row for ion `site` (1-based)."""
        if not 1 <= site <= self.N:
            raise InvalidParameter("site must lie in 1..N")
        return self.R[site - 1]

    def orthogonality_error(self) -> float:
        """max |R^T R - I|."""
        G = self.R.T @ self.R
        return float(np.max(np.abs(G - np.eye(self.N))))


def mode_matrix(N: int) -> ModeMatrix:
    _check_even_n(N)
    modes = enumerate_modes(N)
    j = np.arange(1, N + 1, dtype=np.float64)
    R = np.empty((N, N))
    root1 = math.sqrt(1.0 / N)
    root2 = math.sqrt(2.0 / N)
    for col, m in enumerate(modes):
        if m.n == 0:
            R[:, col] = root1
        elif m.n == N // 2:
            R[:, col] = root1 * np.where(np.arange(1, N + 1) % 2 == 0, 1.0, -1.0)
        elif m.sigma == "+":
            R[:, col] = root2 * np.cos(j * m.k)
        else:
            R[:, col] = root2 * np.sin(j * m.k)
    return ModeMatrix(N=N, R=R, modes=tuple(modes))


def _dispersion_sq_derivative(k, N: int):
    """d(omega_y^2)/dk = -2 sum_{j=1}^{N/2} j^-2 sin(j k), omega_0^2 a units."""
    j = np.arange(N // 2, 0, -1, dtype=np.float64)
    w = j ** -2
    karr = np.atleast_1d(np.asarray(k, dtype=np.float64))
    out = np.empty_like(karr)
    chunk = max(1, int(4e6 / max(len(j), 1)))
    for i in range(0, len(karr), chunk):
        kc = karr[i:i + chunk]
        out[i:i + chunk] = np.einsum(
            "j,jk->k", w, np.sin(np.multiply.outer(j, kc)))
    out *= -2.0
    return out if np.ndim(k) else float(out[0])


def group_velocity(k, nu_t: float, N: int):
    """Transverse group velocity |d omega_y / dk| in a*omega_0 units."""
    omega = np.asarray(dispersion_transverse(k, nu_t, N))
    if np.any(omega == 0.0):
        raise SoftModeSingularity(
            "group velocity undefined where omega_y(k) = 0")
    v = np.abs(_dispersion_sq_derivative(k, N)) / (2.0 * omega)
    return v if np.ndim(k) else float(v)


def max_group_velocity(nu_t: float, N: int, grid_points: int = 4096,
                       tol: float = 1e-6) -> tuple[float, float]:
    """(v_max, k_star) of the transverse branch on (0, pi/a).

    Dense-grid argmax followed by golden-section refinement of the bracketing
    interval; tol is the final bracket width in 1/a units and must not
    exceed 1e-4 for the revival-time estimate to hold its tolerance.
    """
    _check_even_n(N)
    if grid_points < 2048:
        raise InvalidParameter("grid_points must be >= 2048")
    ks = np.linspace(0.0, math.pi, grid_points + 2)[1:-1]
    v = group_velocity(ks, nu_t, N)
    i = int(np.argmax(v))
    lo = ks[i - 1] if i > 0 else ks[i] / 2.0
    hi = ks[i + 1] if i < len(ks) - 1 else 0.5 * (ks[i] + math.pi)

    def f(k):
        return group_velocity(float(k), nu_t, N)

    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    k_star = 0.5 * (a + b)
    return f(k_star), k_star
