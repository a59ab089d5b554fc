"""Hermitian eigendecomposition, ground states and level-gap scans."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGroundStateError, DomainError
from .operators import SpinChainSpec, build_hamiltonian

DEFAULT_GAP_TOLERANCE = 1e-8
HERMITIAN_TOLERANCE = 1e-10
_JACOBI_TOL = 1e-12
_MAX_SWEEPS = 60


@dataclass(frozen=True)
class SpectralResult:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # column k pairs with eigenvalues[k]

    @property
    def ground_energy(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def gap(self) -> float:
        if len(self.eigenvalues) < 2:
            return float("inf")
        return float(self.eigenvalues[1] - self.eigenvalues[0])


def _round_robin(n: int) -> list[list[tuple[int, int]]]:
    """Pair schedule covering every (p, q) once per sweep, disjoint within a round."""
    players = list(range(n)) + ([-1] if n % 2 else [])
    m = len(players)
    rounds = []
    for _ in range(m - 1):
        pairs = []
        for i in range(m // 2):
            p, q = players[i], players[m - 1 - i]
            if p >= 0 and q >= 0:
                pairs.append((min(p, q), max(p, q)))
        rounds.append(pairs)
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def _off_norm(a: np.ndarray) -> float:
    off = a.copy()
    np.fill_diagonal(off, 0.0)
    return float(np.linalg.norm(off))


def jacobi_eigh(h: np.ndarray, tol: float = _JACOBI_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi diagonalization of a Hermitian matrix.

    Sweeps until the off-diagonal Frobenius norm falls below ``tol * ||h||_F``.
    Each round of a sweep applies a set of disjoint 2x2 unitary rotations at
    once. Returns unsorted ``(eigenvalues, eigenvectors)``.
    """
    a = np.array(h, dtype=complex)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = np.linalg.norm(a)
    if n == 1 or scale == 0.0:
        return np.real(np.diag(a)).copy(), v
    threshold = tol * scale
    rounds = [np.array(r, dtype=int).T for r in _round_robin(n)]

    for _ in range(_MAX_SWEEPS):
        if _off_norm(a) < threshold:
            break
        for p, q in rounds:
            apq = a[p, q]
            mag = np.abs(apq)
            active = mag > 0.0
            if not active.any():
                continue
            p, q, apq, mag = p[active], q[active], apq[active], mag[active]
            phase = apq / mag
            app = a[p, p].real
            aqq = a[q, q].real
            tau = (aqq - app) / (2.0 * mag)
            t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            # G = diag(1, conj(phase)) @ [[c, s], [-s, c]] embedded on (p, q)
            g = np.eye(n, dtype=complex)
            g[p, p] = c
            g[p, q] = s
            g[q, p] = -s * np.conj(phase)
            g[q, q] = c * np.conj(phase)
            a = g.conj().T @ a @ g
            a = 0.5 * (a + a.conj().T)
            v = v @ g
    else:
        raise RuntimeError("Jacobi sweeps did not converge")
    return np.real(np.diag(a)).copy(), v


def eigendecompose(h: np.ndarray) -> SpectralResult:
    """Full spectrum of a Hermitian matrix, eigenvalues ascending."""
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {h.shape}")
    scale = max(np.linalg.norm(h), 1.0)
    if np.linalg.norm(h - h.conj().T) > HERMITIAN_TOLERANCE * scale:
        raise DomainError("matrix is not Hermitian")
    w, v = jacobi_eigh(h)
    order = np.argsort(w, kind="stable")
    return SpectralResult(w[order], v[:, order])


def fix_phase(vec: np.ndarray) -> np.ndarray:
    """Normalize and rotate so the largest-magnitude entry is real and non-negative.

    Ties in magnitude go to the lowest index.
    """
    vec = np.asarray(vec, dtype=complex)
    norm = np.linalg.norm(vec)
    if norm == 0.0:
        raise DomainError("cannot normalize the zero vector")
    vec = vec / norm
    mags = np.abs(vec)
    # near-ties resolved toward the lowest index so roundoff cannot flip the pick
    k = int(np.flatnonzero(mags >= mags.max() * (1 - 1e-10))[0])
    vec = vec * (np.conj(vec[k]) / mags[k])
    vec[k] = mags[k]
    return vec


def ground_state(
    h: np.ndarray, gap_tolerance: float = DEFAULT_GAP_TOLERANCE
) -> tuple[float, np.ndarray]:
    """Lowest eigenpair with the phase convention of :func:`fix_phase`.

    Raises DegenerateGroundStateError when ``E1 - E0 < gap_tolerance``.
    """
    res = eigendecompose(h)
    if res.gap < gap_tolerance:
        raise DegenerateGroundStateError(res.gap, gap_tolerance)
    state = fix_phase(res.eigenvectors[:, 0])
    if np.all(np.isreal(np.asarray(h))) or np.max(np.abs(np.imag(h))) == 0.0:
        # real symmetric input: after phase fixing the residual imaginary part is roundoff
        state = state.real.astype(complex)
        state /= np.linalg.norm(state)
    return res.ground_energy, state


@dataclass(frozen=True)
class GapScan:
    g: np.ndarray
    e0: np.ndarray
    e1: np.ndarray

    @property
    def gaps(self) -> np.ndarray:
        return self.e1 - self.e0

    @property
    def min_gap(self) -> float:
        return float(self.gaps.min())

    @property
    def argmin(self) -> float:
        return float(self.g[int(np.argmin(self.gaps))])

    def rows(self) -> list[tuple[float, float, float]]:
        return [(float(a), float(b), float(c)) for a, b, c in zip(self.g, self.e0, self.e1)]


def gap_scan(spec: SpinChainSpec, g_values) -> GapScan:
    """E0(g) and E1(g) at each control value."""
    g_values = np.atleast_1d(np.asarray(g_values, dtype=float))
    if g_values.size == 0:
        raise DomainError("g_values must be non-empty")
    e0 = np.empty_like(g_values)
    e1 = np.empty_like(g_values)
    for i, g in enumerate(g_values):
        w = eigendecompose(build_hamiltonian(spec, g)).eigenvalues
        e0[i], e1[i] = w[0], w[1]
    return GapScan(g_values, e0, e1)
