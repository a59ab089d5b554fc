"""Pauli strings and the boundary-controlled transverse-field Ising Hamiltonian.

Basis convention: site 1 is the most significant qubit of the tensor product,
so ``pauli_site("z", 1, n)`` is ``sigma_z (x) I (x) ... (x) I``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError

MAX_SPINS = 12

_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class SpinChainSpec:
    """Chain of ``n_spins`` spins in a transverse field ``field_strength``.

    The Ising coupling is the unit of energy.
    """

    n_spins: int = 5
    field_strength: float = 0.5

    def __post_init__(self):
        if not isinstance(self.n_spins, (int, np.integer)) or isinstance(self.n_spins, bool):
            raise DomainError(f"n_spins must be an integer, got {self.n_spins!r}")
        if not 3 <= self.n_spins <= MAX_SPINS:
            raise DomainError(f"n_spins must lie in [3, {MAX_SPINS}], got {self.n_spins}")
        if not math.isfinite(self.field_strength):
            raise DomainError("field_strength must be finite")

    @property
    def dimension(self) -> int:
        return 2**self.n_spins


def pauli_site(kind: str, site: int, n_spins: int) -> np.ndarray:
    """Embed the Pauli matrix ``kind`` at ``site`` (1-based) of an ``n_spins`` register."""
    if kind not in _PAULI:
        raise DomainError(f"unknown Pauli axis {kind!r}")
    if n_spins < 1 or not 1 <= site <= n_spins:
        raise DomainError(f"site {site} outside [1, {n_spins}]")
    left = np.eye(2 ** (site - 1))
    right = np.eye(2 ** (n_spins - site))
    return np.kron(np.kron(left, _PAULI[kind]), right)


@lru_cache(maxsize=32)
def _terms(n_spins: int, field: float) -> tuple[np.ndarray, np.ndarray]:
    # (bulk couplings + field, boundary link); real-valued, cached read-only
    sx = [pauli_site("x", i, n_spins).real for i in range(1, n_spins + 1)]
    sz = [pauli_site("z", i, n_spins).real for i in range(1, n_spins + 1)]
    bulk = sum(sx[i] @ sx[i + 1] for i in range(n_spins - 1))
    bulk = bulk + field * sum(sz)
    link = sx[0] @ sx[-1]
    bulk.setflags(write=False)
    link.setflags(write=False)
    return bulk, link


def hamiltonian_terms(spec: SpinChainSpec) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(H_fixed, V)`` with ``H(g) = H_fixed + g * V``.

    Both are real symmetric read-only arrays.
    """
    return _terms(int(spec.n_spins), float(spec.field_strength))


def build_hamiltonian(spec: SpinChainSpec, g: float) -> np.ndarray:
    """Dense H(g): open-chain couplings, boundary link of strength g, transverse field."""
    bulk, link = hamiltonian_terms(spec)
    return (bulk + g * link).astype(complex)


def boundary_commutator_residual(spec: SpinChainSpec, g: float) -> float:
    """Frobenius norm of ``[H_fixed, g V] - 2igB (Y1 XN + X1 YN)``; zero up to roundoff."""
    n, field = spec.n_spins, spec.field_strength
    bulk, link = hamiltonian_terms(spec)
    a = bulk.astype(complex)
    b = g * link.astype(complex)
    lhs = a @ b - b @ a
    rhs = 2j * g * field * (
        pauli_site("y", 1, n) @ pauli_site("x", n, n)
        + pauli_site("x", 1, n) @ pauli_site("y", n, n)
    )
    return float(np.linalg.norm(lhs - rhs))
