"""Midpoint-Trotter time evolution under H(g(t)) and transfer fidelities.

H(g) commutes with the spin-flip parity and with the mirror map n -> N+1-n,
so the evolution runs independently on the four joint symmetry blocks.
Consecutive Trotter steps with the same control value are merged into one
exponential.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .control import ControlSchedule, Task, evaluate
from .errors import DomainError
from .operators import SpinChainSpec, build_hamiltonian, hamiltonian_terms
from .spectral import DEFAULT_GAP_TOLERANCE, ground_state

DEFAULT_TROTTER_STEPS = 300
# symmetry blocks holding less than this relative amplitude are roundoff leakage
_SECTOR_CUTOFF = 1e-13


@dataclass(frozen=True)
class EvolutionConfig:
    """``trotter_steps`` slices per unit horizon if ``scale_with_horizon``, else per run."""

    trotter_steps: int = DEFAULT_TROTTER_STEPS
    scale_with_horizon: bool = False

    def __post_init__(self):
        if int(self.trotter_steps) != self.trotter_steps or self.trotter_steps < 1:
            raise DomainError(f"trotter_steps must be a positive integer, got {self.trotter_steps}")

    def steps_for(self, horizon: float) -> int:
        if self.scale_with_horizon:
            return max(1, int(round(self.trotter_steps * horizon)))
        return int(self.trotter_steps)


@dataclass(frozen=True)
class FidelityReport:
    fidelity: float
    final_state: np.ndarray
    initial_overlap: float


def _mirror(i: int, n_spins: int) -> int:
    return int(format(i, f"0{n_spins}b")[::-1], 2)


@lru_cache(maxsize=16)
def symmetry_sectors(n_spins: int) -> tuple[np.ndarray, ...]:
    """Orthonormal real bases (dim x d) of the joint parity / mirror eigenspaces.

    Order: (even parity, mirror +1), (even, -1), (odd, +1), (odd, -1).
    """
    dim = 2**n_spins
    cols: dict[tuple[int, int], list[np.ndarray]] = {}
    for i in range(dim):
        j = _mirror(i, n_spins)
        if j < i:
            continue
        par = bin(i).count("1") & 1
        if j == i:
            e = np.zeros(dim)
            e[i] = 1.0
            cols.setdefault((par, 1), []).append(e)
            continue
        for sign in (1, -1):
            e = np.zeros(dim)
            e[i] = 1 / np.sqrt(2)
            e[j] = sign / np.sqrt(2)
            cols.setdefault((par, sign), []).append(e)
    out = []
    for key in ((0, 1), (0, -1), (1, 1), (1, -1)):
        if key in cols:
            q = np.array(cols[key]).T
            q.setflags(write=False)
            out.append(q)
    return tuple(out)


def midpoint_controls(schedule: ControlSchedule, steps: int) -> tuple[np.ndarray, float]:
    """Control values sampled at the centres of ``steps`` equal slices, and the slice length."""
    T = schedule.horizon
    dt = T / steps
    t = dt * (np.arange(steps) + 0.5)
    return np.asarray(evaluate(schedule, t), dtype=float), dt


def _runs(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Run-length encode: (value of each run, length of each run)."""
    change = np.flatnonzero(np.diff(values) != 0) + 1
    starts = np.concatenate(([0], change))
    lengths = np.diff(np.concatenate((starts, [len(values)])))
    return values[starts], lengths


class _BlockStepper:
    """Time-ordered exponentials restricted to one parity block.

    Eigendecompositions are memoized on the control value for the lifetime
    of one evolution.
    """

    def __init__(self, bulk: np.ndarray, link: np.ndarray):
        self.bulk = bulk
        self.link = link
        self._memo: dict[float, tuple[np.ndarray, np.ndarray]] = {}

    def decompose(self, gs: np.ndarray) -> None:
        todo = [g for g in dict.fromkeys(gs.tolist()) if g not in self._memo]
        if not todo:
            return
        stack = self.bulk[None] + np.asarray(todo)[:, None, None] * self.link[None]
        w, v = np.linalg.eigh(stack)
        for g, wk, vk in zip(todo, w, v):
            self._memo[g] = (wk, vk)

    def apply(self, psi: np.ndarray, gs: np.ndarray, durations: np.ndarray) -> np.ndarray:
        self.decompose(gs)
        for g, tau in zip(gs.tolist(), durations.tolist()):
            w, v = self._memo[g]
            psi = v @ (np.exp(-1j * tau * w) * (v.T @ psi))
        return psi

    def unitary(self, gs: np.ndarray, durations: np.ndarray) -> np.ndarray:
        self.decompose(gs)
        u = np.eye(self.bulk.shape[0], dtype=complex)
        for g, tau in zip(gs.tolist(), durations.tolist()):
            w, v = self._memo[g]
            u = (v * np.exp(-1j * tau * w)) @ (v.T @ u)
        return u


def _plan(spec: SpinChainSpec, schedule: ControlSchedule, config: EvolutionConfig):
    steps = config.steps_for(schedule.horizon)
    g, dt = midpoint_controls(schedule, steps)
    values, lengths = _runs(g)
    bulk, link = hamiltonian_terms(spec)
    blocks = [
        (q, _BlockStepper(q.T @ bulk @ q, q.T @ link @ q))
        for q in symmetry_sectors(spec.n_spins)
    ]
    return blocks, values, lengths * dt


def propagator(
    spec: SpinChainSpec, schedule: ControlSchedule, config: EvolutionConfig = EvolutionConfig()
) -> np.ndarray:
    """Full Trotter propagator U, factors ordered so the earliest slice acts first."""
    blocks, values, durations = _plan(spec, schedule, config)
    dim = spec.dimension
    u = np.zeros((dim, dim), dtype=complex)
    for q, stepper in blocks:
        u += q @ stepper.unitary(values, durations) @ q.T
    return u


def evolve_state(
    spec: SpinChainSpec,
    schedule: ControlSchedule,
    config: EvolutionConfig,
    initial: np.ndarray,
) -> np.ndarray:
    """Apply the Trotter propagator to ``initial`` without materializing U."""
    initial = np.asarray(initial, dtype=complex)
    if initial.shape != (spec.dimension,):
        raise DomainError(f"state has shape {initial.shape}, expected ({spec.dimension},)")
    blocks, values, durations = _plan(spec, schedule, config)
    out = np.zeros_like(initial)
    for q, stepper in blocks:
        part = q.T @ initial
        if not np.any(np.abs(part) > _SECTOR_CUTOFF * np.abs(initial).max()):
            continue
        out += q @ stepper.apply(part, values, durations)
    return out


def fidelity(state: np.ndarray, target: np.ndarray) -> float:
    """|<target|state>|."""
    state = np.asarray(state)
    target = np.asarray(target)
    if state.shape != target.shape:
        raise DomainError(f"dimension mismatch: {state.shape} vs {target.shape}")
    return float(abs(np.vdot(target, state)))


@lru_cache(maxsize=32)
def _endpoint_states(n_spins: int, field: float, gap_tolerance: float):
    spec = SpinChainSpec(n_spins, field)
    _, closed = ground_state(build_hamiltonian(spec, 1.0), gap_tolerance)
    _, opened = ground_state(build_hamiltonian(spec, 0.0), gap_tolerance)
    closed.setflags(write=False)
    opened.setflags(write=False)
    return closed, opened


def endpoint_states(
    spec: SpinChainSpec, gap_tolerance: float = DEFAULT_GAP_TOLERANCE
) -> tuple[np.ndarray, np.ndarray]:
    """Ground states of the closed (g=1) and open (g=0) chains."""
    return _endpoint_states(spec.n_spins, float(spec.field_strength), float(gap_tolerance))


def task_states(
    spec: SpinChainSpec, task: Task, gap_tolerance: float = DEFAULT_GAP_TOLERANCE
) -> tuple[np.ndarray, np.ndarray]:
    """(initial, target) for a task: cut starts closed and ends open, stitch the reverse."""
    closed, opened = endpoint_states(spec, gap_tolerance)
    return (closed, opened) if Task(task) is Task.CUT else (opened, closed)


def transform_fidelity(
    spec: SpinChainSpec,
    schedule: ControlSchedule,
    config: EvolutionConfig = EvolutionConfig(),
    gap_tolerance: float = DEFAULT_GAP_TOLERANCE,
) -> FidelityReport:
    initial, target = task_states(spec, schedule.task, gap_tolerance)
    final = evolve_state(spec, schedule, config, initial)
    return FidelityReport(
        fidelity=fidelity(final, target),
        final_state=final,
        initial_overlap=fidelity(initial, target),
    )


def adiabatic_steps(horizon: float, per_unit: int = DEFAULT_TROTTER_STEPS) -> int:
    """Slice count that keeps the slice length at 1/per_unit."""
    return max(1, math.ceil(per_unit * horizon))
