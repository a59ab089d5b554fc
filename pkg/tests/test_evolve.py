import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.linalg import expm

from chaincut import (
    ControlSchedule,
    DomainError,
    EvolutionConfig,
    Linear,
    Polynomial,
    Pulsed,
    SpinChainSpec,
    Task,
    build_hamiltonian,
    evaluate,
    evolve_state,
    fidelity,
    propagator,
    reverse_schedule,
    transform_fidelity,
)
from chaincut.evolve import endpoint_states, symmetry_sectors
from conftest import reference_hamiltonian

# |<chi0|phi0>| from scipy.linalg.eigh on independently assembled matrices
ENDPOINT_OVERLAP = 0.7468393403822478


def trotter_oracle(n, field, schedule, steps, psi):
    """Plain midpoint product of scipy matrix exponentials on the full space."""
    dt = schedule.horizon / steps
    psi = np.asarray(psi, dtype=complex)
    for k in range(steps):
        g = evaluate(schedule, dt * (k + 0.5))
        psi = expm(-1j * dt * reference_hamiltonian(n, field, g)) @ psi
    return psi


def test_symmetry_blocks_are_complete_and_invariant(chain):
    qs = symmetry_sectors(5)
    assert sum(q.shape[1] for q in qs) == 32
    full = np.hstack(qs)
    np.testing.assert_allclose(full.T @ full, np.eye(32), atol=1e-14)
    h = build_hamiltonian(chain, 0.37).real
    for q in qs:
        leak = (np.eye(32) - q @ q.T) @ h @ q
        assert np.abs(leak).max() < 1e-14


def test_constant_control_collapses_to_single_exponential(chain):
    s = ControlSchedule(1.0, Pulsed((1.0,) * 5))
    u = propagator(chain, s, EvolutionConfig(10))
    assert np.abs(u - expm(-1j * build_hamiltonian(chain, 1.0))).max() < 1e-10


@pytest.mark.parametrize(
    "schedule",
    [
        ControlSchedule(1.0, Linear()),
        ControlSchedule(2.5, Polynomial(3.0, -2.0), Task.STITCH),
        ControlSchedule(1.0, Pulsed((-0.48, 1.59))),
    ],
)
def test_propagator_unitary(chain, schedule):
    u = propagator(chain, schedule, EvolutionConfig(300))
    assert np.linalg.norm(u.conj().T @ u - np.eye(32)) < 1e-9


def test_propagator_matches_expm_product():
    spec = SpinChainSpec(4, 0.7)
    s = ControlSchedule(1.3, Polynomial(1.2, -0.4))
    u = propagator(spec, s, EvolutionConfig(40))
    expected = trotter_oracle(4, 0.7, s, 40, np.eye(16))
    assert np.abs(u - expected).max() < 1e-12


def test_step_doubling_convergence(chain):
    s = ControlSchedule(1.0, Linear())
    u300 = propagator(chain, s, EvolutionConfig(300))
    u600 = propagator(chain, s, EvolutionConfig(600))
    assert np.linalg.norm(u300 - u600) < 1e-3


def test_pulses_aligned_with_slices_are_exact(chain):
    s = ControlSchedule(2.0, Pulsed((0.2, 0.9, -0.3)))
    u = propagator(chain, s, EvolutionConfig(30))
    u2 = propagator(chain, s, EvolutionConfig(60))
    assert np.abs(u - u2).max() < 1e-10


def test_evolve_state_matches_oracle(chain):
    phi, chi = endpoint_states(chain)
    rng = np.random.default_rng(3)
    psi = rng.normal(size=32) + 1j * rng.normal(size=32)
    psi /= np.linalg.norm(psi)
    s = ControlSchedule(1.5, Polynomial(-2.0, 1.0))
    out = evolve_state(chain, s, EvolutionConfig(60), psi)
    np.testing.assert_allclose(out, trotter_oracle(5, 0.5, s, 60, psi), atol=1e-11)


def test_stationary_state(chain):
    h = build_hamiltonian(chain, 0.3)
    w, v = np.linalg.eigh(h)
    s = ControlSchedule(2.0, Pulsed((0.3, 0.3)))
    for k in (0, 5):
        out = evolve_state(chain, s, EvolutionConfig(50), v[:, k])
        assert fidelity(out, v[:, k]) == pytest.approx(1.0, abs=1e-12)


def test_vanishing_time(chain):
    phi, _ = endpoint_states(chain)
    out = evolve_state(chain, ControlSchedule(1e-8, Linear()), EvolutionConfig(1), phi)
    assert np.linalg.norm(out - phi) < 1e-6


def test_dimension_mismatch(chain):
    with pytest.raises(DomainError):
        evolve_state(chain, ControlSchedule(1.0, Linear()), EvolutionConfig(), np.ones(16))
    with pytest.raises(DomainError):
        fidelity(np.ones(2), np.ones(4))


def test_fidelity_basics():
    e = np.eye(4, dtype=complex)
    assert fidelity(e[0], e[0]) == 1.0
    assert fidelity(e[0], e[1]) == 0.0
    v = np.array([0.6, 0.8j, 0, 0])
    for alpha in np.linspace(0, 2 * np.pi, 7):
        assert fidelity(np.exp(1j * alpha) * v, v) == pytest.approx(1.0, abs=1e-15)


def test_config_validation():
    with pytest.raises(DomainError):
        EvolutionConfig(0)
    assert EvolutionConfig(300, scale_with_horizon=True).steps_for(2.5) == 750
    assert EvolutionConfig(300).steps_for(2.5) == 300


def test_endpoint_overlap(chain):
    report = transform_fidelity(chain, ControlSchedule(1e-8, Polynomial(0, 0)), EvolutionConfig())
    assert report.initial_overlap == pytest.approx(ENDPOINT_OVERLAP, abs=1e-12)
    assert report.fidelity == pytest.approx(ENDPOINT_OVERLAP, abs=1e-6)


def test_linear_cut_against_oracle(chain):
    # scipy-expm oracle on the full space, independent of the block/eigh path
    phi, chi = endpoint_states(chain)
    s = ControlSchedule(1.0, Linear())
    expected = abs(np.vdot(chi, trotter_oracle(5, 0.5, s, 300, phi)))
    assert transform_fidelity(chain, s).fidelity == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize(
    "amps, T, published",
    [((2 / 3, 1 / 3), 1.0, 0.80), ((-0.48, 1.59), 1.0, 0.87), ((0.68, 0.45), 4.0, 0.99)],
)
def test_published_pulse_fidelities(chain, amps, T, published):
    f = transform_fidelity(chain, ControlSchedule(T, Pulsed(amps)), EvolutionConfig(300)).fidelity
    assert f == pytest.approx(published, abs=0.01)


schedule_st = st.builds(
    ControlSchedule,
    st.floats(0.1, 5),
    st.one_of(
        st.just(Linear()),
        st.builds(Polynomial, st.floats(-5, 5), st.floats(-5, 5)),
        st.lists(st.floats(-2, 2), min_size=1, max_size=5).map(lambda b: Pulsed(tuple(b))),
    ),
    st.sampled_from(list(Task)),
)


@given(schedule_st, st.sampled_from([1, 7, 60, 300]))
def test_duality_exact(schedule, steps):
    spec = SpinChainSpec(5, 0.5)
    config = EvolutionConfig(steps)
    if isinstance(schedule.shape, Pulsed):
        # a slice centre sitting exactly on a pulse edge breaks the mirror symmetry of sampling
        k = schedule.shape.k
        if any((2 * n + 1) * k % (2 * steps) == 0 for n in range(steps)):
            return
    a = transform_fidelity(spec, schedule, config).fidelity
    b = transform_fidelity(spec, reverse_schedule(schedule), config).fidelity
    assert abs(a - b) < 1e-10


@given(schedule_st)
def test_norm_and_range(schedule):
    spec = SpinChainSpec(5, 0.5)
    report = transform_fidelity(spec, schedule, EvolutionConfig(120))
    assert abs(np.linalg.norm(report.final_state) - 1) < 1e-10
    assert 0 <= report.fidelity <= 1 + 1e-12


@pytest.mark.parametrize("T", [0.5, 1.0, 2.5, 5.0])
def test_self_convergence_in_steps(chain, T):
    s = ControlSchedule(T, Polynomial(1.0, -0.5))
    f1 = transform_fidelity(chain, s, EvolutionConfig(300)).fidelity
    f2 = transform_fidelity(chain, s, EvolutionConfig(600)).fidelity
    assert abs(f1 - f2) < 1e-4
