import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from chaincut import (
    ControlSchedule,
    DomainError,
    Linear,
    Polynomial,
    Pulsed,
    Task,
    admissible,
    evaluate,
    format_schedule,
    parse_schedule,
    quasi_linear,
    reverse_schedule,
)
from chaincut.control import endpoint_slopes

coef = st.floats(-10, 10)
horizon = st.floats(0.05, 50)
amps = st.lists(st.floats(-3, 3), min_size=1, max_size=6)


def schedules():
    shape = st.one_of(
        st.just(Linear()),
        st.builds(Polynomial, coef, coef),
        amps.map(lambda b: Pulsed(tuple(b))),
    )
    return st.builds(ControlSchedule, horizon, shape, st.sampled_from(list(Task)))


def test_polynomial_origin_is_linear():
    assert evaluate(ControlSchedule(2.0, Polynomial(0, 0)), 1.0) == 0.5


def test_polynomial_direct_evaluation():
    assert evaluate(ControlSchedule(1.0, Polynomial(1, -1)), 0.5) == pytest.approx(0.625, abs=1e-15)


def test_pulses_staircase():
    s = ControlSchedule(1.0, Pulsed((2 / 3, 1 / 3)))
    assert evaluate(s, 0.25) == 2 / 3
    assert evaluate(s, 0.75) == 1 / 3


def test_pulse_edges_half_open_last_closed():
    s = ControlSchedule(2.0, Pulsed((5.0, 6.0, 7.0, 8.0)))
    assert evaluate(s, 0.5) == 6.0
    assert evaluate(s, 2.0) == 8.0
    assert evaluate(s, 0.0) == 5.0


def test_outside_horizon_clamps_to_task_boundaries():
    cut = ControlSchedule(1.0, Pulsed((0.3, 0.4)))
    assert evaluate(cut, -1.0) == 1.0 and evaluate(cut, 2.0) == 0.0
    stitch = reverse_schedule(cut)
    assert evaluate(stitch, -1.0) == 0.0 and evaluate(stitch, 2.0) == 1.0


def test_linear_stitch_ramps_up():
    s = ControlSchedule(4.0, Linear(), Task.STITCH)
    assert evaluate(s, 1.0) == pytest.approx(0.25)
    assert reverse_schedule(ControlSchedule(4.0, Linear())) == s


def test_non_positive_horizon_rejected():
    for T in (0.0, -1.0, float("inf")):
        with pytest.raises(DomainError):
            ControlSchedule(T, Linear())


def test_quasi_linear_k2():
    assert quasi_linear(2) == pytest.approx((2 / 3, 1 / 3))
    assert quasi_linear(4) == pytest.approx((0.8, 0.6, 0.4, 0.2))


@given(coef, coef, horizon)
def test_polynomial_boundary_values(a1, a2, T):
    s = ControlSchedule(T, Polynomial(a1, a2))
    assert abs(evaluate(s, 0.0) - 1.0) < 1e-12
    assert abs(evaluate(s, T)) < 1e-12


def test_admissible_examples():
    assert admissible(ControlSchedule(1, Polynomial(0, 0))) == (True, [])
    ok, violated = admissible(ControlSchedule(1, Polynomial(0, 2)))
    assert not ok and violated == ["a2 < (1 - a1)/2"]
    assert admissible(ControlSchedule(1, Pulsed((-0.48, 1.59))))[0]
    assert admissible(ControlSchedule(1, Linear()))[0]


def test_admissible_boundary_is_violation():
    assert not admissible(ControlSchedule(1, Polynomial(1.0, 0.0)))[0]  # a2 == (1-a1)/2
    assert not admissible(ControlSchedule(1, Polynomial(0.0, -1.0)))[0]  # a2 == -1-a1
    assert not admissible(ControlSchedule(1, Pulsed((1.0, 0.5))))[0]
    assert not admissible(ControlSchedule(1, Pulsed((0.5, 0.0))))[0]


def test_stitch_pulse_rules():
    assert admissible(ControlSchedule(1, Pulsed((1.59, -0.48)), Task.STITCH))[0]
    ok, violated = admissible(ControlSchedule(1, Pulsed((-0.1, 1.2)), Task.STITCH))
    assert violated == ["b_1 > 0", "b_K < 1"]


def test_constraints_equal_derivative_signs_on_grid():
    grid = np.linspace(-5, 5, 200)
    for a1 in grid:
        for a2 in grid:
            s = ControlSchedule(1.0, Polynomial(a1, a2))
            d0, d1 = endpoint_slopes(s)
            assert admissible(s)[0] == (d0 < 0 and d1 < 0)


@given(coef, coef, horizon)
def test_endpoint_slopes_match_finite_differences(a1, a2, T):
    for task in Task:
        s = ControlSchedule(T, Polynomial(a1, a2), task)
        d0, d1 = endpoint_slopes(s)
        h = 1e-6 * T
        fd0 = (evaluate(s, h) - evaluate(s, 0.0)) / h
        fd1 = (evaluate(s, T) - evaluate(s, T - h)) / h
        scale = 1 + (abs(a1) + abs(a2)) / T
        assert abs(fd0 - d0) < 1e-4 * scale
        assert abs(fd1 - d1) < 1e-4 * scale


@given(schedules(), st.floats(0.01, 100))
def test_admissibility_scale_free(s, c):
    scaled = ControlSchedule(s.horizon * c, s.shape, s.task)
    assert admissible(scaled) == admissible(s)


@given(schedules())
def test_duality(s):
    assert admissible(s)[0] == admissible(reverse_schedule(s))[0]


@given(schedules())
def test_reverse_is_involution(s):
    assert reverse_schedule(reverse_schedule(s)) == s


@given(schedules(), st.floats(0, 1))
def test_reverse_reflects_time(s, frac):
    t = frac * s.horizon
    r = reverse_schedule(s)
    if isinstance(s.shape, Pulsed):
        k = s.shape.k
        # pulse edges are measure zero and follow the half-open convention
        if abs(frac * k - round(frac * k)) < 1e-9:
            return
    assert evaluate(r, t) == pytest.approx(evaluate(s, s.horizon - t), abs=1e-12)


def test_reverse_pulses_table_pattern():
    r = reverse_schedule(ControlSchedule(1, Pulsed((-0.48, 1.59))))
    assert r.task is Task.STITCH and r.shape.amplitudes == (1.59, -0.48)


@given(amps, horizon)
def test_pulse_partition_integral(b, T):
    s = ControlSchedule(T, Pulsed(tuple(b)))
    m = 1000 * len(b)
    t = (np.arange(m) + 0.5) * T / m
    integral = np.sum(evaluate(s, t)) * T / m
    assert abs(integral - T / len(b) * sum(b)) < 1e-10 * max(1.0, T * sum(map(abs, b)))


@pytest.mark.parametrize(
    "text, expected",
    [
        ("poly:a1=1.5,a2=-0.25,T=2,task=cut", ControlSchedule(2, Polynomial(1.5, -0.25))),
        ("pulse:b=0.6667;0.3333,T=1,task=cut", ControlSchedule(1, Pulsed((0.6667, 0.3333)))),
        ("pulse:b=1.59;-0.48,T=1,task=stitch", ControlSchedule(1, Pulsed((1.59, -0.48)), Task.STITCH)),
        ("linear:T=3,task=stitch", ControlSchedule(3, Linear(), Task.STITCH)),
        ("poly:a1=0,a2=0,T=1e-8,task=cut", ControlSchedule(1e-8, Polynomial(0, 0))),
    ],
)
def test_parse(text, expected):
    assert parse_schedule(text) == expected
    assert parse_schedule(format_schedule(expected)) == expected


@pytest.mark.parametrize(
    "text",
    [
        "",
        "spline:T=1",
        "poly:a1=1,a2=2",
        "poly:a1=x,a2=0,T=1",
        "pulse:T=1,task=cut",
        "pulse:b=1;;2,T=1",
        "linear:T=1,task=sideways",
        "linear:T=0,task=cut",
        "poly:a1=1,a1=2,T=1",
        "poly:b=1,T=1",
        "poly:a1,T=1",
    ],
)
def test_parse_rejects(text):
    with pytest.raises(DomainError):
        parse_schedule(text)


@given(schedules())
def test_text_round_trip(s):
    text = format_schedule(s)
    again = parse_schedule(text)
    assert format_schedule(again) == text
