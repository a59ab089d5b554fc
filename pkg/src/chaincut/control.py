"""Control schedules g(t) for cutting and stitching the boundary link.

Three families: a linear ramp, the two-parameter cubic polynomial in t/T
whose endpoints are pinned to the task's boundary values, and K rectangular
pulses of equal width. Stitch schedules are time reverses of cut schedules,
except that pulse amplitudes are always stored in time order.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Union

import numpy as np

from .errors import DomainError


class Task(str, Enum):
    CUT = "cut"
    STITCH = "stitch"

    @property
    def flipped(self) -> "Task":
        return Task.STITCH if self is Task.CUT else Task.CUT

    @property
    def start_value(self) -> float:
        return 1.0 if self is Task.CUT else 0.0

    @property
    def end_value(self) -> float:
        return 0.0 if self is Task.CUT else 1.0


@dataclass(frozen=True)
class Linear:
    pass


@dataclass(frozen=True)
class Polynomial:
    a1: float = 0.0
    a2: float = 0.0


@dataclass(frozen=True)
class Pulsed:
    amplitudes: tuple[float, ...] = field(default=(2 / 3, 1 / 3))

    def __post_init__(self):
        amps = tuple(float(b) for b in np.atleast_1d(self.amplitudes))
        if len(amps) < 1:
            raise DomainError("a pulsed schedule needs at least one pulse")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def k(self) -> int:
        return len(self.amplitudes)


Shape = Union[Linear, Polynomial, Pulsed]


def quasi_linear(k: int) -> tuple[float, ...]:
    """Staircase discretization of the linear ramp: b_n = 1 - n/(k+1)."""
    if k < 1:
        raise DomainError("k must be >= 1")
    return tuple(1.0 - n / (k + 1) for n in range(1, k + 1))


@dataclass(frozen=True)
class ControlSchedule:
    horizon: float
    shape: Shape = field(default_factory=Linear)
    task: Task = Task.CUT

    def __post_init__(self):
        if not (math.isfinite(self.horizon) and self.horizon > 0):
            raise DomainError(f"horizon must be positive and finite, got {self.horizon}")
        object.__setattr__(self, "task", Task(self.task))
        object.__setattr__(self, "horizon", float(self.horizon))

    @property
    def parameters(self) -> tuple[float, ...]:
        if isinstance(self.shape, Polynomial):
            return (self.shape.a1, self.shape.a2)
        if isinstance(self.shape, Pulsed):
            return self.shape.amplitudes
        return ()

    def __call__(self, t):
        return evaluate(self, t)


def _cut_profile(shape: Shape, s):
    """Cut-direction shape at normalized time s in [0, 1]."""
    if isinstance(shape, Linear):
        return 1.0 - s
    if isinstance(shape, Polynomial):
        a1, a2 = shape.a1, shape.a2
        return 1.0 - (1.0 + a1 + a2) * s + a1 * s**2 + a2 * s**3
    raise TypeError(shape)


def _pulse_index(k: int, s):
    # half-open [ (n-1)/k, n/k ), last interval closed
    return np.minimum(np.floor(s * k).astype(int), k - 1)


def evaluate(schedule: ControlSchedule, t):
    """g(t). Scalar or array ``t``; outside [0, T] the task's boundary values apply."""
    scalar = np.ndim(t) == 0
    t = np.asarray(t, dtype=float)
    T = schedule.horizon
    s = np.clip(t / T, 0.0, 1.0)
    shape = schedule.shape
    if isinstance(shape, Pulsed):
        g = np.asarray(shape.amplitudes)[_pulse_index(shape.k, s)]
    elif schedule.task is Task.CUT:
        g = _cut_profile(shape, s)
    else:
        g = _cut_profile(shape, 1.0 - s)
    g = np.where(t < 0, schedule.task.start_value, g)
    g = np.where(t > T, schedule.task.end_value, g)
    return float(g) if scalar else g


def reverse_schedule(schedule: ControlSchedule) -> ControlSchedule:
    """g'(t) = g(T - t) with the task flipped."""
    shape = schedule.shape
    if isinstance(shape, Pulsed):
        shape = Pulsed(shape.amplitudes[::-1])
    return ControlSchedule(schedule.horizon, shape, schedule.task.flipped)


def admissible(schedule: ControlSchedule) -> tuple[bool, list[str]]:
    """Check the endpoint-slope conditions an efficient control must satisfy.

    Cut: dg/dt < 0 at both ends; for polynomials that is
    ``a2 > -1 - a1`` and ``a2 < (1 - a1) / 2``, for pulses ``b_1 < 1`` and
    ``b_K > 0``. Stitch is the time reverse: the polynomial conditions are the
    same, pulses need ``b_1 > 0`` and ``b_K < 1``. Inequalities are strict.
    """
    shape, task = schedule.shape, schedule.task
    violated = []
    if isinstance(shape, Polynomial):
        a1, a2 = shape.a1, shape.a2
        if not a2 > -1.0 - a1:
            violated.append("a2 > -1 - a1")
        if not a2 < (1.0 - a1) / 2.0:
            violated.append("a2 < (1 - a1)/2")
    elif isinstance(shape, Pulsed):
        b_first, b_last = shape.amplitudes[0], shape.amplitudes[-1]
        if task is Task.CUT:
            if not b_first < 1.0:
                violated.append("b_1 < 1")
            if not b_last > 0.0:
                violated.append("b_K > 0")
        else:
            if not b_first > 0.0:
                violated.append("b_1 > 0")
            if not b_last < 1.0:
                violated.append("b_K < 1")
    return not violated, violated


def endpoint_slopes(schedule: ControlSchedule) -> tuple[float, float]:
    """Analytic dg/dt at t = 0 and t = T for linear and polynomial shapes."""
    shape, T = schedule.shape, schedule.horizon
    if isinstance(shape, Linear):
        d0 = d1 = -1.0
    elif isinstance(shape, Polynomial):
        a1, a2 = shape.a1, shape.a2
        d0 = -(1.0 + a1 + a2)
        d1 = -(1.0 + a1 + a2) + 2 * a1 + 3 * a2
    else:
        raise DomainError("pulsed schedules have no endpoint derivative")
    if schedule.task is Task.STITCH:
        # g_stitch(t) = g_cut(T - t)
        d0, d1 = -d1, -d0
    return d0 / T, d1 / T


# -- text form --------------------------------------------------------------

_FORM = re.compile(r"^\s*(poly|pulse|linear)\s*:\s*(.*?)\s*$")


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


def format_schedule(schedule: ControlSchedule) -> str:
    shape = schedule.shape
    tail = f"T={_fmt(schedule.horizon)},task={schedule.task.value}"
    if isinstance(shape, Polynomial):
        return f"poly:a1={_fmt(shape.a1)},a2={_fmt(shape.a2)},{tail}"
    if isinstance(shape, Pulsed):
        return "pulse:b=" + ";".join(_fmt(b) for b in shape.amplitudes) + "," + tail
    return "linear:" + tail


def parse_schedule(text: str) -> ControlSchedule:
    """Parse ``poly:a1=..,a2=..,T=..,task=..``, ``pulse:b=v1;v2,T=..,task=..`` or ``linear:T=..,task=..``."""
    m = _FORM.match(text)
    if not m:
        raise DomainError(f"unrecognized schedule {text!r}")
    kind, body = m.groups()
    fields = {}
    for item in filter(None, (p.strip() for p in body.split(","))):
        key, sep, value = item.partition("=")
        if not sep:
            raise DomainError(f"expected key=value, got {item!r}")
        key = key.strip()
        if key in fields:
            raise DomainError(f"duplicate key {key!r}")
        fields[key] = value.strip()

    allowed = {"poly": {"a1", "a2"}, "pulse": {"b"}, "linear": set()}[kind] | {"T", "task"}
    unknown = set(fields) - allowed
    if unknown:
        raise DomainError(f"unknown keys for {kind}: {sorted(unknown)}")
    if "T" not in fields:
        raise DomainError("missing T")

    def num(key, default=None):
        if key not in fields:
            if default is None:
                raise DomainError(f"missing {key}")
            return default
        try:
            return float(fields[key])
        except ValueError:
            raise DomainError(f"{key}={fields[key]!r} is not a number") from None

    try:
        task = Task(fields.get("task", "cut"))
    except ValueError:
        raise DomainError(f"task must be cut or stitch, got {fields['task']!r}") from None

    if kind == "poly":
        shape = Polynomial(num("a1", 0.0), num("a2", 0.0))
    elif kind == "pulse":
        if "b" not in fields:
            raise DomainError("missing b")
        try:
            amps = tuple(float(v) for v in fields["b"].split(";"))
        except ValueError:
            raise DomainError(f"bad amplitudes {fields['b']!r}") from None
        shape = Pulsed(amps)
    else:
        shape = Linear()
    return ControlSchedule(num("T"), shape, task)
