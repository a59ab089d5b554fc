"""Quasi-Newton search and brute-force landscapes over control parameters."""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .control import ControlSchedule, Linear, Polynomial, Pulsed, Task, admissible, quasi_linear
from .errors import DomainError, LineSearchError
from .evolve import EvolutionConfig, transform_fidelity
from .operators import SpinChainSpec
from .spectral import DEFAULT_GAP_TOLERANCE

ANSATZE = ("poly", "pulse", "linear")


@dataclass(frozen=True)
class BFGSOptions:
    gtol: float = 1e-6
    max_iter: int = 200
    c1: float = 1e-4
    shrink: float = 0.5
    max_backtracks: int = 60
    fd_rel_step: float = 1e-6


@dataclass(frozen=True)
class OptimizationOutcome:
    """Result of a search; ``value`` is the minimized objective, 1 - f_T for fidelity objectives."""

    parameters: np.ndarray
    value: float
    baseline_value: float
    iterations: int
    converged: bool
    evaluations: int = 0
    admissible: bool | None = None
    violated: tuple[str, ...] = ()
    message: str = ""
    horizon: float | None = None

    @property
    def fidelity(self) -> float:
        return 1.0 - self.value

    @property
    def baseline(self) -> float:
        return 1.0 - self.baseline_value


class FidelityObjective:
    """params -> 1 - f_T for one (chain, task, ansatz, horizon).

    Polynomial parameters are (a1, a2); pulsed parameters are b_1..b_K in
    time order. Instances are picklable so landscape cells can be farmed out.
    """

    def __init__(
        self,
        spec: SpinChainSpec,
        task: Task | str,
        ansatz: str,
        horizon: float,
        config: EvolutionConfig = EvolutionConfig(),
        k: int = 2,
        gap_tolerance: float = DEFAULT_GAP_TOLERANCE,
    ):
        if ansatz not in ANSATZE:
            raise DomainError(f"ansatz must be one of {ANSATZE}, got {ansatz!r}")
        self.spec = spec
        self.task = Task(task)
        self.ansatz = ansatz
        self.horizon = float(horizon)
        self.config = config
        self.k = int(k)
        self.gap_tolerance = gap_tolerance
        # validates the horizon early
        ControlSchedule(self.horizon, Linear(), self.task)

    @property
    def n_params(self) -> int:
        return {"poly": 2, "pulse": self.k, "linear": 0}[self.ansatz]

    def schedule_for(self, params) -> ControlSchedule:
        params = np.asarray(params, dtype=float).ravel()
        if params.size != self.n_params:
            raise DomainError(f"{self.ansatz} takes {self.n_params} parameters, got {params.size}")
        if self.ansatz == "poly":
            shape = Polynomial(float(params[0]), float(params[1]))
        elif self.ansatz == "pulse":
            shape = Pulsed(tuple(params.tolist()))
        else:
            shape = Linear()
        return ControlSchedule(self.horizon, shape, self.task)

    def reference_point(self) -> np.ndarray:
        """Unoptimized schedule: linear ramp, or its staircase for pulses."""
        if self.ansatz == "poly":
            return np.zeros(2)
        if self.ansatz == "pulse":
            b = np.array(quasi_linear(self.k))
            return b if self.task is Task.CUT else b[::-1].copy()
        return np.zeros(0)

    def fidelity(self, params) -> float:
        sched = self.schedule_for(params)
        return transform_fidelity(self.spec, sched, self.config, self.gap_tolerance).fidelity

    def __call__(self, params) -> float:
        return 1.0 - self.fidelity(params)

    def with_horizon(self, horizon: float) -> "FidelityObjective":
        return FidelityObjective(
            self.spec, self.task, self.ansatz, horizon, self.config, self.k, self.gap_tolerance
        )


def objective(
    spec: SpinChainSpec,
    task: Task | str,
    ansatz: str,
    horizon: float,
    config: EvolutionConfig = EvolutionConfig(),
    k: int = 2,
) -> FidelityObjective:
    return FidelityObjective(spec, task, ansatz, horizon, config, k)


def numerical_gradient(f: Callable, x: np.ndarray, rel_step: float = 1e-6) -> tuple[np.ndarray, int]:
    """Central differences with step rel_step * max(1, |x_i|); returns (gradient, evaluations)."""
    x = np.asarray(x, dtype=float)
    grad = np.empty_like(x)
    for i in range(x.size):
        h = rel_step * max(1.0, abs(x[i]))
        xp = x.copy()
        xm = x.copy()
        xp[i] += h
        xm[i] -= h
        grad[i] = (f(xp) - f(xm)) / (xp[i] - xm[i])
    return grad, 2 * x.size


def minimize(
    f: Callable, x0: Sequence[float], options: BFGSOptions = BFGSOptions()
) -> OptimizationOutcome:
    """BFGS with finite-difference gradients and Armijo backtracking.

    Stops when the gradient infinity norm drops below ``gtol`` or after
    ``max_iter`` iterations. Accepted steps always decrease ``f``. If ``f`` is
    a :class:`FidelityObjective` the endpoint-slope conditions are checked on
    the result.
    """
    x = np.array(x0, dtype=float).ravel()
    fx = float(f(x))
    if not np.isfinite(fx):
        raise DomainError("objective is not finite at the starting point")
    f_start = fx
    nfev = 1
    n = x.size
    hinv = np.eye(n)
    fresh = True  # hinv is the identity and has not been rescaled yet
    grad, used = numerical_gradient(f, x, options.fd_rel_step)
    nfev += used
    converged = False
    message = "iteration limit reached"
    it = 0

    while it < options.max_iter:
        if not np.all(np.isfinite(grad)):
            raise LineSearchError("non-finite gradient", x.copy(), fx)
        if n == 0 or np.max(np.abs(grad)) < options.gtol:
            converged = True
            message = "gradient below tolerance"
            break
        direction = -hinv @ grad
        slope = float(grad @ direction)
        if slope >= 0:
            hinv = np.eye(n)
            fresh = True
            direction = -grad
            slope = float(grad @ direction)

        alpha = 1.0
        saw_nonfinite = False
        accepted = False
        for _ in range(options.max_backtracks):
            trial = x + alpha * direction
            ft = float(f(trial))
            nfev += 1
            if not np.isfinite(ft):
                saw_nonfinite = True
            elif ft <= fx + options.c1 * alpha * slope and ft < fx:
                accepted = True
                break
            alpha *= options.shrink
        if not accepted:
            if saw_nonfinite:
                raise LineSearchError("objective became non-finite in line search", x.copy(), fx)
            if not fresh:
                hinv = np.eye(n)
                fresh = True
                continue
            message = "line search could not decrease the objective"
            break

        it += 1
        step = trial - x
        new_grad, used = numerical_gradient(f, trial, options.fd_rel_step)
        nfev += used
        y = new_grad - grad
        sy = float(step @ y)
        x, fx, grad = trial, ft, new_grad
        if sy > 1e-12 * np.linalg.norm(step) * np.linalg.norm(y):
            if fresh:
                hinv = np.eye(n) * (sy / float(y @ y))
                fresh = False
            rho = 1.0 / sy
            left = np.eye(n) - rho * np.outer(step, y)
            hinv = left @ hinv @ left.T + rho * np.outer(step, step)

    ok, violated = None, ()
    if isinstance(f, FidelityObjective):
        ok, bad = admissible(f.schedule_for(x))
        violated = tuple(bad)
    return OptimizationOutcome(
        parameters=x,
        value=fx,
        baseline_value=f_start,
        iterations=it,
        converged=converged,
        evaluations=nfev,
        admissible=ok,
        violated=violated,
        message=message,
        horizon=getattr(f, "horizon", None),
    )


def optimize_schedule(f: FidelityObjective, x0=None, options: BFGSOptions = BFGSOptions()):
    """Run :func:`minimize` from ``x0`` (default: the reference point); baseline is the reference fidelity."""
    ref = f.reference_point()
    start = ref if x0 is None else np.asarray(x0, dtype=float)
    out = minimize(f, start, options)
    if x0 is not None:
        out = replace(out, baseline_value=f(ref))
    return out


def sweep_horizon(
    spec: SpinChainSpec,
    task: Task | str,
    ansatz: str,
    horizons: Sequence[float],
    config: EvolutionConfig = EvolutionConfig(),
    k: int = 2,
    options: BFGSOptions = BFGSOptions(),
) -> list[OptimizationOutcome]:
    """Optimize at each horizon, warm-starting from the previous optimum.

    If a warm start ends below the unoptimized schedule, the search is rerun
    from the reference point and the better result kept.
    """
    horizons = [float(T) for T in horizons]
    if not horizons:
        raise DomainError("horizons must be non-empty")
    if any(b <= a for a, b in zip(horizons, horizons[1:])):
        raise DomainError("horizons must be strictly ascending")
    base = FidelityObjective(spec, task, ansatz, horizons[0], config, k)
    results = []
    x = None
    for T in horizons:
        f = base.with_horizon(T)
        out = optimize_schedule(f, x, options)
        if out.value > out.baseline_value:
            fallback = optimize_schedule(f, None, options)
            if fallback.value < out.value:
                out = fallback
        results.append(out)
        x = out.parameters
    return results


# -- landscapes -------------------------------------------------------------


@dataclass(frozen=True)
class Axis:
    name: str
    lo: float
    hi: float
    step: float

    def __post_init__(self):
        if not (self.step > 0 and self.hi >= self.lo):
            raise DomainError(f"bad axis {self}")

    @property
    def values(self) -> np.ndarray:
        n = int(np.floor((self.hi - self.lo) / self.step + 1e-9)) + 1
        return self.lo + self.step * np.arange(n)


DEFAULT_AXES = {
    "poly": (Axis("a1", -4.0, 4.0, 0.05), Axis("a2", -4.0, 4.0, 0.05)),
    "pulse": (Axis("b1", -1.0, 2.0, 0.02), Axis("b2", -1.0, 2.0, 0.02)),
}


@dataclass(frozen=True)
class LandscapeGrid:
    """``fidelity[i, j]`` is f_T at (axis1.values[i], axis2.values[j])."""

    axis1: Axis
    axis2: Axis
    fidelity: np.ndarray
    reference: tuple[tuple[float, float], float]
    best: tuple[tuple[float, float], float] = field(init=False)

    def __post_init__(self):
        i, j = np.unravel_index(int(np.argmax(self.fidelity)), self.fidelity.shape)
        params = (float(self.axis1.values[i]), float(self.axis2.values[j]))
        object.__setattr__(self, "best", (params, float(self.fidelity[i, j])))

    def rows(self):
        v1, v2 = self.axis1.values, self.axis2.values
        for i, p1 in enumerate(v1):
            for j, p2 in enumerate(v2):
                yield float(p1), float(p2), float(self.fidelity[i, j])


def _row(args) -> np.ndarray:
    f, p1, p2_values = args
    return np.array([f.fidelity((p1, p2)) for p2 in p2_values])


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("CHAIN_WORKERS", "1")))
    except ValueError:
        return 1


def landscape_scan(
    spec: SpinChainSpec,
    task: Task | str,
    ansatz: str,
    horizon: float,
    config: EvolutionConfig = EvolutionConfig(),
    axes: tuple[Axis, Axis] | None = None,
    workers: int | None = None,
    k: int = 2,
) -> LandscapeGrid:
    """Evaluate f_T on a full two-parameter grid, one row per task."""
    if ansatz == "pulse" and k != 2:
        raise DomainError("landscapes are two-dimensional: pulsed scans need k=2")
    if ansatz not in DEFAULT_AXES:
        raise DomainError(f"no landscape for ansatz {ansatz!r}")
    axes = axes or DEFAULT_AXES[ansatz]
    f = FidelityObjective(spec, task, ansatz, horizon, config, k)
    v1, v2 = axes[0].values, axes[1].values
    jobs = [(f, float(p1), v2) for p1 in v1]
    workers = default_workers() if workers is None else max(1, int(workers))
    if workers == 1:
        rows = [_row(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_row, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    grid = np.vstack(rows)
    ref = f.reference_point()
    reference = ((float(ref[0]), float(ref[1])), f.fidelity(ref))
    return LandscapeGrid(axes[0], axes[1], grid, reference)
