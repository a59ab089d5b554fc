"""Exception types shared across the package."""


class DomainError(ValueError):
    """Input outside the domain an operation is defined on."""


class DegenerateGroundStateError(DomainError):
    """The two lowest levels are closer than the requested gap tolerance."""

    def __init__(self, gap: float, tolerance: float):
        super().__init__(
            f"ground state is degenerate: E1 - E0 = {gap:.3e} < tolerance {tolerance:.1e}"
        )
        self.gap = gap
        self.tolerance = tolerance


class LineSearchError(RuntimeError):
    """Objective became non-finite during a line search.

    ``best_x`` and ``best_value`` hold the best point seen before the failure.
    """

    def __init__(self, message: str, best_x, best_value: float):
        super().__init__(message)
        self.best_x = best_x
        self.best_value = best_value
