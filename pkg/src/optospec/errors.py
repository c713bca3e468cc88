"""Exception types shared across the package."""


class ParameterError(ValueError):
    """A physical parameter, state description, or grid is invalid."""


class TruncationError(RuntimeError):
    """The phonon-space cutoff cannot represent a state to the requested tolerance.

    Carries the probability weight lost beyond the cutoff in ``deficit``.
    """

    def __init__(self, message: str, deficit: float):
        super().__init__(f"{message} (achieved tail deficit {deficit:.3e})")
        self.deficit = deficit


class LaguerreRangeError(ArithmeticError):
    """The Laguerre recurrence overflowed double precision."""

    def __init__(self, n: int, s: int, x: float):
        super().__init__(
            f"associated Laguerre recurrence overflowed for n={n}, s={s}, x={x}"
        )
        self.n = n
        self.s = s
        self.x = x


class StepSizeError(RuntimeError):
    """Probability-norm drift of the integrator exceeded its budget.

    Carries the observed drift in ``drift``; advising a smaller time step.
    """

    def __init__(self, drift: float, tolerance: float):
        super().__init__(
            f"probability norm drifted by {drift:.3e} (budget {tolerance:.1e}); "
            "reduce the integration step dt"
        )
        self.drift = drift
        self.tolerance = tolerance
