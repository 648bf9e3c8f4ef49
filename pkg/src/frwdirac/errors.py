"""Exception types shared across the package."""


class DomainError(ValueError):
    """A conformal time lies outside the background's validated interval."""

    def __init__(self, eta, lo, hi):
        self.eta = eta
        self.interval = (lo, hi)
        super().__init__(f"eta = {eta!r} outside background domain [{lo!r}, {hi!r}]")


class StepSizeUnderflow(RuntimeError):
    """Adaptive integration could not meet the tolerance; background is ill-conditioned."""

    def __init__(self, eta, step):
        self.eta = eta
        self.step = step
        super().__init__(f"step size underflow at eta = {eta!r} (h = {step!r})")


class TimeMismatchError(ValueError):
    """A state and a propagator disagree on the evolution start time."""


class ConfigError(ValueError):
    """Run configuration failed validation; carries every violation found."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid configuration:\n" + "\n".join(f"  - {v}" for v in self.violations))
