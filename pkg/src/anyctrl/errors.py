"""Exception types shared across the package."""


class ConfigError(ValueError):
    """A configuration value is missing, malformed, or out of range."""


class DimensionError(ValueError):
    """A vector argument does not match the plant dimensions."""


class CertificateViolation(RuntimeError):
    """The supplied (V, kappa, rho) triple failed the per-step decrease test.

    Carries the prediction index at which the test failed.
    """

    def __init__(self, step_index, message=None):
        self.step_index = step_index
        super().__init__(message or f"Lyapunov decrease test failed at prediction step {step_index}")


class DivergenceError(ArithmeticError):
    """A closed-form certificate does not converge (e.g. p0*alpha >= 1)."""


class DegenerateStateError(ValueError):
    """A Markov processor state with p0|state = 1 was queried for gap statistics."""
