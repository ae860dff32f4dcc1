class TruncationError(ValueError):
    """A truncated spectrum is too short to determine the requested quantity."""


class CompletenessError(ValueError):
    """A weight lies outside the window where the asymptotic spectrum is complete."""


class WeightOnSpectrumError(ValueError):
    """A weight coincides (within tolerance) with an indicial real part."""


class ConvergenceError(RuntimeError):
    """The iterative eigensolver failed to converge."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual
