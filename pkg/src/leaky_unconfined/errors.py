"""Exception types shared across the solver."""


class DomainError(ValueError):
    """Argument outside the domain where a quantity is defined."""


class SingularityError(DomainError):
    """Evaluation requested at a singular point (e.g. K0 at the origin)."""


class ConvergenceError(RuntimeError):
    """An iterative procedure stopped before meeting its tolerance.

    The best available estimate is kept on the exception so callers can
    decide whether to use it (flagged) or give up.
    """

    def __init__(self, message, partial=None, **diagnostics):
        super().__init__(message)
        self.partial = partial
        self.diagnostics = diagnostics


class PoleError(ConvergenceError):
    """A coupling determinant vanished where the transform should be analytic."""


class ConfigError(ValueError):
    """Invalid scenario configuration; ``line`` is 1-based when known."""

    def __init__(self, message, line=None, field=None):
        where = f"line {line}: " if line else ""
        super().__init__(where + message)
        self.line = line
        self.field = field
