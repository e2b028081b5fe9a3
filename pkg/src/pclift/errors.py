"""Shared exception types."""


class GraphError(ValueError):
    """Malformed graph data, or an operation applied outside its domain."""


class ParseError(GraphError):
    """A text input could not be parsed; message carries source and line."""

    def __init__(self, source: str, line: int, message: str):
        self.source = source
        self.line = line
        super().__init__(f"{source}:{line}: {message}")


class BudgetError(RuntimeError):
    """A construction, search, or sampler exceeded its size budget."""


class SamplingError(BudgetError):
    """Rejection sampling hit its draw cap before producing a sample."""
