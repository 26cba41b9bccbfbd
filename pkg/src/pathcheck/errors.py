"""Exception types shared across the package."""


class PathcheckError(Exception):
    """Base class for every error pathcheck raises on bad input."""


class FormulaError(PathcheckError):
    """A formula violates a structural precondition (e.g. not in PNF)."""


class ParseError(FormulaError):
    """Concrete-syntax error, carrying a 1-based source position."""

    def __init__(self, message, line, col):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


class TraceError(PathcheckError):
    """Malformed trace data or trace metadata."""


class UnknownProposition(PathcheckError):
    """A formula mentions a proposition the trace alphabet does not declare."""


class CircuitError(PathcheckError):
    """Structural problem in a circuit or transducer (cycles, arity clashes)."""


class BuildError(PathcheckError):
    """Invalid arguments to one of the circuit builders."""


class ContractionError(PathcheckError):
    """Invalid contraction-tree operation."""
