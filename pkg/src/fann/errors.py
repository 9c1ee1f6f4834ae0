"""Exception hierarchy. Every library error derives from :class:`FannError`."""


class FannError(Exception):
    pass


class DimensionMismatch(FannError, ValueError):
    pass


class PointOffSegment(FannError, ValueError):
    pass


class NonFiniteDistance(FannError, ArithmeticError):
    pass


class IterationCap(FannError, ArithmeticError):
    """An iterative search stopped at its cap before reaching the requested tolerance."""


class BadEpsilon(FannError, ValueError):
    pass


class BadDelta(FannError, ValueError):
    pass


class BadParams(FannError, ValueError):
    pass


class EmptySet(FannError, ValueError):
    pass


class StructureMismatch(FannError, ValueError):
    pass


class BadArity(FannError, ValueError):
    pass


class ArityMismatch(FannError, ValueError):
    pass


class InvalidEncoding(FannError, ValueError):
    pass


class NullCells(FannError, ValueError):
    pass


class FeasibilityRefused(FannError):
    """An eager build would exceed its test budget."""

    def __init__(self, message: str, estimate: float, budget: float):
        super().__init__(message)
        self.estimate = estimate
        self.budget = budget


class EmptyCorpus(FannError, ValueError):
    pass


class AllScalesNo(FannError):
    pass


class ParseError(FannError, ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class DuplicateId(FannError, ValueError):
    pass
