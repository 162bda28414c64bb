"""Exception types shared across the toolkit."""


class RegglabError(Exception):
    """Base class for all toolkit errors."""


class LoopEdge(RegglabError):
    pass


class DuplicateEdge(RegglabError):
    pass


class VertexOutOfRange(RegglabError):
    pass


class OverlappingEdges(RegglabError):
    pass


class SizeMismatch(RegglabError):
    pass


class NotAPermutation(RegglabError):
    pass


class ParityError(RegglabError):
    pass


class TooLarge(RegglabError):
    pass


class DegreeSumMismatch(RegglabError):
    pass


class Singular(RegglabError):
    pass


class NoConvergence(RegglabError):
    pass


class DomainError(RegglabError):
    pass


class RegimeViolation(RegglabError):
    pass


class EmptySide(RegglabError):
    pass


class InvalidChoice(RegglabError):
    pass


class RejectionBudgetExceeded(RegglabError):
    pass


class EdgeListFormatError(RegglabError):
    """Malformed edge-list text; carries the 1-based offending line."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no
