"""Exception types shared across the engine."""


class LexspaceError(Exception):
    """Base class for all engine errors."""


class EmptyText(LexspaceError):
    """Raised when a book payload contains no text."""


class ParseError(LexspaceError):
    """Malformed input file; carries the 1-based line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class ZeroVector(LexspaceError):
    """Cosine similarity is undefined for an all-zero vector."""


class UnknownNode(LexspaceError):
    """A family id that does not exist in the graph."""


class TargetAbsent(LexspaceError):
    """The sentence contains no occurrence of the target family."""


class InsufficientDistractors(LexspaceError):
    """Fewer same-POS distractor candidates exist than requested."""


class InsufficientContext(LexspaceError):
    """The target family occurs in fewer distinct sentences than an activity needs."""


class InvalidChoice(LexspaceError):
    """The submitted option is not one of the activity's options."""


class AlreadyAnswered(LexspaceError):
    """The activity was already graded for this session."""


class NotFound(LexspaceError):
    """Unknown book, learner, session, or activity id."""


class PayloadTooLarge(LexspaceError):
    """Uploaded book exceeds the configured size limit."""
