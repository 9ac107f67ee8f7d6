"""Exception hierarchy shared by all modules."""


class LinkageError(Exception):
    """Base class for every error raised by this package."""


class ParseError(LinkageError, ValueError):
    pass


class DomainError(LinkageError, ValueError):
    """An integer argument lies outside the range where a formula is defined."""


class NotGeneric(LinkageError):
    """The length vector lies on a wall; ``witness`` is a tight subset mask."""

    def __init__(self, witness, message=None):
        self.witness = witness
        super().__init__(message or f"length vector is not generic (tight subset mask {witness:#x})")


class NonPositive(LinkageError, ValueError):
    pass


class NotOrdered(LinkageError, ValueError):
    pass


class LengthMismatch(LinkageError, ValueError):
    pass


class NotRegular(LinkageError):
    pass


class EmptySpace(LinkageError):
    pass


class EvenD(LinkageError):
    pass


class UnknownGenerator(LinkageError, KeyError):
    pass


class PresentationMismatch(LinkageError):
    pass


class GuardExceeded(LinkageError):
    pass
