"""Exception types shared across the package."""


class LoopError(Exception):
    """Base class for every error raised by loopforge."""


class NotLatin(LoopError):
    def __init__(self, message, *, row=None, col=None):
        super().__init__(message)
        self.row = row
        self.col = col


class NoIdentityAtZero(LoopError):
    pass


class NotIP(LoopError):
    pass


class NotAGroup(LoopError):
    pass


class TermSyntaxError(LoopError):
    def __init__(self, message, pos):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


class AmbiguityError(TermSyntaxError):
    pass


class UnboundVariable(LoopError):
    pass


class DegreeMismatch(LoopError):
    pass


class CapExceeded(LoopError):
    def __init__(self, partial):
        super().__init__(f"closure exceeded cap after {partial} elements")
        self.partial = partial


class LengthCapExceeded(LoopError):
    pass


class BadSplit(LoopError):
    pass


class InvalidProblem(LoopError):
    pass


class InvalidSystem(LoopError):
    pass


class NotSteiner(LoopError):
    pass
