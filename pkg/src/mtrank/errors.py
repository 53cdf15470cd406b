"""Exception hierarchy.

Everything raised on purpose derives from :class:`MtrankError`, so the CLI can
map it to exit code 1 without swallowing genuine bugs.
"""


class MtrankError(ValueError):
    """Base class for usage and precondition errors."""


class NotUnimodular(MtrankError):
    pass


class NegativePowerOfNonUnimodular(NotUnimodular):
    pass


class WrongDimension(MtrankError):
    pass


class InvalidWitness(MtrankError):
    pass


class NoWitnessFound(MtrankError):
    def __init__(self, bound):
        super().__init__(f"no cyclic vector found in the box of radius {bound}")
        self.bound = bound


class InsufficientData(MtrankError):
    pass


class ToleranceExceeded(MtrankError):
    pass


class PrecisionExhausted(MtrankError):
    pass


class RepeatedEigenvalue(MtrankError):
    pass


class ModuliNotDistinct(MtrankError):
    pass


class PreconditionViolated(MtrankError):
    pass


class NonSquare(MtrankError):
    pass


class ParseError(MtrankError):
    def __init__(self, message, line=1, column=1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column
