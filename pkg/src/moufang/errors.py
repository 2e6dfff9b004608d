"""Exception hierarchy shared across the package."""


class LoopError(Exception):
    """Base class for every error raised by this package."""


class InvalidTable(LoopError):
    """A multiplication table violates the loop axioms."""


class NotQuasigroup(InvalidTable):
    """Some row or column of the table is not a permutation."""


class NoNeutral(InvalidTable):
    """Element 1 is not a two-sided neutral element."""


class NotNormal(LoopError):
    """The subloop is not invariant under the inner mappings."""


class NotPowerAssociative(LoopError):
    """Left-to-right and right-to-left powers of some element disagree."""


class NotCentral(LoopError):
    """The given subloop is not contained in the center."""


class WrongOrder(LoopError):
    """A subloop has the wrong order for the requested construction."""


class TauNotNormalized(LoopError):
    """A coboundary seed map does not vanish on the neutral element."""


class NotSubspace(LoopError):
    """Claimed subspace containment fails."""


class NotInSum(LoopError):
    """Vector lies outside the direct sum it should decompose over."""


class CoboundaryNotMoufang(LoopError):
    """A coboundary failed the Moufang cocycle identity; signals a bug."""


class SingularMatrix(LoopError):
    """The transformation matrix is not invertible."""


class Unrealizable(LoopError):
    """The cocycle system for a polarization triple is inconsistent."""


class NotCodeLoop(LoopError):
    """Quotient by the given central subloop is not elementary abelian."""


class ExplodedBudget(LoopError):
    """Complement too large to enumerate; caller should reroute."""


class BudgetExceeded(LoopError):
    """Complement too large to enumerate and no alternate route applies."""


class ParseError(LoopError):
    """Malformed input file."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
