"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class ArtinflatError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(ArtinflatError):
    """Input data (structure constants, actions, maps) violates an axiom."""


class NotLocal(ValidationError):
    """The algebra is not local at the origin (some generator is not nilpotent)."""


class NotZeroDimensional(ValidationError):
    """A presentation has infinitely many standard monomials."""


class DegreeBoundExceeded(ArtinflatError):
    def __init__(self, bound: int, degree: int):
        super().__init__(f"Groebner basis computation exceeded degree bound {bound} (S-pair of degree {degree})")
        self.bound = bound
        self.degree = degree


class CapExceeded(ArtinflatError):
    """A configured size cap (dimension, prime, matrix size, enumeration) was hit."""


class ParseError(ArtinflatError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        where = f"line {line}, column {column}: " if line else (f"column {column}: " if column else "")
        super().__init__(where + message)
        self.message = message
        self.line = line
        self.column = column


class PreconditionFailed(ArtinflatError):
    """An operation was called on inputs that do not satisfy its precondition."""


class HypothesisTwoViolated(ArtinflatError):
    """Some relation sum x_k m_k = 0 has a coefficient outside J_x M.

    ``relation`` holds the offending module vectors (m_1, ..., m_n) and
    ``index`` the 1-based position whose coefficient is not in J_x M.
    """

    def __init__(self, level: int, subset: tuple[int, ...], relation, index: int):
        super().__init__(
            f"relation coefficient {index} at level {level}, subset {set(subset) or '{}'} is not in J_x M"
        )
        self.level = level
        self.subset = subset
        self.relation = relation
        self.index = index


class GenerationBudgetExhausted(ArtinflatError):
    """A randomized generator could not produce a valid object within its retry budget."""
