"""Exception hierarchy shared across the package.

``ValidationError`` subclasses indicate malformed input (CLI exit code 2);
``InstanceTooLarge`` indicates a size-limit refusal (CLI exit code 3).
"""


class TristableError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(TristableError):
    """Input data violates a structural invariant."""


class DimensionMismatch(ValidationError):
    """A rank table has the wrong shape or contains out-of-range entries."""


class DuplicateRank(ValidationError):
    """A preference row assigns the same rank to two pairs."""


class IndexOutOfRange(ValidationError):
    """A player or pair index is outside the instance's range."""


class NotAPermutation(ValidationError):
    """A sequence expected to be a bijection on [n] is not."""


class PlayerCountNotMultipleOf3(ValidationError):
    """A three-person assignment instance needs 3n players."""


class UncoveredPlayer(ValidationError):
    """A stability query referenced a player with no family or triple."""


class OddN(ValidationError):
    """The adversarial construction requires an even number of players."""


class NotDegree3Padded(ValidationError):
    """A matching instance cannot be padded to three incident edges per element."""


class EmptyClause(ValidationError):
    """A formula contains an empty clause."""


class NonCanonicalMatching(ValidationError):
    """A matching does not follow the ring-consistent structure needed to decode."""


class FormatError(ValidationError):
    """An instance or solution file could not be parsed."""


class InstanceTooLarge(TristableError):
    """An exact solver was asked to enumerate beyond its size limit."""


class SolverTimeout(TristableError):
    """A search exceeded its node or time budget."""
