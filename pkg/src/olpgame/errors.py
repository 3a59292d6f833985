"""Exception hierarchy shared by every module."""


class OLPError(Exception):
    """Base class for all package errors."""


class InvalidInput(OLPError, ValueError):
    """Malformed numeric input: non-finite entries, wrong shapes, off-simplex points."""


class DegenerateTie(OLPError):
    """A rank truncation cut falls inside a group of (numerically) tied singular values."""


class UnknownMatrix(OLPError, KeyError):
    """A table perception family was asked about a matrix outside its universe."""


class InvalidPerceived(OLPError, ValueError):
    """A matrix claimed to be a perception is not a fixed point at its level."""


class TooLarge(OLPError):
    """An enumeration would exceed the configured cardinality cap."""


class ObjectiveError(OLPError):
    """An objective callback returned a non-finite value or subgradient."""


class InvalidPerturbation(OLPError, ValueError):
    """Extremal perturbation magnitude is too large to preserve the truncation."""


class DegenerateDirection(OLPError, ValueError):
    """A strategy has no component in the null space, so the payoff cannot be moved."""


class InvalidResponseFunction(OLPError, ValueError):
    """A response function's domain does not match the narrow concretization set."""


class OracleFailure(OLPError):
    """The compact-representation oracle found no feasible response."""


class ReductionViolation(OLPError):
    """A reduced zero-sum equilibrium puts mass on the auxiliary rows."""


class NotFound(OLPError):
    """Equilibrium search exhausted its candidates without success."""


class GameFileError(OLPError, ValueError):
    """A game file could not be parsed; ``position`` locates the problem."""

    def __init__(self, message, position=None):
        self.position = position
        super().__init__(f"{position}: {message}" if position else message)
