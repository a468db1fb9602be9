"""Exception hierarchy shared by all orthoflow modules."""


class OrthoflowError(Exception):
    """Base class for every error raised by the package."""


# numkit
class NonUnitInput(OrthoflowError, ValueError):
    pass


class DimensionTooSmall(OrthoflowError, ValueError):
    pass


class NotRankOne(OrthoflowError, ValueError):
    pass


class Overflow(OrthoflowError, OverflowError):
    pass


# sopq
class BadSignature(OrthoflowError, ValueError):
    pass


class WrongSize(OrthoflowError, ValueError):
    pass


class ZeroVector(OrthoflowError, ValueError):
    pass


class NotAStabilizer(OrthoflowError, ValueError):
    pass


class NotSpecialOrthogonal(OrthoflowError, ValueError):
    pass


# circleflow
class BadParameters(OrthoflowError, ValueError):
    pass


class IntegrationFailure(OrthoflowError, RuntimeError):
    pass


class WrongKind(OrthoflowError, TypeError):
    pass


class DifferentArcs(OrthoflowError, ValueError):
    pass


class AtFixedPoint(OrthoflowError, ValueError):
    pass


class NonCancellingResidues(OrthoflowError, ArithmeticError):
    pass


class KindMismatch(OrthoflowError, TypeError):
    pass


class BadInputFlow(OrthoflowError, ValueError):
    pass


# action_engine
class NoRealRoot(OrthoflowError, ArithmeticError):
    pass


class OutsideWPlus(OrthoflowError, ArithmeticError):
    """The factorization is not unique at this configuration (boundary of W+)."""


class NumericalAmbiguity(OrthoflowError, ArithmeticError):
    pass


class OutsideDomain(OrthoflowError, ValueError):
    pass


class NotInP(OrthoflowError, ValueError):
    pass


class CanonicalizationFailure(OrthoflowError, ArithmeticError):
    pass


class Unreachable(OrthoflowError, RuntimeError):
    """Both evaluation routes failed; this indicates a bug."""


# orbit_lab
class EvaluatorFailure(OrthoflowError, RuntimeError):
    pass


class IllConditioned(OrthoflowError, ArithmeticError):
    pass


class NoContainment(OrthoflowError, ArithmeticError):
    pass


class UnknownOrbit(OrthoflowError, ArithmeticError):
    pass


# cli
class UsageError(OrthoflowError, ValueError):
    pass
