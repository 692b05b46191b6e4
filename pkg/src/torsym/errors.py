"""
Exception hierarchy for torsym.
Every error raised by the library derives from TorsymError; the CLI maps
ParseError to exit code 2 and DomainError to exit code 1.
"""


class TorsymError(Exception):
    """Base class for all torsym errors"""


class ParseError(TorsymError):
    """Input document could not be parsed"""


class DomainError(TorsymError):
    """Input parsed but violates a mathematical precondition"""


# lattice
class RankError(DomainError):
    pass


class NotExtendableError(DomainError):
    pass


class NotPrimitiveError(DomainError):
    pass


class NotUnimodularError(DomainError):
    pass


# complex
class UnknownVertexError(DomainError):
    pass


class LabelCollisionError(DomainError):
    pass


# charpair
class InvalidPairError(DomainError):
    pass


class ZeroDualError(DomainError):
    pass


class NotNormalizedError(DomainError):
    pass


class NotAFaceError(DomainError):
    pass


class RankMismatchError(DomainError):
    pass


class NotSimpleError(DomainError):
    pass


class UnboundedError(DomainError):
    pass


class RedundantFacetError(DomainError):
    pass


# symmetry
class SingletonClassError(DomainError):
    pass


class DichotomyViolation(DomainError):
    """A facet class is neither a face nor a minimal non-face."""


class CaseMismatchError(DomainError):
    pass


class NotExceptionalError(DomainError):
    pass


class NotClassPreservingError(DomainError):
    pass


class NotAPartitionError(DomainError):
    pass


class NotAdmissibleError(DomainError):
    pass


class RefinementError(DomainError):
    """Carried partition does not refine the reduced pair's own partition."""


class InternalError(DomainError):
    """An identity guaranteed by the theory failed to hold."""


# cli
class SizeGuardError(DomainError):
    pass


class UnknownCatalogError(DomainError):
    pass


class CatalogParameterError(DomainError):
    pass
