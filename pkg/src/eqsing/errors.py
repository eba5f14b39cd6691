"""Error hierarchy shared by all modules.

Each error carries a ``kind`` string (machine readable) and an exit code
used by the command line driver.
"""


class EqsingError(Exception):
    kind = "error"
    exit_code = 1


class ParseError(EqsingError):
    kind = "parse"
    exit_code = 2


class ConfigurationError(EqsingError):
    kind = "configuration"
    exit_code = 2


class DomainError(EqsingError):
    kind = "domain"
    exit_code = 3


class DimensionError(DomainError):
    kind = "dimension"


class UndefinedLeadingTermError(DomainError):
    kind = "undefined-leading-term"


class OrderingClassError(DomainError):
    kind = "ordering-class"


class NoHighestCornerError(DomainError):
    kind = "no-highest-corner"


class NotFoundError(DomainError):
    kind = "not-found"


class NonConstantPivotError(DomainError):
    kind = "non-constant-pivot"


class NonIsolatedError(DomainError):
    kind = "non-isolated-suspected"


class InvalidProfileError(DomainError):
    kind = "invalid-profile"


class WrongCaseError(DomainError):
    kind = "wrong-case"


class NormalizationError(DomainError):
    kind = "normalization"


class UnsupportedBaseError(DomainError):
    kind = "unsupported-base"


class WrongShapeError(DomainError):
    kind = "wrong-shape"


class ConstructionError(DomainError):
    kind = "construction"


class InvariantViolation(DomainError):
    kind = "invariant-violation"


class CertificateInconclusive(EqsingError):
    kind = "certificate-inconclusive"
    exit_code = 4
