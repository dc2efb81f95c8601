"""Exception hierarchy shared by all modules."""


class DistAvoidError(Exception):
    """Base class for every error raised by the package."""


class ConfigError(DistAvoidError, ValueError):
    """Invalid user input: bad norm text, unsupported decay family, bad stage index..."""


class BudgetExceeded(DistAvoidError):
    """A computation needed more work than its configured budget allows."""


class EnumerationBudgetExceeded(BudgetExceeded):
    pass


class FactorizationBudgetExceeded(BudgetExceeded):
    pass


class ScaleBudgetExceeded(BudgetExceeded):
    """A threshold scale too large to write down."""


class NonExactNormError(DistAvoidError):
    """Exact certification was requested for a norm that only admits enclosures."""


class UndecidedComparison(DistAvoidError):
    """An exact sign could not be resolved within the precision cap."""


class ManifestError(DistAvoidError, ValueError):
    """Malformed or unsupported manifest document."""


class CertificationError(DistAvoidError):
    """A construction failed its own post-checks."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
