"""Exception taxonomy shared by all modules.

The CLI maps these onto distinct exit codes, so raise the most specific
class available.
"""


class SimError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(SimError):
    """Bad or ambiguous configuration input (CLI exit code 2)."""


class DegeneracyError(SimError):
    """Band touching: eigenvectors are not defined (CLI exit code 3)."""


class CriticalPointError(DegeneracyError):
    """Gap parameter sits at/near a topological transition (CLI exit code 3)."""


class ContractError(SimError):
    """Inconsistent inputs, e.g. mismatched trace length (CLI exit code 4)."""


class InvalidArgumentError(SimError, ValueError):
    """Non-finite or out-of-domain numeric argument (CLI exit code 4)."""
