"""Exception classes shared across the package.

The CLI maps ConfigError to exit code 2 and everything else raised at
runtime to exit code 1.
"""


class GaugecavityError(Exception):
    """Base class for all package errors."""


class ArgumentError(GaugecavityError, ValueError):
    """Invalid argument to a library operation."""


class ResourceLimitError(GaugecavityError):
    """A requested object would exceed a configured size limit."""


class NumericError(GaugecavityError):
    """A numerical routine failed to converge or produced unusable output."""


class UnsupportedError(GaugecavityError):
    """Operation not defined for the given model/gauge combination."""


class DegenerateGroundStateError(UnsupportedError):
    """Lehmann sums require a unique ground state."""


class SingularConstraintError(NumericError):
    """Constrained minimisation asked for a displacement no matter state can realise."""


class ConfigError(GaugecavityError):
    """Invalid sweep configuration; carries the full list of violations."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))
