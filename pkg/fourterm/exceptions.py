"""Domain errors shared by the fourterm apps.

``code`` is the process exit status a management command uses when the
error escapes to the command line.
"""

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERIC = 3
EXIT_CONFIG = 4


class FourTermError(Exception):
    code = EXIT_NUMERIC

    def __init__(self, message, **details):
        super().__init__(message)
        self.message = message
        self.details = details


class ProfileError(FourTermError):
    """Limit profile or family descriptor violates its invariants"""
    code = EXIT_VALIDATION


class HorizonError(FourTermError):
    """Profile evaluated beyond the working horizon t*"""
    code = EXIT_CONFIG


class NearPoleError(FourTermError):
    """A ratio P_k/P_{k-1} collapsed below the configured floor"""


class InterlacingViolation(FourTermError):
    """A cascade bracket shows no sign change"""
    code = EXIT_VALIDATION

    def __init__(self, message, level, bracket):
        super().__init__(message, level=level, bracket=bracket)
        self.level = level
        self.bracket = bracket


class ToleranceFailure(FourTermError):
    """An iterative method stopped short of its tolerance"""

    def __init__(self, message, achieved=None, required=None, level=None):
        super().__init__(message, achieved=achieved, required=required, level=level)
        self.achieved = achieved
        self.required = required
        self.level = level


class OnCutError(FourTermError):
    """Point lies on the branch cut [0, 1]"""


class AmbiguityError(FourTermError):
    """Cubic roots too close together to track a branch"""


class ConfigError(FourTermError):
    """Run configuration is missing, malformed or out of range"""
    code = EXIT_CONFIG
