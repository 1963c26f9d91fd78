"""Exception hierarchy. Each family carries the CLI exit code it maps to."""


class ActiveSubError(Exception):
    exit_code = 1


class ConfigError(ActiveSubError):
    exit_code = 2


class DataError(ActiveSubError):
    exit_code = 3


class BoundsViolationError(DataError):
    pass


class DuplicatePointError(DataError):
    pass


class DegenerateResponseError(DataError):
    pass


class EmptySampleError(DataError):
    pass


class NumericsError(ActiveSubError):
    exit_code = 4


class IllConditionedError(NumericsError):
    pass


class EigensolverError(NumericsError):
    pass


class DegenerateSpectrumError(NumericsError):
    pass


class BasisTooLargeError(NumericsError):
    pass


class FitFailureError(NumericsError):
    pass
