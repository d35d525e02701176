"""Exception hierarchy for lexalign."""


class LexAlignError(Exception):
    """Base class for all lexalign errors."""


class DataError(LexAlignError, ValueError):
    """Input data is malformed, empty or inconsistent."""


class ConfigError(LexAlignError, ValueError):
    """A configuration value is invalid."""


class DivergenceError(LexAlignError, ArithmeticError):
    """Training produced a non-finite loss and no checkpoint is usable."""
