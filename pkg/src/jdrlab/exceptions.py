"""Exceptions shared across the library."""


class RankDeficiencyError(ValueError):
    """A state ensemble is linearly dependent where independence is required."""


class ConfigError(ValueError):
    """A sweep or command configuration failed validation."""


class ConvergenceError(RuntimeError):
    """An iterative solver hit its iteration cap before meeting its tolerance.

    The best iterate found so far, when one exists, is attached as ``result``.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result
