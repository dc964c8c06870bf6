class ParameterError(ValueError):
    """An argument is outside the domain an operation accepts."""


class ConfigError(ValueError):
    """An experiment configuration is inconsistent or unreadable."""


class InvalidBlockError(RuntimeError):
    """No user passed the participation gate, so the block cannot be used."""
