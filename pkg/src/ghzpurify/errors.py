"""Exception types shared across the package."""


class RegisterError(ValueError):
    """Raised for label collisions, unknown labels, or register mismatches."""


class UnsupportedInputError(ValueError):
    """Raised when an input lies outside the protocol's stated domain."""


class ConfigError(ValueError):
    """Raised for invalid experiment configuration values."""
