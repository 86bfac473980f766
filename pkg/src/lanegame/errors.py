"""Exception types shared across the package."""


class ConfigError(ValueError):
    """A scenario or parameter block failed validation."""


class DomainError(ValueError):
    """An input left the domain a function is defined on."""


class InfeasibleDecisionError(RuntimeError):
    """Every candidate action was excluded by the feasibility rules."""
