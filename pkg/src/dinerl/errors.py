"""Exception taxonomy shared across the package."""


class ConfigurationError(ValueError):
    """Invalid static configuration (layer sizes, weights, limits)."""


class DimensionError(ValueError):
    """Input shape does not match a component's configured dimensions."""


class DataError(ValueError):
    """Runtime data rejected (non-finite values, wrong arity)."""


class NotReadyError(RuntimeError):
    """Component cannot serve the request yet (empty memory, untrained model)."""


class UndefinedInputError(ValueError):
    """Input violates a precondition that makes the result undefined."""


class EpisodeEnd(RuntimeError):
    """Workload trace exhausted; the run ends normally."""
