"""Exception types shared across the package."""


class DropletError(Exception):
    """Base class for package errors."""


class ConfigError(DropletError, ValueError):
    """Invalid run configuration; ``key`` is the dotted path of the offending entry."""

    def __init__(self, message, key=None):
        self.key = key
        super().__init__(f"{key}: {message}" if key else message)


class BlowUpError(DropletError, FloatingPointError):
    """Non-finite values appeared during time evolution."""

    def __init__(self, message, time=None, index=None):
        self.time = time
        self.index = index
        super().__init__(message)


class DomainExitError(DropletError):
    """The droplet reached the edge of the periodic domain."""

    def __init__(self, message, time=None, position=None):
        self.time = time
        self.position = position
        super().__init__(message)


class WignerRangeError(DropletError, ValueError):
    """The momentum window does not capture the state; ``margin`` is the marginal error."""

    def __init__(self, message, margin=None):
        self.margin = margin
        super().__init__(message)
