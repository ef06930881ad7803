"""Exception types shared across the package."""


class CapacityError(ValueError):
    """Requested size exceeds what an engine supports."""


class SingularMatrixError(ArithmeticError):
    """Raised when inverting a singular GF(2) matrix."""


class ChannelSpecError(ValueError):
    """Malformed channel specification string.

    ``position`` is the 0-based character offset where parsing failed.
    """

    def __init__(self, message: str, spec: str, position: int):
        super().__init__(f"{message} at position {position} in {spec!r}")
        self.spec = spec
        self.position = position
