"""Exception types shared across the package."""


class ConvergenceError(RuntimeError):
    """A truncation-doubling loop failed to settle.

    ``iterates`` holds the last two values that were compared.
    """

    def __init__(self, message, iterates=()):
        super().__init__(message)
        self.iterates = tuple(iterates)


class DegenerateModeError(ValueError):
    """Two characteristic values of one family are numerically coincident."""


class IllConditionedError(ValueError):
    """A representation is not usable at the requested parameters."""
