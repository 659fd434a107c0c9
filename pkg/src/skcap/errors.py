"""Exception and warning types shared across the package."""


class ModelError(ValueError):
    """A model or distribution failed validation.

    ``field`` names the offending schema field when the error comes from
    loading a JSON document, so the CLI can report it.
    """

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class UsageError(ValueError):
    """An operation was called with inconsistent arguments (axes, shapes)."""


class ParameterError(ValueError):
    """Simulation parameters cannot be realized (e.g. empty typical set)."""


class StateSpaceTooLarge(ParameterError):
    """Exhaustive enumeration refused because the state space is too large."""

    def __init__(self, states, limit):
        super().__init__(
            f"exhaustive enumeration needs {states} joint states, limit is {limit}"
        )
        self.states = states
        self.limit = limit


class NumericalHealthWarning(UserWarning):
    """An optimizer produced results that disagree more than expected."""
