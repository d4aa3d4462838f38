"""Exception types shared across the package."""


class NotCellUnion(ValueError):
    """An event is not a union of the given agent's partition cells."""


class ConditioningOnNull(ValueError):
    """Conditioning was requested on an event of (numerically) zero mass."""


class NotHermitian(ValueError):
    """A matrix deviates from its conjugate transpose beyond tolerance."""


class NotPsd(ValueError):
    """A matrix has an eigenvalue below the negativity tolerance."""


class ScenarioError(ValueError):
    """Base class for scenario-file problems. ``path`` locates the offender."""

    def __init__(self, message: str, path: str = ""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class ScenarioSyntaxError(ScenarioError):
    """The scenario text is not well-formed."""


class ScenarioValidationError(ScenarioError):
    """The scenario is well-formed but violates a structural invariant."""
