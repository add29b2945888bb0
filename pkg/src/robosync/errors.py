"""Exception types shared across the package."""


class InputError(ValueError):
    """Bad user-supplied data: malformed files, out-of-range parameters."""


class SimulationError(RuntimeError):
    """A run could not be completed under the model's assumptions."""


class CollisionError(SimulationError):
    """Two robots occupied the same point at an event time."""


class DegenerateScenarioError(SimulationError):
    """A pair of robots sat ambiguously close to the visibility threshold."""
