"""Exception hierarchy shared across the package."""

from __future__ import annotations


class SupergameError(Exception):
    """Base class for all errors raised by this package."""


class SupermodularityViolation(SupergameError):
    """A parameter or payoff configuration breaks strategic complementarity."""

    def __init__(self, message, component=None, profiles=None):
        super().__init__(message)
        self.component = component
        self.profiles = profiles


class NonConvergence(SupergameError):
    """Best-response iteration failed to reach a fixed point in the sweep budget."""

    def __init__(self, message, last_profile=None, iterations=None):
        super().__init__(message)
        self.last_profile = last_profile
        self.iterations = iterations


class FeasibleSetTooLarge(SupergameError):
    """Enumerating the feasible strategic-statistic set would exceed the cap."""


class TooManyScenarios(SupergameError):
    """Exhaustive scenario enumeration would exceed the configured bound."""


class DegenerateTruncation(SupergameError):
    """A truncation point carries zero shock mass; the target outcome is unreachable."""

    def __init__(self, message, player=None, action=None):
        super().__init__(message)
        self.player = player
        self.action = action


class AllMassUnderflow(SupergameError):
    """Every importance-sampling summand vanished at the requested parameter."""

    def __init__(self, message, theta=None, game_index=None):
        super().__init__(message)
        self.theta = theta
        self.game_index = game_index


class RecyclingUnavailable(SupergameError):
    """Scenario recycling requires a single shared strategic parameter."""


class NoActionRegion(SupergameError):
    """Bisection found no shock level at which the coordinate plays the action."""


class SingularHessian(SupergameError):
    """The simulated Hessian is numerically singular."""

    def __init__(self, message, condition_number=None):
        super().__init__(message)
        self.condition_number = condition_number


class Separation(SupergameError):
    """Probit design admits perfect prediction; the MLE diverges."""


class SchemaError(SupergameError):
    """An input file does not match its declared schema."""

    def __init__(self, message, path=None, line=None):
        location = ""
        if path is not None:
            location = f"{path}"
            if line is not None:
                location += f":{line}"
            message = f"{location}: {message}"
        super().__init__(message)
        self.path = path
        self.line = line
