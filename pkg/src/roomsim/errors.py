"""Exception types shared across the simulator."""

from __future__ import annotations


class RoomsimError(Exception):
    """Base class for all simulator errors."""


class ParseError(RoomsimError):
    """Malformed scene or task document."""


class ValidationError(RoomsimError):
    """A document parsed but violates a structural invariant."""


class UnknownEntity(RoomsimError):
    """A referenced entity id does not exist in the scene."""


class StaleDelta(RoomsimError):
    """A delta's recorded old value no longer matches the scene."""


class InvariantViolation(RoomsimError):
    """Applying a change would break a scene invariant."""


class MissingAttribute(RoomsimError):
    """A candidate lacks the attribute needed for comparison."""


class AmbiguousMax(RoomsimError):
    """Two candidates tie within tolerance; no unique maximizer."""


class UnknownVerb(RoomsimError):
    """Command verb not in the action vocabulary."""

    def __init__(self, token: str):
        super().__init__(f"unknown verb {token!r}")
        self.token = token


class ArityError(RoomsimError):
    """Command has the wrong number of arguments for its verb."""

    def __init__(self, verb: str, expected: str, got: int):
        super().__init__(f"{verb} expects {expected} argument(s), got {got}")
        self.verb = verb


class UnresolvableIntent(RoomsimError):
    """A structured task intent cannot be grounded in the scene."""


class GenerationFailure(RoomsimError):
    """Scenario generation exhausted its retry budget."""


class InfeasibleCategory(RoomsimError):
    """The scene cannot host a task of the requested category."""


class ReplayDivergence(RoomsimError):
    """A recorded trajectory failed to replay cleanly."""


class AdapterError(RoomsimError):
    """An agent adapter failed to produce a usable response."""
