"""Exception types shared across the platform.

The HTTP layer maps these onto status codes; everything else raises them
directly.
"""


class SchoolSenseError(Exception):
    """Base class for all platform errors."""


class RangeError(SchoolSenseError, ValueError):
    """A value falls outside a metric's declared engineering range."""


class ConfigError(SchoolSenseError, ValueError):
    """Invalid configuration: dangling bindings, bad dial ranges, etc."""


class FrameError(SchoolSenseError, ValueError):
    """A node frame violates the wire layout."""


class TruncatedError(FrameError):
    """Frame shorter than its declared layout."""


class ChecksumError(FrameError):
    """Frame checksum does not match its content."""


class UnknownMetricError(FrameError):
    """Frame carries a metric code the platform does not know."""


class ProtocolError(SchoolSenseError):
    """Gateway/upload protocol misuse, e.g. acknowledging an unknown batch."""


class NotFoundError(SchoolSenseError, LookupError):
    """Target entity (room, building, node, quest, ...) does not exist."""


class ValidationError(SchoolSenseError, ValueError):
    """Malformed input payload."""


class RecoveryError(SchoolSenseError):
    """Storage recovery hit corruption that is not a torn tail."""

    def __init__(self, segment: str, offset: int, reason: str):
        self.segment = segment
        self.offset = offset
        self.reason = reason
        super().__init__(f"corrupt record in {segment} at byte {offset}: {reason}")


class MapValidationError(SchoolSenseError, ValueError):
    """Quest map definition violates its invariants; lists every problem."""

    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("invalid quest map: " + "; ".join(self.problems))


class GateError(SchoolSenseError):
    """Quest is not (yet) visible to this student."""


class AuthzError(SchoolSenseError):
    """Actor is not allowed to perform this action."""


class StateError(SchoolSenseError):
    """Operation conflicts with the current state machine position."""


class UnresolvableError(SchoolSenseError):
    """Live-data quest cannot be graded right now; retriable."""
