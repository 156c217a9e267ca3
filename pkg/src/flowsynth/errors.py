"""Exception hierarchy shared across the toolkit."""


class FlowsynthError(Exception):
    """Base class for all toolkit errors."""


class ScenarioError(FlowsynthError):
    """Invalid scenario input (unknown entity, bad schema, duplicate name).

    ``path`` points into the offending document location when the error
    originates from scenario parsing, e.g. ``invariants[2].attrs.DB``.
    """

    def __init__(self, message, path=None):
        super().__init__(message if path is None else f"{path}: {message}")
        self.path = path


class SynthesisError(FlowsynthError):
    """Policy construction cannot proceed (deny-all precondition failed)."""


class EditError(FlowsynthError):
    """Invalid refinement edit (self-loop, unknown entity)."""


class SerializationError(FlowsynthError):
    """A backend is missing deployment data it needs to emit output."""


class OracleError(FlowsynthError):
    """A brute-force oracle was asked to enumerate beyond its guard."""
