"""Error taxonomy shared by every layer of the platform.

Every error that may cross the wire derives from :class:`CoplaError`; the class
name doubles as the error ``type`` string in RPC envelopes and REST bodies, so
renaming a class here is a protocol change.
"""

from __future__ import annotations

_REGISTRY: dict[str, type["CoplaError"]] = {}


class CoplaError(Exception):
    """Base class; subclasses register themselves under their class name."""

    def __init_subclass__(cls, **kw):
        super().__init_subclass__(**kw)
        _REGISTRY[cls.__name__] = cls

    @property
    def type_name(self) -> str:
        return type(self).__name__


def error_class(type_name: str) -> type[CoplaError] | None:
    """Resolve a wire-level error type string back to its class, if known."""
    return _REGISTRY.get(type_name)


def registered_error_names() -> tuple[str, ...]:
    return tuple(sorted(_REGISTRY))


# -- data components ---------------------------------------------------------

class DimensionMismatch(CoplaError):
    pass


class NotFound(CoplaError):
    pass


class OutsideDomain(CoplaError):
    pass


class MalformedDocument(CoplaError):
    pass


# -- model steering ----------------------------------------------------------

class MetadataInvalid(CoplaError):
    def __init__(self, msg, report=None):
        super().__init__(msg)
        self.report = report


class WorkdirUnavailable(CoplaError):
    pass


class AlreadyInitialized(CoplaError):
    pass


class UnknownComponentId(CoplaError):
    pass


class TimeOutOfRange(CoplaError):
    pass


class MissingInput(CoplaError):
    pass


class SolverFailure(CoplaError):
    pass


class NoSolveInProgress(CoplaError):
    pass


class NotSolved(CoplaError):
    pass


class NoConvergence(CoplaError):
    pass


# -- remote objects ----------------------------------------------------------

class BindFailure(CoplaError):
    pass


class ConnectionLost(CoplaError):
    pass


class RemoteError(CoplaError):
    """Remote failure whose type string has no registered local class."""

    def __init__(self, type_name: str, msg: str):
        super().__init__(f"{type_name}: {msg}")
        self.remote_type = type_name
        self.remote_msg = msg


class InvalidName(CoplaError):
    pass


class UnknownMethod(CoplaError):
    pass


class MalformedRequest(CoplaError):
    pass


# -- job management ----------------------------------------------------------

class CapacityExceeded(CoplaError):
    pass


class SpawnFailure(CoplaError):
    pass


class UnknownJob(CoplaError):
    pass


class InvalidTicket(CoplaError):
    pass


# -- workflow database -------------------------------------------------------

class UnknownWorkflow(CoplaError):
    pass


class UnknownInput(CoplaError):
    pass


class ParseError(CoplaError):
    pass


class NotEditable(CoplaError):
    pass


class InvalidState(CoplaError):
    pass


class StoreUnavailable(CoplaError):
    pass


# -- demo physics ------------------------------------------------------------

class DomainError(CoplaError):
    pass


class RankDeficient(CoplaError):
    pass
