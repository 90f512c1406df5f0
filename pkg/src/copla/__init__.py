"""Desk-scale distributed co-simulation platform.

Core pieces: steerable models (`Model`, `Workflow`), typed data components
(`Property`, `Field`, `Mesh`), tagged-document serialization, a line-JSON
RPC layer with a nameserver and job managers, a file-backed execution
database with a REST front end, and a toy composite-panel demo suite.

The REST service and CLI live in `copla.rest` / `copla.cli` and are not
imported here so that spawned worker processes stay lean.
"""

from .data import Field, Property, TimeStep, ValueType, convert_units
from .documents import dumps, from_document, loads, register_class, to_document
from .errors import (
    BindFailure,
    CapacityExceeded,
    ConnectionLost,
    CoplaError,
    DimensionMismatch,
    DomainError,
    InvalidState,
    MalformedDocument,
    MissingInput,
    NoConvergence,
    NotFound,
    RankDeficient,
    RemoteError,
    SolverFailure,
    TimeOutOfRange,
    UnknownComponentId,
    error_class,
)
from .mesh import Mesh
from .metadata import Metadata
from .model import MODEL_INTERFACE, Model, ModelStatus, implements_model_api
from .nameserver import Nameserver, RegistryEntry, connect, serve_nameserver
from .rpc import ObjectServer, Proxy, RemoteRef, proxy
from .units import Unit, unit
from .workflow import Route, Template, Workflow, run_loosely_coupled, run_sequential

__version__ = "0.1.0"

__all__ = [
    "Field",
    "Property",
    "TimeStep",
    "ValueType",
    "dumps",
    "from_document",
    "loads",
    "register_class",
    "to_document",
    "BindFailure",
    "CapacityExceeded",
    "ConnectionLost",
    "CoplaError",
    "DimensionMismatch",
    "DomainError",
    "InvalidState",
    "MalformedDocument",
    "MissingInput",
    "NoConvergence",
    "NotFound",
    "RankDeficient",
    "RemoteError",
    "SolverFailure",
    "TimeOutOfRange",
    "UnknownComponentId",
    "error_class",
    "Mesh",
    "Metadata",
    "MODEL_INTERFACE",
    "Model",
    "ModelStatus",
    "implements_model_api",
    "Nameserver",
    "RegistryEntry",
    "connect",
    "serve_nameserver",
    "ObjectServer",
    "Proxy",
    "RemoteRef",
    "proxy",
    "Unit",
    "unit",
    "convert_units",
    "Route",
    "Template",
    "Workflow",
    "run_loosely_coupled",
    "run_sequential",
    "__version__",
]
