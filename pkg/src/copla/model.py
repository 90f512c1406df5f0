"""Steering interface every simulation component implements.

A model advertises its inputs and outputs through metadata, consumes data
components, solves time steps (optionally in the background) and serves its
outputs back, all through one uniform method set.  Workflows and remote
proxies implement the same surface, so callers never care which one they hold.
"""

from __future__ import annotations

import dataclasses
import os
import tempfile
import threading
from enum import Enum

from . import documents
from .data import Field, Property, TimeStep, convert_units
from .errors import (
    AlreadyInitialized,
    DimensionMismatch,
    InvalidState,
    MetadataInvalid,
    MissingInput,
    NoConvergence,
    NoSolveInProgress,
    NotSolved,
    SolverFailure,
    TimeOutOfRange,
    UnknownComponentId,
    WorkdirUnavailable,
)
from .metadata import Kind, Metadata, MetadataTemplate, TemplateEntry, validate_metadata
from .units import Unit, unit as unit_by_symbol

_TIME_TOL = 1e-12


class ModelStatus(Enum):
    INITIALIZED = "Initialized"
    RUNNING = "Running"
    SOLVED = "Solved"
    FAILED = "Failed"


documents.register_class(
    ModelStatus,
    "ModelStatus",
    lambda s: {"value": s.value},
    lambda doc: ModelStatus(doc["value"]),
)

#: Required shape of every model's metadata.
MODEL_METADATA_TEMPLATE = MetadataTemplate(
    (
        TemplateEntry("Name", Kind.STRING),
        TemplateEntry("ID", Kind.STRING),
        TemplateEntry("Inputs", Kind.LIST),
        TemplateEntry("Outputs", Kind.LIST),
        TemplateEntry("Solver.CriticalTimeStep", Kind.NUMBER),
    )
)


@dataclasses.dataclass(frozen=True)
class Advertised:
    """One declared input or output slot of a model."""

    id: str
    kind: str  # "Property" | "Field"
    unit: Unit
    required: bool = False


def _parse_advertised(entries, with_required: bool) -> dict[str, Advertised]:
    out = {}
    for e in entries:
        required = bool(e.get("required", False)) if with_required else False
        out[e["id"]] = Advertised(e["id"], e["kind"], unit_by_symbol(e["unit"]), required)
    return out


def component_id(c: Property | Field) -> str:
    return c.property_id if isinstance(c, Property) else c.field_id


def with_identity(c: Property | Field, new_id: str, time: float) -> Property | Field:
    """Copy of a component under another id and time stamp."""
    if isinstance(c, Property):
        return dataclasses.replace(c, property_id=new_id, time=time)
    return dataclasses.replace(c, field_id=new_id, time=time)


class Model:
    """Base implementation of the steering interface.

    Subclasses declare ``BASE_METADATA`` (name, id, inputs, outputs, solver
    block) and implement ``_solve(ts)`` returning the output components of
    that step, keyed by advertised output id.
    """

    BASE_METADATA: dict = {}

    def __init__(self):
        self._lock = threading.RLock()
        self._status: ModelStatus | None = None
        self._metadata = Metadata(self.BASE_METADATA)
        self._inputs: dict[str, Property | Field] = {}
        self._snapshots: list[tuple[float, dict[str, Property | Field]]] = []
        self._finished_times: list[float] = []
        self._solve_thread: threading.Thread | None = None
        self._solve_started = False
        self._diagnostic: str | None = None
        self.workdir: str | None = None

    # -- lifecycle -------------------------------------------------------

    def initialize(self, workdir=None, input_file=None, metadata=None):
        """Merge metadata, validate it and set up the working directory."""
        with self._lock:
            if self._status is not None:
                raise AlreadyInitialized(f"{type(self).__name__} already initialized")
            merged = self._metadata
            if metadata:
                merged = merged.merged(
                    metadata if isinstance(metadata, Metadata) else Metadata(metadata)
                )
            report = validate_metadata(merged, MODEL_METADATA_TEMPLATE)
            if not report.ok:
                raise MetadataInvalid(
                    f"metadata rejected: {report.summary()}", report
                )
            if workdir is None:
                workdir = tempfile.mkdtemp(prefix="copla-model-")
            else:
                workdir = str(workdir)
                try:
                    os.makedirs(workdir, exist_ok=True)
                except OSError as exc:
                    raise WorkdirUnavailable(f"cannot create {workdir}: {exc}") from exc
                if not os.path.isdir(workdir):
                    raise WorkdirUnavailable(f"{workdir} is not a directory")
            self.workdir = workdir
            self.input_file = input_file
            self._metadata = merged
            self._status = ModelStatus.INITIALIZED

    def get_metadata(self) -> Metadata:
        return self._metadata

    def get_status(self) -> ModelStatus | None:
        return self._status

    def get_critical_time_step(self) -> float:
        value = float(self._metadata.get("Solver.CriticalTimeStep"))
        if not value > 0:
            raise InvalidState("critical time step must be positive")
        return value

    # -- advertised slots --------------------------------------------------

    def advertised_inputs(self) -> dict[str, Advertised]:
        return _parse_advertised(self._metadata.get("Inputs", []), with_required=True)

    def advertised_outputs(self) -> dict[str, Advertised]:
        return _parse_advertised(self._metadata.get("Outputs", []), with_required=False)

    # -- data exchange -----------------------------------------------------

    def set_data_component(self, c):
        self._require_initialized()
        cid = component_id(c)
        slot = self.advertised_inputs().get(cid)
        if slot is None:
            raise UnknownComponentId(f"{cid!r} is not an input of {self._name()}")
        if c.unit.dimension != slot.unit.dimension:
            raise DimensionMismatch(
                f"input {cid!r} expects dimension of {slot.unit.symbol!r}, "
                f"got {c.unit.symbol!r}"
            )
        if isinstance(c, Property):
            c = convert_units(c, slot.unit)
        with self._lock:
            self._inputs[cid] = c  # last write wins

    def get_data_component(self, cid: str, time: float):
        self._require_initialized()
        if self._status is ModelStatus.RUNNING:
            raise InvalidState("cannot fetch outputs while a solve is running")
        if cid not in self.advertised_outputs():
            raise UnknownComponentId(f"{cid!r} is not an output of {self._name()}")
        with self._lock:
            snapshot = self._snapshot_for(float(time))
            return with_identity(snapshot[cid], cid, float(time))

    def _snapshot_for(self, time: float) -> dict:
        if not self._snapshots:
            raise TimeOutOfRange("nothing solved yet")
        last = self._snapshots[-1][0]
        if time > last + _TIME_TOL or time < -_TIME_TOL:
            raise TimeOutOfRange(f"t={time} outside solved interval [0, {last}]")
        # Step k covers (t_{k-1}, t_k]: earliest snapshot at or after t.
        for t, snap in self._snapshots:
            if t >= time - _TIME_TOL:
                return snap
        return self._snapshots[-1][1]

    # -- solving -------------------------------------------------------------

    def solve_step(self, ts: TimeStep, background: bool = False, stage: int = 0):
        self._require_initialized()
        if stage != 0:
            raise InvalidState(f"only stage 0 is supported, got {stage}")
        with self._lock:
            if self._status is ModelStatus.RUNNING:
                raise InvalidState("a solve is already running")
            missing = [
                s.id
                for s in self.advertised_inputs().values()
                if s.required and s.id not in self._inputs
            ]
            if missing:
                raise MissingInput(", ".join(sorted(missing)))
            self._status = ModelStatus.RUNNING
            self._solve_started = True
        if background:
            self._solve_thread = threading.Thread(
                target=self._run_solve, args=(ts, True), daemon=True
            )
            self._solve_thread.start()
        else:
            self._run_solve(ts, False)

    def _run_solve(self, ts: TimeStep, swallow: bool):
        try:
            outputs = self._solve(ts)
        except Exception as exc:  # any failure marks the model Failed
            with self._lock:
                self._status = ModelStatus.FAILED
                self._diagnostic = f"{type(exc).__name__}: {exc}"
            if not swallow:
                if isinstance(exc, (SolverFailure, NoConvergence)):
                    raise  # convergence failures keep their own error type
                raise SolverFailure(self._diagnostic) from exc
            return
        with self._lock:
            self._store_snapshot(ts.time, outputs)
            self._status = ModelStatus.SOLVED

    def _store_snapshot(self, time: float, outputs: dict):
        self._snapshots = [(t, s) for t, s in self._snapshots if abs(t - time) > _TIME_TOL]
        self._snapshots.append((time, dict(outputs)))
        self._snapshots.sort(key=lambda item: item[0])

    def _solve(self, ts: TimeStep) -> dict:
        raise NotImplementedError

    def is_solved(self) -> bool:
        self._require_solve_started()
        return self._status in (ModelStatus.SOLVED, ModelStatus.FAILED)

    def wait(self):
        self._require_solve_started()
        thread = self._solve_thread
        if thread is not None:
            thread.join()
        if self._status is ModelStatus.FAILED:
            raise SolverFailure(self._diagnostic or "solve failed")

    def finish_step(self, ts: TimeStep):
        """Commit the state of a solved step; the model is ready for the next."""
        self._require_initialized()
        with self._lock:
            if self._status is not ModelStatus.SOLVED:
                raise NotSolved(f"status is {self._status}, nothing to finish")
            if not any(abs(t - ts.time) <= _TIME_TOL for t, _ in self._snapshots):
                raise NotSolved(f"no solved step at t={ts.time}")
            self._finished_times.append(ts.time)
            self._finish(ts)

    def _finish(self, ts: TimeStep):
        pass

    def get_diagnostic(self) -> str | None:
        return self._diagnostic

    # -- input helpers for subclasses ---------------------------------------

    def _input_scalar(self, cid: str, default: float | None = None) -> float:
        c = self._inputs.get(cid)
        if c is None:
            if default is not None:
                return default
            raise MissingInput(cid)
        return c.scalar()

    def _input_field(self, cid: str) -> Field:
        c = self._inputs.get(cid)
        if c is None:
            raise MissingInput(cid)
        return c

    # -- internals -----------------------------------------------------------

    def _name(self) -> str:
        return self._metadata.get("Name", type(self).__name__)

    def _require_initialized(self):
        if self._status is None:
            raise InvalidState(f"{type(self).__name__} is not initialized")

    def _require_solve_started(self):
        if not self._solve_started:
            raise NoSolveInProgress("no solve has been started")


#: Methods making up the steering interface, used by conformance checks.
MODEL_INTERFACE = (
    "initialize",
    "get_data_component",
    "set_data_component",
    "solve_step",
    "is_solved",
    "wait",
    "finish_step",
    "get_critical_time_step",
    "get_status",
    "get_metadata",
)


def implements_model_api(obj) -> bool:
    return all(callable(getattr(obj, m, None)) for m in MODEL_INTERFACE)
