"""Workflow-execution database: use cases, workflows and execution records.

Records live in the document store and round-trip through the tagged-document
codec.  Execution status moves only along Created -> Pending -> Running ->
(Finished | Failed); every transition funnels through one guard.
"""

from __future__ import annotations

import dataclasses
import threading
import time
import uuid
from dataclasses import dataclass, field
from enum import Enum

from . import documents
from .errors import (
    InvalidState,
    MissingInput,
    NotEditable,
    NotFound,
    ParseError,
    UnknownInput,
    UnknownWorkflow,
)
from .store import DocumentStore
from .units import unit as unit_by_symbol

SCALAR = "Scalar"
PROPERTY = "Property"
FIELD_REF = "Field-ref"
_SLOT_KINDS = (SCALAR, PROPERTY, FIELD_REF)


@dataclass(frozen=True)
class UseCaseRecord:
    id: str
    name: str
    description: str = ""


@dataclass(frozen=True)
class InputSlot:
    name: str
    kind: str = PROPERTY
    unit: str = "1"
    required: bool = False
    default: str | None = None

    def __post_init__(self):
        if self.kind not in _SLOT_KINDS:
            raise ValueError(f"slot kind must be one of {_SLOT_KINDS}, got {self.kind!r}")


@dataclass(frozen=True)
class OutputSlot:
    name: str
    kind: str = PROPERTY
    unit: str = "1"


@dataclass(frozen=True)
class WorkflowRecord:
    id: str
    usecase_id: str
    name: str
    version: int
    input_card_template: tuple[InputSlot, ...]
    output_card_template: tuple[OutputSlot, ...]
    implementation_key: str

    def __post_init__(self):
        names = [s.name for s in self.input_card_template]
        out_names = [s.name for s in self.output_card_template]
        if len(set(names)) != len(names) or len(set(out_names)) != len(out_names):
            raise ValueError(f"workflow {self.id!r} has duplicate slot names")


class ExecutionStatus(Enum):
    CREATED = "Created"
    PENDING = "Pending"
    RUNNING = "Running"
    FINISHED = "Finished"
    FAILED = "Failed"


#: Legal edges of the execution state machine.
_TRANSITIONS = {
    (ExecutionStatus.CREATED, ExecutionStatus.PENDING),
    (ExecutionStatus.PENDING, ExecutionStatus.RUNNING),
    (ExecutionStatus.RUNNING, ExecutionStatus.FINISHED),
    (ExecutionStatus.RUNNING, ExecutionStatus.FAILED),
}


@dataclass(frozen=True)
class InputValue:
    """State of one input slot on an execution card."""

    value: str | None = None
    set: bool = False


@dataclass(frozen=True)
class ExecutionRecord:
    weid: str
    workflow_id: str
    status: ExecutionStatus
    inputs: dict = field(default_factory=dict)  # name -> InputValue
    outputs: dict = field(default_factory=dict)  # name -> component
    created_at: float = 0.0
    started_at: float | None = None
    finished_at: float | None = None
    error: str | None = None


# -- codecs -------------------------------------------------------------------

documents.register_class(
    UseCaseRecord,
    "UseCaseRecord",
    lambda r: {"id": r.id, "name": r.name, "description": r.description},
    lambda doc: UseCaseRecord(doc["id"], doc["name"], doc.get("description", "")),
)

documents.register_class(
    InputSlot,
    "InputSlot",
    lambda s: {
        "name": s.name,
        "kind": s.kind,
        "unit": s.unit,
        "required": s.required,
        "default": s.default,
    },
    lambda doc: InputSlot(
        doc["name"], doc["kind"], doc["unit"], doc["required"], doc.get("default")
    ),
)

documents.register_class(
    OutputSlot,
    "OutputSlot",
    lambda s: {"name": s.name, "kind": s.kind, "unit": s.unit},
    lambda doc: OutputSlot(doc["name"], doc["kind"], doc["unit"]),
)

documents.register_class(
    WorkflowRecord,
    "WorkflowRecord",
    lambda r: {
        "id": r.id,
        "usecase_id": r.usecase_id,
        "name": r.name,
        "version": r.version,
        "input_card_template": [documents.to_document(s) for s in r.input_card_template],
        "output_card_template": [documents.to_document(s) for s in r.output_card_template],
        "implementation_key": r.implementation_key,
    },
    lambda doc: WorkflowRecord(
        id=doc["id"],
        usecase_id=doc["usecase_id"],
        name=doc["name"],
        version=doc["version"],
        input_card_template=tuple(documents.from_document(doc["input_card_template"])),
        output_card_template=tuple(documents.from_document(doc["output_card_template"])),
        implementation_key=doc["implementation_key"],
    ),
)

documents.register_class(
    InputValue,
    "InputValue",
    lambda v: {"value": v.value, "set": v.set},
    lambda doc: InputValue(doc.get("value"), doc.get("set", False)),
)

documents.register_class(
    ExecutionRecord,
    "ExecutionRecord",
    lambda r: {
        "weid": r.weid,
        "workflow_id": r.workflow_id,
        "status": r.status.value,
        "inputs": {k: documents.to_document(v) for k, v in r.inputs.items()},
        "outputs": {k: documents.to_document(v) for k, v in r.outputs.items()},
        "created_at": r.created_at,
        "started_at": r.started_at,
        "finished_at": r.finished_at,
        "error": r.error,
    },
    lambda doc: ExecutionRecord(
        weid=doc["weid"],
        workflow_id=doc["workflow_id"],
        status=ExecutionStatus(doc["status"]),
        inputs={k: documents.from_document(v) for k, v in doc["inputs"].items()},
        outputs={k: documents.from_document(v) for k, v in doc["outputs"].items()},
        created_at=doc["created_at"],
        started_at=doc.get("started_at"),
        finished_at=doc.get("finished_at"),
        error=doc.get("error"),
    ),
)


# -- input value parsing -------------------------------------------------------

def parse_input_value(slot: InputSlot, text: str):
    """Parse a card value string per slot kind; raises ParseError."""
    if not isinstance(text, str):
        raise ParseError(f"{slot.name}: value must be a string, got {type(text).__name__}")
    if slot.kind == SCALAR:
        try:
            value = float(text)
        except ValueError:
            raise ParseError(f"{slot.name}: {text!r} is not a decimal literal") from None
        if value != value or value in (float("inf"), float("-inf")):
            raise ParseError(f"{slot.name}: value must be finite")
        return value
    if slot.kind == PROPERTY:
        parts = text.split()
        if len(parts) != 2:
            raise ParseError(f"{slot.name}: expected 'value unit', got {text!r}")
        try:
            value = float(parts[0])
        except ValueError:
            raise ParseError(f"{slot.name}: {parts[0]!r} is not a number") from None
        try:
            given = unit_by_symbol(parts[1])
        except NotFound:
            raise ParseError(f"{slot.name}: unknown unit {parts[1]!r}") from None
        expected = unit_by_symbol(slot.unit)
        if given.dimension != expected.dimension:
            raise ParseError(
                f"{slot.name}: unit {parts[1]!r} is not compatible with {slot.unit!r}"
            )
        from .data import Property

        return Property(value=value, unit=given, property_id=slot.name)
    # Field-ref: an opaque path or URI, resolved by the implementation
    if not text.strip():
        raise ParseError(f"{slot.name}: field reference must be non-empty")
    return text


# -- database -----------------------------------------------------------------

class ExecDB:
    """Record-level operations over the document store."""

    def __init__(self, store: DocumentStore):
        self.store = store
        self._lock = threading.Lock()  # serializes read-modify-write in-process

    # registration

    def put_usecase(self, record: UseCaseRecord):
        self.store.put("usecases", record.id, documents.to_document(record))

    def put_workflow(self, record: WorkflowRecord):
        if self.store.get("usecases", record.usecase_id) is None:
            raise NotFound(f"use case {record.usecase_id!r} is not registered")
        self.store.put("workflows", record.id, documents.to_document(record))

    # reads

    def get_usecase(self, usecase_id: str) -> UseCaseRecord:
        doc = self.store.get("usecases", usecase_id)
        if doc is None:
            raise NotFound(f"no use case {usecase_id!r}")
        return documents.from_document(doc)

    def get_workflow(self, workflow_id: str) -> WorkflowRecord:
        doc = self.store.get("workflows", workflow_id)
        if doc is None:
            raise UnknownWorkflow(f"no workflow {workflow_id!r}")
        return documents.from_document(doc)

    def get_execution(self, weid: str) -> ExecutionRecord:
        doc = self.store.get("executions", weid)
        if doc is None:
            raise NotFound(f"no execution {weid!r}")
        return documents.from_document(doc)

    def list_usecases(self) -> list[UseCaseRecord]:
        return [self.get_usecase(i) for i in self.store.list_ids("usecases")]

    def list_workflows(self, usecase_id: str | None = None) -> list[WorkflowRecord]:
        records = []
        for wid in self.store.list_ids("workflows"):
            doc = self.store.get("workflows", wid)
            record = documents.from_document(doc)
            if usecase_id is None or record.usecase_id == usecase_id:
                records.append(record)
        return records

    def list_executions(self, workflow_id: str | None = None) -> list[ExecutionRecord]:
        records = []
        for weid in self.store.list_ids("executions"):
            record = self.get_execution(weid)
            if workflow_id is None or record.workflow_id == workflow_id:
                records.append(record)
        return records

    # execution lifecycle

    def init_execution(self, workflow_id: str) -> str:
        workflow = self.get_workflow(workflow_id)
        weid = "we-" + uuid.uuid4().hex
        inputs = {
            slot.name: InputValue(slot.default, slot.default is not None)
            for slot in workflow.input_card_template
        }
        record = ExecutionRecord(
            weid=weid,
            workflow_id=workflow_id,
            status=ExecutionStatus.CREATED,
            inputs=inputs,
            created_at=time.time(),
        )
        self._write(record)
        return weid

    def set_input(self, weid: str, name: str, value: str):
        with self._lock:
            record = self.get_execution(weid)
            if record.status is not ExecutionStatus.CREATED:
                raise NotEditable(f"{weid} is {record.status.value}, inputs are frozen")
            if name not in record.inputs:
                raise UnknownInput(f"{name!r} is not on the input card of {weid}")
            slot = self._slot(record.workflow_id, name)
            parse_input_value(slot, value)  # validate now, store the string
            inputs = dict(record.inputs)
            inputs[name] = InputValue(value, True)
            self._write(dataclasses.replace(record, inputs=inputs))

    def schedule_execution(self, weid: str):
        with self._lock:
            record = self.get_execution(weid)
            if record.status is not ExecutionStatus.CREATED:
                raise InvalidState(f"{weid} is {record.status.value}, cannot schedule")
            workflow = self.get_workflow(record.workflow_id)
            missing = sorted(
                slot.name
                for slot in workflow.input_card_template
                if slot.required and not record.inputs[slot.name].set
            )
            if missing:
                raise MissingInput(", ".join(missing))
            self._transition(record, ExecutionStatus.PENDING)

    def mark_running(self, weid: str) -> ExecutionRecord:
        with self._lock:
            record = self.get_execution(weid)
            return self._transition(
                record, ExecutionStatus.RUNNING, started_at=time.time()
            )

    def mark_finished(self, weid: str, outputs: dict) -> ExecutionRecord:
        with self._lock:
            record = self.get_execution(weid)
            return self._transition(
                record,
                ExecutionStatus.FINISHED,
                outputs=dict(outputs),
                finished_at=time.time(),
            )

    def mark_failed(self, weid: str, error: str) -> ExecutionRecord:
        with self._lock:
            record = self.get_execution(weid)
            return self._transition(
                record, ExecutionStatus.FAILED, error=error, finished_at=time.time()
            )

    def claim_execution(self, weid: str) -> bool:
        """One scheduler wins the right to run ``weid``; claims never recycle."""
        return self.store.claim(weid)

    def recover_interrupted(self) -> list[str]:
        """Mark executions left Running by a dead scheduler as Failed."""
        recovered = []
        for record in self.list_executions():
            if record.status is ExecutionStatus.RUNNING:
                self.mark_failed(record.weid, "interrupted")
                recovered.append(record.weid)
        return recovered

    # internals

    def _slot(self, workflow_id: str, name: str) -> InputSlot:
        workflow = self.get_workflow(workflow_id)
        for slot in workflow.input_card_template:
            if slot.name == name:
                return slot
        raise UnknownInput(f"{name!r} is not on the card of {workflow_id}")

    def _transition(self, record: ExecutionRecord, new: ExecutionStatus, **changes):
        if (record.status, new) not in _TRANSITIONS:
            raise InvalidState(
                f"{record.weid}: illegal transition {record.status.value} -> {new.value}"
            )
        updated = dataclasses.replace(record, status=new, **changes)
        self._write(updated)
        return updated

    def _write(self, record: ExecutionRecord):
        self.store.put("executions", record.weid, documents.to_document(record))
