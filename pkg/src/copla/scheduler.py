"""Poll-based execution scheduler and the platform context handed to workflows.

A tick claims up to ``parallelism`` Pending executions (FIFO by creation
time, claims are atomic across processes), runs each registered
implementation and always releases allocated jobs, even on failure.
"""

from __future__ import annotations

import threading
import traceback
from typing import Callable

from . import rpc
from .errors import CapacityExceeded, NotFound
from .execdb import ExecDB, ExecutionStatus, parse_input_value
from .nameserver import connect as connect_nameserver

_IMPLEMENTATIONS: dict[str, Callable] = {}


def register_implementation(key: str, fn: Callable) -> None:
    """Make ``fn(inputs, ctx) -> outputs`` runnable under ``key``."""
    _IMPLEMENTATIONS[key] = fn


def implementation(key: str) -> Callable:
    fn = _IMPLEMENTATIONS.get(key)
    if fn is None:
        raise NotFound(f"no implementation registered for {key!r}")
    return fn


class PlatformContext:
    """Allocates model instances for one execution and releases them after.

    Allocation prefers JobManagers advertising the model on the nameserver;
    without one, a local factory is used so the same workflow code runs in
    a single process.
    """

    def __init__(
        self,
        ns_endpoint: tuple[str, int] | None = None,
        local_factories: dict[str, Callable] | None = None,
        user: str = "scheduler",
    ):
        self.ns_endpoint = ns_endpoint
        self.local_factories = dict(local_factories or {})
        self.user = user
        self._remote: list[tuple[rpc.Proxy, str, str, rpc.Proxy]] = []

    def allocate(self, model_name: str):
        if self.ns_endpoint is not None:
            entries = self._find_jobmans(model_name)
            last_full = None
            for entry in entries:
                manager = rpc.proxy(entry.ref)
                try:
                    ticket, job_id, ref = manager.allocate_job(self.user)
                except CapacityExceeded as exc:
                    last_full = exc
                    manager.close()
                    continue
                instance = rpc.proxy(ref)
                self._remote.append((manager, job_id, ticket, instance))
                return instance
            if last_full is not None:
                raise last_full
        factory = self.local_factories.get(model_name)
        if factory is None:
            raise NotFound(f"no job manager or local factory provides {model_name!r}")
        model = factory()
        model.initialize()
        return model

    def _find_jobmans(self, model_name: str):
        host, port = self.ns_endpoint
        with connect_nameserver(host, port) as ns:
            return ns.query([["Type", "JobManager"], ["Model", model_name]])

    def release_all(self):
        """Terminate every allocated job; never raises."""
        for manager, job_id, ticket, instance in self._remote:
            instance.close()
            try:
                manager.terminate_job(job_id, ticket)
            except Exception:
                pass  # manager may be gone; the job dies with it
            finally:
                manager.close()
        self._remote.clear()


class Scheduler:
    """Runs Pending executions from the database, oldest first."""

    def __init__(
        self,
        db: ExecDB,
        parallelism: int = 1,
        ns_endpoint: tuple[str, int] | None = None,
        local_factories: dict[str, Callable] | None = None,
    ):
        if parallelism < 1:
            raise ValueError("parallelism must be at least 1")
        self.db = db
        self.parallelism = parallelism
        self.ns_endpoint = ns_endpoint
        self.local_factories = dict(local_factories or {})

    def tick(self) -> list[str]:
        """Claim and run up to ``parallelism`` Pending executions."""
        pending = sorted(
            (r for r in self.db.list_executions() if r.status is ExecutionStatus.PENDING),
            key=lambda r: (r.created_at, r.weid),
        )
        ran = []
        for record in pending:
            if len(ran) >= self.parallelism:
                break
            if not self.db.claim_execution(record.weid):
                continue  # another scheduler got there first
            self._run_one(record.weid)
            ran.append(record.weid)
        return ran

    def _run_one(self, weid: str):
        record = self.db.mark_running(weid)
        ctx = PlatformContext(self.ns_endpoint, self.local_factories)
        try:
            workflow = self.db.get_workflow(record.workflow_id)
            run = implementation(workflow.implementation_key)
            inputs = {}
            for slot in workflow.input_card_template:
                state = record.inputs.get(slot.name)
                if state is not None and state.set and state.value is not None:
                    inputs[slot.name] = parse_input_value(slot, state.value)
            result = run(inputs, ctx)
            declared = {slot.name for slot in workflow.output_card_template}
            outputs = {k: v for k, v in result.items() if k in declared}
            self.db.mark_finished(weid, outputs)
        except Exception as exc:
            detail = f"{type(exc).__name__}: {exc}"
            if not str(exc):
                detail = f"{type(exc).__name__}: {traceback.format_exc(limit=3)}"
            self.db.mark_failed(weid, detail)
        finally:
            ctx.release_all()

    def run_forever(self, stop: threading.Event, interval: float = 0.5):
        """Tick until ``stop`` is set; used by the REST service thread."""
        while not stop.wait(interval):
            try:
                self.tick()
            except Exception:
                pass  # a broken store should not kill the polling loop
