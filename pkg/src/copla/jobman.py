"""Job manager: spawns model instances as child processes, enforces capacity.

Each allocation forks a fresh process that builds the model from a factory
spec ("package.module:callable"), initializes it in its own workdir and
serves it on a port of its own.  Terminate is forceful (process kill), so a
wedged solver never blocks the slot forever.
"""

from __future__ import annotations

import dataclasses
import importlib
import multiprocessing
import os
import secrets
import tempfile
import threading
import time
from dataclasses import dataclass
from enum import Enum

from . import documents
from .errors import (
    BindFailure,
    CapacityExceeded,
    InvalidTicket,
    SpawnFailure,
    UnknownJob,
)
from .rpc import ObjectServer, RemoteRef

JOBMAN_OBJID = "jobman"
_SPAWN = multiprocessing.get_context("spawn")


class JobStatus(Enum):
    PENDING = "Pending"
    RUNNING = "Running"
    TERMINATED = "Terminated"
    FAILED = "Failed"


@dataclass(frozen=True)
class JobRecord:
    """One spawned (or attempted) model instance."""

    job_id: str
    ticket: str
    user: str
    model_name: str
    status: JobStatus
    spawned_at: float
    ref: RemoteRef | None = None


documents.register_class(
    JobRecord,
    "JobRecord",
    lambda r: {
        "job_id": r.job_id,
        "ticket": r.ticket,
        "user": r.user,
        "model_name": r.model_name,
        "status": r.status.value,
        "spawned_at": r.spawned_at,
        "ref": documents.to_document(r.ref),
    },
    lambda doc: JobRecord(
        job_id=doc["job_id"],
        ticket=doc["ticket"],
        user=doc["user"],
        model_name=doc["model_name"],
        status=JobStatus(doc["status"]),
        spawned_at=doc["spawned_at"],
        ref=documents.from_document(doc["ref"]),
    ),
)


@dataclass(frozen=True)
class JobManagerConfig:
    model_name: str
    factory: str  # "package.module:callable" resolved inside the child
    max_jobs: int = 1
    workdir_root: str | None = None
    bind_host: str = "127.0.0.1"
    bind_range: tuple[int, int] | None = None  # None: ephemeral ports
    spawn_timeout: float = 30.0

    def __post_init__(self):
        if self.max_jobs < 1:
            raise ValueError("max_jobs must be at least 1")


def _child_main(factory_spec, host, bind_lo, bind_hi, workdir, conn):
    """Child process: build the model, initialize it, serve it forever."""
    try:
        module_name, _, attr = factory_spec.partition(":")
        factory = getattr(importlib.import_module(module_name), attr)
        model = factory()
        model.initialize(workdir=workdir)
        if bind_lo == 0:
            server = ObjectServer(host, 0)
        else:
            server = None
            last = "empty port range"
            for port in range(bind_lo, bind_hi + 1):
                try:
                    server = ObjectServer(host, port)
                    break
                except BindFailure as exc:
                    last = str(exc)
            if server is None:
                raise SpawnFailure(f"no free port in {bind_lo}-{bind_hi}: {last}")
        server.serve(model, "model")
        conn.send({"ok": True, "host": server.host, "port": server.port})
        conn.close()
        threading.Event().wait()  # parked until the parent terminates us
    except Exception as exc:
        try:
            conn.send({"ok": False, "error": f"{type(exc).__name__}: {exc}"})
            conn.close()
        except Exception:
            pass
        os._exit(1)


class JobManager:
    """Capacity-limited allocator of served model instances."""

    def __init__(self, config: JobManagerConfig):
        self.config = config
        self.ref: RemoteRef | None = None  # set when served
        self._jobs: dict[str, JobRecord] = {}
        self._procs: dict[str, multiprocessing.process.BaseProcess] = {}
        self._lock = threading.Lock()
        self._counter = 0
        self._workdir_root = config.workdir_root or tempfile.mkdtemp(prefix="copla-jobs-")

    # -- service methods (camelCase arrives via the rpc name fallback) --------

    def allocate_job(self, user: str = "anonymous"):
        """Spawn one instance; returns (ticket, job_id, ref)."""
        with self._lock:
            occupied = sum(
                1
                for r in self._jobs.values()
                if r.status in (JobStatus.PENDING, JobStatus.RUNNING)
            )
            if occupied >= self.config.max_jobs:
                raise CapacityExceeded(
                    f"{occupied}/{self.config.max_jobs} jobs already allocated"
                )
            self._counter += 1
            job_id = f"{self.config.model_name}-{self._counter:04d}"
            ticket = secrets.token_hex(16)
            self._jobs[job_id] = JobRecord(
                job_id, ticket, user, self.config.model_name,
                JobStatus.PENDING, time.time(),
            )
        proc = None
        try:
            ref, proc = self._spawn(job_id)
        except Exception as exc:
            with self._lock:
                self._jobs[job_id] = dataclasses.replace(
                    self._jobs[job_id], status=JobStatus.FAILED
                )
            if proc is not None:
                proc.terminate()
            if isinstance(exc, SpawnFailure):
                raise
            raise SpawnFailure(f"spawn of {job_id} failed: {exc}") from exc
        with self._lock:
            record = self._jobs[job_id]
            if record.status is JobStatus.TERMINATED:  # raced terminate_job
                proc.terminate()
                raise SpawnFailure(f"{job_id} was terminated during spawn")
            self._jobs[job_id] = dataclasses.replace(
                record, status=JobStatus.RUNNING, ref=ref
            )
            self._procs[job_id] = proc
        return ticket, job_id, ref

    def _spawn(self, job_id: str):
        lo, hi = self.config.bind_range or (0, 0)
        if self.config.bind_range is not None and hi < lo:
            raise SpawnFailure(f"empty bind range {self.config.bind_range}")
        workdir = os.path.join(self._workdir_root, job_id)
        parent_conn, child_conn = _SPAWN.Pipe(duplex=False)
        proc = _SPAWN.Process(
            target=_child_main,
            args=(self.config.factory, self.config.bind_host, lo, hi, workdir, child_conn),
            daemon=True,
        )
        proc.start()
        child_conn.close()
        if not parent_conn.poll(self.config.spawn_timeout):
            proc.terminate()
            raise SpawnFailure(f"{job_id} did not come up within {self.config.spawn_timeout}s")
        message = parent_conn.recv()
        parent_conn.close()
        if not message.get("ok"):
            proc.join(timeout=5.0)
            raise SpawnFailure(f"{job_id}: {message.get('error', 'unknown failure')}")
        return RemoteRef(message["host"], message["port"], "model"), proc

    def get_status(self) -> list[JobRecord]:
        """All jobs since startup, oldest first; tickets are not disclosed."""
        with self._lock:
            records = sorted(self._jobs.values(), key=lambda r: (r.spawned_at, r.job_id))
        return [dataclasses.replace(r, ticket="") for r in records]

    def terminate_job(self, job_id: str, ticket: str | None = None):
        with self._lock:
            record = self._jobs.get(job_id)
            if record is None:
                raise UnknownJob(f"no job {job_id!r}")
            if ticket is not None and ticket != record.ticket:
                raise InvalidTicket(f"ticket does not match job {job_id!r}")
            if record.status in (JobStatus.TERMINATED, JobStatus.FAILED):
                return
            proc = self._procs.pop(job_id, None)
            self._jobs[job_id] = dataclasses.replace(record, status=JobStatus.TERMINATED)
        if proc is not None:
            proc.terminate()
            proc.join(timeout=5.0)
            if proc.is_alive():
                proc.kill()

    # -- wiring ----------------------------------------------------------------

    def register_with_nameserver(self, ns_host: str, ns_port: int, name: str):
        """Announce this (already served) manager on the nameserver."""
        from .nameserver import connect

        if self.ref is None:
            raise SpawnFailure("job manager is not served yet; nothing to register")
        with connect(ns_host, ns_port) as ns:
            ns.register(
                name,
                self.ref,
                {
                    "Type": "JobManager",
                    "Model": self.config.model_name,
                    "MaxJobs": self.config.max_jobs,
                },
            )

    def close(self):
        """Terminate every running child; used on service shutdown."""
        with self._lock:
            job_ids = [
                r.job_id
                for r in self._jobs.values()
                if r.status in (JobStatus.PENDING, JobStatus.RUNNING)
            ]
        for job_id in job_ids:
            try:
                self.terminate_job(job_id)
            except UnknownJob:
                pass


def serve_jobman(jm: JobManager, host: str = "127.0.0.1", port: int = 0):
    """Expose a job manager over RPC; returns (server, ref)."""
    server = ObjectServer(host, port)
    jm.ref = server.serve(jm, JOBMAN_OBJID)
    return server, jm.ref
