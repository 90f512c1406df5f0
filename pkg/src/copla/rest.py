"""HTTP facade over the execution database, nameserver and job managers.

Paths mirror the platform's service table bit-exactly (including the GET
mutators like ``/workflowexecutions/{WEID}/set?NAME=value``); POST aliases
exist for the mutating routes.  Every body is ``{"ok": true, "data": ...}``
or ``{"ok": false, "error": {"type", "msg"}}`` and the error type string is
the platform error class name.
"""

from __future__ import annotations

import os
import threading
import time
from dataclasses import dataclass

import uvicorn
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import documents, rpc
from .errors import BindFailure, CoplaError, NotFound, ParseError, UnknownInput
from .execdb import ExecDB, ExecutionStatus
from .nameserver import connect as connect_nameserver
from .scheduler import Scheduler
from .store import DocumentStore

#: One (status, type) pair per platform error name.
ERROR_STATUS = {
    "NotFound": 404,
    "UnknownWorkflow": 404,
    "UnknownJob": 404,
    "ParseError": 400,
    "MissingInput": 400,
    "InvalidState": 400,
    "UnknownInput": 400,
    "MalformedDocument": 400,
    "DomainError": 400,
    "InvalidName": 400,
    "InvalidTicket": 403,
    "NotEditable": 409,
    "CapacityExceeded": 409,
    "ConnectionLost": 502,
    "StoreUnavailable": 502,
    "SpawnFailure": 502,
    "RemoteError": 502,
}


def _ok(data) -> JSONResponse:
    return JSONResponse({"ok": True, "data": data})


def _fail(exc: Exception) -> JSONResponse:
    name = type(exc).__name__
    return JSONResponse(
        {"ok": False, "error": {"type": name, "msg": str(exc)}},
        status_code=ERROR_STATUS.get(name, 500),
    )


def create_app(
    db: ExecDB,
    ns_endpoint: tuple[str, int] | None = None,
    cors_origin: str | None = None,
) -> FastAPI:
    app = FastAPI(title="copla", docs_url=None, redoc_url=None)

    if cors_origin:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware,
            allow_origins=[cors_origin],
            allow_methods=["*"],
            allow_headers=["*"],
        )

    app.add_exception_handler(CoplaError, lambda req, exc: _fail(exc))
    app.add_exception_handler(Exception, lambda req, exc: _fail(exc))

    def _doc(obj):
        return documents.to_document(obj)

    # -- status and catalog ----------------------------------------------------

    def status():
        try:
            executions = db.list_executions()
            db_state = "ok"
        except Exception as exc:
            executions, db_state = [], f"error: {exc}"
        ns_state = None
        if ns_endpoint is not None:
            try:
                with connect_nameserver(*ns_endpoint, timeout=3.0) as ns:
                    ns.query([])
                ns_state = True
            except Exception:
                ns_state = False
        return _ok(
            {
                "db": db_state,
                "nameserver": ns_state,
                "scheduler": {
                    "pending": sum(
                        1 for r in executions if r.status is ExecutionStatus.PENDING
                    ),
                    "running": sum(
                        1 for r in executions if r.status is ExecutionStatus.RUNNING
                    ),
                },
            }
        )

    def usecases():
        return _ok([_doc(r) for r in db.list_usecases()])

    def usecase(ID: str):
        return _ok(_doc(db.get_usecase(ID)))

    def usecase_workflows(ID: str):
        db.get_usecase(ID)  # 404 on unknown use case
        return _ok([_doc(r) for r in db.list_workflows(ID)])

    def workflow(ID: str):
        return _ok(_doc(db.get_workflow(ID)))

    # -- execution lifecycle -----------------------------------------------------

    def executions(workflow_id: str | None = None):
        records = db.list_executions(workflow_id)
        return _ok([_doc(r) for r in records])

    def init_execution(ID: str):
        return _ok({"weid": db.init_execution(ID)})

    def execution(WEID: str):
        return _ok(_doc(db.get_execution(WEID)))

    def execution_inputs(WEID: str):
        record = db.get_execution(WEID)
        template = db.get_workflow(record.workflow_id).input_card_template
        card = []
        for slot in template:
            state = record.inputs.get(slot.name)
            card.append(
                {
                    "name": slot.name,
                    "kind": slot.kind,
                    "unit": slot.unit,
                    "required": slot.required,
                    "default": slot.default,
                    "value": state.value if state else None,
                    "set": bool(state and state.set),
                }
            )
        return _ok(card)

    def execution_outputs(WEID: str):
        record = db.get_execution(WEID)
        return _ok({name: _doc(value) for name, value in record.outputs.items()})

    def execution_set(WEID: str, request: Request):
        pairs = list(request.query_params.multi_items())
        if not pairs:
            raise ParseError("expected a NAME=value query pair")
        for name, value in pairs:
            db.set_input(WEID, name, value)
        return _ok({"weid": WEID, "set": [name for name, _ in pairs]})

    def execution_get(WEID: str, request: Request):
        names = list(request.query_params.keys())
        if len(names) != 1:
            raise ParseError("expected exactly one output NAME in the query string")
        name = names[0]
        record = db.get_execution(WEID)
        if name in record.outputs:
            return _ok({"name": name, "value": _doc(record.outputs[name])})
        card = db.get_workflow(record.workflow_id).output_card_template
        if all(slot.name != name for slot in card):
            raise UnknownInput(f"{name!r} is not on the output card")
        raise NotFound(
            f"output {name!r} not available; execution is {record.status.value}"
        )

    def execute_workflow(WEID: str):
        db.schedule_execution(WEID)
        return _ok({"weid": WEID, "status": ExecutionStatus.PENDING.value})

    def demo_register():
        from .demos.catalog import USECASE_ID, _WORKFLOWS, register_demo_catalog

        register_demo_catalog(db)
        return _ok({"usecase": USECASE_ID, "workflows": [w.id for w in _WORKFLOWS]})

    # -- monitor -------------------------------------------------------------------

    def monitor_registry():
        if ns_endpoint is None:
            return _ok([])
        with connect_nameserver(*ns_endpoint, timeout=5.0) as ns:
            entries = ns.query([])
        return _ok([_doc(e) for e in entries])

    def monitor_jobs():
        if ns_endpoint is None:
            return _ok({})
        with connect_nameserver(*ns_endpoint, timeout=5.0) as ns:
            entries = ns.query([["Type", "JobManager"]])
        managers = {}
        for entry in entries:
            try:
                with rpc.proxy(entry.ref, timeout=5.0) as manager:
                    managers[entry.name] = [_doc(r) for r in manager.get_status()]
            except Exception as exc:
                managers[entry.name] = {"error": f"{type(exc).__name__}: {exc}"}
        return _ok(managers)

    # Bit-exact path table.  Order matters: init before the {WEID} route.
    get = ["GET"]
    both = ["GET", "POST"]
    app.add_api_route("/status", status, methods=get)
    app.add_api_route("/usecases", usecases, methods=get)
    app.add_api_route("/usecases/{ID}", usecase, methods=get)
    app.add_api_route("/usecases/{ID}/workflows", usecase_workflows, methods=get)
    app.add_api_route("/workflows/{ID}", workflow, methods=get)
    app.add_api_route("/workflowexecutions", executions, methods=get)
    app.add_api_route("/workflowexecutions/init/{ID}", init_execution, methods=both)
    app.add_api_route("/workflowexecutions/{WEID}", execution, methods=get)
    app.add_api_route("/workflowexecutions/{WEID}/inputs", execution_inputs, methods=get)
    app.add_api_route("/workflowexecutions/{WEID}/outputs", execution_outputs, methods=get)
    app.add_api_route("/workflowexecutions/{WEID}/set", execution_set, methods=both)
    app.add_api_route("/workflowexecutions/{WEID}/get", execution_get, methods=get)
    app.add_api_route("/executeworkflow/{WEID}", execute_workflow, methods=both)
    app.add_api_route("/monitor/registry", monitor_registry, methods=get)
    app.add_api_route("/monitor/jobs", monitor_jobs, methods=get)
    app.add_api_route("/demo/register", demo_register, methods=both)
    return app


@dataclass
class RestConfig:
    store_root: str
    bind: str = "127.0.0.1:8100"
    ns_endpoint: tuple[str, int] | None = None
    cors_origin: str | None = None
    parallelism: int = 1
    scheduler_interval: float = 0.25
    run_scheduler: bool = True
    local_factories: dict | None = None


class RestService:
    """Uvicorn server plus a scheduler thread over one execution database."""

    def __init__(self, config: RestConfig):
        bind = os.environ.get("COPLA_REST_BIND", config.bind)
        host, _, port = bind.partition(":")
        self.host, self.port = host or "127.0.0.1", int(port or 8100)
        self.config = config
        self.store = DocumentStore(config.store_root)
        self.db = ExecDB(self.store)
        recovered = self.db.recover_interrupted()
        if recovered:
            self.recovered = recovered
        factories = config.local_factories
        if factories is None:
            from .demos.models import LOCAL_FACTORIES

            factories = LOCAL_FACTORIES
        self.scheduler = Scheduler(
            self.db,
            parallelism=config.parallelism,
            ns_endpoint=config.ns_endpoint,
            local_factories=factories,
        )
        self.app = create_app(self.db, config.ns_endpoint, config.cors_origin)
        self._stop = threading.Event()
        self._threads: list[threading.Thread] = []
        self._server: uvicorn.Server | None = None

    @property
    def url(self) -> str:
        return f"http://{self.host}:{self.port}"

    def start(self):
        """Run the HTTP server and scheduler on background threads."""
        uv_config = uvicorn.Config(
            self.app, host=self.host, port=self.port, log_level="warning"
        )
        self._server = uvicorn.Server(uv_config)
        server_thread = threading.Thread(target=self._server.run, daemon=True)
        server_thread.start()
        self._threads.append(server_thread)
        if self.config.run_scheduler:
            sched_thread = threading.Thread(
                target=self.scheduler.run_forever,
                args=(self._stop, self.config.scheduler_interval),
                daemon=True,
            )
            sched_thread.start()
            self._threads.append(sched_thread)
        deadline = time.time() + 15.0
        while not self._server.started:
            if time.time() > deadline or not server_thread.is_alive():
                raise BindFailure(f"HTTP server failed to start on {self.url}")
            time.sleep(0.02)
        if self.port == 0:  # ephemeral bind: recover the real port
            sockets = self._server.servers[0].sockets
            self.port = sockets[0].getsockname()[1]

    def stop(self):
        self._stop.set()
        if self._server is not None:
            self._server.should_exit = True
        for thread in self._threads:
            thread.join(timeout=10.0)

    def serve_forever(self):
        """Blocking entry point used by the command line."""
        if self.config.run_scheduler:
            sched_thread = threading.Thread(
                target=self.scheduler.run_forever,
                args=(self._stop, self.config.scheduler_interval),
                daemon=True,
            )
            sched_thread.start()
        uv_config = uvicorn.Config(
            self.app, host=self.host, port=self.port, log_level="info"
        )
        self._server = uvicorn.Server(uv_config)
        try:
            self._server.run()
        finally:
            self._stop.set()
        if not self._server.started:
            raise BindFailure(f"could not bind {self.url}")
