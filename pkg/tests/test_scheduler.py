"""Scheduler: FIFO claims, failure handling, resource release."""

import threading
import time

import pytest

from copla.data import Property
from copla.demos.models import RelaxationModel
from copla.errors import CapacityExceeded, NotFound
from copla.execdb import (
    FIELD_REF,
    PROPERTY,
    SCALAR,
    ExecutionStatus,
    InputSlot,
    OutputSlot,
    UseCaseRecord,
    WorkflowRecord,
)
from copla.jobman import JobManager, JobManagerConfig, JobStatus, serve_jobman
from copla.model import ModelStatus
from copla.nameserver import serve_nameserver
from copla.scheduler import (
    PlatformContext,
    Scheduler,
    implementation,
    register_implementation,
)
from copla.units import unit

RELAX = "copla.demos.models:RelaxationModel"


def register_workflow(db, impl_key, inputs=(), outputs=()):
    db.put_usecase(UseCaseRecord("UC-s", "scheduler tests"))
    db.put_workflow(
        WorkflowRecord(
            id="wf-" + impl_key,
            usecase_id="UC-s",
            name=impl_key,
            version=1,
            input_card_template=tuple(inputs),
            output_card_template=tuple(outputs),
            implementation_key=impl_key,
        )
    )
    return "wf-" + impl_key


def pending_execution(db, workflow_id, values=()):
    weid = db.init_execution(workflow_id)
    for name, value in values:
        db.set_input(weid, name, value)
    db.schedule_execution(weid)
    return weid


def test_implementation_registry():
    fn = lambda inputs, ctx: {}
    register_implementation("test.sched.registry", fn)
    assert implementation("test.sched.registry") is fn
    with pytest.raises(NotFound):
        implementation("test.sched.ghost")


def test_parallelism_positive():
    with pytest.raises(ValueError):
        Scheduler(db=None, parallelism=0)


def test_fifo_one_at_a_time(db):
    order = []
    register_implementation("test.sched.fifo", lambda inputs, ctx: order.append(1) or {})
    wf = register_workflow(db, "test.sched.fifo")
    first = pending_execution(db, wf)
    time.sleep(0.002)
    second = pending_execution(db, wf)
    time.sleep(0.002)
    third = pending_execution(db, wf)

    sched = Scheduler(db, parallelism=1)
    assert sched.tick() == [first]
    assert db.get_execution(first).status is ExecutionStatus.FINISHED
    assert db.get_execution(second).status is ExecutionStatus.PENDING

    assert sched.tick() == [second]
    assert sched.tick() == [third]
    assert sched.tick() == []  # nothing left
    assert len(order) == 3


def test_parallelism_bounds_one_tick(db):
    register_implementation("test.sched.par", lambda inputs, ctx: {})
    wf = register_workflow(db, "test.sched.par")
    weids = [pending_execution(db, wf) for _ in range(5)]

    sched = Scheduler(db, parallelism=3)
    assert sched.tick() == weids[:3]
    assert sched.tick() == weids[3:]


def test_racing_schedulers_never_run_twice(db):
    calls = []
    lock = threading.Lock()

    def impl(inputs, ctx):
        with lock:
            calls.append(threading.get_ident())
        return {}

    register_implementation("test.sched.race", impl)
    wf = register_workflow(db, "test.sched.race")
    weids = {pending_execution(db, wf) for _ in range(6)}

    schedulers = [Scheduler(db, parallelism=2) for _ in range(3)]

    def storm(sched):
        for _ in range(6):
            sched.tick()

    threads = [threading.Thread(target=storm, args=(s,)) for s in schedulers]
    for t in threads:
        t.start()
    for t in threads:
        t.join()

    assert len(calls) == 6  # each execution ran exactly once
    assert all(db.get_execution(w).status is ExecutionStatus.FINISHED for w in weids)


def test_inputs_arrive_parsed_by_kind(db):
    seen = {}

    def impl(inputs, ctx):
        seen.update(inputs)
        return {}

    register_implementation("test.sched.kinds", impl)
    wf = register_workflow(
        db,
        "test.sched.kinds",
        inputs=(
            InputSlot("N", SCALAR, "1", required=True),
            InputSlot("T", PROPERTY, "K", required=True),
            InputSlot("F", FIELD_REF, "K"),
            InputSlot("Skip", SCALAR, "1"),  # left unset
        ),
    )
    weid = pending_execution(
        db, wf, [("N", "40"), ("T", "300 K"), ("F", "fields/a.json")]
    )
    Scheduler(db, parallelism=1).tick()

    assert db.get_execution(weid).status is ExecutionStatus.FINISHED
    assert seen == {
        "N": 40.0,
        "T": Property(300.0, unit("K"), "T"),
        "F": "fields/a.json",
    }


def test_outputs_filtered_to_declared_card(db):
    elongation = Property(5.0e-5, unit("m"), "Elongation")

    def impl(inputs, ctx):
        return {"Elongation": elongation, "Debug": 123}

    register_implementation("test.sched.filter", impl)
    wf = register_workflow(
        db, "test.sched.filter", outputs=(OutputSlot("Elongation", PROPERTY, "m"),)
    )
    weid = pending_execution(db, wf)
    Scheduler(db, parallelism=1).tick()

    record = db.get_execution(weid)
    assert record.status is ExecutionStatus.FINISHED
    assert record.outputs == {"Elongation": elongation}
    assert record.started_at <= record.finished_at


def test_failure_is_recorded_with_diagnostic(db):
    def impl(inputs, ctx):
        raise ValueError("kaboom")

    register_implementation("test.sched.fail", impl)
    wf = register_workflow(db, "test.sched.fail")
    weid = pending_execution(db, wf)
    assert Scheduler(db, parallelism=1).tick() == [weid]

    record = db.get_execution(weid)
    assert record.status is ExecutionStatus.FAILED
    assert record.error == "ValueError: kaboom"
    assert record.outputs == {}


def test_failed_claims_are_not_retried(db):
    register_implementation("test.sched.once", lambda i, c: 1 / 0)
    wf = register_workflow(db, "test.sched.once")
    weid = pending_execution(db, wf)
    sched = Scheduler(db, parallelism=1)
    assert sched.tick() == [weid]
    assert sched.tick() == []  # Failed is terminal, no retry
    assert db.get_execution(weid).status is ExecutionStatus.FAILED


def test_run_forever_drains_the_queue(db):
    register_implementation("test.sched.loop", lambda inputs, ctx: {})
    wf = register_workflow(db, "test.sched.loop")
    stop = threading.Event()
    sched = Scheduler(db, parallelism=2)
    thread = threading.Thread(target=sched.run_forever, args=(stop, 0.02), daemon=True)
    thread.start()
    try:
        weid = pending_execution(db, wf)
        deadline = time.time() + 5.0
        while time.time() < deadline:
            if db.get_execution(weid).status is ExecutionStatus.FINISHED:
                break
            time.sleep(0.02)
        assert db.get_execution(weid).status is ExecutionStatus.FINISHED
    finally:
        stop.set()
        thread.join(timeout=5.0)


# -- platform context --------------------------------------------------------------


def test_context_local_fallback():
    ctx = PlatformContext(local_factories={"relax": RelaxationModel})
    model = ctx.allocate("relax")
    assert model.get_status() is ModelStatus.INITIALIZED
    with pytest.raises(NotFound):
        ctx.allocate("nonesuch")
    ctx.release_all()


def test_context_prefers_job_managers(tmp_path):
    ns_server, ns_ref = serve_nameserver()
    jm = JobManager(
        JobManagerConfig(
            model_name="relax", factory=RELAX, max_jobs=1, workdir_root=str(tmp_path)
        )
    )
    jm_server, _ = serve_jobman(jm)
    try:
        jm.register_with_nameserver(ns_ref.host, ns_ref.port, "relax-pool")
        ctx = PlatformContext(ns_endpoint=(ns_ref.host, ns_ref.port))

        instance = ctx.allocate("relax")
        assert instance.get_status() is ModelStatus.INITIALIZED
        (record,) = jm.get_status()
        assert record.status is JobStatus.RUNNING
        assert record.user == "scheduler"

        ctx.release_all()
        (record,) = jm.get_status()
        assert record.status is JobStatus.TERMINATED
    finally:
        jm.close()
        jm_server.close()
        ns_server.close()


def test_context_surfaces_capacity_exhaustion(tmp_path):
    ns_server, ns_ref = serve_nameserver()
    jm = JobManager(
        JobManagerConfig(
            model_name="relax", factory=RELAX, max_jobs=1, workdir_root=str(tmp_path)
        )
    )
    jm_server, _ = serve_jobman(jm)
    try:
        jm.register_with_nameserver(ns_ref.host, ns_ref.port, "relax-pool")
        jm.allocate_job()  # fill the only slot

        ctx = PlatformContext(
            ns_endpoint=(ns_ref.host, ns_ref.port),
            local_factories={"relax": RelaxationModel},
        )
        # managers advertise the model but are full: the capacity signal
        # surfaces instead of silently shadow-running locally
        with pytest.raises(CapacityExceeded):
            ctx.allocate("relax")
    finally:
        jm.close()
        jm_server.close()
        ns_server.close()


def test_context_falls_back_when_nobody_advertises(tmp_path):
    ns_server, ns_ref = serve_nameserver()
    try:
        ctx = PlatformContext(
            ns_endpoint=(ns_ref.host, ns_ref.port),
            local_factories={"relax": RelaxationModel},
        )
        model = ctx.allocate("relax")
        assert model.get_status() is ModelStatus.INITIALIZED
        ctx.release_all()
    finally:
        ns_server.close()
