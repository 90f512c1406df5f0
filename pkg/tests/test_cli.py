"""Command line: a thin REST client plus service launchers.

The client commands are tested by intercepting the HTTP conversation: every
request the CLI makes is recorded and routed into the in-process app, so the
assertions pin both the exact endpoints hit and the absence of any
client-side business logic.  Service launchers run as real subprocesses.
"""

import json
import os
import signal
import socket
import subprocess
import sys
import time

import httpx
import pytest
from click.testing import CliRunner
from fastapi.testclient import TestClient

from copla import documents
from copla.cli import main
from copla.demos.catalog import THERMO_MECH_ID, USECASE_ID, register_demo_catalog
from copla.demos.models import LOCAL_FACTORIES
from copla.execdb import ExecutionStatus
from copla.nameserver import connect
from copla.rest import create_app
from copla.scheduler import Scheduler

THERMO_ARGS = [
    "--in", "PID_T0=0 K",
    "--in", "PID_T1=10 K",
    "--in", "PID_Length=1 m",
    "--in", "PID_Alpha=1e-5 1/K",
]

BASE = "http://cli.test"


@pytest.fixture
def rig(db, monkeypatch):
    """CliRunner wired so httpx.get lands in an in-process app, recorded."""
    register_demo_catalog(db)
    web = TestClient(create_app(db), raise_server_exceptions=False)
    calls = []

    def fake_get(url, params=None, timeout=None):
        assert url.startswith(BASE), f"unexpected host in {url!r}"
        calls.append((url[len(BASE):], dict(params or {})))
        return web.get(url[len(BASE):], params=params)

    monkeypatch.setattr(httpx, "get", fake_get)
    monkeypatch.setenv("COPLA_REST_URL", BASE)
    sched = Scheduler(db, parallelism=1, local_factories=LOCAL_FACTORIES)
    return CliRunner(), calls, sched, db


def submit(runner, args=THERMO_ARGS, workflow=THERMO_MECH_ID):
    result = runner.invoke(main, ["exec", "submit", workflow, *args])
    assert result.exit_code == 0, result.output + result.stderr
    return json.loads(result.stdout)["weid"]


# -- thin client: the recorded conversation is the whole behavior -------------------


def test_submit_conversation_is_init_set_execute(rig):
    runner, calls, _, db = rig
    weid = submit(runner)

    assert calls == [
        (f"/workflowexecutions/init/{THERMO_MECH_ID}", {}),
        (f"/workflowexecutions/{weid}/set", {"PID_T0": "0 K"}),
        (f"/workflowexecutions/{weid}/set", {"PID_T1": "10 K"}),
        (f"/workflowexecutions/{weid}/set", {"PID_Length": "1 m"}),
        (f"/workflowexecutions/{weid}/set", {"PID_Alpha": "1e-5 1/K"}),
        (f"/executeworkflow/{weid}", {}),
    ]
    assert db.get_execution(weid).status is ExecutionStatus.PENDING


def test_submit_reports_missing_inputs_by_name(rig):
    runner, _, _, _ = rig
    result = runner.invoke(
        main, ["exec", "submit", THERMO_MECH_ID, "--in", "PID_T0=0 K"]
    )
    assert result.exit_code == 3
    assert "MissingInput" in result.stderr
    for name in ("PID_Alpha", "PID_Length", "PID_T1"):
        assert name in result.stderr


def test_submit_rejects_malformed_input_pair(rig):
    runner, calls, _, _ = rig
    result = runner.invoke(main, ["exec", "submit", THERMO_MECH_ID, "--in", "PID_T0"])
    assert result.exit_code == 2  # usage error, before any request
    assert calls == []


def test_submit_unknown_workflow_exits_remote(rig):
    runner, _, _, _ = rig
    result = runner.invoke(main, ["exec", "submit", "W_ghost"])
    assert result.exit_code == 3
    assert "UnknownWorkflow" in result.stderr


def test_status_and_outputs_single_requests(rig):
    runner, calls, sched, _ = rig
    weid = submit(runner)
    sched.tick()
    calls.clear()

    result = runner.invoke(main, ["exec", "status", weid])
    assert result.exit_code == 0
    assert calls == [(f"/workflowexecutions/{weid}", {})]
    assert json.loads(result.stdout) == {
        "weid": weid,
        "status": "Finished",
        "error": None,
    }

    calls.clear()
    result = runner.invoke(main, ["exec", "outputs", weid])
    assert result.exit_code == 0
    assert calls == [(f"/workflowexecutions/{weid}/outputs", {})]
    outputs = json.loads(result.stdout)
    elongation = documents.from_document(outputs["PID_Elongation"])
    assert elongation.value == pytest.approx(5.0e-5, rel=1e-12)


def test_status_unknown_weid_exits_remote(rig):
    runner, _, _, _ = rig
    result = runner.invoke(main, ["exec", "status", "we-ghost"])
    assert result.exit_code == 3
    assert "NotFound" in result.stderr


def test_watch_returns_once_settled(rig):
    runner, _, sched, _ = rig
    weid = submit(runner)
    sched.tick()
    result = runner.invoke(main, ["exec", "status", weid, "--watch", "--timeout", "5"])
    assert result.exit_code == 0
    assert json.loads(result.stdout)["status"] == "Finished"


def test_watch_times_out_while_pending(rig):
    runner, _, _, _ = rig
    weid = submit(runner)  # never ticked: stays Pending
    result = runner.invoke(
        main, ["exec", "status", weid, "--watch", "--timeout", "0.01"]
    )
    assert result.exit_code == 4
    assert "still Pending" in result.stderr


def test_demo_register_round_trip(rig):
    runner, calls, _, _ = rig
    result = runner.invoke(main, ["demo", "register"])
    assert result.exit_code == 0
    assert calls == [("/demo/register", {})]
    data = json.loads(result.stdout)
    assert data["usecase"] == USECASE_ID

    again = runner.invoke(main, ["demo", "register"])  # idempotent
    assert again.exit_code == 0
    assert json.loads(again.stdout) == data


def test_rest_flag_overrides_environment(rig, monkeypatch):
    runner, calls, _, _ = rig
    monkeypatch.setenv("COPLA_REST_URL", "http://wrong.example")
    result = runner.invoke(main, ["demo", "register", "--rest", BASE])
    assert result.exit_code == 0
    assert calls  # conversation went to BASE, not the env host


def test_timeout_maps_to_exit_4(rig, monkeypatch):
    runner, _, _, _ = rig

    def too_slow(url, params=None, timeout=None):
        raise httpx.TimeoutException("simulated stall")

    monkeypatch.setattr(httpx, "get", too_slow)
    result = runner.invoke(main, ["exec", "status", "we-x"])
    assert result.exit_code == 4
    assert "timed out" in result.stderr


def test_unreachable_host_maps_to_exit_3(rig, monkeypatch):
    runner, _, _, _ = rig

    def refused(url, params=None, timeout=None):
        raise httpx.ConnectError("connection refused")

    monkeypatch.setattr(httpx, "get", refused)
    result = runner.invoke(main, ["exec", "status", "we-x"])
    assert result.exit_code == 3
    assert "cannot reach" in result.stderr


def test_non_json_body_maps_to_exit_3(rig, monkeypatch):
    runner, _, _, _ = rig

    def html(url, params=None, timeout=None):
        return httpx.Response(200, text="<html>proxy error</html>")

    monkeypatch.setattr(httpx, "get", html)
    result = runner.invoke(main, ["exec", "status", "we-x"])
    assert result.exit_code == 3
    assert "non-JSON" in result.stderr


def test_jobman_unknown_model_is_usage_error():
    result = CliRunner().invoke(
        main, ["jobman", "--model", "warpdrive", "--ns", "127.0.0.1:1"]
    )
    assert result.exit_code == 2
    assert "unknown model" in result.stderr


def test_bad_bind_is_usage_error():
    result = CliRunner().invoke(main, ["nameserver", "--bind", "nonsense"])
    assert result.exit_code == 2
    assert "HOST:PORT" in result.stderr


# -- subprocess integration -----------------------------------------------------------


def free_port() -> int:
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


def read_json_blob(stream, deadline=20.0) -> dict:
    """Collect the indented JSON object a service prints on startup."""
    lines = []
    end = time.time() + deadline
    while time.time() < end:
        line = stream.readline()
        if not line:
            time.sleep(0.02)
            continue
        lines.append(line)
        try:
            return json.loads("".join(lines))
        except ValueError:
            continue
    raise AssertionError(f"no startup JSON within {deadline}s: {lines!r}")


def spawn(args):
    return subprocess.Popen(
        [sys.executable, "-m", "copla", *args],
        stdout=subprocess.PIPE,
        stderr=subprocess.DEVNULL,
        text=True,
    )


def stop(proc):
    if proc.poll() is None:
        proc.send_signal(signal.SIGINT)
        try:
            proc.wait(timeout=5.0)
        except subprocess.TimeoutExpired:
            proc.kill()
            proc.wait(timeout=5.0)


def run_cli(args, env_extra=None, timeout=60):
    env = dict(os.environ, **(env_extra or {}))
    return subprocess.run(
        [sys.executable, "-m", "copla", *args],
        capture_output=True,
        text=True,
        timeout=timeout,
        env=env,
    )


def test_rest_service_end_to_end(tmp_path):
    port = free_port()
    service = spawn(
        ["rest", "--bind", f"127.0.0.1:{port}", "--store", str(tmp_path / "store"),
         "--register-demos"]
    )
    try:
        banner = read_json_blob(service.stdout)
        url = banner["rest"]
        assert url == f"http://127.0.0.1:{port}"

        # wait for the socket to accept
        deadline = time.time() + 20.0
        while time.time() < deadline:
            try:
                httpx.get(url + "/status", timeout=2.0)
                break
            except httpx.HTTPError:
                time.sleep(0.05)

        env = {"COPLA_REST_URL": url}
        submitted = run_cli(
            ["exec", "submit", THERMO_MECH_ID, *THERMO_ARGS], env_extra=env
        )
        assert submitted.returncode == 0, submitted.stderr
        weid = json.loads(submitted.stdout)["weid"]

        settled = run_cli(
            ["exec", "status", weid, "--watch", "--timeout", "30"], env_extra=env
        )
        assert settled.returncode == 0, settled.stderr
        assert json.loads(settled.stdout)["status"] == "Finished"

        outputs = run_cli(["exec", "outputs", weid], env_extra=env)
        assert outputs.returncode == 0
        elongation = documents.from_document(
            json.loads(outputs.stdout)["PID_Elongation"]
        )
        assert elongation.value == pytest.approx(5.0e-5, rel=1e-12)
    finally:
        stop(service)


def test_nameserver_and_jobman_services(tmp_path):
    ns_port = free_port()
    ns_proc = spawn(["nameserver", "--bind", f"127.0.0.1:{ns_port}"])
    jm_proc = None
    try:
        banner = read_json_blob(ns_proc.stdout)
        assert banner["nameserver"] == f"127.0.0.1:{ns_port}"
        assert banner["uri"].startswith("copla://")

        jm_proc = spawn(
            ["jobman", "--model", "thermal", "--max-jobs", "2",
             "--ns", f"127.0.0.1:{ns_port}", "--workdir", str(tmp_path)]
        )
        jm_banner = read_json_blob(jm_proc.stdout)
        assert jm_banner["jobman"] == "jobman.thermal"

        with connect("127.0.0.1", ns_port) as ns:
            entry = ns.lookup("jobman.thermal")
            assert entry.metadata.get("Model") == "thermal"
            assert entry.metadata.get("MaxJobs") == 2
    finally:
        if jm_proc is not None:
            stop(jm_proc)
        stop(ns_proc)
