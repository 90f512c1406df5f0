"""Operator command line: service launchers and a thin REST client.

Exit codes: 0 ok, 2 usage (click), 3 remote or service error, 4 timeout.
JSON goes to stdout, logs and errors to stderr.
"""

from __future__ import annotations

import json
import logging
import sys
import threading
import time

import click
import httpx

from .errors import BindFailure, ConnectionLost, CoplaError

log = logging.getLogger("copla")

EXIT_REMOTE = 3
EXIT_TIMEOUT = 4


def _emit(data) -> None:
    click.echo(json.dumps(data, indent=2, sort_keys=True))


def _die(message: str, code: int = EXIT_REMOTE):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _parse_bind(bind: str) -> tuple[str, int]:
    host, _, port = bind.partition(":")
    if not port.isdigit():
        raise click.UsageError(f"--bind must look like HOST:PORT, got {bind!r}")
    return host or "127.0.0.1", int(port)


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Debug logging on stderr.")
def main(verbose: bool):
    """Co-simulation platform services and client."""
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
    )
    if not verbose:  # keep request-per-line noise out of scripts
        logging.getLogger("httpx").setLevel(logging.WARNING)


# -- services -------------------------------------------------------------------


@main.command()
@click.option("--bind", default="127.0.0.1:9090", show_default=True, help="HOST:PORT.")
def nameserver(bind: str):
    """Run the object registry."""
    from .nameserver import serve_nameserver

    host, port = _parse_bind(bind)
    try:
        server, ref = serve_nameserver(host, port)
    except BindFailure as exc:
        _die(str(exc))
    _emit({"nameserver": f"{ref.host}:{ref.port}", "uri": ref.uri})
    sys.stdout.flush()
    log.info("nameserver listening on %s:%s", ref.host, ref.port)
    try:
        threading.Event().wait()
    except KeyboardInterrupt:
        server.close()


@main.command()
@click.option("--model", required=True, help="Demo model name (thermal, micro, ...).")
@click.option("--max-jobs", default=4, show_default=True, type=int)
@click.option("--ns", required=True, help="Nameserver HOST:PORT.")
@click.option("--bind", default="127.0.0.1:0", show_default=True, help="HOST:PORT.")
@click.option("--name", default=None, help="Registry name (default jobman.MODEL).")
@click.option("--workdir", default=None, type=click.Path(), help="Job workdir root.")
def jobman(model: str, max_jobs: int, ns: str, bind: str, name: str | None, workdir):
    """Run a job manager spawning instances of one demo model."""
    from .demos.models import MODEL_FACTORIES
    from .jobman import JobManager, JobManagerConfig, serve_jobman

    factory = MODEL_FACTORIES.get(model)
    if factory is None:
        raise click.UsageError(
            f"unknown model {model!r}; pick one of {', '.join(sorted(MODEL_FACTORIES))}"
        )
    host, port = _parse_bind(bind)
    ns_host, ns_port = _parse_bind(ns)
    name = name or f"jobman.{model}"
    manager = JobManager(
        JobManagerConfig(model, factory, max_jobs=max_jobs, workdir_root=workdir)
    )
    try:
        server, ref = serve_jobman(manager, host, port)
    except BindFailure as exc:
        _die(str(exc))
    try:
        manager.register_with_nameserver(ns_host, ns_port, name)
    except (ConnectionLost, CoplaError) as exc:
        server.close()
        _die(f"cannot register on nameserver {ns}: {exc}")
    _emit({"jobman": name, "endpoint": f"{ref.host}:{ref.port}", "uri": ref.uri})
    sys.stdout.flush()
    log.info("jobman %s serving %s (max_jobs=%d)", name, model, max_jobs)
    try:
        while True:
            time.sleep(5.0)
            try:
                from .nameserver import connect

                with connect(ns_host, ns_port) as registry:
                    registry.heartbeat(name)
            except Exception as exc:
                log.warning("heartbeat failed: %s", exc)
    except KeyboardInterrupt:
        manager.close()
        server.close()


@main.command()
@click.option("--bind", default="127.0.0.1:8100", show_default=True, help="HOST:PORT.")
@click.option("--store", required=True, type=click.Path(), help="Document store root.")
@click.option("--ns", default=None, help="Nameserver HOST:PORT (optional).")
@click.option("--cors", default=None, help="Allowed CORS origin for the dashboard.")
@click.option("--parallelism", default=1, show_default=True, type=int)
@click.option("--register-demos", is_flag=True, help="Register the demo catalog on start.")
def rest(bind, store, ns, cors, parallelism, register_demos):
    """Run the REST API with its scheduler."""
    from .rest import RestConfig, RestService

    ns_endpoint = _parse_bind(ns) if ns else None
    try:
        service = RestService(
            RestConfig(
                store_root=store,
                bind=bind,
                ns_endpoint=ns_endpoint,
                cors_origin=cors,
                parallelism=parallelism,
            )
        )
    except CoplaError as exc:
        _die(str(exc))
    if register_demos:
        from .demos.catalog import register_demo_catalog

        register_demo_catalog(service.db)
        log.info("demo catalog registered")
    _emit({"rest": service.url, "store": store})
    sys.stdout.flush()
    try:
        service.serve_forever()
    except BindFailure as exc:
        _die(str(exc))


# -- REST client ------------------------------------------------------------------


_REST_OPTION = click.option(
    "--rest",
    "rest_url",
    envvar="COPLA_REST_URL",
    default="http://127.0.0.1:8100",
    show_default=True,
    help="REST API base URL (env COPLA_REST_URL).",
)


def _request(rest_url: str, path: str, params=None):
    """GET an envelope; returns data or exits with the mapped code."""
    try:
        response = httpx.get(rest_url.rstrip("/") + path, params=params, timeout=30.0)
    except httpx.TimeoutException:
        _die(f"request to {path} timed out", EXIT_TIMEOUT)
    except httpx.HTTPError as exc:
        _die(f"cannot reach {rest_url}: {exc}")
    try:
        body = response.json()
    except ValueError:
        _die(f"{path}: non-JSON response (HTTP {response.status_code})")
    if not body.get("ok"):
        error = body.get("error", {})
        _die(f"{path}: {error.get('type', 'Error')}: {error.get('msg', '')}")
    return body["data"]


@main.group()
def demo():
    """Demo catalog operations."""


@demo.command("register")
@_REST_OPTION
def demo_register(rest_url: str):
    """Register the demo use case and workflows via the API."""
    _emit(_request(rest_url, "/demo/register"))


@main.group("exec")
def exec_group():
    """Submit and inspect workflow executions."""


@exec_group.command("submit")
@click.argument("workflow_id")
@click.option("--in", "inputs", multiple=True, help="NAME=VALUE, repeatable.")
@_REST_OPTION
def exec_submit(workflow_id: str, inputs: tuple[str, ...], rest_url: str):
    """Create an execution, set inputs, schedule it; prints the WEID."""
    pairs = []
    for item in inputs:
        name, sep, value = item.partition("=")
        if not sep or not name:
            raise click.UsageError(f"--in expects NAME=VALUE, got {item!r}")
        pairs.append((name, value))
    weid = _request(rest_url, f"/workflowexecutions/init/{workflow_id}")["weid"]
    for name, value in pairs:
        _request(rest_url, f"/workflowexecutions/{weid}/set", params={name: value})
    _request(rest_url, f"/executeworkflow/{weid}")
    _emit({"weid": weid, "status": "Pending"})


@exec_group.command("status")
@click.argument("weid")
@click.option("--watch", is_flag=True, help="Poll once per second until settled.")
@click.option("--timeout", default=0.0, show_default=True, help="Watch limit in s (0: none).")
@_REST_OPTION
def exec_status(weid: str, watch: bool, timeout: float, rest_url: str):
    """Show an execution's status (optionally waiting for completion)."""
    deadline = time.time() + timeout if timeout > 0 else None
    while True:
        record = _request(rest_url, f"/workflowexecutions/{weid}")
        status = record.get("status")
        if not watch or status in ("Finished", "Failed"):
            _emit({"weid": weid, "status": status, "error": record.get("error")})
            return
        log.info("%s is %s", weid, status)
        if deadline is not None and time.time() > deadline:
            _die(f"{weid} still {status} after {timeout}s", EXIT_TIMEOUT)
        time.sleep(1.0)


@exec_group.command("outputs")
@click.argument("weid")
@_REST_OPTION
def exec_outputs(weid: str, rest_url: str):
    """Print the output card as JSON."""
    _emit(_request(rest_url, f"/workflowexecutions/{weid}/outputs"))


if __name__ == "__main__":
    main()
