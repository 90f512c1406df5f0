#!/usr/bin/env python3
"""End-to-end platform demo on one machine.

Starts a nameserver, job managers for the thermal and mechanical models and
the REST service, then drives two workflow executions over plain HTTP the way
any external client would.  The thermo-mechanical chain lands on remote jobs;
the buckling chain has no advertised manager and falls back to in-process
instances, so both allocation paths of the scheduler are on display.

    python3 scripts/run_platform_demo.py [--keep] [--store DIR]
"""

import argparse
import json
import tempfile
import time

import httpx

from copla.demos.catalog import BUCKLING_CHAIN_ID, THERMO_MECH_ID, register_demo_catalog
from copla.demos.models import MODEL_FACTORIES
from copla.jobman import JobManager, JobManagerConfig, serve_jobman
from copla.nameserver import serve_nameserver
from copla.rest import RestConfig, RestService

THERMO_CARD = {
    "PID_T0": "0 K",
    "PID_T1": "10 K",
    "PID_Length": "1 m",
    "PID_Alpha": "1e-5 1/K",
}

BUCKLING_CARD = {
    "PID_VolumeFraction": "0.55 1",
    "PID_FiberModulus": "40 GPa",
    "PID_MatrixModulus": "3.5 GPa",
    "PID_LayerAngle": "0 rad",
    "PID_LayerThickness": "1.25e-4 m",
    "PID_LayerCount": "8 1",
    "PID_MatrixPoisson": "0.35 1",
    "PID_PanelLength": "0.5 m",
    "PID_PanelWidth": "0.05 m",
}


def run_execution(base: str, workflow_id: str, card: dict) -> dict:
    """Submit one execution through the public API and poll it to completion."""

    def get(path, **params):
        body = httpx.get(base + path, params=params or None, timeout=30.0).json()
        if not body.get("ok"):
            raise SystemExit(f"{path}: {body.get('error')}")
        return body["data"]

    weid = get(f"/workflowexecutions/init/{workflow_id}")["weid"]
    print(f"  {workflow_id}: created {weid}")
    for name, value in card.items():
        get(f"/workflowexecutions/{weid}/set", **{name: value})
    get(f"/executeworkflow/{weid}")
    while True:
        record = get(f"/workflowexecutions/{weid}")
        if record["status"] in ("Finished", "Failed"):
            break
        time.sleep(0.1)
    if record["status"] != "Finished":
        raise SystemExit(f"  {weid} failed: {record.get('error')}")
    outputs = get(f"/workflowexecutions/{weid}/outputs")
    for name, doc in outputs.items():
        if doc.get("_class") == "Property":
            print(f"  {name} = {doc['value']} {doc['unit']['symbol']}")
        else:
            print(f"  {name}: field on {len(doc['values'])} vertices")
    return outputs


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--store", default=None, help="document store root (default: temp dir)")
    parser.add_argument("--keep", action="store_true", help="keep serving after the demo runs")
    args = parser.parse_args()

    store_root = args.store or tempfile.mkdtemp(prefix="copla-demo-")
    workdir = tempfile.mkdtemp(prefix="copla-jobs-")

    ns_server, ns_ref = serve_nameserver("127.0.0.1", 0)
    print(f"nameserver: {ns_ref.uri}")

    managers = []
    for model in ("thermal", "mechanical"):
        manager = JobManager(
            JobManagerConfig(model, MODEL_FACTORIES[model], max_jobs=2, workdir_root=workdir)
        )
        server, ref = serve_jobman(manager)
        manager.register_with_nameserver(ns_ref.host, ns_ref.port, f"jobman.{model}")
        managers.append((manager, server))
        print(f"jobman.{model}: {ref.uri}")

    service = RestService(
        RestConfig(
            store_root=store_root,
            bind="127.0.0.1:0",
            ns_endpoint=(ns_ref.host, ns_ref.port),
        )
    )
    register_demo_catalog(service.db)
    service.start()
    print(f"rest: {service.url}\n")

    try:
        print("thermo-mechanical chain (remote jobs):")
        run_execution(service.url, THERMO_MECH_ID, THERMO_CARD)

        print("\ncomposite buckling chain (local fallback):")
        run_execution(service.url, BUCKLING_CHAIN_ID, BUCKLING_CARD)

        registry = httpx.get(service.url + "/monitor/registry", timeout=10.0).json()["data"]
        print("\nregistry:")
        for entry in registry:
            meta = entry["metadata"]
            if isinstance(meta, dict) and meta.get("_class") == "Metadata":
                meta = meta["data"]
            print(f"  {entry['name']}: {json.dumps(meta)}")
        jobs = httpx.get(service.url + "/monitor/jobs", timeout=10.0).json()["data"]
        print("jobs:")
        for name, records in jobs.items():
            states = [r["status"] for r in records]
            print(f"  {name}: {len(records)} jobs {states}")

        if args.keep:
            print(f"\nserving on {service.url} until Ctrl+C")
            while True:
                time.sleep(1.0)
    except KeyboardInterrupt:
        pass
    finally:
        service.stop()
        for manager, server in managers:
            manager.close()
            server.close()
        ns_server.close()
    print("\ndone.")


if __name__ == "__main__":
    main()
