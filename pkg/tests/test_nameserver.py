"""Registry semantics: upsert, query filters, heartbeats and pruning."""

import time

import pytest

from copla import documents
from copla.errors import InvalidName, NotFound
from copla.metadata import Metadata
from copla.nameserver import Nameserver, RegistryEntry, connect, serve_nameserver
from copla.rpc import RemoteRef


def ref(port, objid="obj"):
    return RemoteRef("127.0.0.1", port, objid)


@pytest.fixture
def ns():
    return Nameserver()


def test_register_lookup_round_trip(ns):
    ns.register("thermal", ref(9001), {"Type": "JobManager"})
    entry = ns.lookup("thermal")
    assert entry.name == "thermal"
    assert entry.ref == ref(9001)
    assert entry.metadata.get("Type") == "JobManager"
    assert entry.registered_at <= entry.last_heartbeat


def test_register_accepts_uri_string(ns):
    ns.register("svc", "copla://127.0.0.1:9002/mgr")
    assert ns.lookup("svc").ref == RemoteRef("127.0.0.1", 9002, "mgr")


def test_reregistration_is_upsert(ns):
    ns.register("svc", ref(9001))
    first = ns.lookup("svc")
    time.sleep(0.01)
    ns.register("svc", ref(9002), {"Generation": 2})
    entry = ns.lookup("svc")
    assert len(ns.query()) == 1
    assert entry.ref.port == 9002
    assert entry.metadata.get("Generation") == 2
    assert entry.registered_at > first.registered_at


def test_empty_name_rejected(ns):
    with pytest.raises(InvalidName):
        ns.register("", ref(9001))
    with pytest.raises(InvalidName):
        ns.register(None, ref(9001))


def test_lookup_unknown_raises(ns):
    with pytest.raises(NotFound):
        ns.lookup("ghost")


def test_query_filters_by_metadata_pairs(ns):
    ns.register("beta", ref(1), {"Type": "JobManager", "Model": "thermal"})
    ns.register("alpha", ref(2), {"Type": "JobManager", "Model": "mechanical"})
    ns.register("gamma", ref(3), {"Type": "Monitor", "Model": "thermal"})

    managers = ns.query([("Type", "JobManager")])
    assert [e.name for e in managers] == ["alpha", "beta"]  # name-ordered

    thermal_mgr = ns.query([("Type", "JobManager"), ("Model", "thermal")])
    assert [e.name for e in thermal_mgr] == ["beta"]

    assert ns.query([("Type", "nonesuch")]) == []


def test_query_empty_filter_returns_all(ns):
    ns.register("b", ref(1))
    ns.register("a", ref(2))
    assert [e.name for e in ns.query()] == ["a", "b"]


def test_query_dotted_path_filter(ns):
    ns.register("svc", ref(1), {"Solver": {"Language": "Python"}})
    assert [e.name for e in ns.query([("Solver.Language", "Python")])] == ["svc"]
    assert ns.query([("Solver.Language", "C++")]) == []


def test_heartbeat_advances_timestamp(ns):
    ns.register("svc", ref(1))
    before = ns.lookup("svc")
    time.sleep(0.01)
    ns.heartbeat("svc")
    after = ns.lookup("svc")
    assert after.last_heartbeat > before.last_heartbeat
    assert after.registered_at == before.registered_at


def test_heartbeat_unknown_raises(ns):
    with pytest.raises(NotFound):
        ns.heartbeat("ghost")


def test_prune_evicts_only_stale_entries(ns):
    ns.register("quiet", ref(1))
    ns.register("chatty", ref(2))
    time.sleep(0.05)
    ns.heartbeat("chatty")

    assert ns.prune(3600.0) == []  # generous window keeps everyone
    assert ns.prune(0.02) == ["quiet"]
    assert [e.name for e in ns.query()] == ["chatty"]
    with pytest.raises(NotFound):
        ns.lookup("quiet")


def test_prune_zero_evicts_everything_silent(ns):
    ns.register("a", ref(1))
    ns.register("b", ref(2))
    time.sleep(0.01)
    assert ns.prune(0.0) == ["a", "b"]
    assert ns.query() == []


def test_entry_round_trips_as_document(ns):
    ns.register("svc", ref(9100, "mgr"), {"Type": "JobManager"})
    entry = ns.lookup("svc")
    assert documents.loads(documents.dumps(entry)) == entry


def test_served_nameserver_over_the_wire():
    server, ns_ref = serve_nameserver()
    try:
        assert ns_ref.objid == "nameserver"
        with connect(ns_ref.host, ns_ref.port) as remote:
            remote.register("svc", ref(9005).uri, {"Type": "JobManager"})
            entry = remote.lookup("svc")
            assert isinstance(entry, RegistryEntry)
            assert entry.ref == ref(9005)
            assert [e.name for e in remote.query([("Type", "JobManager")])] == ["svc"]
            remote.heartbeat("svc")
            assert remote.prune(3600.0) == []
            with pytest.raises(NotFound):
                remote.lookup("ghost")
    finally:
        server.close()


def test_wire_metadata_defaults_to_empty():
    server, ns_ref = serve_nameserver()
    try:
        with connect(ns_ref.host, ns_ref.port) as remote:
            remote.register("bare", ref(9006).uri)
            assert remote.lookup("bare").metadata == Metadata({})
    finally:
        server.close()
