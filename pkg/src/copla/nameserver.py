"""Name registry for served objects, itself served under objid "nameserver"."""

from __future__ import annotations

import dataclasses
import threading
import time
from dataclasses import dataclass

from . import documents
from .errors import InvalidName, NotFound
from .metadata import Metadata
from .rpc import ObjectServer, Proxy, RemoteRef

NAMESERVER_OBJID = "nameserver"


@dataclass(frozen=True)
class RegistryEntry:
    """One registered service: who it is, where it lives, when it last spoke."""

    name: str
    ref: RemoteRef
    metadata: Metadata
    registered_at: float
    last_heartbeat: float


documents.register_class(
    RegistryEntry,
    "RegistryEntry",
    lambda e: {
        "name": e.name,
        "ref": documents.to_document(e.ref),
        "metadata": documents.to_document(e.metadata),
        "registered_at": e.registered_at,
        "last_heartbeat": e.last_heartbeat,
    },
    lambda doc: RegistryEntry(
        name=doc["name"],
        ref=documents.from_document(doc["ref"]),
        metadata=documents.from_document(doc["metadata"]),
        registered_at=doc["registered_at"],
        last_heartbeat=doc["last_heartbeat"],
    ),
)


class Nameserver:
    """Thread-safe name -> entry registry with upsert semantics."""

    def __init__(self):
        self._entries: dict[str, RegistryEntry] = {}
        self._lock = threading.Lock()

    def register(self, name, ref, metadata=None):
        if not isinstance(name, str) or not name:
            raise InvalidName("service name must be a non-empty string")
        if isinstance(ref, str):
            ref = RemoteRef.parse(ref)
        if not isinstance(metadata, Metadata):
            metadata = Metadata(metadata or {})
        now = time.time()
        with self._lock:
            self._entries[name] = RegistryEntry(name, ref, metadata, now, now)

    def lookup(self, name: str) -> RegistryEntry:
        with self._lock:
            entry = self._entries.get(name)
        if entry is None:
            raise NotFound(f"no service registered as {name!r}")
        return entry

    def query(self, filters=()) -> list[RegistryEntry]:
        """Entries whose metadata contains every (path, value) pair, by name."""
        pairs = [tuple(f) for f in filters]
        with self._lock:
            entries = list(self._entries.values())
        matched = [
            e
            for e in entries
            if all(e.metadata.get(path) == value for path, value in pairs)
        ]
        return sorted(matched, key=lambda e: e.name)

    def heartbeat(self, name: str):
        now = time.time()
        with self._lock:
            entry = self._entries.get(name)
            if entry is None:
                raise NotFound(f"no service registered as {name!r}")
            self._entries[name] = dataclasses.replace(entry, last_heartbeat=now)

    def prune(self, max_age: float) -> list[str]:
        """Evict entries silent for longer than ``max_age`` seconds."""
        now = time.time()
        with self._lock:
            evicted = [
                name
                for name, e in self._entries.items()
                if now - e.last_heartbeat > max_age
            ]
            for name in evicted:
                del self._entries[name]
        return sorted(evicted)


def serve_nameserver(host: str = "127.0.0.1", port: int = 0):
    """Start a nameserver on its own server; returns (server, ref)."""
    server = ObjectServer(host, port)
    ref = server.serve(Nameserver(), NAMESERVER_OBJID)
    return server, ref


def connect(host: str, port: int, timeout: float | None = 30.0) -> Proxy:
    """Proxy to the nameserver at a known endpoint."""
    return Proxy(RemoteRef(host, int(port), NAMESERVER_OBJID), timeout)
