"""Remote-object layer: TCP object server, proxies and remote references.

Wire format, bit-exact: one JSON envelope per line.  Requests carry exactly
{"id","obj","method","args"}; replies are {"id","ok":true,"result"} or
{"id","ok":false,"error":{"type","msg"}}.  Application errors travel as
values and are re-raised locally by type name; only transport failures
surface as ConnectionLost.
"""

from __future__ import annotations

import itertools
import json
import re
import socket
import threading
import uuid
from dataclasses import dataclass
from urllib.parse import urlsplit

from . import documents
from .errors import (
    BindFailure,
    ConnectionLost,
    MalformedRequest,
    NotFound,
    RemoteError,
    UnknownMethod,
    error_class,
)

_REQUEST_KEYS = {"id", "obj", "method", "args"}


@dataclass(frozen=True)
class RemoteRef:
    """Address of one served object."""

    host: str
    port: int
    objid: str

    @property
    def uri(self) -> str:
        return f"copla://{self.host}:{self.port}/{self.objid}"

    @staticmethod
    def parse(uri: str) -> "RemoteRef":
        parts = urlsplit(uri)
        objid = parts.path.lstrip("/")
        if parts.scheme != "copla" or not parts.hostname or not parts.port or not objid:
            raise ValueError(f"not a copla object URI: {uri!r}")
        return RemoteRef(parts.hostname, parts.port, objid)


documents.register_class(
    RemoteRef,
    "RemoteRef",
    lambda r: {"uri": r.uri},
    lambda doc: RemoteRef.parse(doc["uri"]),
)


def _snake(name: str) -> str:
    return re.sub(r"(?<!^)(?=[A-Z])", "_", name).lower()


def _error_doc(exc: Exception) -> dict:
    return {"type": type(exc).__name__, "msg": str(exc)}


class ObjectServer:
    """Serves objects over TCP with per-object serialized dispatch."""

    def __init__(self, host: str = "127.0.0.1", port: int = 0):
        self._objects: dict[str, object] = {}
        self._object_locks: dict[str, threading.Lock] = {}
        self._clients: set[socket.socket] = set()
        self._state_lock = threading.Lock()
        self._closed = False
        try:
            self._listener = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
            self._listener.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
            self._listener.bind((host, port))
            self._listener.listen(32)
        except OSError as exc:
            raise BindFailure(f"cannot bind {host}:{port}: {exc}") from exc
        self.host, self.port = self._listener.getsockname()[:2]
        self._accept_thread = threading.Thread(target=self._accept_loop, daemon=True)
        self._accept_thread.start()

    def serve(self, obj, objid: str | None = None) -> RemoteRef:
        """Expose ``obj`` under ``objid`` (random unless given)."""
        if objid is None:
            objid = uuid.uuid4().hex
        with self._state_lock:
            self._objects[objid] = obj
            self._object_locks[objid] = threading.Lock()
        return RemoteRef(self.host, self.port, objid)

    def unserve(self, objid: str):
        with self._state_lock:
            self._objects.pop(objid, None)
            self._object_locks.pop(objid, None)

    def close(self):
        with self._state_lock:
            if self._closed:
                return
            self._closed = True
            clients = list(self._clients)
        try:
            # close() alone does not wake a blocked accept() on Linux
            self._listener.shutdown(socket.SHUT_RDWR)
        except OSError:
            pass
        try:
            self._listener.close()
        except OSError:
            pass
        for sock in clients:
            try:
                sock.shutdown(socket.SHUT_RDWR)
            except OSError:
                pass
            try:
                sock.close()
            except OSError:
                pass
        self._accept_thread.join(timeout=2.0)

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    # -- connection handling -------------------------------------------------

    def _accept_loop(self):
        while True:
            try:
                sock, _ = self._listener.accept()
            except OSError:
                return  # listener closed
            with self._state_lock:
                if self._closed:
                    sock.close()
                    return
                self._clients.add(sock)
            threading.Thread(target=self._client_loop, args=(sock,), daemon=True).start()

    def _client_loop(self, sock: socket.socket):
        write_lock = threading.Lock()
        try:
            reader = sock.makefile("r", encoding="utf-8", newline="\n")
            for line in reader:
                line = line.strip()
                if not line:
                    continue
                threading.Thread(
                    target=self._handle_line,
                    args=(sock, write_lock, line),
                    daemon=True,
                ).start()
        except (OSError, ValueError):
            pass
        finally:
            with self._state_lock:
                self._clients.discard(sock)
            try:
                sock.close()
            except OSError:
                pass

    def _handle_line(self, sock, write_lock, line: str):
        rid = None
        try:
            try:
                request = json.loads(line)
            except ValueError as exc:
                raise MalformedRequest(f"request is not JSON: {exc}") from exc
            if isinstance(request, dict) and isinstance(request.get("id"), int):
                rid = request["id"]
            result = self._dispatch(request)
            reply = {"id": rid, "ok": True, "result": documents.to_document(result)}
        except Exception as exc:
            reply = {"id": rid, "ok": False, "error": _error_doc(exc)}
        payload = (json.dumps(reply, allow_nan=False, separators=(",", ":")) + "\n").encode()
        try:
            with write_lock:
                sock.sendall(payload)
        except OSError:
            pass  # client went away; nothing to tell it

    def _dispatch(self, request):
        if not isinstance(request, dict) or set(request) != _REQUEST_KEYS:
            raise MalformedRequest(
                'request keys must be exactly {"id","obj","method","args"}'
            )
        if (
            not isinstance(request["id"], int)
            or not isinstance(request["obj"], str)
            or not isinstance(request["method"], str)
            or not isinstance(request["args"], list)
        ):
            raise MalformedRequest("request field types are wrong")
        with self._state_lock:
            obj = self._objects.get(request["obj"])
            lock = self._object_locks.get(request["obj"])
        if obj is None:
            raise NotFound(f"no object {request['obj']!r} on this server")
        method = self._resolve_method(obj, request["method"])
        args = [documents.from_document(a) for a in request["args"]]
        with lock:  # one call at a time per object
            return method(*args)

    @staticmethod
    def _resolve_method(obj, name: str):
        if name.startswith("_"):
            raise UnknownMethod(f"{name!r} is not callable remotely")
        for candidate in (name, _snake(name)):
            method = getattr(obj, candidate, None)
            if callable(method):
                return method
        raise UnknownMethod(f"{type(obj).__name__} has no method {name!r}")


class Proxy:
    """Forwards attribute calls to a served object; positional args only."""

    def __init__(self, ref: RemoteRef, timeout: float | None = 30.0):
        self._ref = ref
        self._ids = itertools.count(1)
        self._lock = threading.Lock()
        try:
            self._sock = socket.create_connection((ref.host, ref.port), timeout)
            self._reader = self._sock.makefile("r", encoding="utf-8", newline="\n")
        except OSError as exc:
            raise ConnectionLost(f"cannot reach {ref.uri}: {exc}") from exc

    @property
    def ref(self) -> RemoteRef:
        return self._ref

    def close(self):
        try:
            self._sock.close()
        except OSError:
            pass

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def __getattr__(self, name: str):
        if name.startswith("_"):
            raise AttributeError(name)

        def call(*args, **kwargs):
            if kwargs:
                raise TypeError("remote calls take positional arguments only")
            return self._call(name, args)

        call.__name__ = name
        return call

    def _call(self, method: str, args: tuple):
        request = {
            "obj": self._ref.objid,
            "method": method,
            "args": [documents.to_document(a) for a in args],
        }
        with self._lock:
            request["id"] = rid = next(self._ids)
            payload = json.dumps(request, allow_nan=False, separators=(",", ":"))
            try:
                self._sock.sendall((payload + "\n").encode())
                line = self._reader.readline()
            except OSError as exc:
                raise ConnectionLost(f"transport failure calling {method}: {exc}") from exc
        if not line:
            raise ConnectionLost(f"server closed the connection during {method}")
        try:
            reply = json.loads(line)
        except ValueError as exc:
            raise ConnectionLost(f"garbled reply to {method}: {exc}") from exc
        if not isinstance(reply, dict) or reply.get("id") != rid:
            raise ConnectionLost(f"reply id mismatch for {method}")
        if reply.get("ok"):
            return documents.from_document(reply.get("result"))
        error = reply.get("error") or {}
        _raise_remote(error.get("type", "RemoteError"), error.get("msg", ""))


def _raise_remote(type_name: str, msg: str):
    cls = error_class(type_name)
    if cls is not None:
        raise cls(msg)
    raise RemoteError(type_name, msg)


def proxy(ref: RemoteRef | str, timeout: float | None = 30.0) -> Proxy:
    """Connect a proxy to a remote reference (or its URI string)."""
    if isinstance(ref, str):
        ref = RemoteRef.parse(ref)
    return Proxy(ref, timeout)
