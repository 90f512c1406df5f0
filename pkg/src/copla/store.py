"""Embedded document store: a directory of JSON files with atomic writes."""

from __future__ import annotations

import json
import os
import re

from .errors import StoreUnavailable

KINDS = ("usecases", "workflows", "executions")
_ID_RE = re.compile(r"[A-Za-z0-9._:-]+")


def _check_id(doc_id: str) -> str:
    if not isinstance(doc_id, str) or not _ID_RE.fullmatch(doc_id):
        raise ValueError(f"unusable document id {doc_id!r}")
    return doc_id


class DocumentStore:
    """store_root/{usecases,workflows,executions}/<id>.json plus claim marks."""

    def __init__(self, root: str):
        self.root = str(root)
        try:
            for kind in KINDS + ("claims",):
                os.makedirs(os.path.join(self.root, kind), exist_ok=True)
        except OSError as exc:
            raise StoreUnavailable(f"cannot open store at {self.root}: {exc}") from exc

    def _path(self, kind: str, doc_id: str) -> str:
        if kind not in KINDS:
            raise ValueError(f"unknown store kind {kind!r}")
        return os.path.join(self.root, kind, _check_id(doc_id) + ".json")

    def put(self, kind: str, doc_id: str, doc) -> None:
        """Write a JSON document atomically (tmp file + rename)."""
        path = self._path(kind, doc_id)
        tmp = path + f".tmp{os.getpid()}"
        try:
            with open(tmp, "w", encoding="utf-8") as fh:
                json.dump(doc, fh, allow_nan=False, separators=(",", ":"))
            os.replace(tmp, path)
        except OSError as exc:
            raise StoreUnavailable(f"cannot write {path}: {exc}") from exc

    def get(self, kind: str, doc_id: str):
        """The stored document, or None if absent (or the id is unusable)."""
        try:
            path = self._path(kind, doc_id)
        except ValueError:
            return None
        try:
            with open(path, encoding="utf-8") as fh:
                return json.load(fh)
        except FileNotFoundError:
            return None
        except (OSError, ValueError) as exc:
            raise StoreUnavailable(f"cannot read {path}: {exc}") from exc

    def list_ids(self, kind: str) -> list[str]:
        if kind not in KINDS:
            raise ValueError(f"unknown store kind {kind!r}")
        try:
            names = os.listdir(os.path.join(self.root, kind))
        except OSError as exc:
            raise StoreUnavailable(f"cannot list {kind}: {exc}") from exc
        return sorted(n[:-5] for n in names if n.endswith(".json"))

    def claim(self, token: str) -> bool:
        """Atomically take a one-shot claim; False if someone already has it."""
        path = os.path.join(self.root, "claims", _check_id(token) + ".claim")
        try:
            fd = os.open(path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            return False
        except OSError as exc:
            raise StoreUnavailable(f"cannot claim {token}: {exc}") from exc
        os.close(fd)
        return True
