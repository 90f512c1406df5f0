"""Metadata trees and template validation.

Metadata is a finite tree of string keys holding strings, numbers, booleans,
lists or subtrees.  Templates list required dotted paths with an expected kind
and, optionally, an enumeration of allowed values; validation reports all
failing paths instead of raising.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterator


class Kind(Enum):
    STRING = "string"
    NUMBER = "number"
    BOOLEAN = "boolean"
    LIST = "list"
    SUBTREE = "subtree"

    def matches(self, value: Any) -> bool:
        if self is Kind.STRING:
            return isinstance(value, str)
        if self is Kind.NUMBER:
            # bool is an int subclass but is never a number here
            return isinstance(value, (int, float)) and not isinstance(value, bool)
        if self is Kind.BOOLEAN:
            return isinstance(value, bool)
        if self is Kind.LIST:
            return isinstance(value, list)
        return isinstance(value, dict)


class Violation(Enum):
    MISSING = "Missing"
    WRONG_KIND = "WrongKind"
    NOT_ALLOWED = "NotAllowed"


_MISSING = object()


def _check_tree(tree: dict, depth: int = 0) -> None:
    if depth > 64:
        raise ValueError("metadata tree too deep")
    for key, value in tree.items():
        if not isinstance(key, str) or not key:
            raise ValueError(f"metadata keys must be non-empty strings, got {key!r}")
        if isinstance(value, dict):
            _check_tree(value, depth + 1)


@dataclass(frozen=True)
class Metadata:
    """Immutable key tree; construct once, derive variants via :meth:`merged`."""

    data: dict = field(default_factory=dict)

    def __post_init__(self):
        if not isinstance(self.data, dict):
            raise ValueError("metadata root must be a mapping")
        _check_tree(self.data)
        object.__setattr__(self, "data", copy.deepcopy(self.data))

    def get(self, path: str, default: Any = None) -> Any:
        node: Any = self.data
        for part in path.split("."):
            if not isinstance(node, dict) or part not in node:
                return default
            node = node[part]
        return node

    def has(self, path: str) -> bool:
        return self.get(path, _MISSING) is not _MISSING

    def merged(self, other: "Metadata | dict") -> "Metadata":
        """Deep merge, ``other`` winning on conflicts; subtrees merge recursively."""
        patch = other.data if isinstance(other, Metadata) else other

        def merge(base: dict, over: dict) -> dict:
            out = dict(base)
            for k, v in over.items():
                if isinstance(v, dict) and isinstance(out.get(k), dict):
                    out[k] = merge(out[k], v)
                else:
                    out[k] = v
            return out

        return Metadata(merge(self.data, patch))

    def to_plain(self) -> dict:
        return copy.deepcopy(self.data)


@dataclass(frozen=True)
class TemplateEntry:
    path: str
    kind: Kind
    allowed: tuple | None = None

    def __post_init__(self):
        parts = self.path.split(".")
        if not all(parts) or not self.path:
            raise ValueError(f"malformed template path {self.path!r}")
        if self.allowed is not None:
            object.__setattr__(self, "allowed", tuple(self.allowed))


@dataclass(frozen=True)
class MetadataTemplate:
    entries: tuple[TemplateEntry, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))

    def __iter__(self) -> Iterator[TemplateEntry]:
        return iter(self.entries)


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[tuple[str, Violation], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "violations", tuple(self.violations))

    @property
    def ok(self) -> bool:
        return not self.violations

    def summary(self) -> str:
        if self.ok:
            return "ok"
        return "; ".join(f"{path}: {why.value}" for path, why in self.violations)


def validate_metadata(md: Metadata, tpl: MetadataTemplate) -> ValidationReport:
    """Check every required path for presence, kind and allowed values."""
    violations: list[tuple[str, Violation]] = []
    for entry in tpl:
        value = md.get(entry.path, _MISSING)
        if value is _MISSING:
            violations.append((entry.path, Violation.MISSING))
        elif not entry.kind.matches(value):
            violations.append((entry.path, Violation.WRONG_KIND))
        elif entry.allowed is not None and value not in entry.allowed:
            violations.append((entry.path, Violation.NOT_ALLOWED))
    return ValidationReport(tuple(violations))
