"""Tagged-tree documents: the one serialization used on disk and on the wire.

A document is a JSON-able tree.  Platform objects appear as mappings with a
``"_class"`` discriminator; plain scalars, lists and untagged mappings pass
through unchanged.  Modules owning additional wire types (refs, job records,
execution records) register their codecs here at import time.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Callable

from .data import Field, Property, TimeStep, ValueType
from .errors import MalformedDocument
from .mesh import Cell, CellType, Mesh
from .metadata import Metadata
from .units import Unit

_ENCODERS: dict[type, tuple[str, Callable[[Any], dict]]] = {}
_DECODERS: dict[str, Callable[[dict], Any]] = {}


def register_class(cls: type, name: str, encode: Callable, decode: Callable) -> None:
    _ENCODERS[cls] = (name, encode)
    _DECODERS[name] = decode


def to_document(obj: Any) -> Any:
    """Encode ``obj`` (platform object, scalar or container) to a document."""
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    enc = _ENCODERS.get(type(obj))
    if enc is not None:
        name, encode = enc
        doc = encode(obj)
        doc["_class"] = name
        return doc
    if isinstance(obj, (list, tuple)):
        return [to_document(v) for v in obj]
    if isinstance(obj, dict):
        if "_class" in obj:
            raise ValueError("plain mappings must not carry a '_class' key")
        return {str(k): to_document(v) for k, v in obj.items()}
    raise TypeError(f"cannot encode {type(obj).__name__} as a document")


def from_document(doc: Any) -> Any:
    """Decode a document back into objects; unknown tags are malformed."""
    if doc is None or isinstance(doc, (bool, int, float, str)):
        return doc
    if isinstance(doc, list):
        return [from_document(v) for v in doc]
    if isinstance(doc, dict):
        tag = doc.get("_class")
        if tag is None:
            return {k: from_document(v) for k, v in doc.items()}
        decode = _DECODERS.get(tag)
        if decode is None:
            raise MalformedDocument(f"unknown document class {tag!r}")
        try:
            return decode(doc)
        except MalformedDocument:
            raise
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise MalformedDocument(f"bad {tag} document: {exc}") from exc
    raise MalformedDocument(f"cannot decode {type(doc).__name__}")


def dumps(obj: Any) -> str:
    return json.dumps(to_document(obj), allow_nan=False, separators=(",", ":"))


def loads(text: str) -> Any:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(f"not valid JSON: {exc}") from exc
    return from_document(doc)


# serialize/deserialize are the component-level names used by other modules;
# they are the same codec.
serialize = to_document
deserialize = from_document


# -- core codecs --------------------------------------------------------------

def _unit_doc(u: Unit) -> dict:
    return {
        "symbol": u.symbol,
        "dimension": [[f.numerator, f.denominator] for f in u.dimension],
        "scale": u.scale,
    }


def _unit_from(doc: dict) -> Unit:
    dimension = tuple(Fraction(n, d) for n, d in doc["dimension"])
    return Unit(doc["symbol"], dimension, doc["scale"])  # type: ignore[arg-type]


def _value_doc(value):
    if isinstance(value, tuple):
        return [_value_doc(v) for v in value]
    return value


register_class(
    Metadata,
    "Metadata",
    lambda md: {"data": md.to_plain()},
    lambda doc: Metadata(doc["data"]),
)

register_class(
    Mesh,
    "Mesh",
    lambda m: {
        "vertices": [list(v) for v in m.vertices],
        "cells": [[c.cell_type.value, list(c.vertices)] for c in m.cells],
    },
    lambda doc: Mesh(
        tuple(tuple(v) for v in doc["vertices"]),
        tuple(Cell(CellType(t), tuple(vs)) for t, vs in doc["cells"]),
    ),
)

register_class(
    Property,
    "Property",
    lambda p: {
        "value": _value_doc(p.value),
        "unit": _unit_doc(p.unit),
        "property_id": p.property_id,
        "value_type": p.value_type.value,
        "time": p.time,
        "metadata": to_document(p.metadata),
    },
    lambda doc: Property(
        value=doc["value"],
        unit=_unit_from(doc["unit"]),
        property_id=doc["property_id"],
        value_type=ValueType(doc["value_type"]),
        time=doc["time"],
        metadata=from_document(doc["metadata"]),
    ),
)

register_class(
    Field,
    "Field",
    lambda f: {
        "mesh": to_document(f.mesh),
        "field_id": f.field_id,
        "unit": _unit_doc(f.unit),
        "values": [list(row) for row in f.values],
        "value_dim": f.value_dim,
        "time": f.time,
        "metadata": to_document(f.metadata),
    },
    lambda doc: Field(
        mesh=from_document(doc["mesh"]),
        field_id=doc["field_id"],
        unit=_unit_from(doc["unit"]),
        values=tuple(tuple(row) for row in doc["values"]),
        value_dim=doc["value_dim"],
        time=doc["time"],
        metadata=from_document(doc["metadata"]),
    ),
)

register_class(
    TimeStep,
    "TimeStep",
    lambda ts: {
        "time": ts.time,
        "dt": ts.dt,
        "target_time": ts.target_time,
        "number": ts.number,
    },
    lambda doc: TimeStep(doc["time"], doc["dt"], doc["target_time"], doc["number"]),
)
