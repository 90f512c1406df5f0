"""Exchanged data components: unit-bearing properties and mesh-based fields."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DimensionMismatch, NotFound, OutsideDomain
from .mesh import Mesh, gradient_operator, locate
from .metadata import Metadata
from .units import Unit


class ValueType(Enum):
    SCALAR = "Scalar"
    VECTOR = "Vector"
    TENSOR = "Tensor"


def _freeze_value(value, value_type: ValueType):
    if value_type is ValueType.SCALAR:
        out = float(value)
        if not math.isfinite(out):
            raise ValueError("scalar value must be finite")
        return out
    if value_type is ValueType.VECTOR:
        out = tuple(float(v) for v in value)
        if not out or not all(math.isfinite(v) for v in out):
            raise ValueError("vector value must be non-empty and finite")
        return out
    rows = tuple(tuple(float(v) for v in row) for row in value)
    if not rows or any(len(r) != len(rows[0]) for r in rows):
        raise ValueError("tensor value must be a rectangular matrix")
    if not all(math.isfinite(v) for r in rows for v in r):
        raise ValueError("tensor value must be finite")
    return rows


@dataclass(frozen=True)
class Property:
    """Point value with unit, identity and time stamp."""

    value: float | tuple
    unit: Unit
    property_id: str
    value_type: ValueType = ValueType.SCALAR
    time: float = 0.0
    metadata: Metadata = field(default_factory=Metadata)

    def __post_init__(self):
        if not self.property_id:
            raise ValueError("property_id must be non-empty")
        object.__setattr__(self, "value", _freeze_value(self.value, self.value_type))
        object.__setattr__(self, "time", float(self.time))
        if not math.isfinite(self.time):
            raise ValueError("time must be finite")

    def scalar(self) -> float:
        if self.value_type is not ValueType.SCALAR:
            raise ValueError(f"{self.property_id} is not scalar")
        return self.value  # type: ignore[return-value]


def convert_units(p: Property, target: Unit) -> Property:
    """Re-express ``p`` in ``target``; everything but value and unit is kept."""
    factor = p.unit.factor_to(target)  # raises DimensionMismatch

    def scaled(v):
        if isinstance(v, tuple):
            return tuple(scaled(x) for x in v)
        return v * factor

    return dataclasses.replace(p, value=scaled(p.value), unit=target)


@dataclass(frozen=True)
class Field:
    """Per-vertex vector values on a mesh, linearly interpolated per cell."""

    mesh: Mesh
    field_id: str
    unit: Unit
    values: tuple[tuple[float, ...], ...]
    value_dim: int = 1
    time: float = 0.0
    metadata: Metadata = field(default_factory=Metadata)

    def __post_init__(self):
        if not self.field_id:
            raise ValueError("field_id must be non-empty")
        vals = tuple(tuple(float(x) for x in row) for row in self.values)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "value_dim", int(self.value_dim))
        object.__setattr__(self, "time", float(self.time))
        if self.value_dim < 1:
            raise ValueError("value_dim must be positive")
        if len(vals) != self.mesh.n_vertices:
            raise ValueError(
                f"{len(vals)} value rows for {self.mesh.n_vertices} vertices"
            )
        if any(len(row) != self.value_dim for row in vals):
            raise ValueError("every value must have length value_dim")
        if not math.isfinite(self.time):
            raise ValueError("time must be finite")


def evaluate(f: Field, x) -> tuple[float, ...]:
    """Field value at ``x`` by barycentric interpolation of vertex values."""
    try:
        index, weights = locate(f.mesh, x)
    except NotFound as exc:
        raise OutsideDomain(str(exc)) from exc
    cell = f.mesh.cells[index]
    vals = np.array([f.values[v] for v in cell.vertices], dtype=float)
    out = np.asarray(weights, dtype=float) @ vals
    return tuple(float(v) for v in out)


def evaluate_gradient(f: Field, x) -> tuple[tuple[float, ...], ...]:
    """Gradient of the linear interpolant at ``x``, shape (value_dim, dim).

    Piecewise constant: the result only depends on the containing cell.
    """
    try:
        index, _ = locate(f.mesh, x)
    except NotFound as exc:
        raise OutsideDomain(str(exc)) from exc
    cell = f.mesh.cells[index]
    coords = f.mesh.cell_coords(index)
    vals = np.array([f.values[v] for v in cell.vertices], dtype=float)
    grad = vals.T @ gradient_operator(coords)  # (value_dim, dim)
    return tuple(tuple(float(g) for g in row) for row in grad)


@dataclass(frozen=True)
class TimeStep:
    """One solution step: current time, increment and the loop's target."""

    time: float
    dt: float
    target_time: float
    number: int = 1

    def __post_init__(self):
        for name in ("time", "dt", "target_time"):
            object.__setattr__(self, name, float(getattr(self, name)))
        object.__setattr__(self, "number", int(self.number))
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.time > self.target_time:
            raise ValueError("time must not exceed target_time")
        if self.number < 1:
            raise ValueError("step number starts at 1")


def check_dimension(c: Property | Field, expected: Unit, what: str = "component"):
    """Raise DimensionMismatch unless the component's unit matches ``expected``."""
    if c.unit.dimension != expected.dimension:
        raise DimensionMismatch(
            f"{what} carries unit {c.unit.symbol!r}, expected dimension of "
            f"{expected.symbol!r}"
        )
