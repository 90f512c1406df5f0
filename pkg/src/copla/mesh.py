"""Simplex meshes and point location via barycentric coordinates."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import NotFound

CONTAINMENT_TOL = 1e-10


class CellType(Enum):
    LINE2 = "Line2"
    TRI3 = "Tri3"
    TET4 = "Tet4"

    @property
    def n_vertices(self) -> int:
        return {CellType.LINE2: 2, CellType.TRI3: 3, CellType.TET4: 4}[self]


@dataclass(frozen=True)
class Cell:
    cell_type: CellType
    vertices: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(int(v) for v in self.vertices))
        if len(self.vertices) != self.cell_type.n_vertices:
            raise ValueError(
                f"{self.cell_type.value} needs {self.cell_type.n_vertices} vertices, "
                f"got {len(self.vertices)}"
            )


def _measure(coords: np.ndarray) -> float:
    """Length/area/volume of the simplex spanned by ``coords`` (k+1 rows)."""
    edges = coords[1:] - coords[0]
    gram = edges @ edges.T
    det = float(np.linalg.det(gram))
    if det <= 0:
        return 0.0
    k = edges.shape[0]
    return math.sqrt(det) / math.factorial(k)


@dataclass(frozen=True)
class Mesh:
    """Vertex list plus simplex cells; dimension is the coordinate length."""

    vertices: tuple[tuple[float, ...], ...]
    cells: tuple[Cell, ...]

    def __post_init__(self):
        verts = tuple(tuple(float(c) for c in v) for v in self.vertices)
        object.__setattr__(self, "vertices", verts)
        cells = tuple(
            c if isinstance(c, Cell) else Cell(CellType(c[0]), tuple(c[1]))
            for c in self.cells
        )
        object.__setattr__(self, "cells", cells)
        if not verts:
            raise ValueError("mesh needs at least one vertex")
        dim = len(verts[0])
        if dim not in (1, 2, 3):
            raise ValueError(f"mesh dimension must be 1, 2 or 3, got {dim}")
        if any(len(v) != dim for v in verts):
            raise ValueError("all vertices must share one dimension")
        for i, cell in enumerate(cells):
            if any(not 0 <= vi < len(verts) for vi in cell.vertices):
                raise ValueError(f"cell {i} references a vertex out of range")
            coords = np.array([verts[vi] for vi in cell.vertices], dtype=float)
            if _measure(coords) <= 0.0:
                raise ValueError(f"cell {i} is degenerate")

    @property
    def dimension(self) -> int:
        return len(self.vertices[0])

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    def cell_coords(self, index: int) -> np.ndarray:
        cell = self.cells[index]
        return np.array([self.vertices[v] for v in cell.vertices], dtype=float)


def barycentric(coords: np.ndarray, x: np.ndarray) -> tuple[np.ndarray, float]:
    """Barycentric coordinates of ``x`` in the simplex ``coords``.

    Returns ``(weights, residual)``; residual is the distance between x and
    its reconstruction, nonzero when x is off the cell's affine span (only
    possible for cells embedded below the mesh dimension, e.g. Line2 in 2D).
    """
    edges = (coords[1:] - coords[0]).T  # shape (dim, k)
    rhs = x - coords[0]
    if edges.shape[0] == edges.shape[1]:
        lam = np.linalg.solve(edges, rhs)
    else:
        lam, *_ = np.linalg.lstsq(edges, rhs, rcond=None)
    recon = coords[0] + edges @ lam
    residual = float(np.linalg.norm(recon - x))
    weights = np.concatenate(([1.0 - float(np.sum(lam))], lam))
    return weights, residual


def locate(mesh: Mesh, x) -> tuple[int, tuple[float, ...]]:
    """Find the containing cell; lowest cell index wins on shared faces.

    Raises :class:`NotFound` when ``x`` lies outside every cell beyond the
    containment tolerance.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (mesh.dimension,):
        raise ValueError(
            f"point has dimension {x.shape}, mesh has {mesh.dimension}"
        )
    for index in range(len(mesh.cells)):
        coords = mesh.cell_coords(index)
        weights, residual = barycentric(coords, x)
        diameter = float(np.max(np.linalg.norm(coords - coords[0], axis=1)))
        if residual > CONTAINMENT_TOL * (1.0 + diameter):
            continue
        if np.all(weights >= -CONTAINMENT_TOL):
            return index, tuple(float(w) for w in weights)
    raise NotFound(f"point {x.tolist()} is outside the mesh")


def gradient_operator(coords: np.ndarray) -> np.ndarray:
    """Spatial gradients of the barycentric weights, shape (k+1, dim).

    Row i is d(lambda_i)/dx; for embedded simplices this is the tangential
    gradient (pseudo-inverse of the edge matrix).
    """
    edges = (coords[1:] - coords[0]).T
    if edges.shape[0] == edges.shape[1]:
        dlam = np.linalg.inv(edges)
    else:
        dlam = np.linalg.pinv(edges)
    first = -dlam.sum(axis=0, keepdims=True)
    return np.vstack([first, dlam])


def uniform_interval_mesh(length: float, n_vertices: int) -> Mesh:
    """1D mesh on [0, length] with evenly spaced vertices."""
    if n_vertices < 2:
        raise ValueError("need at least two vertices")
    xs = np.linspace(0.0, length, n_vertices)
    vertices = tuple((float(x),) for x in xs)
    cells = tuple(Cell(CellType.LINE2, (i, i + 1)) for i in range(n_vertices - 1))
    return Mesh(vertices, cells)
