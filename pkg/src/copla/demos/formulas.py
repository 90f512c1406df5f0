"""Closed-form toy physics behind the demo chains.

Everything here is auditable by hand: rule-of-mixtures homogenization, a
quartic-trig ply modulus, classical-lamination bending stiffness and an Euler
plate buckling load.  The test suite cross-checks each function against an
independent re-implementation.
"""

from __future__ import annotations

import math

from ..data import Field
from ..errors import DomainError
from ..units import unit


def micro_homogenize(vf: float, ef: float, em: float) -> tuple[float, float]:
    """Longitudinal and transverse moduli of a fiber/matrix mix.

    Rule of mixtures along the fiber, inverse rule across it.
    """
    if not 0.0 <= vf <= 1.0:
        raise DomainError(f"volume fraction must lie in [0, 1], got {vf}")
    if ef <= 0 or em <= 0:
        raise DomainError("constituent moduli must be positive")
    e_long = vf * ef + (1.0 - vf) * em
    e_trans = ef * em / (vf * em + (1.0 - vf) * ef)
    return e_long, e_trans


def ply_modulus(e_long: float, e_trans: float, theta: float) -> float:
    """Effective in-plane modulus of a ply rotated by ``theta`` radians."""
    if e_long <= 0 or e_trans <= 0:
        raise DomainError("ply moduli must be positive")
    c2 = math.cos(theta) ** 2
    s2 = math.sin(theta) ** 2
    return (
        e_long * c2 * c2
        + e_trans * s2 * s2
        + 2.0 * math.sqrt(e_long * e_trans) * c2 * s2
    )


def buckling_load(
    layup: list[tuple[float, float, float]], length: float, width: float
) -> float:
    """Critical buckling load of a symmetric laminate strip.

    ``layup`` lists (effective modulus, thickness, angle) per layer bottom to
    top, the modulus already resolved at the layer angle by ``ply_modulus``;
    interfaces are placed symmetrically about the midplane.  The bending
    stiffness is the classical sum of E * (z_k^3 - z_{k-1}^3) / 3.
    """
    if not layup:
        raise DomainError("layup must contain at least one layer")
    if length <= 0 or width <= 0:
        raise DomainError("length and width must be positive")
    for e_k, t_k, _ in layup:
        if t_k <= 0:
            raise DomainError("layer thicknesses must be positive")
        if e_k <= 0:
            raise DomainError("layer moduli must be positive")
    total = math.fsum(t for _, t, _ in layup)
    z = -total / 2.0
    stiffness = 0.0
    for e_k, t_k, _ in layup:
        z_top = z + t_k
        stiffness += e_k * (z_top**3 - z**3) / 3.0
        z = z_top
    return math.pi**2 * stiffness * width / length**2


def thermal_elongation(temperature: Field, alpha: float) -> float:
    """alpha times the exact integral of the piecewise-linear temperature."""
    mesh = temperature.mesh
    contributions = []
    for index in range(len(mesh.cells)):
        a, b = mesh.cells[index].vertices
        h = abs(mesh.vertices[b][0] - mesh.vertices[a][0])
        ta = temperature.values[a][0]
        tb = temperature.values[b][0]
        contributions.append(h * (ta + tb) / 2.0)
    factor = temperature.unit.factor_to(unit("K"))
    return alpha * math.fsum(contributions) * factor
