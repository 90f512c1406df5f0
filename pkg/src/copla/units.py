"""Units as SI dimension vectors plus a scale factor.

A dimension is a 7-vector of rational exponents over the SI base quantities
(m, kg, s, A, K, mol, cd).  Two units are convertible iff their dimension
vectors are equal; conversion multiplies by the ratio of scales.  Offsets are
deliberately unsupported (temperatures are kelvin only).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import DimensionMismatch, NotFound

BASE_QUANTITIES = ("m", "kg", "s", "A", "K", "mol", "cd")

Dimension = tuple[Fraction, Fraction, Fraction, Fraction, Fraction, Fraction, Fraction]

DIMENSIONLESS: Dimension = tuple(Fraction(0) for _ in range(7))  # type: ignore[assignment]


def dim(m=0, kg=0, s=0, A=0, K=0, mol=0, cd=0) -> Dimension:
    return tuple(Fraction(v) for v in (m, kg, s, A, K, mol, cd))  # type: ignore[return-value]


@dataclass(frozen=True)
class Unit:
    """A named unit: ``scale`` converts one of this unit to coherent SI."""

    symbol: str
    dimension: Dimension
    scale: float = 1.0

    def __post_init__(self):
        if len(self.dimension) != 7:
            raise ValueError("dimension must have 7 entries")
        object.__setattr__(
            self, "dimension", tuple(Fraction(v) for v in self.dimension)
        )
        if not self.scale > 0:
            raise ValueError("unit scale must be positive")

    def compatible(self, other: "Unit") -> bool:
        return self.dimension == other.dimension

    def factor_to(self, target: "Unit") -> float:
        """Multiplier taking a value in this unit to ``target``."""
        if not self.compatible(target):
            raise DimensionMismatch(
                f"cannot convert {self.symbol!r} to {target.symbol!r}"
            )
        return self.scale / target.scale


_CATALOG: dict[str, Unit] = {}


def _register(unit: Unit) -> Unit:
    _CATALOG[unit.symbol] = unit
    return unit


NONE = _register(Unit("1", DIMENSIONLESS))
RAD = _register(Unit("rad", DIMENSIONLESS))
METRE = _register(Unit("m", dim(m=1)))
MILLIMETRE = _register(Unit("mm", dim(m=1), 1e-3))
KILOGRAM = _register(Unit("kg", dim(kg=1)))
SECOND = _register(Unit("s", dim(s=1)))
AMPERE = _register(Unit("A", dim(A=1)))
KELVIN = _register(Unit("K", dim(K=1)))
MOLE = _register(Unit("mol", dim(mol=1)))
CANDELA = _register(Unit("cd", dim(cd=1)))
NEWTON = _register(Unit("N", dim(m=1, kg=1, s=-2)))
PASCAL = _register(Unit("Pa", dim(m=-1, kg=1, s=-2)))
KILOPASCAL = _register(Unit("kPa", dim(m=-1, kg=1, s=-2), 1e3))
MEGAPASCAL = _register(Unit("MPa", dim(m=-1, kg=1, s=-2), 1e6))
GIGAPASCAL = _register(Unit("GPa", dim(m=-1, kg=1, s=-2), 1e9))
JOULE = _register(Unit("J", dim(m=2, kg=1, s=-2)))
WATT = _register(Unit("W", dim(m=2, kg=1, s=-3)))
PER_KELVIN = _register(Unit("1/K", dim(K=-1)))
SQUARE_METRE = _register(Unit("m^2", dim(m=2)))


def unit(symbol: str) -> Unit:
    """Look up a catalogued unit by symbol."""
    try:
        return _CATALOG[symbol]
    except KeyError:
        raise NotFound(f"unknown unit symbol {symbol!r}") from None


def known_units() -> tuple[str, ...]:
    return tuple(sorted(_CATALOG))
