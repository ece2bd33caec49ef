"""Square atom-grid architecture.

Radii are stored as *squared* dimensionless factors (``r_int_sq``,
``r_restr_sq``) held as :class:`~fractions.Fraction`, so every radius test is
an exact comparison of an integer lattice distance against a rational.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import NamedTuple, Union

__all__ = [
    "GridPoint",
    "GridArch",
    "parse_factor",
    "format_factor",
    "arch_for",
    "connected",
    "neighbors",
    "may_run_parallel",
]

FactorLike = Union[str, int, float, Fraction]


class GridPoint(NamedTuple):
    x: int
    y: int


def row_major(p) -> tuple:
    return (p[1], p[0])


def parse_factor(value: FactorLike) -> Fraction:
    """Return the *square* of a radius factor.

    ``"sqrt:2"`` gives 2 exactly; ``"2"``, ``2`` or ``"3/2"`` are squared.
    """
    if isinstance(value, str):
        s = value.strip()
        if s.startswith("sqrt:"):
            return Fraction(s[5:])
        base = Fraction(s)
    elif isinstance(value, float):
        base = Fraction(str(value))
    else:
        base = Fraction(value)
    return base * base


def format_factor(sq: Fraction) -> str:
    num, den = sq.numerator, sq.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return str(Fraction(rn, rd))
    return f"sqrt:{sq}"


@dataclass(frozen=True)
class GridArch:
    """``b x b`` grid with spacing ``d`` (um) and squared radius factors."""

    b: int
    d: float = 3.0
    r_int_sq: Fraction = Fraction(4)
    r_restr_sq: Fraction = Fraction(16)

    def __post_init__(self) -> None:
        object.__setattr__(self, "r_int_sq", Fraction(self.r_int_sq))
        object.__setattr__(self, "r_restr_sq", Fraction(self.r_restr_sq))
        if self.b < 1:
            raise ValueError("grid side b must be >= 1")
        if not self.d > 0:
            raise ValueError("atom spacing d must be positive")
        if self.r_int_sq < 1:
            raise ValueError("interaction factor r_int must be >= 1")
        if self.r_restr_sq < self.r_int_sq:
            raise ValueError("restriction factor r_restr must be >= r_int")

    @classmethod
    def from_factors(cls, b: int, d: float = 3.0, r_int: FactorLike = 2, r_restr: FactorLike = 4) -> "GridArch":
        return cls(b, float(d), parse_factor(r_int), parse_factor(r_restr))

    @property
    def r_int(self) -> float:
        return math.sqrt(self.r_int_sq)

    @property
    def r_restr(self) -> float:
        return math.sqrt(self.r_restr_sq)

    @property
    def R_int(self) -> float:
        return self.r_int * self.d

    @property
    def R_restr(self) -> float:
        return self.r_restr * self.d

    @property
    def size(self) -> int:
        return self.b * self.b

    @cached_property
    def points(self) -> tuple[GridPoint, ...]:
        """All grid points in row-major order (``y`` outer, ``x`` inner)."""
        return tuple(GridPoint(x, y) for y in range(self.b) for x in range(self.b))

    @cached_property
    def index(self) -> dict[GridPoint, int]:
        return {p: i for i, p in enumerate(self.points)}

    @cached_property
    def adjacency(self) -> tuple[frozenset[GridPoint], ...]:
        """Neighbour sets indexed like :attr:`points`."""
        pts = self.points
        return tuple(
            frozenset(q for q in pts if q != p and _d2(p, q) <= self.r_int_sq) for p in pts
        )

    def contains(self, p) -> bool:
        return (
            float(p[0]).is_integer()
            and float(p[1]).is_integer()
            and 0 <= p[0] < self.b
            and 0 <= p[1] < self.b
        )

    def distance(self, p, q) -> float:
        """Euclidean distance in um."""
        return math.hypot(p[0] - q[0], p[1] - q[1]) * self.d

    def to_dict(self) -> dict:
        return {
            "b": self.b,
            "d_um": self.d,
            "r_int": format_factor(self.r_int_sq),
            "r_restr": format_factor(self.r_restr_sq),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GridArch":
        return cls.from_factors(int(data["b"]), float(data["d_um"]), data["r_int"], data["r_restr"])


def _d2(p, q):
    dx, dy = p[0] - q[0], p[1] - q[1]
    return dx * dx + dy * dy


def arch_for(n: int, d: float = 3.0, r_int: FactorLike = 2, r_restr: FactorLike = 4) -> GridArch:
    """Smallest square grid holding ``n`` atoms: side ``ceil(sqrt(n))``."""
    if n < 1:
        raise ValueError("need at least one qubit")
    return GridArch.from_factors(math.isqrt(n - 1) + 1, d, r_int, r_restr)


def connected(p, q, arch: GridArch) -> bool:
    return p != q and _d2(p, q) <= arch.r_int_sq


def neighbors(p, arch: GridArch) -> frozenset[GridPoint]:
    return arch.adjacency[arch.index[GridPoint(*p)]]


def may_run_parallel(g1, g2, arch: GridArch) -> bool:
    """Whether two CZ gates (each a pair of points) may share a Rydberg stage.

    Every cross distance must exceed the restriction radius strictly.
    """
    if set(map(tuple, g1)) & set(map(tuple, g2)):
        raise ValueError(f"gates {g1} and {g2} share a grid point")
    return all(_d2(u, v) > arch.r_restr_sq for u in g1 for v in g2)
