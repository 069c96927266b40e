"""Sheaf invariants and destabilizing-wall candidates.

Walls are hyperplanes a.gamma = 0 in N_1. A candidate comes from a binary
split of rank r into r1 + (r - r1) and is stored as zeta = r.a, an integral
class in the coset -r1.c1 + r.N^1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Sequence

from core.exact import primitive, sign

from lattice.types import CurveClass, DivisorClass, PolarisedLattice, PowerTensor

from .exceptions import InvalidNumerics


@dataclass(frozen=True)
class SheafNumerics:
    """(r, c1, c2) of a torsion-free sheaf; c2 is stored as the order n-2 tensor of pairings."""

    r: int
    c1: DivisorClass
    c2: PowerTensor
    label: str = ''

    def __post_init__(self):
        if self.r < 1:
            raise InvalidNumerics(f'rank must be positive, got {self.r}')
        if not self.c1.is_integral():
            raise InvalidNumerics(f'c1 = {self.c1} is not integral')
        if self.c2.rho != self.c1.rank:
            raise InvalidNumerics(f'c1 has rank {self.c1.rank} but c2 pairs rank-{self.c2.rho} classes')

    @property
    def rho(self) -> int:
        return self.c1.rank

    @property
    def n(self) -> int:
        return self.c2.order + 2

    @classmethod
    def line(cls, c1: DivisorClass, n: int, label: str = '') -> 'SheafNumerics':
        """Invariants of a line bundle O(D): rank 1, c2 = 0."""
        return cls(1, c1, PowerTensor(n - 2, c1.rank), label)

    def check(self, lattice: PolarisedLattice) -> None:
        if (self.n, self.rho) != (lattice.n, lattice.rho):
            raise InvalidNumerics(
                f'sheaf {self.label or "?"} lives on dimension {self.n}, rank {self.rho}; '
                f'lattice {lattice.name!r} has {lattice.n}, {lattice.rho}'
            )

    def c1_product(self, lattice: PolarisedLattice, other: DivisorClass) -> PowerTensor:
        """c1.D as an order n-2 tensor."""
        return lattice.form.contract(self.c1).contract(other)

    def twist(self, lattice: PolarisedLattice, divisor: DivisorClass) -> 'SheafNumerics':
        """Invariants of F (x) O(D): c1 + rD and c2 + (r-1)c1.D + C(r,2)D^2."""
        self.check(lattice)
        if not divisor.is_integral():
            raise InvalidNumerics(f'twisting divisor {divisor} is not integral')
        square = lattice.form.contract(divisor).contract(divisor)
        c2 = self.c2 + self.c1_product(lattice, divisor).scaled(self.r - 1) + square.scaled(comb(self.r, 2))
        label = f'{self.label}({divisor})' if self.label else ''
        return SheafNumerics(self.r, self.c1 + divisor.scaled(self.r), c2, label)


@dataclass(frozen=True)
class WallClass:
    """zeta = r.a for a split of rank r into r1 + (r - r1)."""

    zeta: DivisorClass
    r1: int
    r: int

    def __post_init__(self):
        if self.zeta.is_zero():
            raise InvalidNumerics('a wall class must be non-zero')
        if not 1 <= self.r1 <= self.r - 1:
            raise InvalidNumerics(f'split rank {self.r1} outside 1..{self.r - 1}')

    @property
    def normal(self) -> DivisorClass:
        return self.zeta.scaled(Fraction(1, self.r))

    def in_coset(self, c1: DivisorClass) -> bool:
        shifted = self.zeta + c1.scaled(self.r1)
        return all(c.denominator == 1 and c.numerator % self.r == 0 for c in shifted.coords)


@dataclass(frozen=True)
class Wall:
    """The hyperplane a^perp in N_1, stored by its primitive integral normal."""

    normal: tuple[int, ...]
    source: WallClass | None = field(default=None, compare=False)
    witness: CurveClass | None = field(default=None, compare=False)
    slack: Fraction | None = field(default=None, compare=False)

    def __post_init__(self):
        normal = primitive(self.normal)
        if not any(normal):
            raise InvalidNumerics('a wall needs a non-zero normal')
        object.__setattr__(self, 'normal', normal)

    @classmethod
    def of(cls, *coords: int) -> 'Wall':
        return cls(tuple(coords))

    @property
    def rank(self) -> int:
        return len(self.normal)

    def evaluate(self, gamma: CurveClass | Sequence[Fraction]) -> Fraction:
        coords = gamma.coords if isinstance(gamma, CurveClass) else tuple(gamma)
        return sum((a * c for a, c in zip(self.normal, coords, strict=True)), Fraction(0))

    def side(self, gamma: CurveClass | Sequence[Fraction]) -> int:
        return sign(self.evaluate(gamma))

    def __str__(self) -> str:
        return '(' + ', '.join(str(c) for c in self.normal) + ')'
