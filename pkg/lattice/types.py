"""Domain types for N^1, N_1 and the symmetric intersection form.

A symmetric k-tensor is stored once per multiset of basis indices (sorted
tuple); contracting with a vector keeps it symmetric, so powers, Lefschetz
matrices and mixed products are all repeated contractions of the form.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Iterable, Mapping, Sequence

from core.exact import dot, format_rational, parse_rational

from .exceptions import DimensionMismatch


def _coords(values: Iterable[object]) -> tuple[Fraction, ...]:
    return tuple(parse_rational(v) if not isinstance(v, Fraction) else v for v in values)


@dataclass(frozen=True)
class DivisorClass:
    coords: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, 'coords', _coords(self.coords))

    @classmethod
    def of(cls, *values: object) -> 'DivisorClass':
        return cls(tuple(values))

    @classmethod
    def zero(cls, rho: int) -> 'DivisorClass':
        return cls((Fraction(0),) * rho)

    @property
    def rank(self) -> int:
        return len(self.coords)

    def __add__(self, other: 'DivisorClass') -> 'DivisorClass':
        _check_rank(self.coords, other.coords)
        return DivisorClass(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: 'DivisorClass') -> 'DivisorClass':
        _check_rank(self.coords, other.coords)
        return DivisorClass(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> 'DivisorClass':
        return DivisorClass(tuple(-a for a in self.coords))

    def scaled(self, factor: Fraction | int) -> 'DivisorClass':
        return DivisorClass(tuple(factor * a for a in self.coords))

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coords)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __str__(self) -> str:
        return '(' + ', '.join(format_rational(c) for c in self.coords) + ')'


@dataclass(frozen=True)
class CurveClass:
    """Dual coordinates; pairing with a divisor is the plain dot product."""

    coords: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, 'coords', _coords(self.coords))

    @classmethod
    def of(cls, *values: object) -> 'CurveClass':
        return cls(tuple(values))

    @property
    def rank(self) -> int:
        return len(self.coords)

    def pair(self, divisor: DivisorClass | Sequence[Fraction]) -> Fraction:
        values = divisor.coords if isinstance(divisor, DivisorClass) else tuple(divisor)
        _check_rank(self.coords, values)
        return dot(self.coords, values)

    def __add__(self, other: 'CurveClass') -> 'CurveClass':
        _check_rank(self.coords, other.coords)
        return CurveClass(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: 'CurveClass') -> 'CurveClass':
        _check_rank(self.coords, other.coords)
        return CurveClass(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def scaled(self, factor: Fraction | int) -> 'CurveClass':
        return CurveClass(tuple(factor * a for a in self.coords))

    def __str__(self) -> str:
        return '(' + ', '.join(format_rational(c) for c in self.coords) + ')'


def _check_rank(left: Sequence, right: Sequence) -> None:
    if len(left) != len(right):
        raise DimensionMismatch(f'rank mismatch: {len(left)} != {len(right)}')


@dataclass(frozen=True)
class PowerTensor:
    """Symmetric ``order``-tensor on a rank-``rho`` lattice; missing keys are zero."""

    order: int
    rho: int
    values: Mapping[tuple[int, ...], Fraction] = field(default_factory=dict)

    def __post_init__(self):
        canonical: dict[tuple[int, ...], Fraction] = {}
        for key, value in self.values.items():
            key = tuple(sorted(key))
            if len(key) != self.order or any(not 0 <= i < self.rho for i in key):
                raise DimensionMismatch(f'monomial {key} does not fit order {self.order}, rank {self.rho}')
            value = Fraction(value)
            if key in canonical and canonical[key] != value:
                raise DimensionMismatch(f'monomial {key} given twice with different values')
            if value:
                canonical[key] = value
        object.__setattr__(self, 'values', canonical)

    def __hash__(self) -> int:
        return hash((self.order, self.rho, tuple(sorted(self.values.items()))))

    def __getitem__(self, key: Sequence[int]) -> Fraction:
        return self.values.get(tuple(sorted(key)), Fraction(0))

    def monomials(self) -> Iterable[tuple[int, ...]]:
        return combinations_with_replacement(range(self.rho), self.order)

    def contract(self, vector: DivisorClass | Sequence[Fraction]) -> 'PowerTensor':
        """``T(v, -, ..., -)`` as a symmetric tensor of one order less."""
        coords = vector.coords if isinstance(vector, DivisorClass) else tuple(vector)
        if len(coords) != self.rho:
            raise DimensionMismatch(f'expected a rank-{self.rho} class, got rank {len(coords)}')
        if self.order == 0:
            raise DimensionMismatch('cannot contract a scalar')
        result: dict[tuple[int, ...], Fraction] = {}
        for key in combinations_with_replacement(range(self.rho), self.order - 1):
            total = Fraction(0)
            for index, coefficient in enumerate(coords):
                if coefficient:
                    total += coefficient * self[key + (index,)]
            if total:
                result[key] = total
        return PowerTensor(self.order - 1, self.rho, result)

    def contract_many(self, vectors: Iterable[DivisorClass | Sequence[Fraction]]) -> 'PowerTensor':
        tensor = self
        for vector in vectors:
            tensor = tensor.contract(vector)
        return tensor

    def scalar(self) -> Fraction:
        if self.order != 0:
            raise DimensionMismatch(f'tensor of order {self.order} is not a scalar')
        return self.values.get((), Fraction(0))

    def as_curve(self) -> CurveClass:
        if self.order != 1:
            raise DimensionMismatch(f'tensor of order {self.order} is not a curve class')
        return CurveClass(tuple(self[(i,)] for i in range(self.rho)))

    def as_matrix(self) -> tuple[tuple[Fraction, ...], ...]:
        if self.order != 2:
            raise DimensionMismatch(f'tensor of order {self.order} is not a bilinear form')
        return tuple(tuple(self[(i, j)] for j in range(self.rho)) for i in range(self.rho))

    def __add__(self, other: 'PowerTensor') -> 'PowerTensor':
        if (self.order, self.rho) != (other.order, other.rho):
            raise DimensionMismatch('tensor shapes differ')
        merged = dict(self.values)
        for key, value in other.values.items():
            merged[key] = merged.get(key, Fraction(0)) + value
        return PowerTensor(self.order, self.rho, merged)

    def scaled(self, factor: Fraction | int) -> 'PowerTensor':
        return PowerTensor(self.order, self.rho, {k: factor * v for k, v in self.values.items()})


@dataclass(frozen=True)
class PolarisedLattice:
    n: int
    rho: int
    form: PowerTensor
    ample_gens: tuple[DivisorClass, ...]
    name: str = ''

    def __post_init__(self):
        if self.n < 2:
            raise DimensionMismatch(f'dimension must be at least 2, got {self.n}')
        if self.rho < 1:
            raise DimensionMismatch(f'rank must be at least 1, got {self.rho}')
        if (self.form.order, self.form.rho) != (self.n, self.rho):
            raise DimensionMismatch(
                f'form has order {self.form.order} and rank {self.form.rho}, expected {self.n} and {self.rho}'
            )
        if not self.ample_gens:
            raise DimensionMismatch('at least one ample generator is required')
        for gen in self.ample_gens:
            if gen.rank != self.rho:
                raise DimensionMismatch(f'ample generator {gen} has rank {gen.rank}, expected {self.rho}')

    def divisor(self, *values: object) -> DivisorClass:
        divisor = DivisorClass(tuple(values))
        self.check(divisor)
        return divisor

    def curve(self, *values: object) -> CurveClass:
        curve = CurveClass(tuple(values))
        self.check(curve)
        return curve

    def check(self, *classes: DivisorClass | CurveClass) -> None:
        for item in classes:
            if item.rank != self.rho:
                raise DimensionMismatch(f'{item} has rank {item.rank}, lattice {self.name!r} has rank {self.rho}')

    def basis_divisor(self, index: int) -> DivisorClass:
        return DivisorClass(tuple(Fraction(int(i == index)) for i in range(self.rho)))

    @property
    def barycenter(self) -> DivisorClass:
        total = DivisorClass.zero(self.rho)
        for gen in self.ample_gens:
            total = total + gen
        return total.scaled(Fraction(1, len(self.ample_gens)))
