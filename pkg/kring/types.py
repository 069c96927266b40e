"""Graded cohomology models and Chern-character classes.

A model stores a finite rational ring by structure constants on a named,
degree-sorted basis whose first element is the unit. Classes of K(X)_num are
represented by their Chern characters in that basis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from core.exact import Vector, dot, format_rational

from .exceptions import ModelMismatch


@dataclass(frozen=True)
class BasisElement:
    name: str
    degree: int


@dataclass(frozen=True)
class CohomologyModel:
    name: str
    n: int
    basis: tuple[BasisElement, ...]
    # (i, j) -> sparse product {k: coefficient}, stored for i <= j
    mult: Mapping[tuple[int, int], Mapping[int, Fraction]]
    integral: Vector
    todd: Vector
    point_class: Vector
    divisor_embedding: tuple[Vector, ...]
    chi_O: Fraction = Fraction(1)
    _index: Mapping[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, '_index', {element.name: i for i, element in enumerate(self.basis)})

    def __hash__(self) -> int:
        # mult is a dict of dicts and stays out of the hash
        return hash((self.name, self.n, self.basis, self.integral, self.todd, self.point_class,
                     self.divisor_embedding, self.chi_O))

    @property
    def size(self) -> int:
        return len(self.basis)

    @property
    def rho(self) -> int:
        return len(self.divisor_embedding)

    def index(self, name: str) -> int:
        return self._index[name]

    def degree(self, index: int) -> int:
        return self.basis[index].degree

    def basis_vector(self, index: int) -> Vector:
        return tuple(Fraction(int(i == index)) for i in range(self.size))

    def unit(self) -> Vector:
        return self.basis_vector(0)

    def multiply(self, left: Sequence[Fraction], right: Sequence[Fraction]) -> Vector:
        result = [Fraction(0)] * self.size
        for i, a in enumerate(left):
            if not a:
                continue
            for j, b in enumerate(right):
                if not b:
                    continue
                key = (i, j) if i <= j else (j, i)
                for k, coefficient in self.mult.get(key, {}).items():
                    result[k] += a * b * coefficient
        return tuple(result)

    def integrate(self, values: Sequence[Fraction]) -> Fraction:
        return dot(self.integral, values)

    def embed(self, coords: Sequence[Fraction]) -> Vector:
        """Degree-one class of a lattice divisor."""
        if len(coords) != self.rho:
            raise ModelMismatch(f'model {self.name!r} embeds rank {self.rho}, got rank {len(coords)}')
        result = [Fraction(0)] * self.size
        for weight, image in zip(coords, self.divisor_embedding):
            for k, value in enumerate(image):
                result[k] += weight * value
        return tuple(result)

    def degree_part(self, values: Sequence[Fraction], degree: int) -> Vector:
        return tuple(v if self.degree(k) == degree else Fraction(0) for k, v in enumerate(values))


@dataclass(frozen=True)
class KClass:
    """A class of K(X)_num by its Chern character; ``ch[0]`` is the rank."""

    ch: Vector
    label: str = ''
    model_name: str = ''

    def __post_init__(self):
        object.__setattr__(self, 'ch', tuple(Fraction(v) for v in self.ch))

    @property
    def rank(self) -> Fraction:
        return self.ch[0]

    def _check(self, other: 'KClass') -> None:
        if len(self.ch) != len(other.ch) or (
            self.model_name and other.model_name and self.model_name != other.model_name
        ):
            raise ModelMismatch(f'classes from {self.model_name!r} and {other.model_name!r} cannot be combined')

    def __add__(self, other: 'KClass') -> 'KClass':
        self._check(other)
        return KClass(tuple(a + b for a, b in zip(self.ch, other.ch)), model_name=self.model_name)

    def __sub__(self, other: 'KClass') -> 'KClass':
        self._check(other)
        return KClass(tuple(a - b for a, b in zip(self.ch, other.ch)), model_name=self.model_name)

    def __neg__(self) -> 'KClass':
        return KClass(tuple(-a for a in self.ch), self.label, self.model_name)

    def scaled(self, factor: Fraction | int) -> 'KClass':
        return KClass(tuple(factor * a for a in self.ch), model_name=self.model_name)

    def labelled(self, label: str) -> 'KClass':
        return KClass(self.ch, label, self.model_name)

    def is_zero(self) -> bool:
        return not any(self.ch)

    def __str__(self) -> str:
        body = '[' + ', '.join(format_rational(c) for c in self.ch) + ']'
        return f'{self.label} {body}' if self.label else body
