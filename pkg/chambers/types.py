"""Regions of P(X), sign-vector cells and crossing parameters."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from core.exact import format_rational

from lattice.types import CurveClass, DivisorClass
from walls.types import Wall

from .exceptions import EmptyRegion

_SIGN_CHARS = {-1: '-', 0: '0', 1: '+'}


@dataclass(frozen=True)
class Region:
    """Convex hull of certified vertices; ``preimages[i]`` is an ample alpha with alpha^{n-1} ~ vertices[i]."""

    vertices: tuple[CurveClass, ...]
    preimages: tuple[DivisorClass, ...]
    residuals: tuple[Fraction, ...] = ()
    label: str = ''

    def __post_init__(self):
        if not self.vertices:
            raise EmptyRegion('a region needs at least one vertex')
        if len(self.preimages) != len(self.vertices):
            raise EmptyRegion(f'{len(self.vertices)} vertices but {len(self.preimages)} certified preimages')

    @property
    def rho(self) -> int:
        return self.vertices[0].rank

    @property
    def barycenter(self) -> CurveClass:
        total = self.vertices[0]
        for vertex in self.vertices[1:]:
            total = total + vertex
        return total.scaled(Fraction(1, len(self.vertices)))

    @property
    def reference(self) -> DivisorClass:
        """Interior ample reference phi*: the mean of the certified preimages."""
        total = self.preimages[0]
        for phi in self.preimages[1:]:
            total = total + phi
        return total.scaled(Fraction(1, len(self.preimages)))


def sign_label(signs: tuple[int, ...]) -> str:
    return ''.join(_SIGN_CHARS[s] for s in signs)


@dataclass(frozen=True)
class Chamber:
    """A relatively open cell of the arrangement restricted to a region."""

    signs: tuple[int, ...]
    representative: CurveClass

    @property
    def walls_active(self) -> tuple[int, ...]:
        return tuple(i for i, s in enumerate(self.signs) if s == 0)

    @property
    def is_open(self) -> bool:
        return not self.walls_active

    @property
    def label(self) -> str:
        return sign_label(self.signs) or '*'


@dataclass(frozen=True)
class AlgebraicNumber:
    """The unique root of ``minpoly`` (integer coefficients, leading first) inside ``interval``."""

    minpoly: tuple[int, ...]
    interval: tuple[Fraction, Fraction]

    @property
    def degree(self) -> int:
        return len(self.minpoly) - 1

    def __str__(self) -> str:
        low, high = self.interval
        return f'root of {list(self.minpoly)} in ({format_rational(low)}, {format_rational(high)})'


@dataclass(frozen=True)
class CrossingParameter:
    wall: Wall
    value: Fraction | None = None
    algebraic: AlgebraicNumber | None = None
    multiplicity: int = 1

    @property
    def is_rational(self) -> bool:
        return self.value is not None

    @property
    def location(self) -> Fraction:
        """Exact value, or the midpoint of the isolating interval for ordering."""
        if self.value is not None:
            return self.value
        low, high = self.algebraic.interval
        return (low + high) / 2

    def __str__(self) -> str:
        shown = format_rational(self.value) if self.is_rational else str(self.algebraic)
        return f'{self.wall}: {shown}'


@dataclass(frozen=True)
class SegmentCrossings:
    crossings: tuple[CrossingParameter, ...]
    # walls containing the whole segment, reported rather than raised
    contained: tuple[Wall, ...] = ()
    degree: int | None = None

    def distinct(self) -> tuple[tuple[Fraction, tuple[Wall, ...]], ...]:
        """Rational crossing values with the walls meeting there."""
        grouped: dict[Fraction, list[Wall]] = {}
        for crossing in self.crossings:
            if crossing.is_rational:
                grouped.setdefault(crossing.value, []).append(crossing.wall)
        return tuple((value, tuple(walls)) for value, walls in sorted(grouped.items()))


@dataclass(frozen=True)
class ChamberRepresentative:
    """Integral ample A, B and scale > 0 with scale . A^{n-2}B = target."""

    a: DivisorClass
    b: DivisorClass
    scale: Fraction
    target: CurveClass
    signs: tuple[int, ...]
    steps: int = 0


@dataclass(frozen=True)
class NonlinearityWitness:
    wall: Wall
    classes: tuple[DivisorClass, DivisorClass, DivisorClass]
    values: tuple[Fraction, Fraction, Fraction]
    signs: tuple[int, int, int] = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, 'signs', tuple((v > 0) - (v < 0) for v in self.values))
