"""Presented sheaves: direct sums of line-bundle classes or a total with declared subobjects.

Only numerical data is kept. Stability is tested against summand-generated
subobjects (direct sums) or the declared ones (filtered), never against
arbitrary subsheaves.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Sequence

from core.exact import format_rational

from chambers.types import sign_label
from lattice.types import DivisorClass, PolarisedLattice, PowerTensor
from walls.types import SheafNumerics

from .exceptions import SheafModelError


class SheafKind(str, Enum):
    DIRECT_SUM = 'direct-sum'
    FILTERED = 'filtered'


class VerdictStatus(str, Enum):
    STABLE = 'stable'
    PROPERLY_SEMISTABLE = 'properly-semistable'
    UNSTABLE = 'unstable'


def sum_numerics(lattice: PolarisedLattice, parts: Sequence[SheafNumerics], label: str = '') -> SheafNumerics:
    """Invariants of a direct sum: ranks and c1 add, c2 = sum c2_i + sum_{i<j} c1_i.c1_j."""
    if not parts:
        raise SheafModelError('a direct sum needs at least one summand')
    for part in parts:
        part.check(lattice)
    c1 = DivisorClass.zero(lattice.rho)
    c2 = PowerTensor(lattice.n - 2, lattice.rho)
    for part in parts:
        c2 = c2 + part.c2 + part.c1_product(lattice, c1)
        c1 = c1 + part.c1
    return SheafNumerics(sum(part.r for part in parts), c1, c2, label)


@dataclass(frozen=True)
class Subobject:
    numerics: SheafNumerics
    # summand indices for direct sums; empty for declared subobjects
    summands: tuple[int, ...] = ()
    declared: int | None = None

    @property
    def label(self) -> str:
        if self.summands:
            return '+'.join(str(i) for i in self.summands)
        return self.numerics.label or f'declared[{self.declared}]'


@dataclass(frozen=True)
class PresentedSheaf:
    kind: SheafKind
    total: SheafNumerics
    summands: tuple[SheafNumerics, ...] = ()
    subobjects: tuple[SheafNumerics, ...] = ()
    label: str = ''

    def __post_init__(self):
        if self.kind == SheafKind.DIRECT_SUM:
            if not self.summands:
                raise SheafModelError('a direct sum needs at least one summand')
            if any(s.r != 1 for s in self.summands):
                raise SheafModelError('direct-sum summands must be line-bundle classes (rank 1)')
            if self.total.r != len(self.summands):
                raise SheafModelError(f'total rank {self.total.r} != {len(self.summands)} summands')
        else:
            for index, sub in enumerate(self.subobjects):
                if not 1 <= sub.r <= self.total.r - 1:
                    raise SheafModelError(
                        f'declared subobject {index} has rank {sub.r}, not a proper rank of {self.total.r}'
                    )

    @classmethod
    def direct_sum(cls, lattice: PolarisedLattice, summands: Sequence[SheafNumerics], label: str = '') -> PresentedSheaf:
        total = sum_numerics(lattice, summands, label)
        return cls(SheafKind.DIRECT_SUM, total, tuple(summands), label=label)

    @classmethod
    def filtered(cls, total: SheafNumerics, subobjects: Sequence[SheafNumerics], label: str = '') -> PresentedSheaf:
        return cls(SheafKind.FILTERED, total, subobjects=tuple(subobjects), label=label or total.label)


@dataclass(frozen=True)
class Verdict:
    status: VerdictStatus
    slope: Fraction
    # max-slope subobject and its slope minus the total slope
    witness: Subobject | None = None
    gap: Fraction | None = None
    # labels of subobjects with slope >= the total slope
    destabilizing: frozenset[str] = frozenset()

    def __str__(self) -> str:
        if self.witness is None:
            return f'{self.status.value} (no proper subobject)'
        return f'{self.status.value}: {self.witness.label} gap {format_rational(self.gap)}'


@dataclass(frozen=True)
class HNGroup:
    slope: Fraction
    summands: tuple[int, ...]
    numerics: SheafNumerics


@dataclass(frozen=True)
class ConstancyReport:
    cell: tuple[int, ...]
    points: int
    verdict: Verdict

    @property
    def label(self) -> str:
        return sign_label(self.cell) or '*'
