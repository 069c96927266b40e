"""Exact slope verdicts for presented sheaves and how they move over N_1."""

import logging
import random
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from core.metrics import log_event

from chambers.exceptions import PreconditionFailed, VerificationFailed
from chambers.services.crossing_service import segment_crossings_n1
from chambers.services.decomposition_service import DecompositionService
from chambers.types import Chamber, CrossingParameter
from lattice.types import CurveClass, PolarisedLattice
from sheafmodel.exceptions import ConstancyViolation, IdenticallyEqual
from sheafmodel.types import (
    ConstancyReport,
    HNGroup,
    PresentedSheaf,
    SheafKind,
    Subobject,
    Verdict,
    VerdictStatus,
    sum_numerics,
)
from walls.types import SheafNumerics, Wall

logger = logging.getLogger(__name__)


def slope(numerics: SheafNumerics, gamma: CurveClass) -> Fraction:
    return gamma.pair(numerics.c1) / numerics.r


def wall_normal(sub: SheafNumerics, total: SheafNumerics):
    """r.c1(sub) - r(sub).c1; its pairing with gamma has the sign of mu(sub) - mu(total)."""
    return sub.c1.scaled(total.r) - total.c1.scaled(sub.r)


class StabilityService:
    def __init__(self, lattice: PolarisedLattice):
        self.lattice = lattice

    def subobjects(self, sheaf: PresentedSheaf) -> list[Subobject]:
        if sheaf.kind == SheafKind.FILTERED:
            return [Subobject(sub, declared=index) for index, sub in enumerate(sheaf.subobjects)]
        count = len(sheaf.summands)
        found = []
        for size in range(1, count):
            for indices in combinations(range(count), size):
                numerics = sum_numerics(self.lattice, [sheaf.summands[i] for i in indices])
                found.append(Subobject(numerics, summands=indices))
        return found

    def verdict(self, sheaf: PresentedSheaf, gamma: CurveClass) -> Verdict:
        self.lattice.check(gamma)
        total = slope(sheaf.total, gamma)
        if sheaf.kind == SheafKind.DIRECT_SUM:
            return self._direct_sum_verdict(sheaf, gamma, total)
        candidates = self.subobjects(sheaf)
        if not candidates:
            return Verdict(VerdictStatus.STABLE, total)
        slopes = [slope(c.numerics, gamma) for c in candidates]
        best = max(slopes)
        witness = candidates[slopes.index(best)]
        return self._verdict(total, witness, best - total, self._destabilizing(candidates, slopes, total))

    def _direct_sum_verdict(self, sheaf: PresentedSheaf, gamma: CurveClass, total: Fraction) -> Verdict:
        """The maximal destabilizer is the sum of the max-slope summands."""
        if len(sheaf.summands) == 1:
            return Verdict(VerdictStatus.STABLE, total)
        slopes = [slope(s, gamma) for s in sheaf.summands]
        best = max(slopes)
        indices = tuple(i for i, s in enumerate(slopes) if s == best)
        if len(indices) == len(slopes):
            # all slopes equal: every summand is a proper subobject of the same slope
            indices = indices[:1]
        numerics = sum_numerics(self.lattice, [sheaf.summands[i] for i in indices])
        witness = Subobject(numerics, summands=indices)
        candidates = self.subobjects(sheaf)
        sub_slopes = [slope(c.numerics, gamma) for c in candidates]
        return self._verdict(total, witness, best - total, self._destabilizing(candidates, sub_slopes, total))

    def _destabilizing(self, candidates, slopes, total) -> frozenset[str]:
        return frozenset(c.label for c, s in zip(candidates, slopes) if s >= total)

    def _verdict(self, total: Fraction, witness: Subobject, gap: Fraction, destabilizing: frozenset[str]) -> Verdict:
        if gap > 0:
            status = VerdictStatus.UNSTABLE
        elif gap == 0:
            status = VerdictStatus.PROPERLY_SEMISTABLE
        else:
            status = VerdictStatus.STABLE
        return Verdict(status, total, witness, gap, destabilizing)

    # --- filtrations ---

    def _canonical(self, sheaf: PresentedSheaf) -> list[int]:
        return sorted(range(len(sheaf.summands)), key=lambda i: (sheaf.summands[i].c1.coords, sheaf.summands[i].label))

    def hn_filtration(self, sheaf: PresentedSheaf, gamma: CurveClass) -> tuple[HNGroup, ...]:
        """Summands grouped by strictly decreasing slope; the first group is the maximal destabilizer."""
        if sheaf.kind != SheafKind.DIRECT_SUM:
            raise PreconditionFailed('Harder-Narasimhan groups are computed for direct sums only')
        self.lattice.check(gamma)
        groups: dict[Fraction, list[int]] = {}
        for index in self._canonical(sheaf):
            groups.setdefault(slope(sheaf.summands[index], gamma), []).append(index)
        return tuple(
            HNGroup(value, tuple(indices), sum_numerics(self.lattice, [sheaf.summands[i] for i in indices]))
            for value, indices in sorted(groups.items(), reverse=True)
        )

    def jordan_holder_factors(self, sheaf: PresentedSheaf, gamma: CurveClass) -> tuple[SheafNumerics, ...]:
        """Stable factors of a semistable direct sum: its summands in canonical order."""
        groups = self.hn_filtration(sheaf, gamma)
        if len(groups) > 1:
            raise PreconditionFailed(f'{sheaf.label or "sheaf"} is unstable at {gamma}; no Jordan-Holder gradation')
        return tuple(sheaf.summands[i] for i in self._canonical(sheaf))

    # --- walls and crossings ---

    def destabilizing_walls(self, sheaf: PresentedSheaf) -> tuple[Wall, ...]:
        """One wall per subobject whose slope is not identically the total slope."""
        walls = {
            Wall(normal.coords)
            for sub in self.subobjects(sheaf)
            if not (normal := wall_normal(sub.numerics, sheaf.total)).is_zero()
        }
        return tuple(sorted(walls, key=lambda wall: wall.normal))

    def crossing_parameter(
        self,
        sub: SheafNumerics,
        total: SheafNumerics,
        start: CurveClass,
        end: CurveClass,
    ) -> CrossingParameter | None:
        """The u in [0, 1] where mu(sub) = mu(total) along start -- end, if any."""
        if not 1 <= sub.r < total.r:
            raise PreconditionFailed(f'subobject rank {sub.r} is not a proper rank of {total.r}')
        normal = wall_normal(sub, total)
        if normal.is_zero():
            raise IdenticallyEqual(f'{sub.label or "sub"} has the slope of {total.label or "total"} everywhere')
        wall = Wall(normal.coords)
        result = segment_crossings_n1(start, end, [wall])
        if result.contained:
            raise IdenticallyEqual(f'the segment lies on the wall {wall}')
        if not result.crossings:
            return None
        crossing = result.crossings[0]
        gamma = start.scaled(1 - crossing.value) + end.scaled(crossing.value)
        if slope(sub, gamma) != slope(total, gamma):
            raise VerificationFailed(f'slopes differ at the crossing {gamma}')
        log_event('slope_crossing', sub=sub.label, total=total.label, u=crossing.value)
        return crossing

    def chamber_constancy_check(
        self,
        sheaf: PresentedSheaf,
        decomposition: DecompositionService,
        chamber: Chamber,
        samples: int,
        rng: random.Random,
    ) -> ConstancyReport:
        """The verdict (and on open cells the destabilizing set) at the representative and at sampled cell points."""
        reference = self.verdict(sheaf, chamber.representative)
        key = self._constancy_key(reference, chamber)
        points = decomposition.sample_points(chamber, samples, rng) if samples else []
        for point in points:
            current = self.verdict(sheaf, point)
            if self._constancy_key(current, chamber) != key:
                raise ConstancyViolation(
                    f'cell {chamber.label}: {reference} at {chamber.representative} but {current} at {point}',
                    first=chamber.representative,
                    second=point,
                )
        log_event('chamber_constant', cell=chamber.label, points=len(points) + 1, status=reference.status.value)
        return ConstancyReport(chamber.signs, len(points) + 1, reference)

    def _constancy_key(self, verdict: Verdict, chamber: Chamber):
        return (verdict.status, verdict.destabilizing) if chamber.is_open else (verdict.status,)
