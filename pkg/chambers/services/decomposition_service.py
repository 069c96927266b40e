"""Sign-vector cells of a wall arrangement inside a convex region.

Points of the region are gamma = sum w_i v_i with w >= 0, sum w = 1. A sign
vector is realized when the margin LP

    maximize t  subject to  s_j a_j.gamma >= t (s_j != 0),  a_j.gamma = 0 (s_j = 0),  t <= 1

has a positive optimum (or is feasible with no strict rows). Cells are grown
one wall at a time from the realized prefixes.
"""

import logging
import random
from fractions import Fraction
from typing import Sequence

from core.concurrency import parallel_map
from core.exact import combine
from core.lp import LinearProgram, LPStatus
from core.metrics import timed

from chambers.exceptions import EmptyRegion
from chambers.types import Chamber, Region
from lattice.types import CurveClass
from walls.types import Wall

logger = logging.getLogger(__name__)


def sign_vector(gamma: CurveClass, walls: Sequence[Wall]) -> tuple[int, ...]:
    return tuple(wall.side(gamma) for wall in walls)


def same_chamber(first: CurveClass, second: CurveClass, walls: Sequence[Wall]) -> bool:
    return sign_vector(first, walls) == sign_vector(second, walls)


class DecompositionService:
    def __init__(self, region: Region, walls: Sequence[Wall]):
        self.region = region
        self.walls = tuple(walls)
        for wall in self.walls:
            if wall.rank != region.rho:
                raise EmptyRegion(f'wall {wall} has rank {wall.rank}, region has rank {region.rho}')

    # --- LPs over vertex weights ---

    def _program(self, signs: Sequence[int], with_margin: bool) -> LinearProgram:
        vertices = self.region.vertices
        count = len(vertices)
        width = count + 1 if with_margin else count
        program = LinearProgram(width)
        program.add([1] * count + [0] * (width - count), '=', 1)
        for wall, s in zip(self.walls, signs):
            values = [wall.evaluate(v) for v in vertices]
            if s == 0:
                program.add(values + [0] * (width - count), '=', 0)
            elif with_margin:
                program.add([s * v for v in values] + [-1], '>=', 0)
            else:
                program.add([s * v for v in values], '>=', 0)
        if with_margin:
            program.add([0] * count + [1], '<=', 1)
        return program

    def _point(self, weights: Sequence[Fraction]) -> CurveClass:
        return CurveClass(combine(weights[:len(self.region.vertices)], [v.coords for v in self.region.vertices]))

    def margin_point(self, signs: Sequence[int]) -> CurveClass | None:
        """A point with exactly the given signs, or None when the cell is empty."""
        program = self._program(signs, with_margin=True)
        objective = [0] * len(self.region.vertices) + [1]
        result = program.maximize(objective)
        if result.status != LPStatus.OPTIMAL:
            return None
        strict = any(s != 0 for s in signs)
        if strict and result.objective <= 0:
            return None
        return self._point(result.x)

    def extreme_points(self, signs: Sequence[int]) -> list[CurveClass]:
        """Optima of +-coordinate objectives over the closed cell."""
        points: list[CurveClass] = []
        count = len(self.region.vertices)
        for row in range(self.region.rho):
            for direction in (1, -1):
                program = self._program(signs, with_margin=False)
                objective = [direction * v.coords[row] for v in self.region.vertices]
                result = program.maximize(objective)
                if result.status == LPStatus.OPTIMAL:
                    point = self._point(result.x[:count])
                    if point not in points:
                        points.append(point)
        return points

    def representative(self, signs: Sequence[int]) -> CurveClass | None:
        """Half the margin point plus half the mean of the closed cell's extreme points."""
        margin = self.margin_point(signs)
        if margin is None:
            return None
        extremes = self.extreme_points(signs)
        if not extremes:
            return margin
        mean = CurveClass(combine([Fraction(1, len(extremes))] * len(extremes), [p.coords for p in extremes]))
        return margin.scaled(Fraction(1, 2)) + mean.scaled(Fraction(1, 2))

    # --- decomposition ---

    def _extend(self, prefix: tuple[int, ...]) -> list[tuple[int, ...]]:
        return [prefix + (s,) for s in (-1, 0, 1) if self.margin_point(prefix + (s,)) is not None]

    def decompose(self) -> tuple[Chamber, ...]:
        with timed('chambers_decomposed', region=self.region.label, walls=len(self.walls)) as metric:
            prefixes: list[tuple[int, ...]] = [()]
            if self.margin_point(()) is None:
                raise EmptyRegion('the region has no points')
            for _ in self.walls:
                grown = parallel_map(self._extend, prefixes)
                prefixes = [signs for group in grown for signs in group]
            chambers = tuple(
                Chamber(signs, self.representative(signs)) for signs in sorted(prefixes)
            )
            metric['cells'] = len(chambers)
        return chambers

    def sample_points(self, chamber: Chamber, count: int, rng: random.Random) -> list[CurveClass]:
        """Exact points of the cell: random convex mixes of the extreme points with positive weight on a strict point."""
        anchor = self.margin_point(chamber.signs)
        if anchor is None:
            raise EmptyRegion(f'cell {chamber.label} is empty')
        extremes = self.extreme_points(chamber.signs) or [anchor]
        samples = []
        for _ in range(count):
            raw = [Fraction(rng.randint(1, 16))] + [Fraction(rng.randint(0, 16)) for _ in extremes]
            total = sum(raw)
            weights = [w / total for w in raw]
            samples.append(CurveClass(combine(weights, [anchor.coords] + [p.coords for p in extremes])))
        return samples
