"""Fincke-Pohst enumeration of integral points in a rational ellipsoid.

Points m in Z^rho with (m - t)^T Q (m - t) <= bound, Q positive definite.
With Q = L diag(d) L^T the form splits into d_j (y_j)^2 where
y_j = x_j + sum_{i>j} L_ij x_i and x = m - t, so coordinates are fixed from
the last one down and each level is an integer interval.
"""

from __future__ import annotations

import logging
from fractions import Fraction
from math import ceil, floor, isqrt
from typing import Iterator, Sequence

from core.exact import SingularMatrixError, ldl_decompose, quadratic_form, sub

from walls.exceptions import EnumerationBudgetExceeded

logger = logging.getLogger(__name__)


def _root_ceiling(value: Fraction) -> int:
    """Smallest integer s with s^2 >= value (value >= 0)."""
    s = isqrt(ceil(value))
    return s if s * s >= value else s + 1


class EllipsoidSearch:
    def __init__(self, gram: Sequence[Sequence[Fraction]], budget: int):
        try:
            self.diagonal, self.lower = ldl_decompose(gram)
        except SingularMatrixError as exc:
            raise ValueError(f'search form is singular: {exc}') from exc
        if any(d <= 0 for d in self.diagonal):
            raise ValueError('search form is not positive definite')
        self.gram = gram
        self.size = len(gram)
        self.budget = budget
        self.visited = 0

    def points(self, center: Sequence[Fraction], bound: Fraction) -> Iterator[tuple[int, ...]]:
        """Integral points within ``bound`` of ``center``, each checked exactly against Q."""
        if bound < 0:
            return
        coords: list[int] = [0] * self.size
        yield from self._level(self.size - 1, center, Fraction(bound), coords, bound)

    def _level(self, j, center, remaining, coords, bound):
        shift = sum(
            (self.lower[i][j] * (coords[i] - center[i]) for i in range(j + 1, self.size)),
            Fraction(0),
        )
        # d_j (m_j - middle)^2 <= remaining
        middle = center[j] - shift
        reach = _root_ceiling(remaining / self.diagonal[j])
        for value in range(floor(middle) - reach, ceil(middle) + reach + 1):
            used = self.diagonal[j] * (value - middle) ** 2
            if used > remaining:
                continue
            self.visited += 1
            if self.visited > self.budget:
                raise EnumerationBudgetExceeded(
                    f'lattice search visited more than {self.budget} nodes', visited=self.visited
                )
            coords[j] = value
            if j == 0:
                point = tuple(coords)
                if quadratic_form(self.gram, sub(point, center)) <= bound:
                    yield point
            else:
                yield from self._level(j - 1, center, remaining - used, coords, bound)
        coords[j] = 0
