"""Exact two-phase simplex over ``Fraction``.

Problems are small (tens of variables), so a dense tableau with Bland's rule
is enough and never cycles.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Sequence

logger = logging.getLogger(__name__)


class LPStatus(str, Enum):
    OPTIMAL = 'optimal'
    INFEASIBLE = 'infeasible'
    UNBOUNDED = 'unbounded'


@dataclass(frozen=True)
class LPResult:
    status: LPStatus
    x: tuple[Fraction, ...] = ()
    objective: Fraction | None = None

    @property
    def feasible(self) -> bool:
        return self.status != LPStatus.INFEASIBLE


@dataclass
class LinearProgram:
    """``maximize c.x`` subject to the added rows and ``x >= 0``."""

    num_vars: int
    rows: list[tuple[tuple[Fraction, ...], str, Fraction]] = field(default_factory=list)

    def add(self, coeffs: Sequence[Fraction | int], sense: str, rhs: Fraction | int) -> None:
        if sense not in ('<=', '>=', '='):
            raise ValueError(f'unknown constraint sense {sense!r}')
        if len(coeffs) != self.num_vars:
            raise ValueError(f'expected {self.num_vars} coefficients, got {len(coeffs)}')
        self.rows.append((tuple(Fraction(c) for c in coeffs), sense, Fraction(rhs)))

    def maximize(self, objective: Sequence[Fraction | int]) -> LPResult:
        return _Tableau(self).solve(tuple(Fraction(c) for c in objective))


_FLIP = {'<=': '>=', '>=': '<=', '=': '='}


class _Tableau:
    def __init__(self, program: LinearProgram):
        self.n = program.num_vars
        normalized = []
        for coeffs, sense, rhs in program.rows:
            if rhs < 0:
                coeffs, sense, rhs = tuple(-c for c in coeffs), _FLIP[sense], -rhs
            normalized.append((coeffs, sense, rhs))

        slack_count = sum(1 for _, sense, _ in normalized if sense != '=')
        artificial_count = sum(1 for _, sense, _ in normalized if sense != '<=')
        self.first_artificial = self.n + slack_count
        self.width = self.first_artificial + artificial_count

        self.rows: list[list[Fraction]] = []
        self.basis: list[int] = []
        slack = self.n
        artificial = self.first_artificial
        for coeffs, sense, rhs in normalized:
            row = list(coeffs) + [Fraction(0)] * (self.width - self.n) + [rhs]
            if sense == '<=':
                row[slack] = Fraction(1)
                self.basis.append(slack)
                slack += 1
            else:
                if sense == '>=':
                    row[slack] = Fraction(-1)
                    slack += 1
                row[artificial] = Fraction(1)
                self.basis.append(artificial)
                artificial += 1
            self.rows.append(row)

    def _pivot(self, pivot_row: int, column: int) -> None:
        row = self.rows[pivot_row]
        value = row[column]
        row[:] = [v / value for v in row]
        for index, other in enumerate(self.rows):
            if index != pivot_row and other[column] != 0:
                factor = other[column]
                other[:] = [a - factor * b for a, b in zip(other, row)]
        self.basis[pivot_row] = column

    def _run(self, cost: list[Fraction], allowed: int) -> bool:
        """Optimise ``cost`` over columns ``< allowed``; False when unbounded."""
        while True:
            entering = None
            for column in range(allowed):
                if column in self.basis:
                    continue
                reduced = cost[column] - sum(
                    (cost[b] * row[column] for b, row in zip(self.basis, self.rows)),
                    Fraction(0),
                )
                if reduced > 0:
                    entering = column
                    break
            if entering is None:
                return True
            leaving = None
            best = None
            for index, row in enumerate(self.rows):
                if row[entering] > 0:
                    ratio = row[-1] / row[entering]
                    if (
                        best is None
                        or ratio < best
                        or (ratio == best and self.basis[index] < self.basis[leaving])
                    ):
                        best, leaving = ratio, index
            if leaving is None:
                return False
            self._pivot(leaving, entering)

    def _value(self, cost: list[Fraction]) -> Fraction:
        return sum((cost[b] * row[-1] for b, row in zip(self.basis, self.rows)), Fraction(0))

    def solve(self, objective: tuple[Fraction, ...]) -> LPResult:
        if self.width > self.first_artificial:
            phase_one = [Fraction(0)] * self.first_artificial + [Fraction(-1)] * (
                self.width - self.first_artificial
            )
            self._run(phase_one, self.width)
            if self._value(phase_one) < 0:
                return LPResult(status=LPStatus.INFEASIBLE)
            self._drive_out_artificials()

        cost = list(objective) + [Fraction(0)] * (self.width - self.n)
        if not self._run(cost, self.first_artificial):
            return LPResult(status=LPStatus.UNBOUNDED)
        x = [Fraction(0)] * self.n
        for b, row in zip(self.basis, self.rows):
            if b < self.n:
                x[b] = row[-1]
        return LPResult(status=LPStatus.OPTIMAL, x=tuple(x), objective=self._value(cost))

    def _drive_out_artificials(self) -> None:
        redundant = []
        for index in range(len(self.rows)):
            if self.basis[index] < self.first_artificial:
                continue
            row = self.rows[index]
            column = next((c for c in range(self.first_artificial) if row[c] != 0), None)
            if column is None:
                redundant.append(index)
            else:
                self._pivot(index, column)
        for index in reversed(redundant):
            del self.rows[index]
            del self.basis[index]
        if redundant:
            logger.debug('lp dropped %d redundant rows', len(redundant))
