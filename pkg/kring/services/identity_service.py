"""Class-level identities behind determinant line bundles of restricted families.

For a multipolarisation H_1..H_{n-1} write h_i = 1 - [O(-H_i)] and
R_k = h_1...h_k, the class of the complete intersection X^(k) of the first
k divisors. Restriction to X^(k) is modelled virtually: a class u on X^(k)
is compared with classes b from X through chi_X(u . R_k . b), so nothing is
ever built on the subvarieties themselves.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import prod
from typing import Sequence

from core.metrics import log_event

from kring.exceptions import DegenerateMultipolarisation, InvalidPointLift
from kring.services.ring_service import RingService
from kring.types import CohomologyModel, KClass
from lattice.exceptions import DimensionMismatch
from lattice.services.intersection_service import IntersectionService
from lattice.types import DivisorClass, PolarisedLattice

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    passed: bool
    difference: KClass | None = None
    # Euler pairings of the difference against basis lifts, for virtual checks
    pairings: tuple[Fraction, ...] = ()


@dataclass(frozen=True)
class TelescopingStep:
    step: int
    degree: Fraction
    secondway: IdentityCheck
    firstway: IdentityCheck

    @property
    def passed(self) -> bool:
        return self.secondway.passed and self.firstway.passed


@dataclass(frozen=True)
class TelescopingReport:
    steps: tuple[TelescopingStep, ...]
    exponent: Fraction
    passed: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, 'passed', all(step.passed for step in self.steps))


class IdentityService:
    def __init__(self, model: CohomologyModel, lattice: PolarisedLattice):
        if (model.n, model.rho) != (lattice.n, lattice.rho):
            raise DimensionMismatch(f'model {model.name!r} does not match lattice {lattice.name!r}')
        self.model = model
        self.lattice = lattice
        self.ring = RingService(model)
        self.intersections = IntersectionService(lattice)

    # --- building blocks ---

    def _h(self, h_list: Sequence[DivisorClass], multiples: Sequence[int] | None = None) -> list[KClass]:
        n = self.lattice.n
        if len(h_list) != n - 1:
            raise DimensionMismatch(f'a multipolarisation on {self.lattice.name!r} has {n - 1} classes, got {len(h_list)}')
        multiples = multiples or [1] * len(h_list)
        return [self.ring.divisor_structure_class(h, a) for h, a in zip(h_list, multiples)]

    def _chain(self, hs: Sequence[KClass], start: int, stop: int) -> KClass:
        """h_start ... h_stop (1-based, inclusive); the unit when empty."""
        return self.ring.product(*hs[start - 1:stop])

    def degrees(self, h_list: Sequence[DivisorClass]) -> tuple[Fraction, ...]:
        return self.intersections.degree_vector(h_list)

    def point_lift(self, hs: Sequence[KClass], degrees: Sequence[Fraction], k: int) -> KClass:
        """Lift of the point class of X^(k): [O_x] for k = 0, else h_k...h_{n-1} / d_k."""
        if k == 0:
            return self.ring.point()
        if not degrees[k - 1]:
            raise DegenerateMultipolarisation(f'd_{k} vanishes on {self.lattice.name!r}; the H_i must be ample')
        return self._chain(hs, k, len(hs)).scaled(1 / degrees[k - 1])

    def u_class(
        self, i: int, c: KClass, h_list: Sequence[DivisorClass], point: KClass | None = None
    ) -> KClass:
        """u_i(c|X^(n-1-i)) in virtual form; i = n-1 is u_{n-1}(c) on X itself.

        ``point`` replaces the default point lift of X^(n-1-i). It must restrict
        to a degree-n class with chi(R_k . point) = 1.
        """
        hs = self._h(h_list)
        self._check_index(i)
        if point is not None:
            restricted = self.ring.product(self._chain(hs, 1, self.lattice.n - 1 - i), point)
            top = self.model.degree_part(restricted.ch, self.model.n)
            if top != restricted.ch or self.ring.chi(restricted) != 1:
                raise InvalidPointLift(f'{point} is not a point lift of X^({self.lattice.n - 1 - i})')
        return self._u(i, c, hs, self.degrees(h_list), point)

    def _check_index(self, i: int) -> None:
        n = self.lattice.n
        if not 0 <= i <= n - 1:
            raise DimensionMismatch(f'u-class index must lie in 0..{n - 1}, got {i}')

    def _u(
        self, i: int, c: KClass, hs: Sequence[KClass], degrees: Sequence[Fraction], point: KClass | None = None
    ) -> KClass:
        self._check_index(i)
        n = self.lattice.n
        level = n - 1 - i
        tail = self._chain(hs, n - i, n - 1)
        coefficient = self.ring.chi(self.ring.product(c, self._chain(hs, 1, level), tail))
        lift = self.point_lift(hs, degrees, level) if point is None else point
        return (tail.scaled(-c.rank) + lift.scaled(coefficient)).labelled(f'u_{i}')

    def w_class(self, c: KClass, h_list: Sequence[DivisorClass]) -> KClass:
        hs = self._h(h_list)
        return self._w(c, hs, level=0)

    def _w(self, c: KClass, hs: Sequence[KClass], level: int) -> KClass:
        """Auxiliary class comparing X^(level+1) inside X^(level)."""
        n = self.lattice.n
        base = self._chain(hs, 1, level)
        cut = hs[level]
        full = self._chain(hs, level + 1, n - 1)
        rest = self._chain(hs, level + 2, n - 1)
        first = self.ring.chi(self.ring.product(c, base, full, cut))
        second = self.ring.chi(self.ring.product(c, base, full))
        return (rest.scaled(-first) + full.scaled(second)).labelled('w')

    def _virtual_check(self, name: str, difference: KClass, restriction: KClass) -> IdentityCheck:
        pairings = tuple(
            self.ring.chi(self.ring.product(difference, restriction, self.ring.basis_lift(k)))
            for k in range(self.model.size)
        )
        return IdentityCheck(name, passed=not any(pairings), difference=difference, pairings=pairings)

    # --- identities ---

    def verify_secondway(self, c: KClass, h_list: Sequence[DivisorClass]) -> IdentityCheck:
        """w.h_1 - d_1 u_{n-1}(c) is numerically trivial on X."""
        hs = self._h(h_list)
        degrees = self.degrees(h_list)
        w = self._w(c, hs, level=0)
        difference = self.ring.product(w, hs[0]) - self._u(self.lattice.n - 1, c, hs, degrees).scaled(degrees[0])
        check = IdentityCheck('secondway', self.ring.is_numerically_trivial(difference), difference)
        self._log(check)
        return check

    def verify_firstway_virtual(self, c: KClass, h_list: Sequence[DivisorClass]) -> IdentityCheck:
        """w|X' and d_1 u_{n-2}(c|X') agree against every class restricted from X."""
        hs = self._h(h_list)
        degrees = self.degrees(h_list)
        w = self._w(c, hs, level=0)
        difference = w - self._u(self.lattice.n - 2, c, hs, degrees).scaled(degrees[0])
        check = self._virtual_check('firstway', difference, hs[0])
        self._log(check)
        return check

    def verify_scaling(self, c: KClass, h_list: Sequence[DivisorClass], multiples: Sequence[int]) -> IdentityCheck:
        """u_{n-1}(c; a_1H_1, ...) - (prod a_i) u_{n-1}(c; H_1, ...) is numerically trivial."""
        if len(multiples) != len(h_list) or any(a < 1 for a in multiples):
            raise ValueError(f'expected {len(h_list)} positive multiples, got {list(multiples)}')
        scaled = self._h(h_list, multiples)
        plain = self._h(h_list)
        degrees = self.degrees(h_list)
        n = self.lattice.n
        difference = self._u(n - 1, c, scaled, degrees) - self._u(n - 1, c, plain, degrees).scaled(prod(multiples))
        check = IdentityCheck('scaling', self.ring.is_numerically_trivial(difference), difference)
        self._log(check)
        return check

    def verify_telescoping(self, c: KClass, h_list: Sequence[DivisorClass]) -> TelescopingReport:
        """One secondway/firstway pair per step, cutting X^(n-i) out of X^(n-1-i), i = 1..n-1."""
        hs = self._h(h_list)
        degrees = self.degrees(h_list)
        n = self.lattice.n
        steps = []
        for i in range(1, n):
            level = n - 1 - i
            base = self._chain(hs, 1, level)
            d = degrees[n - i - 1]
            w = self._w(c, hs, level)
            secondway = self._virtual_check(
                f'secondway[{i}]',
                self.ring.product(w, hs[level]) - self._u(i, c, hs, degrees).scaled(d),
                base,
            )
            firstway = self._virtual_check(
                f'firstway[{i}]',
                w - self._u(i - 1, c, hs, degrees).scaled(d),
                self.ring.product(base, hs[level]),
            )
            steps.append(TelescopingStep(step=i, degree=d, secondway=secondway, firstway=firstway))
        report = TelescopingReport(steps=tuple(steps), exponent=prod(degrees, start=Fraction(1)))
        log_event('kring_identity', identity='telescoping', model=self.model.name,
                  passed=report.passed, exponent=report.exponent)
        return report

    def _log(self, check: IdentityCheck) -> None:
        log_event('kring_identity', identity=check.name, model=self.model.name, passed=check.passed)
        if not check.passed:
            logger.warning('%s fails on %s: difference %s', check.name, self.model.name, check.difference)
