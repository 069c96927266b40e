"""Where a wall is crossed along a segment, in N_1 and in Amp(X).

In N_1 the equation a.gamma_u = 0 is linear. Pulled back to ample classes it
becomes f(tau) = a.phi_tau^{n-1}, homogeneous of degree n-1 along the
segment, and its roots can be irrational. Those are returned as an
irreducible integer polynomial with a Sturm-certified isolating interval.
"""

import logging
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Sequence

from django.conf import settings
from sympy import QQ, Poly, Rational, Symbol, sturm

from core.metrics import log_event

from chambers.exceptions import IdenticallyZero, NotFound, PreconditionFailed
from chambers.types import AlgebraicNumber, CrossingParameter, NonlinearityWitness, SegmentCrossings
from lattice.services.positivity_service import PositivityService
from lattice.types import CurveClass, DivisorClass, PolarisedLattice
from walls.types import Wall

logger = logging.getLogger(__name__)

TAU = Symbol('tau')
_ISOLATION_WIDTH = Rational(1, 100)


def _fraction(value) -> Fraction:
    value = Rational(value)
    return Fraction(int(value.p), int(value.q))


def _sign_changes(values) -> int:
    nonzero = [v for v in values if v != 0]
    return sum(1 for left, right in zip(nonzero, nonzero[1:]) if (left > 0) != (right > 0))


def sturm_count(poly: Poly, low: Rational, high: Rational) -> int:
    """Distinct real roots of ``poly`` in (low, high]."""
    sequence = sturm(poly)
    return _sign_changes([p.eval(low) for p in sequence]) - _sign_changes([p.eval(high) for p in sequence])


def segment_crossings_n1(start: CurveClass, end: CurveClass, walls: Sequence[Wall]) -> SegmentCrossings:
    """Exact u in [0, 1] with a.((1-u) gamma_0 + u gamma_1) = 0, sorted by u then normal."""
    if start == end:
        raise PreconditionFailed('segment endpoints coincide')
    crossings, contained = [], []
    for wall in walls:
        left, right = wall.evaluate(start), wall.evaluate(end)
        if left == 0 and right == 0:
            contained.append(wall)
            continue
        if left == right:
            continue
        u = left / (left - right)
        if 0 <= u <= 1:
            crossings.append(CrossingParameter(wall, value=u))
    crossings.sort(key=lambda c: (c.value, c.wall.normal))
    if contained:
        logger.info('walls containing the segment: %s', ', '.join(map(str, contained)))
    return SegmentCrossings(tuple(crossings), tuple(contained), degree=1)


class CrossingService:
    def __init__(self, lattice: PolarisedLattice):
        self.lattice = lattice
        self.positivity = PositivityService(lattice)

    def pullback_polynomial(self, wall: Wall, start: DivisorClass, end: DivisorClass) -> Poly:
        """f(tau) = a.((1-tau)H_0 + tau H_1)^{n-1} over QQ, from the mixed numbers a.H_0^{n-1-j}H_1^j."""
        self.lattice.check(start, end)
        n = self.lattice.n
        normal = DivisorClass(wall.normal)
        expression = 0
        for j in range(n):
            mixed = self.lattice.form.contract_many([normal] + [start] * (n - 1 - j) + [end] * j).scalar()
            if mixed:
                coefficient = comb(n - 1, j) * Rational(mixed.numerator, mixed.denominator)
                expression += coefficient * (1 - TAU) ** (n - 1 - j) * TAU ** j
        return Poly(expression, TAU, domain=QQ)

    def evaluate(self, wall: Wall, phi: DivisorClass) -> Fraction:
        """a.phi^{n-1}."""
        return self.lattice.form.contract_many([DivisorClass(wall.normal)] + [phi] * (self.lattice.n - 1)).scalar()

    def segment_crossings_amp(self, start: DivisorClass, end: DivisorClass, wall: Wall) -> SegmentCrossings:
        for name, alpha in (('H_0', start), ('H_1', end)):
            if not self.positivity.is_in_ample_cone(alpha, strict=True):
                raise PreconditionFailed(f'{name} = {alpha} is not in the modelled ample cone')
        poly = self.pullback_polynomial(wall, start, end)
        if poly.is_zero:
            raise IdenticallyZero(f'wall {wall} contains the power image of {start} -- {end}')
        _, integral = poly.clear_denoms(convert=True)
        _, factors = integral.factor_list()

        crossings = []
        for factor, multiplicity in factors:
            if factor.degree() < 1:
                continue
            if factor.degree() == 1:
                a, b = factor.all_coeffs()
                root = Rational(-b, a)
                if 0 <= root <= 1:
                    crossings.append(CrossingParameter(wall, value=_fraction(root), multiplicity=multiplicity))
                continue
            for low, high in self._isolate(factor):
                minpoly = tuple(int(c) for c in factor.all_coeffs())
                number = AlgebraicNumber(minpoly, (_fraction(low), _fraction(high)))
                crossings.append(CrossingParameter(wall, algebraic=number, multiplicity=multiplicity))
        crossings.sort(key=lambda c: c.location)
        log_event('amp_crossings', wall=str(wall), degree=poly.degree(), roots=len(crossings),
                  irrational=sum(1 for c in crossings if not c.is_rational))
        return SegmentCrossings(tuple(crossings), degree=poly.degree())

    def _isolate(self, factor: Poly) -> list[tuple[Rational, Rational]]:
        """Isolating intervals inside (0, 1) of an irreducible factor of degree >= 2 (no rational roots)."""
        found = []
        for (low, high), _ in factor.intervals():
            while low <= 0 <= high or low <= 1 <= high or high - low > _ISOLATION_WIDTH:
                low, high = factor.refine_root(low, high, eps=(high - low) / 2)
            if not (0 < low and high < 1):
                continue
            if sturm_count(factor, low, high) != 1:
                raise ArithmeticError(f'Sturm count does not certify a unique root in ({low}, {high})')
            found.append((low, high))
        return found

    # --- degree n-1 mechanism ---

    def nonlinearity_witness(self, wall: Wall, budget: int | None = None) -> NonlinearityWitness:
        """Collinear ample H - tD, H, H + tD where the signs of a.phi^{n-1} rule out an affine wall.

        For an affine function, equal non-zero signs at both ends force the
        same sign in the middle, and zeros at both ends force a zero.
        """
        n, rho = self.lattice.n, self.lattice.rho
        if n < 3 or rho < 2:
            raise PreconditionFailed(f'walls pulled back to Amp are linear for n = {n}, rho = {rho}')
        budget = settings.NONLINEARITY_BUDGET if budget is None else budget
        tried = 0
        for center in self._centers():
            for step in (Fraction(1, 2 ** k) for k in range(1, 6)):
                for direction in self._directions():
                    if tried >= budget:
                        raise NotFound(f'no nonlinearity witness for {wall} within {budget} triples', tried=tried)
                    triple = (center - direction.scaled(step), center, center + direction.scaled(step))
                    if not all(self.positivity.is_in_ample_cone(h, strict=True) for h in triple):
                        continue
                    tried += 1
                    values = tuple(self.evaluate(wall, h) for h in triple)
                    witness = NonlinearityWitness(wall, triple, values)
                    if _not_affine(witness.signs):
                        log_event('nonlinearity_witness', wall=str(wall), tried=tried, signs=witness.signs)
                        return witness
        raise NotFound(f'no nonlinearity witness for {wall} within the search grid', tried=tried)

    def _centers(self):
        gens = self.lattice.ample_gens
        yield self.lattice.barycenter
        for weights in ((2, 1), (1, 2), (3, 1), (1, 3)):
            for i, j in combinations(range(len(gens)), 2):
                total = DivisorClass.zero(self.lattice.rho)
                for index, gen in enumerate(gens):
                    weight = weights[0] if index == i else weights[1] if index == j else 1
                    total = total + gen.scaled(Fraction(weight, sum(weights) + len(gens) - 2))
                yield total

    def _directions(self):
        rho = self.lattice.rho
        basis = [self.lattice.basis_divisor(i) for i in range(rho)]
        for i, j in combinations(range(rho), 2):
            yield basis[i] - basis[j]
        for i, j in combinations(range(rho), 2):
            yield basis[i] + basis[j]
        yield from basis


def _not_affine(signs: tuple[int, int, int]) -> bool:
    first, middle, last = signs
    if first == last == 0:
        return middle != 0
    return first == last and middle != first
