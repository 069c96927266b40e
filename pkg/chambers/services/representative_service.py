"""Chamber representatives as complete-intersection classes A^{n-2}B.

Given a rational point C of the cell and an ample H with H^{n-1} close to C,
A is H rounded to denominators 2^k and B = L_A^{-1}(C), so A^{n-2}B = C
exactly; B is close to H, hence ample, once A is fine enough.
"""

import logging
from fractions import Fraction
from typing import Sequence

from django.conf import settings

from core.exact import clear_denominators, round_vector
from core.metrics import log_event

from chambers.exceptions import BNotAmple, NoRationalPointFound, VerificationFailed
from chambers.services.decomposition_service import sign_vector
from chambers.types import Chamber, ChamberRepresentative
from lattice.exceptions import PowerInversionError, SingularLefschetz
from lattice.services.intersection_service import IntersectionService
from lattice.services.newton_service import PowerInversionService
from lattice.services.positivity_service import PositivityService
from lattice.types import CurveClass, DivisorClass, PolarisedLattice
from walls.types import Wall

logger = logging.getLogger(__name__)


class RepresentativeService:
    def __init__(self, lattice: PolarisedLattice, walls: Sequence[Wall]):
        self.lattice = lattice
        self.walls = tuple(walls)
        self.intersections = IntersectionService(lattice)
        self.positivity = PositivityService(lattice)
        self.newton = PowerInversionService(lattice)

    def _target(self, chamber: Chamber) -> CurveClass:
        target = chamber.representative
        if sign_vector(target, self.walls) != chamber.signs:
            raise NoRationalPointFound(f'representative {target} is not in cell {chamber.label}')
        return target

    def _seed(self, target: CurveClass, seed: DivisorClass | None) -> DivisorClass:
        if seed is not None:
            return seed
        try:
            return self.newton.invert_with_continuation(target).alpha
        except PowerInversionError as exc:
            raise NoRationalPointFound(f'{target} has no certified ample preimage: {exc}') from exc

    def chamber_representative(
        self,
        chamber: Chamber,
        seed: DivisorClass | None = None,
        budget: int | None = None,
    ) -> ChamberRepresentative:
        budget = settings.REPRESENTATIVE_BUDGET if budget is None else budget
        target = self._target(chamber)
        seed = self._seed(target, seed)
        n = self.lattice.n

        last_b = None
        for bits in range(budget + 1):
            a = DivisorClass(round_vector(seed.coords, bits))
            if not self.positivity.is_in_ample_cone(a, strict=True):
                log_event('representative_step', level=logging.DEBUG, bits=bits, outcome='a-not-ample')
                continue
            try:
                b = self.intersections.lefschetz_inverse(a, target)
            except SingularLefschetz:
                log_event('representative_step', level=logging.DEBUG, bits=bits, outcome='singular')
                continue
            if not self.positivity.is_in_ample_cone(b, strict=True):
                last_b = b
                log_event('representative_step', level=logging.DEBUG, bits=bits, outcome='b-not-ample')
                continue
            representative = self._integral(a, b, target, chamber, bits)
            log_event('representative_found', cell=chamber.label, bits=bits, n=n)
            return representative
        raise BNotAmple(f'no ample B for cell {chamber.label} within {budget} refinements', b=last_b)

    def _integral(self, a: DivisorClass, b: DivisorClass, target: CurveClass, chamber: Chamber, bits: int):
        n = self.lattice.n
        b_int, b_mult = clear_denominators(b.coords)
        if n == 2:
            a_int, a_mult = b_int, 1
        else:
            a_int, a_mult = clear_denominators(a.coords)
        a_class, b_class = DivisorClass(a_int), DivisorClass(b_int)
        scale = Fraction(1, a_mult ** (n - 2) * b_mult)
        curve = self.intersections.complete_intersection_class([a_class] * (n - 2) + [b_class])
        if curve.scaled(scale) != target:
            raise VerificationFailed(f'A^(n-2)B = {curve} does not rescale to {target}')
        signs = sign_vector(curve, self.walls)
        if signs != chamber.signs:
            raise VerificationFailed(f'A^(n-2)B lies in {signs}, expected {chamber.signs}')
        return ChamberRepresentative(a=a_class, b=b_class, scale=scale, target=target, signs=signs, steps=bits)
