"""Slopes, discriminants and the Bogomolov-Hodge bound on wall classes."""

import logging
from dataclasses import dataclass
from fractions import Fraction

from core.exact import clear_denominators

from lattice.exceptions import DimensionMismatch
from lattice.types import CurveClass, DivisorClass, PolarisedLattice
from walls.exceptions import InvalidNumerics, NegativeBound
from walls.types import SheafNumerics

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SplitDiscriminant:
    """Delta(E0).phi^{n-2} = -a^2.phi^{n-2} / (2 r1 r2) + (r1/r0) Delta(E1).phi^{n-2} + (r2/r0) Delta(E2).phi^{n-2}."""

    zeta: DivisorClass
    normal_term: Fraction
    sub_term: Fraction
    quotient_term: Fraction
    total: Fraction

    @property
    def balanced(self) -> bool:
        return self.normal_term + self.sub_term + self.quotient_term == self.total


class InvariantsService:
    def __init__(self, lattice: PolarisedLattice):
        self.lattice = lattice

    def _check(self, sheaf: SheafNumerics) -> None:
        try:
            sheaf.check(self.lattice)
        except InvalidNumerics as exc:
            raise DimensionMismatch(str(exc)) from exc

    def _powers(self, phi: DivisorClass) -> list[DivisorClass]:
        self.lattice.check(phi)
        return [phi] * (self.lattice.n - 2)

    def slope(self, sheaf: SheafNumerics, gamma: CurveClass) -> Fraction:
        return gamma.pair(sheaf.c1) / sheaf.r

    def c2_pairing(self, sheaf: SheafNumerics, phi: DivisorClass) -> Fraction:
        self._check(sheaf)
        return sheaf.c2.contract_many(self._powers(phi)).scalar()

    def square_pairing(self, divisor: DivisorClass, phi: DivisorClass) -> Fraction:
        """D^2.phi^{n-2}."""
        return self.lattice.form.contract_many([divisor, divisor] + self._powers(phi)).scalar()

    def discriminant_pairing(self, sheaf: SheafNumerics, phi: DivisorClass) -> Fraction:
        r = sheaf.r
        c1_square = self.square_pairing(sheaf.c1, phi)
        return (self.c2_pairing(sheaf, phi) - Fraction(r - 1, 2 * r) * c1_square) / r

    def wall_bound(self, sheaf: SheafNumerics, phi: DivisorClass, r1: int) -> Fraction:
        """B(phi, r1) = 2 r1 (r - r1) Delta.phi^{n-2}, the bound on -a^2.phi^{n-2}."""
        if not 1 <= r1 <= sheaf.r - 1:
            raise ValueError(f'split rank must lie in 1..{sheaf.r - 1}, got {r1}')
        delta = self.discriminant_pairing(sheaf, phi)
        if delta < 0:
            raise NegativeBound(f'Delta.phi^(n-2) = {delta} < 0 at phi = {phi}', value=delta)
        return 2 * r1 * (sheaf.r - r1) * delta

    def wall_slack(self, sheaf: SheafNumerics, zeta: DivisorClass, r1: int, phi: DivisorClass) -> Fraction:
        """r^2 B(phi, r1) + zeta^2.phi^{n-2}; the candidate passes at phi when this is >= -margin."""
        return sheaf.r ** 2 * self.wall_bound(sheaf, phi, r1) + self.square_pairing(zeta, phi)

    def quotient(self, total: SheafNumerics, sub: SheafNumerics) -> SheafNumerics:
        """Invariants of E0 / E1 from c(E0) = c(E1) c(E2)."""
        self._check(total)
        self._check(sub)
        if not 1 <= sub.r <= total.r - 1:
            raise InvalidNumerics(f'subobject rank {sub.r} is not a proper rank of {total.r}')
        c1 = total.c1 - sub.c1
        mixed = sub.c1_product(self.lattice, c1)
        c2 = total.c2 + sub.c2.scaled(-1) + mixed.scaled(-1)
        return SheafNumerics(total.r - sub.r, c1, c2, f'{total.label}/{sub.label}' if total.label else '')

    def split_discriminant(self, total: SheafNumerics, sub: SheafNumerics, phi: DivisorClass) -> SplitDiscriminant:
        quotient = self.quotient(total, sub)
        r0, r1, r2 = total.r, sub.r, quotient.r
        zeta = sub.c1.scaled(r0) - total.c1.scaled(r1)
        return SplitDiscriminant(
            zeta=zeta,
            normal_term=-self.square_pairing(zeta, phi) / (r0 ** 2 * 2 * r1 * r2),
            sub_term=Fraction(r1, r0) * self.discriminant_pairing(sub, phi),
            quotient_term=Fraction(r2, r0) * self.discriminant_pairing(quotient, phi),
            total=self.discriminant_pairing(total, phi),
        )

    def sub_c1(self, total: SheafNumerics, zeta: DivisorClass, r1: int) -> DivisorClass:
        """c1(E1) = (zeta + r1 c1) / r, integral exactly on the wall coset."""
        value = (zeta + total.c1.scaled(r1)).scaled(Fraction(1, total.r))
        _, denominator = clear_denominators(value.coords)
        if denominator != 1:
            raise InvalidNumerics(f'zeta = {zeta} is not in the coset of r1 = {r1}')
        return value
