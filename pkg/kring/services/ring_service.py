import logging
from fractions import Fraction
from math import factorial
from typing import Sequence

from kring.exceptions import ModelInconsistent, ModelMismatch
from kring.types import CohomologyModel, KClass
from lattice.types import DivisorClass

logger = logging.getLogger(__name__)


class RingService:
    """
    Ring operations on Chern characters of one cohomology model.

    chi(a) = integral of ch(a).T, and the Euler pairing is chi(a.b).
    """

    def __init__(self, model: CohomologyModel):
        self.model = model

    def klass(self, ch: Sequence[Fraction], label: str = '') -> KClass:
        if len(ch) != self.model.size:
            raise ModelMismatch(f'model {self.model.name!r} has {self.model.size} basis elements, got {len(ch)}')
        return KClass(tuple(ch), label, self.model.name)

    def _own(self, *classes: KClass) -> None:
        for item in classes:
            if len(item.ch) != self.model.size or (item.model_name and item.model_name != self.model.name):
                raise ModelMismatch(f'class {item} does not belong to model {self.model.name!r}')

    def zero(self) -> KClass:
        return self.klass((Fraction(0),) * self.model.size)

    def unit(self) -> KClass:
        return self.klass(self.model.unit(), '[O_X]')

    def point(self) -> KClass:
        return self.klass(self.model.point_class, '[O_x]')

    def basis_lift(self, index: int) -> KClass:
        return self.klass(self.model.basis_vector(index), f'e[{self.model.basis[index].name}]')

    def product(self, *classes: KClass) -> KClass:
        self._own(*classes)
        value = self.model.unit()
        for item in classes:
            value = self.model.multiply(value, item.ch)
        return self.klass(value)

    def power(self, a: KClass, exponent: int) -> KClass:
        return self.product(*([a] * exponent)) if exponent else self.unit()

    def chi(self, a: KClass) -> Fraction:
        self._own(a)
        return self.model.integrate(self.model.multiply(a.ch, self.model.todd))

    def euler_pairing(self, a: KClass, b: KClass) -> Fraction:
        return self.chi(self.product(a, b))

    def line_class(self, divisor: DivisorClass | Sequence[Fraction]) -> KClass:
        """ch(O(D)) = exp(D), truncated above degree n."""
        coords = divisor.coords if isinstance(divisor, DivisorClass) else tuple(divisor)
        d = self.model.embed(coords)
        total = list(self.model.unit())
        term = self.model.unit()
        for k in range(1, self.model.n + 1):
            term = self.model.multiply(term, d)
            for index, value in enumerate(term):
                total[index] += value / factorial(k)
        return self.klass(total, f'O({", ".join(str(c) for c in coords)})')

    def divisor_structure_class(self, divisor: DivisorClass, multiple: int = 1) -> KClass:
        """[O_{aH}] = 1 - [O(-aH)]; for a = 1 this is h = 1 - e^{-H}."""
        if multiple < 1:
            raise ValueError(f'multiple must be positive, got {multiple}')
        return (self.unit() - self.line_class(divisor.scaled(-multiple))).labelled(f'O_{multiple}H')

    def is_numerically_trivial(self, a: KClass) -> bool:
        """ch(a) = 0, cross-checked against the Euler pairing with every basis lift."""
        self._own(a)
        by_ch = a.is_zero()
        by_pairing = all(self.euler_pairing(a, self.basis_lift(i)) == 0 for i in range(self.model.size))
        if by_ch != by_pairing:
            raise ModelInconsistent(
                f'model {self.model.name!r}: {a} has ch zero={by_ch} but pairs trivially={by_pairing}'
            )
        return by_ch
