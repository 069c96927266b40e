import logging
from fractions import Fraction
from typing import Sequence

from core.exact import SingularMatrixError, mat_vec, solve

from lattice.exceptions import DimensionMismatch, SingularLefschetz
from lattice.types import CurveClass, DivisorClass, PolarisedLattice, PowerTensor

logger = logging.getLogger(__name__)


class IntersectionService:
    """
    Multilinear intersection arithmetic on one polarised lattice.

    - intersection numbers and mixed products
    - the power map alpha -> alpha^k (alpha^{n-1} lands in N_1)
    - Lefschetz maps D -> D.H^{n-2} and their exact inverse
    """

    def __init__(self, lattice: PolarisedLattice):
        self.lattice = lattice

    def intersection_number(self, *divisors: DivisorClass) -> Fraction:
        if len(divisors) != self.lattice.n:
            raise DimensionMismatch(
                f'intersection_number takes {self.lattice.n} classes, got {len(divisors)}'
            )
        self.lattice.check(*divisors)
        return self.lattice.form.contract_many(divisors).scalar()

    def power_map(self, alpha: DivisorClass, k: int | None = None) -> CurveClass | PowerTensor:
        """alpha^k; for k = n-1 the functional D -> D.alpha^{n-1} as a CurveClass."""
        n = self.lattice.n
        k = n - 1 if k is None else k
        if not 1 <= k <= n - 1:
            raise DimensionMismatch(f'power must lie in 1..{n - 1}, got {k}')
        self.lattice.check(alpha)
        tensor = self.lattice.form.contract_many([alpha] * k)
        if k == n - 1:
            return tensor.as_curve()
        return tensor

    def top_power(self, alpha: DivisorClass) -> Fraction:
        return self.intersection_number(*([alpha] * self.lattice.n))

    def lefschetz_map(self, h: DivisorClass) -> tuple[tuple[Fraction, ...], ...]:
        """Matrix of L_H: M[i][j] = e_i . e_j . H^{n-2}."""
        self.lattice.check(h)
        return self.lattice.form.contract_many([h] * (self.lattice.n - 2)).as_matrix()

    def lefschetz_inverse(self, h: DivisorClass, curve: CurveClass) -> DivisorClass:
        self.lattice.check(h, curve)
        matrix = self.lefschetz_map(h)
        try:
            coords = solve(matrix, curve.coords)
        except SingularMatrixError as exc:
            raise SingularLefschetz(f'L_H is singular at H={h}: {exc}') from exc
        return DivisorClass(coords)

    def apply_lefschetz(self, h: DivisorClass, divisor: DivisorClass) -> CurveClass:
        return CurveClass(mat_vec(self.lefschetz_map(h), divisor.coords))

    def mixed_intersection(self, alpha: DivisorClass, beta: DivisorClass, j: int) -> Fraction:
        """alpha^{n-j} beta^j."""
        n = self.lattice.n
        if not 0 <= j <= n:
            raise DimensionMismatch(f'mixed index must lie in 0..{n}, got {j}')
        return self.intersection_number(*([alpha] * (n - j) + [beta] * j))

    def mixed_products(self, alpha: DivisorClass, beta: DivisorClass) -> tuple[Fraction, ...]:
        return tuple(self.mixed_intersection(alpha, beta, j) for j in range(self.lattice.n + 1))

    def complete_intersection_class(self, divisors: Sequence[DivisorClass]) -> CurveClass:
        """The curve class H_1 ... H_{n-1} of a multipolarisation."""
        if len(divisors) != self.lattice.n - 1:
            raise DimensionMismatch(
                f'a multipolarisation has {self.lattice.n - 1} classes, got {len(divisors)}'
            )
        self.lattice.check(*divisors)
        return self.lattice.form.contract_many(divisors).as_curve()

    def degree_vector(self, divisors: Sequence[DivisorClass]) -> tuple[Fraction, ...]:
        """d_i = H_1 ... H_{n-1} . H_i, i.e. H_i taken twice."""
        curve = self.complete_intersection_class(divisors)
        return tuple(curve.pair(h) for h in divisors)

    def bilinear_at(self, alpha: DivisorClass) -> tuple[tuple[Fraction, ...], ...]:
        """Gram matrix of (x, y) -> x.y.alpha^{n-2}."""
        return self.lefschetz_map(alpha)
