import logging
import random
from dataclasses import dataclass
from fractions import Fraction

from core.exact import (
    SingularMatrixError,
    determinant,
    leading_minors,
    mat_mul,
    nullspace,
    quadratic_form,
    solve,
    transpose,
)
from core.lp import LinearProgram, LPStatus

from lattice.exceptions import DegenerateForm, DimensionMismatch, NonGeometricForm
from lattice.services.intersection_service import IntersectionService
from lattice.types import DivisorClass, PolarisedLattice

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HodgeIndexCertificate:
    passed: bool
    minors: tuple[Fraction, ...]
    witness: DivisorClass | None = None
    witness_value: Fraction | None = None


@dataclass(frozen=True)
class KhovanskiiTeissierReport:
    holds: bool
    slacks: tuple[Fraction, ...]
    mixed: tuple[Fraction, ...]

    @property
    def outer_slack(self) -> Fraction:
        """(alpha^{n-1}beta)(alpha beta^{n-1}) - alpha^n beta^n; non-negative under log-concavity."""
        n = len(self.mixed) - 1
        return self.mixed[1] * self.mixed[n - 1] - self.mixed[0] * self.mixed[n]


class PositivityService:
    """Ample-subcone membership, Hodge index and Khovanskii-Teissier checks."""

    def __init__(self, lattice: PolarisedLattice):
        self.lattice = lattice
        self.intersections = IntersectionService(lattice)

    def ample_margin(self, divisor: DivisorClass) -> Fraction | None:
        """Largest t <= 1 with D = sum l_i g_i, all l_i >= t; None outside the closed cone.

        Solved as an LP in (mu, t) with l_i = t + mu_i.
        """
        self.lattice.check(divisor)
        gens = self.lattice.ample_gens
        count = len(gens)
        program = LinearProgram(count + 1)
        for row in range(self.lattice.rho):
            coefficients = [g.coords[row] for g in gens]
            coefficients.append(sum((g.coords[row] for g in gens), Fraction(0)))
            program.add(coefficients, '=', divisor.coords[row])
        program.add([0] * count + [1], '<=', 1)
        result = program.maximize([0] * count + [1])
        if result.status != LPStatus.OPTIMAL:
            return None
        return result.objective

    def is_in_ample_cone(self, divisor: DivisorClass, strict: bool = True) -> bool:
        margin = self.ample_margin(divisor)
        if margin is None:
            return False
        return margin > 0 if strict else True

    def verify_hodge_index(self, alpha: DivisorClass) -> HodgeIndexCertificate:
        """Certify x -> x^2 alpha^{n-2} is negative definite on alpha-primitive classes."""
        top = self.intersections.top_power(alpha)
        if top <= 0:
            raise DimensionMismatch(f'Hodge index needs alpha^n > 0, got {top} at {alpha}')
        gram = self.intersections.bilinear_at(alpha)
        functional = self.intersections.power_map(alpha).coords
        kernel = nullspace([functional], self.lattice.rho)
        if not kernel:
            return HodgeIndexCertificate(passed=True, minors=())

        basis_t = kernel
        restricted = mat_mul(mat_mul(basis_t, gram), transpose(basis_t))
        if determinant(restricted) == 0:
            null = nullspace(restricted, len(kernel))
            witness = _lift(null[0], kernel) if null else None
            raise DegenerateForm(f'restricted Hodge form is singular at {alpha}', witness=witness)

        minors = leading_minors(restricted)
        for k, minor in enumerate(minors, start=1):
            expected = 1 if k % 2 == 0 else -1
            if minor * expected > 0:
                continue
            local = _schur_witness(restricted, k)
            witness = _lift(local, kernel)
            value = quadratic_form(restricted, local)
            logger.info('hodge index fails at %s: minor %d = %s', alpha, k, minor)
            return HodgeIndexCertificate(passed=False, minors=minors, witness=witness, witness_value=value)
        return HodgeIndexCertificate(passed=True, minors=minors)

    def khovanskii_teissier(self, alpha: DivisorClass, beta: DivisorClass) -> KhovanskiiTeissierReport:
        mixed = self.intersections.mixed_products(alpha, beta)
        n = self.lattice.n
        slacks = tuple(mixed[j + 1] ** 2 - mixed[j] * mixed[j + 2] for j in range(n - 1))
        holds = all(s >= 0 for s in slacks)
        if not holds:
            logger.warning('Khovanskii-Teissier violated on %s: slacks %s', self.lattice.name, slacks)
        return KhovanskiiTeissierReport(holds=holds, slacks=slacks, mixed=mixed)

    def injectivity_certificate(self, alpha: DivisorClass, beta: DivisorClass) -> Fraction:
        """(alpha^{n-1}beta)(alpha beta^{n-1}) - alpha^n beta^n, the product of the KT inequalities.

        Positive for non-proportional ample pairs; a negative value means the
        stored form cannot come from a projective variety.
        """
        report = self.khovanskii_teissier(alpha, beta)
        if report.outer_slack < 0:
            raise NonGeometricForm(
                f'{self.lattice.name}: alpha^n beta^n exceeds (alpha^(n-1)beta)(alpha beta^(n-1)) '
                f'at {alpha}, {beta}'
            )
        return report.outer_slack

    def random_ample_class(self, rng: random.Random, denominator: int = 12) -> DivisorClass:
        """Strictly positive rational combination of the generators."""
        total = DivisorClass.zero(self.lattice.rho)
        for gen in self.lattice.ample_gens:
            total = total + gen.scaled(Fraction(rng.randint(1, denominator), denominator))
        return total


def _lift(local, kernel) -> DivisorClass:
    coords = [Fraction(0)] * len(kernel[0])
    for weight, vector in zip(local, kernel):
        for index, value in enumerate(vector):
            coords[index] += weight * value
    return DivisorClass(tuple(coords))


def _schur_witness(gram, k: int) -> tuple[Fraction, ...]:
    """Vector x in the first k coordinates with x^T G x = D_k / D_{k-1}."""
    size = len(gram)
    if k == 1:
        return (Fraction(1),) + (Fraction(0),) * (size - 1)
    block = [row[: k - 1] for row in gram[: k - 1]]
    column = [gram[i][k - 1] for i in range(k - 1)]
    try:
        head = solve(block, column)
    except SingularMatrixError:
        head = (Fraction(0),) * (k - 1)
    return tuple(-h for h in head) + (Fraction(1),) + (Fraction(0),) * (size - k)
