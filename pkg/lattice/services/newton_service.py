import logging
from dataclasses import dataclass
from fractions import Fraction

from django.conf import settings
from sympy import integer_nthroot

from core.exact import SingularMatrixError, round_vector, solve, sub, sup_norm
from core.metrics import log_event, timed

from lattice.exceptions import (
    NoConvergence,
    PowerInversionError,
    ResultNotAmple,
    SingularDerivative,
)
from lattice.services.intersection_service import IntersectionService
from lattice.services.positivity_service import PositivityService
from lattice.types import CurveClass, DivisorClass, PolarisedLattice

logger = logging.getLogger(__name__)

_SEED_BITS = 16


@dataclass(frozen=True)
class NewtonResult:
    alpha: DivisorClass
    residual: tuple[Fraction, ...]
    residual_norm: Fraction
    iterations: int
    trace: tuple[Fraction, ...]


class PowerInversionService:
    """
    Newton inversion of p(alpha) = alpha^{n-1} with rational iterates.

    The derivative at alpha is beta -> (n-1) alpha^{n-2} beta, i.e. (n-1)
    times the Lefschetz matrix. Iterates are rounded to denominators 2^B
    after every step to keep their size bounded.
    """

    def __init__(self, lattice: PolarisedLattice):
        self.lattice = lattice
        self.intersections = IntersectionService(lattice)
        self.positivity = PositivityService(lattice)

    def default_seed(self, gamma: CurveClass) -> DivisorClass:
        """Barycenter of the generators scaled so that gamma.b matches b^n."""
        barycenter = self.lattice.barycenter
        top = self.intersections.top_power(barycenter)
        target = gamma.pair(barycenter)
        if top <= 0 or target <= 0:
            return barycenter
        ratio = target / top
        exponent = self.lattice.n - 1
        unit = 1 << (_SEED_BITS * exponent)
        root, _ = integer_nthroot(int(ratio * unit), exponent)
        factor = Fraction(int(root), 1 << _SEED_BITS)
        if factor <= 0:
            return barycenter
        return barycenter.scaled(factor)

    def newton_invert_power(
        self,
        gamma: CurveClass,
        seed: DivisorClass | None = None,
        tol: Fraction | None = None,
        max_iter: int | None = None,
        bits: int | None = None,
    ) -> NewtonResult:
        self.lattice.check(gamma)
        tol = Fraction(settings.NEWTON_TOLERANCE if tol is None else tol)
        max_iter = settings.NEWTON_MAX_ITER if max_iter is None else max_iter
        bits = settings.NEWTON_DENOMINATOR_BITS if bits is None else bits
        if tol <= 0:
            raise ValueError('tolerance must be positive')
        alpha = self.default_seed(gamma) if seed is None else seed
        self.lattice.check(alpha)
        scale = self.lattice.n - 1

        trace: list[Fraction] = []
        with timed('newton_done', lattice=self.lattice.name) as metric:
            for iteration in range(max_iter + 1):
                image = self.intersections.power_map(alpha).coords
                residual = sub(gamma.coords, image)
                norm = sup_norm(residual)
                trace.append(norm)
                log_event('newton_iterate', level=logging.DEBUG, lattice=self.lattice.name,
                          iteration=iteration, residual=norm)
                if norm <= tol:
                    break
                if iteration == max_iter:
                    raise NoConvergence(
                        f'no convergence to {gamma} after {max_iter} iterations (residual {float(norm):.3e})',
                        trace=trace,
                    )
                jacobian = tuple(
                    tuple(scale * v for v in row) for row in self.intersections.lefschetz_map(alpha)
                )
                try:
                    step = solve(jacobian, residual)
                except SingularMatrixError as exc:
                    raise SingularDerivative(f'derivative singular at {alpha}') from exc
                alpha = DivisorClass(round_vector([a + s for a, s in zip(alpha.coords, step)], bits))
            metric.update(iterations=len(trace) - 1, residual=trace[-1])

        if not self.positivity.is_in_ample_cone(alpha, strict=True):
            raise ResultNotAmple(f'preimage {alpha} of {gamma} is not in the modelled ample cone', alpha=alpha)
        return NewtonResult(
            alpha=alpha,
            residual=tuple(residual),
            residual_norm=trace[-1],
            iterations=len(trace) - 1,
            trace=tuple(trace),
        )

    def invert_with_continuation(
        self,
        gamma: CurveClass,
        seed: DivisorClass | None = None,
        max_splits: int = 4,
    ) -> NewtonResult:
        """Newton from ``seed``; on failure walk p(seed) -> gamma in 2, 4, ... stages."""
        seed = self.default_seed(gamma) if seed is None else seed
        try:
            return self.newton_invert_power(gamma, seed=seed)
        except PowerInversionError as first_error:
            error: PowerInversionError = first_error
        start = self.intersections.power_map(seed)
        for split in range(1, max_splits + 1):
            stages = 1 << split
            current = seed
            try:
                for stage in range(1, stages + 1):
                    weight = Fraction(stage, stages)
                    target = start.scaled(1 - weight) + gamma.scaled(weight)
                    current = self.newton_invert_power(target, seed=current).alpha
                logger.debug('continuation with %d stages reached %s', stages, gamma)
                return self.newton_invert_power(gamma, seed=current)
            except PowerInversionError as exc:
                error = exc
        raise error
