import logging
from fractions import Fraction
from typing import Sequence

from core.lp import LinearProgram, LPStatus
from core.metrics import log_event

from chambers.exceptions import EmptyRegion
from chambers.types import Region
from lattice.exceptions import PowerInversionError
from lattice.services.intersection_service import IntersectionService
from lattice.services.newton_service import PowerInversionService
from lattice.types import CurveClass, DivisorClass, PolarisedLattice
from walls.exceptions import RegionNotInP

logger = logging.getLogger(__name__)

DEFAULT_RADIUS = Fraction(1, 4)
_MAX_HALVINGS = 8


class RegionService:
    """Certified regions of P(X): every vertex gets an ample Newton preimage."""

    def __init__(self, lattice: PolarisedLattice):
        self.lattice = lattice
        self.intersections = IntersectionService(lattice)
        self.newton = PowerInversionService(lattice)

    def certify(
        self,
        vertices: Sequence[CurveClass],
        seeds: Sequence[DivisorClass | None] | None = None,
        label: str = '',
    ) -> Region:
        if not vertices:
            raise EmptyRegion('a region needs at least one vertex')
        self.lattice.check(*vertices)
        seeds = list(seeds) if seeds is not None else [None] * len(vertices)
        preimages, residuals = [], []
        for index, (vertex, seed) in enumerate(zip(vertices, seeds)):
            try:
                result = self.newton.invert_with_continuation(vertex, seed=seed)
            except PowerInversionError as exc:
                raise RegionNotInP(f'vertex {index} = {vertex} is not certified in P(X): {exc}') from exc
            preimages.append(result.alpha)
            residuals.append(result.residual_norm)
        region = Region(tuple(vertices), tuple(preimages), tuple(residuals), label)
        log_event('region_certified', lattice=self.lattice.name, label=label,
                  vertices=len(vertices), residual=max(residuals))
        return region

    def region_around(self, center: CurveClass, radius: Fraction, label: str = '') -> Region:
        """Cross-polytope center +- radius e_i (a segment when rho = 1)."""
        if radius <= 0:
            raise EmptyRegion(f'radius must be positive, got {radius}')
        self.lattice.check(center)
        vertices = []
        for i in range(self.lattice.rho):
            for direction in (1, -1):
                offset = [Fraction(0)] * self.lattice.rho
                offset[i] = direction * radius
                vertices.append(center + CurveClass(tuple(offset)))
        return self.certify(vertices, label=label or f'around {center} radius {radius}')

    def around_divisor(self, alpha: DivisorClass, radius: Fraction) -> Region:
        return self.region_around(self.intersections.power_map(alpha), radius, f'around p({alpha}) radius {radius}')

    def default_region(self) -> Region:
        """Around p(barycenter) with radius 1/4, halved until every vertex certifies."""
        center = self.intersections.power_map(self.lattice.barycenter)
        radius = DEFAULT_RADIUS
        for _ in range(_MAX_HALVINGS):
            try:
                return self.region_around(center, radius, label='default')
            except RegionNotInP as exc:
                logger.info('default region radius %s rejected: %s', radius, exc)
                radius /= 2
        return self.region_around(center, radius, label='default')

    def segment(self, start: CurveClass, end: CurveClass) -> Region:
        return self.certify([start, end], label=f'segment {start} -- {end}')

    def contains(self, region: Region, gamma: CurveClass) -> bool:
        """gamma is a convex combination of the vertices (exact LP)."""
        program = LinearProgram(len(region.vertices))
        for row in range(region.rho):
            program.add([v.coords[row] for v in region.vertices], '=', gamma.coords[row])
        program.add([1] * len(region.vertices), '=', 1)
        return program.maximize([0] * len(region.vertices)).status == LPStatus.OPTIMAL
