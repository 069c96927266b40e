"""Candidate destabilizing walls of fixed sheaf invariants over a region of P(X).

Superset: for each split rank r1 the classes zeta in -r1.c1 + r.N^1 inside an
ellipsoid of the auxiliary form Q(x) = -x^2.phi*^{n-2} + lambda (x.phi*^{n-1})^2.
Filter: the hyperplane zeta^perp meets the region, and at some certified
point phi the bound 0 < -zeta^2.phi^{n-2} <= r^2 B(phi, r1) + margin holds.
"""

import logging
import threading
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from math import ceil, floor
from typing import Iterable, Sequence

from django.conf import settings

from core.concurrency import parallel_map
from core.exact import inverse, is_positive_definite, mat_mul, primitive, sign
from core.metrics import log_event, timed

from chambers.types import Region
from lattice.exceptions import NonGeometricForm, PowerInversionError
from lattice.services.intersection_service import IntersectionService
from lattice.services.newton_service import PowerInversionService
from lattice.types import CurveClass, DivisorClass, PolarisedLattice
from walls.exceptions import EnumerationBudgetExceeded, NegativeBound
from walls.services.invariants_service import InvariantsService
from walls.services.lattice_search import EllipsoidSearch
from walls.types import SheafNumerics, Wall, WallClass

logger = logging.getLogger(__name__)

_MAX_LAMBDA_DOUBLINGS = 64


@dataclass(frozen=True)
class Candidate:
    wall_class: WallClass
    witness: CurveClass
    slack: Fraction


@dataclass(frozen=True)
class WallReport:
    walls: tuple[Wall, ...]
    radius: Fraction
    passes: int
    visited: int
    reference: DivisorClass
    warnings: tuple[str, ...] = ()


def wall_meets_region(wall: Wall, region: Region) -> tuple[bool, CurveClass | None]:
    """Closed-form feasibility over the vertex representation: a vertex on the wall or a sign change."""
    values = [wall.evaluate(v) for v in region.vertices]
    for vertex, value in zip(region.vertices, values):
        if value == 0:
            return True, vertex
    for i, j in combinations(range(len(values)), 2):
        if values[i] * values[j] < 0:
            return True, _crossing(region.vertices[i], region.vertices[j], values[i], values[j])
    return False, None


def _crossing(left: CurveClass, right: CurveClass, left_value: Fraction, right_value: Fraction) -> CurveClass:
    u = left_value / (left_value - right_value)
    return left.scaled(1 - u) + right.scaled(u)


class WallService:
    def __init__(self, lattice: PolarisedLattice, sheaf: SheafNumerics):
        sheaf.check(lattice)
        self.lattice = lattice
        self.sheaf = sheaf
        self.intersections = IntersectionService(lattice)
        self.invariants = InvariantsService(lattice)
        self.newton = PowerInversionService(lattice)
        self._preimages: dict[tuple[Fraction, ...], DivisorClass | None] = {}
        self._lock = threading.Lock()
        self._warnings: list[str] = []

    # --- auxiliary form ---

    def auxiliary_gram(self, phi: DivisorClass) -> tuple[Fraction, tuple[tuple[Fraction, ...], ...]]:
        """(lambda, Gram of Q_phi) with lambda the smallest power of two giving a positive definite Q."""
        lefschetz = self.intersections.lefschetz_map(phi)
        ell = self.intersections.power_map(phi).coords
        weight = Fraction(1)
        for _ in range(_MAX_LAMBDA_DOUBLINGS):
            gram = tuple(
                tuple(-lefschetz[i][j] + weight * ell[i] * ell[j] for j in range(self.lattice.rho))
                for i in range(self.lattice.rho)
            )
            if is_positive_definite(gram):
                return weight, gram
            weight *= 2
        raise NonGeometricForm(f'{self.lattice.name}: no lambda makes the auxiliary form definite at {phi}')

    def search_radius(self, region: Region, safety: Fraction) -> tuple[Fraction, tuple[tuple[Fraction, ...], ...]]:
        """safety . kappa . max r^2 B over vertex preimages.

        kappa = max_v trace(Q_v^-1 Q*) bounds Q* by every vertex form Q_v. Cut
        points between vertices carry their own forms and bounds; those are
        covered by the radius doublings in ``enumerate_walls``, not by this value.
        """
        _, reference_gram = self.auxiliary_gram(region.reference)
        kappa = Fraction(0)
        for phi in region.preimages:
            _, gram = self.auxiliary_gram(phi)
            comparison = mat_mul(inverse(gram), reference_gram)
            kappa = max(kappa, sum((comparison[i][i] for i in range(len(comparison))), Fraction(0)))
        bound = Fraction(0)
        for phi in region.preimages:
            for r1 in range(1, self.sheaf.r):
                try:
                    bound = max(bound, self.sheaf.r ** 2 * self.invariants.wall_bound(self.sheaf, phi, r1))
                except NegativeBound as exc:
                    self._warn(f'negative bound at vertex preimage {phi}: Delta = {exc.value}')
        return safety * kappa * bound, reference_gram

    # --- filter ---

    def _preimage(self, gamma: CurveClass, seed: DivisorClass) -> DivisorClass | None:
        key = gamma.coords
        with self._lock:
            if key in self._preimages:
                return self._preimages[key]
        try:
            phi = self.newton.invert_with_continuation(gamma, seed=seed).alpha
        except PowerInversionError as exc:
            self._warn(f'cut point {gamma} has no certified preimage: {exc}')
            phi = None
        with self._lock:
            self._preimages[key] = phi
        return phi

    def _warn(self, message: str) -> None:
        with self._lock:
            if message not in self._warnings:
                self._warnings.append(message)
        logger.warning(message)

    def _cut_points(self, zeta: DivisorClass, region: Region) -> list[tuple[CurveClass, DivisorClass]]:
        values = [v.pair(zeta) for v in region.vertices]
        points = [(v, phi) for v, phi, value in zip(region.vertices, region.preimages, values) if value == 0]
        for i, j in combinations(range(len(values)), 2):
            if values[i] * values[j] < 0:
                u = values[i] / (values[i] - values[j])
                gamma = region.vertices[i].scaled(1 - u) + region.vertices[j].scaled(u)
                seed = region.preimages[i].scaled(1 - u) + region.preimages[j].scaled(u)
                phi = self._preimage(gamma, seed)
                if phi is not None:
                    points.append((gamma, phi))
        return points

    def passes_at(self, zeta: DivisorClass, r1: int, phi: DivisorClass, margin: Fraction) -> Fraction | None:
        """Slack r^2 B + zeta^2.phi^{n-2} when zeta passes at phi, else None."""
        square = self.invariants.square_pairing(zeta, phi)
        if square >= 0:
            return None
        try:
            slack = self.invariants.wall_slack(self.sheaf, zeta, r1, phi)
        except NegativeBound:
            return None
        return slack if slack + margin >= 0 else None

    def filter(self, zeta: DivisorClass, r1: int, region: Region, margin: Fraction, tighten: bool) -> Candidate | None:
        meets, witness = wall_meets_region(Wall(zeta.coords), region)
        if not meets:
            return None
        points = [phi for _, phi in self._cut_points(zeta, region)]
        if not tighten:
            points += list(region.preimages)
        for phi in points:
            slack = self.passes_at(zeta, r1, phi, margin)
            if slack is not None:
                return Candidate(WallClass(zeta, r1, self.sheaf.r), witness, slack)
        return None

    # --- enumeration ---

    def coset_point(self, m: Sequence[int], r1: int) -> DivisorClass:
        return DivisorClass(tuple(self.sheaf.r * a - r1 * c for a, c in zip(m, self.sheaf.c1.coords)))

    def _search_block(self, r1, gram, radius, region, margin, tighten, budget):
        search = EllipsoidSearch(gram, budget)
        center = tuple(Fraction(r1) * c / self.sheaf.r for c in self.sheaf.c1.coords)
        kept = []
        for m in search.points(center, radius / self.sheaf.r ** 2):
            zeta = self.coset_point(m, r1)
            if zeta.is_zero():
                continue
            candidate = self.filter(zeta, r1, region, margin, tighten)
            if candidate is not None:
                kept.append(candidate)
        return kept, search.visited

    def enumerate_walls(
        self,
        region: Region,
        safety: Fraction | None = None,
        margin: Fraction | None = None,
        tighten: bool = False,
        budget: int | None = None,
    ) -> WallReport:
        safety = Fraction(settings.WALL_SAFETY if safety is None else safety)
        margin = Fraction(settings.WALL_BOUND_MARGIN if margin is None else margin)
        budget = settings.ENUMERATION_BUDGET if budget is None else budget
        if safety < 1:
            raise ValueError(f'safety factor must be at least 1, got {safety}')
        self.lattice.check(*region.vertices)

        with timed('walls_enumerated', sheaf=self.sheaf.label, lattice=self.lattice.name) as metric:
            base, gram = self.search_radius(region, safety)
            radius, used, walls, visited, passes, stable = base, base, None, 0, 0, 0
            for passes in range(1, settings.WALL_RADIUS_DOUBLINGS + 2):
                used = radius
                blocks = parallel_map(
                    lambda r1: self._search_block(r1, gram, radius, region, margin, tighten, budget),
                    range(1, self.sheaf.r),
                )
                pass_visited = sum(count for _, count in blocks)
                visited += pass_visited
                if pass_visited > budget:
                    raise EnumerationBudgetExceeded(
                        f'wall enumeration visited {pass_visited} nodes at radius {radius}, budget {budget}',
                        visited=visited,
                    )
                current = _deduplicate(candidate for kept, _ in blocks for candidate in kept)
                log_event('walls_pass', sheaf=self.sheaf.label, radius=radius, kept=len(current), visited=visited)
                stable = stable + 1 if current == walls else 0
                walls = current
                if stable >= settings.WALL_STABLE_DOUBLINGS:
                    break
                radius *= 2
            else:
                self._warn(
                    f'wall set not stable after {settings.WALL_RADIUS_DOUBLINGS} doublings '
                    f'of the search radius {base}'
                )
            metric.update(walls=len(walls), passes=passes, visited=visited)

        return WallReport(
            walls=walls,
            radius=used,
            passes=passes,
            visited=visited,
            reference=region.reference,
            warnings=tuple(self._warnings),
        )

    def brute_force_walls(
        self,
        region: Region,
        box: int | None = None,
        margin: Fraction | None = None,
        tighten: bool = False,
    ) -> tuple[Wall, ...]:
        """The same filter over every coset point with |zeta|_inf <= box."""
        box = settings.ORACLE_BOX if box is None else box
        margin = Fraction(settings.WALL_BOUND_MARGIN if margin is None else margin)
        r = self.sheaf.r
        kept = []
        for r1 in range(1, r):
            ranges = [
                range(ceil(Fraction(-box + r1 * c, r)), floor(Fraction(box + r1 * c, r)) + 1)
                for c in self.sheaf.c1.coords
            ]
            for m in product(*ranges):
                zeta = self.coset_point(m, r1)
                if zeta.is_zero():
                    continue
                candidate = self.filter(zeta, r1, region, margin, tighten)
                if candidate is not None:
                    kept.append(candidate)
        walls = _deduplicate(kept)
        log_event('walls_oracle', sheaf=self.sheaf.label, box=box, walls=len(walls))
        return walls


def _deduplicate(candidates: Iterable[Candidate]) -> tuple[Wall, ...]:
    """One wall per primitive normal; the kept class has the smallest r1, then the shortest zeta."""
    best: dict[tuple[int, ...], Candidate] = {}
    for candidate in candidates:
        normal = primitive(candidate.wall_class.zeta.coords)
        key = _rank_key(candidate)
        if normal not in best or key < _rank_key(best[normal]):
            best[normal] = candidate
    return tuple(
        Wall(normal, source=c.wall_class, witness=c.witness, slack=c.slack)
        for normal, c in sorted(best.items())
    )


def _rank_key(candidate: Candidate) -> tuple:
    zeta = candidate.wall_class.zeta.coords
    return candidate.wall_class.r1, sum(abs(c) for c in zeta), tuple(-sign(c) for c in zeta), zeta

