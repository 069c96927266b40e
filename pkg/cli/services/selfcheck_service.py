"""Seeded property suite behind ``manage.py selfcheck``.

Every criterion is exact except Newton inversion, which is checked against
the configured residual tolerance.
"""

import json
import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from math import factorial, prod
from typing import Any, Callable

from django.conf import settings

from core.concurrency import parallel_map
from core.exact import format_rational
from core.exceptions import ChamberKitError
from core.metrics import timed

from chambers.exceptions import NotFound
from chambers.services.crossing_service import CrossingService, segment_crossings_n1
from chambers.services.decomposition_service import DecompositionService, sign_vector
from chambers.services.region_service import RegionService
from chambers.services.representative_service import RepresentativeService
from cli.catalog import catalog_names, load_catalog_lattice, load_catalog_model, sheaf_path
from cli.services.config_service import ConfigService
from cli.services.pipeline_service import PipelineService
from kring.services.identity_service import IdentityService
from kring.services.ring_service import RingService
from lattice.exceptions import PowerInversionError
from lattice.services.intersection_service import IntersectionService
from lattice.services.newton_service import PowerInversionService
from lattice.services.positivity_service import PositivityService
from lattice.types import CurveClass, DivisorClass
from sheafmodel.serializers import load_presented
from sheafmodel.services.stability_service import StabilityService
from walls.serializers import load_sheaf
from walls.services.wall_service import WallService
from walls.types import Wall

logger = logging.getLogger(__name__)

# criterion -> (quick, full) sample count
SAMPLE_COUNTS = {
    1: (40, 500),
    2: (10, 100),
    3: (40, 500),
    4: (10, 50),
    6: (10, 100),
    10: (5, 50),
}

WALL_CASES = (
    ('p1xp1', 'r2c0c2_2.json'),
    ('p1xp1', 'r2c0c2_4.json'),
    ('p1xp1', 'r2c10c2_3.json'),
    ('p1xp1', 'r3c0c2_3.json'),
    ('proj-bundle-p2', 'r2c0c2hx2.json'),
)

# presented sheaf, catalog entry and the region its chambers are checked on
CONSTANCY_CASES = (
    ('sum-h1-h2-p1xp1.json', 'p1xp1', ((1, 2), (2, 1)), 3),
    ('filtered-h1-p1xp1.json', 'p1xp1', ((1, 2), (2, 1)), 3),
    ('sum-h1-h2-h3-p1cubed.json', 'p1cubed', ((3, 1, 2), (2, 3, 1), (2, 1, 3), (1, 3, 2)), None),
)
SQUARE_WALLS = (Wall.of(1, -1, 0), Wall.of(0, 1, -1))
SQUARE = ((3, 1, 2), (2, 3, 1), (2, 1, 3), (1, 3, 2))


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    ms: float = 0.0


def _has_float(value: Any) -> bool:
    if isinstance(value, float):
        return True
    if isinstance(value, dict):
        return any(_has_float(v) for v in value.values())
    if isinstance(value, (list, tuple)):
        return any(_has_float(v) for v in value)
    return False


class SelfCheckService:
    def __init__(self, seed: int | None = None, full: bool = False, catalog: list[str] | None = None):
        self.seed = settings.DEFAULT_SEED if seed is None else seed
        self.full = full
        self.catalog = catalog or catalog_names()
        self.criteria: dict[int, tuple[str, Callable[[], tuple[bool, str]]]] = {
            1: ('power-map injectivity', self.injectivity),
            2: ('Newton inversion', self.newton),
            3: ('Khovanskii-Teissier', self.khovanskii_teissier),
            4: ('Hodge index', self.hodge_index),
            5: ('wall enumeration completeness', self.wall_completeness),
            6: ('chamber structure and constancy', self.chamber_structure),
            7: ('chamber representatives', self.representatives),
            8: ('rational and irrational crossings', self.crossing_dichotomy),
            9: ('degree n-1 nonlinearity', self.nonlinearity),
            10: ('K-ring identities', self.identities),
            11: ('determinism and exactness', self.determinism),
        }

    def count(self, number: int) -> int:
        quick, full = SAMPLE_COUNTS[number]
        return full if self.full else quick

    def rng(self, number: int, salt: str = '') -> random.Random:
        return random.Random(f'{self.seed}:{number}:{salt}')

    def run(self, only: list[int] | None = None) -> list[CriterionResult]:
        numbers = sorted(only) if only else sorted(self.criteria)
        unknown = [n for n in numbers if n not in self.criteria]
        if unknown:
            raise ValueError(f'unknown criteria {unknown}; choose from 1..{len(self.criteria)}')
        return [self._run_one(number) for number in numbers]

    def _run_one(self, number: int) -> CriterionResult:
        name, check = self.criteria[number]
        with timed('selfcheck', criterion=number) as metric:
            try:
                passed, detail = check()
            except ChamberKitError as exc:
                passed, detail = False, f'{type(exc).__name__}: {exc}'
            metric['passed'] = passed
        return CriterionResult(number, name, passed, detail, metric['ms'])

    # --- lattice ---

    def _per_entry(self, number: int, check: Callable[[str, random.Random], str | None]) -> tuple[bool, str]:
        failures = [f for f in parallel_map(lambda name: check(name, self.rng(number, name)), self.catalog) if f]
        detail = '; '.join(failures) if failures else f'{len(self.catalog)} catalog entries, {self.count(number)} samples each'
        return not failures, detail

    def injectivity(self) -> tuple[bool, str]:
        def check(name, rng):
            lattice = load_catalog_lattice(name)
            positivity = PositivityService(lattice)
            intersections = IntersectionService(lattice)
            for _ in range(self.count(1)):
                alpha, beta = positivity.random_ample_class(rng), positivity.random_ample_class(rng)
                if alpha != beta and intersections.power_map(alpha) == intersections.power_map(beta):
                    return f'{name}: {alpha} and {beta} share a power image'
            return None

        return self._per_entry(1, check)

    def newton(self) -> tuple[bool, str]:
        tolerance = Fraction(settings.NEWTON_TOLERANCE)

        def check(name, rng):
            lattice = load_catalog_lattice(name)
            positivity = PositivityService(lattice)
            intersections = IntersectionService(lattice)
            service = PowerInversionService(lattice)
            for _ in range(self.count(2)):
                alpha = positivity.random_ample_class(rng)
                seed = DivisorClass(tuple(c * (1 + Fraction(rng.randint(-10, 10), 100)) for c in alpha.coords))
                try:
                    result = service.newton_invert_power(intersections.power_map(alpha), seed=seed)
                except PowerInversionError as exc:
                    return f'{name}: {alpha}: {exc}'
                if result.residual_norm > tolerance:
                    return f'{name}: residual {format_rational(result.residual_norm)} at {alpha}'
            return None

        return self._per_entry(2, check)

    def khovanskii_teissier(self) -> tuple[bool, str]:
        def check(name, rng):
            lattice = load_catalog_lattice(name)
            positivity = PositivityService(lattice)
            for _ in range(self.count(3)):
                alpha, beta = positivity.random_ample_class(rng), positivity.random_ample_class(rng)
                if not positivity.khovanskii_teissier(alpha, beta).holds:
                    return f'{name}: violated at {alpha}, {beta}'
                if any(positivity.khovanskii_teissier(alpha, alpha.scaled(rng.randint(2, 5))).slacks):
                    return f'{name}: proportional pair at {alpha} has non-zero slack'
            return None

        return self._per_entry(3, check)

    def hodge_index(self) -> tuple[bool, str]:
        def check(name, rng):
            lattice = load_catalog_lattice(name)
            positivity = PositivityService(lattice)
            for _ in range(self.count(4)):
                alpha = positivity.random_ample_class(rng)
                if not positivity.verify_hodge_index(alpha).passed:
                    return f'{name}: fails at {alpha}'
            return None

        return self._per_entry(4, check)

    # --- walls and chambers ---

    def wall_completeness(self) -> tuple[bool, str]:
        failures, counts = [], []
        for name, sheaf_file in WALL_CASES:
            lattice = load_catalog_lattice(name)
            regions = RegionService(lattice)
            if name == 'proj-bundle-p2':
                region = regions.around_divisor(DivisorClass.of(1, Fraction(2, 5)), Fraction(1, 4))
            else:
                region = regions.default_region()
            service = WallService(lattice, load_sheaf(sheaf_path(sheaf_file), lattice))
            walls = service.enumerate_walls(region).walls
            oracle = service.brute_force_walls(region)
            counts.append(f'{sheaf_file}: {len(walls)}')
            if walls != oracle:
                failures.append(f'{sheaf_file}: enumerated {len(walls)}, oracle {len(oracle)}')
            if sheaf_file == 'r2c0c2_2.json' and walls != (Wall.of(1, -1),):
                failures.append(f'{sheaf_file}: expected the single wall (1, -1)')
        return not failures, '; '.join(failures or counts)

    def _constancy_inputs(self):
        for sheaf_file, name, vertices, expected in CONSTANCY_CASES:
            lattice = load_catalog_lattice(name)
            sheaf = load_presented(sheaf_path(sheaf_file), lattice)
            region = RegionService(lattice).certify([CurveClass(v) for v in vertices], label=sheaf_file)
            yield sheaf_file, lattice, sheaf, region, expected

    def chamber_structure(self) -> tuple[bool, str]:
        failures, details = [], []
        lattice = load_catalog_lattice('p1cubed')
        square = RegionService(lattice).certify([CurveClass(v) for v in SQUARE], label='square')
        cells = len(DecompositionService(square, SQUARE_WALLS).decompose())
        if cells != 9:
            failures.append(f'square: {cells} cells, expected 9')
        for sheaf_file, lattice, sheaf, region, expected in self._constancy_inputs():
            stability = StabilityService(lattice)
            decomposition = DecompositionService(region, stability.destabilizing_walls(sheaf))
            chambers = decomposition.decompose()
            if expected is not None and len(chambers) != expected:
                failures.append(f'{sheaf_file}: {len(chambers)} cells, expected {expected}')
            rng = self.rng(6, sheaf_file)
            for chamber in chambers:
                stability.chamber_constancy_check(sheaf, decomposition, chamber, self.count(6), rng)
            details.append(f'{sheaf_file}: {len(chambers)} cells constant')
        return not failures, '; '.join(failures or details)

    def representatives(self) -> tuple[bool, str]:
        failures, total = [], 0
        lattice = load_catalog_lattice('p1cubed')
        square = RegionService(lattice).certify([CurveClass(v) for v in SQUARE], label='square')
        cases = [(lattice, square, SQUARE_WALLS)]
        for _, lattice, sheaf, region, _ in self._constancy_inputs():
            cases.append((lattice, region, StabilityService(lattice).destabilizing_walls(sheaf)))
        for lattice, region, walls in cases:
            service = RepresentativeService(lattice, walls)
            intersections = IntersectionService(lattice)
            for chamber in DecompositionService(region, walls).decompose():
                total += 1
                rep = service.chamber_representative(chamber)
                curve = intersections.complete_intersection_class([rep.a] * (lattice.n - 2) + [rep.b])
                if sign_vector(curve, walls) != chamber.signs or not all(c.denominator == 1 for c in rep.a.coords + rep.b.coords):
                    failures.append(f'{region.label} cell {chamber.label}')
        return not failures, '; '.join(failures) if failures else f'{total} cells represented'

    def crossing_dichotomy(self) -> tuple[bool, str]:
        lattice = load_catalog_lattice('proj-bundle-p2')
        wall = Wall.of(2, -1)
        amp = CrossingService(lattice).segment_crossings_amp(DivisorClass.of(1, Fraction(1, 5)),
                                                              DivisorClass.of(1, Fraction(4, 5)), wall)
        n1 = segment_crossings_n1(CurveClass.of(Fraction(11, 25), Fraction(36, 25)),
                                  CurveClass.of(Fraction(56, 25), Fraction(81, 25)), [wall])
        irrational = [c for c in amp.crossings if not c.is_rational]
        values = [c.value for c in n1.crossings]
        passed = (len(amp.crossings) == 1 and len(irrational) == 1 and irrational[0].algebraic.degree == 2
                  and values == [Fraction(14, 45)])
        shown = str(irrational[0].algebraic) if irrational else 'no irrational crossing'
        return passed, f'amp: {shown}; n1: {[format_rational(v) for v in values]}'

    def nonlinearity(self) -> tuple[bool, str]:
        lattice = load_catalog_lattice('p1cubed')
        sheaf = load_presented(sheaf_path('sum-h1-h2-h3-p1cubed.json'), lattice)
        service = CrossingService(lattice)
        for wall in StabilityService(lattice).destabilizing_walls(sheaf):
            try:
                witness = service.nonlinearity_witness(wall)
            except NotFound:
                continue
            return True, f'wall {wall}: signs {list(witness.signs)} at {", ".join(map(str, witness.classes))}'
        return False, 'no wall of sum-h1-h2-h3-p1cubed admits a witness'

    # --- K-ring ---

    def _random_class(self, ring: RingService, rho: int, rng: random.Random):
        value = ring.point().scaled(rng.randint(-2, 2))
        for _ in range(rng.randint(1, 4)):
            divisor = tuple(Fraction(rng.randint(-2, 2)) for _ in range(rho))
            value = value + ring.line_class(divisor).scaled(rng.choice((1, 1, -1)))
        return value

    def identities(self) -> tuple[bool, str]:
        failures = []
        for name in self.catalog:
            lattice = load_catalog_lattice(name)
            model = load_catalog_model(name, lattice)
            ring = RingService(model)
            identities = IdentityService(model, lattice)
            rng = self.rng(10, name)
            for _ in range(self.count(10)):
                h_list = [
                    sum((gen.scaled(rng.randint(1, 2)) for gen in lattice.ample_gens), DivisorClass.zero(lattice.rho))
                    for _ in range(lattice.n - 1)
                ]
                multiples = [rng.randint(1, 3) for _ in range(lattice.n - 1)]
                c = self._random_class(ring, lattice.rho, rng)
                checks = [
                    identities.verify_secondway(c, h_list).passed,
                    identities.verify_firstway_virtual(c, h_list).passed,
                    identities.verify_scaling(c, h_list, multiples).passed,
                    identities.verify_telescoping(c, h_list).passed,
                ]
                if not all(checks):
                    failures.append(f'{name}: {c}')
                    break
        for n, name in ((2, 'p2'), (3, 'p3')):
            ring = RingService(load_catalog_model(name))
            for k in range(-5, 6):
                expected = Fraction(prod(k + i for i in range(1, n + 1)), factorial(n))
                if ring.chi(ring.line_class((Fraction(k),))) != expected:
                    failures.append(f'chi(O_P{n}({k})) != {expected}')
        return not failures, '; '.join(failures) if failures else f'{len(self.catalog)} models, chi oracle on P2 and P3'

    # --- reports ---

    def determinism(self) -> tuple[bool, str]:
        inputs = ConfigService()
        runs = [
            ('walls', {'catalog': 'p1xp1', 'sheaf': 'r2c0c2_2.json', 'seed': self.seed}),
            ('chambers', {'preset': 'segment-p1xp1', 'samples': 5, 'representatives': True, 'seed': self.seed}),
            ('cross', {'preset': 'schmitt-demo'}),
            ('kverify', {'preset': 'p3-identities'}),
        ]
        failures = []
        for command, options in runs:
            contents = []
            for _ in range(2):
                pipeline = PipelineService(inputs.build(options))
                result = pipeline.cross('amp') if command == 'cross' else getattr(pipeline, command)()
                contents.append(result.report.content)
            if contents[0] != contents[1]:
                failures.append(f'{command}: reruns differ')
            if _has_float(json.loads(contents[0])):
                failures.append(f'{command}: floating-point value in report')
        return not failures, '; '.join(failures) if failures else f'{len(runs)} reports byte-identical, no floats'
