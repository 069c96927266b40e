"""End-to-end runs behind the management commands.

Each run returns the JSON report, a terminal table and any extra files; the
commands only parse flags, write files and map errors to exit codes.
"""

import logging
import random
from dataclasses import dataclass
from typing import Any

from core.exact import format_rational
from core.exceptions import InputFormatError
from core.metrics import log_event, timed
from core.serializers import read_json, validated

from chambers.exceptions import IdenticallyZero, NotFound, PreconditionFailed
from chambers.serializers import (
    ChamberSerializer,
    CrossingSerializer,
    PlaneSerializer,
    RegionReportSerializer,
    plane_from_data,
)
from chambers.services.crossing_service import CrossingService, segment_crossings_n1
from chambers.services.decomposition_service import DecompositionService
from chambers.services.representative_service import RepresentativeService
from chambers.services.slice_service import SliceService
from cli.services.config_service import ConfigService
from cli.services.report_service import ReportResult, ReportService
from cli.types import RunConfig
from kring.serializers import kclass_from_data
from kring.services.identity_service import IdentityService
from kring.services.ring_service import RingService
from kring.types import KClass
from lattice.types import CurveClass, DivisorClass
from sheafmodel.serializers import VerdictSerializer
from sheafmodel.services.stability_service import StabilityService
from walls.serializers import WallSerializer
from walls.services.wall_service import WallService

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PipelineResult:
    report: ReportResult
    table: str
    extra: tuple[ReportResult, ...] = ()
    passed: bool = True


def _rationals(values) -> list[str]:
    return [format_rational(v) for v in values]


class PipelineService:
    def __init__(self, config: RunConfig):
        self.config = config
        self.inputs = ConfigService()
        self.reports = ReportService()

    def _header(self, command: str) -> dict[str, Any]:
        return {'command': command, 'lattice': self.config.source, 'seed': self.config.seed}

    def _filename(self, default: str) -> str:
        return self.config.out.name if self.config.out else default

    def _enumerate(self, region):
        sheaf, presented = self.inputs.sheaf(self.config)
        service = WallService(self.config.lattice, sheaf)
        report = service.enumerate_walls(
            region, safety=self.config.safety, tighten=self.config.tighten, budget=self.config.budget
        )
        return sheaf, presented, report

    # --- walls ---

    def walls(self) -> PipelineResult:
        with timed('cmd_walls', lattice=self.config.source) as metric:
            region = self.inputs.region(self.config)
            sheaf, _, report = self._enumerate(region)
            metric['walls'] = len(report.walls)
        payload = {
            **self._header('walls'),
            'sheaf': sheaf.label,
            'region': RegionReportSerializer(region).data,
            'search': {
                'radius': format_rational(report.radius),
                'passes': report.passes,
                'visited': report.visited,
                'reference': _rationals(report.reference.coords),
            },
            'walls': WallSerializer(report.walls, many=True).data,
            'warnings': list(report.warnings),
        }
        rows = [
            (str(w), ' '.join(_rationals(w.source.zeta.coords)) if w.source else '-',
             w.source.r1 if w.source else '-', format_rational(w.slack) if w.slack is not None else '-')
            for w in report.walls
        ]
        table = self.reports.table(('normal', 'zeta', 'r1', 'slack'), rows)
        return PipelineResult(self.reports.render(payload, self._filename('walls.json')), table)

    # --- chambers ---

    def chambers(self) -> PipelineResult:
        config = self.config
        region = self.inputs.region(config)
        presented = None
        if config.walls:
            walls = config.walls
            if config.sheaf_path is not None:
                _, presented = self.inputs.sheaf(config)
        else:
            _, presented, report = self._enumerate(region)
            walls = report.walls
        decomposition = DecompositionService(region, walls)
        chambers = decomposition.decompose()

        representatives = {}
        if config.representatives:
            service = RepresentativeService(config.lattice, walls)
            representatives = {c.signs: service.chamber_representative(c) for c in chambers}

        constancy = []
        if presented is not None and config.samples > 0:
            stability = StabilityService(config.lattice)
            rng = random.Random(config.seed)
            for chamber in chambers:
                result = stability.chamber_constancy_check(presented, decomposition, chamber, config.samples, rng)
                constancy.append({'cell': result.label, 'points': result.points,
                                  'verdict': VerdictSerializer(result.verdict).data})

        payload = {
            **self._header('chambers'),
            'region': RegionReportSerializer(region).data,
            'walls': [list(w.normal) for w in walls],
            'cells': ChamberSerializer(chambers, many=True, context={'representatives': representatives}).data,
            'constancy': constancy,
        }
        extra = ()
        if config.slice_path is not None:
            plane = plane_from_data(validated(PlaneSerializer, read_json(config.slice_path), str(config.slice_path)))
            if plane.origin.rank != config.lattice.rho:
                raise InputFormatError(str(config.slice_path), [f'plane vectors need {config.lattice.rho} coordinates'])
            name = (config.out.stem if config.out else 'chambers') + '-slice.csv'
            export = SliceService(walls, chambers).export_csv(plane, config.grid, name)
            extra = (ReportResult(export.filename, export.content),)
            payload['slice'] = {'file': export.filename, 'grid': export.grid}

        rows = []
        for chamber in chambers:
            rep = representatives.get(chamber.signs)
            rows.append((
                chamber.label,
                ' '.join(_rationals(chamber.representative.coords)),
                f'{format_rational(rep.scale)} * A^(n-2)B' if rep else '-',
            ))
        table = self.reports.table(('cell', 'representative', 'complete intersection'), rows)
        return PipelineResult(self.reports.render(payload, self._filename('chambers.json')), table, extra)

    # --- crossings ---

    def cross(self, mode: str) -> PipelineResult:
        config = self.config
        segment = config.segments.get(mode)
        if segment is None:
            raise InputFormatError('--start', [f'no {mode} segment given (use --start/--end or a preset)'])
        walls = config.walls
        if not walls:
            walls = self._enumerate(self.inputs.region(config))[2].walls
        payload = {**self._header('cross'), 'mode': mode,
                   'segment': {'start': _rationals(segment.start), 'end': _rationals(segment.end)}}
        if mode == 'n1':
            result = segment_crossings_n1(CurveClass(segment.start), CurveClass(segment.end), walls)
            crossings, contained, degree = list(result.crossings), list(result.contained), 1
            nonlinearity = []
        else:
            service = CrossingService(config.lattice)
            start, end = DivisorClass(segment.start), DivisorClass(segment.end)
            crossings, contained, nonlinearity, degree = [], [], [], 0
            for wall in walls:
                try:
                    result = service.segment_crossings_amp(start, end, wall)
                except IdenticallyZero:
                    contained.append(wall)
                    continue
                crossings.extend(result.crossings)
                degree = max(degree, result.degree)
                nonlinearity.append(self._nonlinearity(service, wall))
            crossings.sort(key=lambda c: (c.location, c.wall.normal))
        payload.update({
            'degree': degree,
            'crossings': CrossingSerializer(crossings, many=True).data,
            'contained': [list(w.normal) for w in contained],
            'nonlinearity': nonlinearity,
            'note': 'linear pullback' if degree == 1 else f'pullback of degree {degree}',
        })
        rows = [(str(c.wall), 'rational' if c.is_rational else 'algebraic', str(c)) for c in crossings]
        table = self.reports.table(('wall', 'kind', 'crossing'), rows)
        return PipelineResult(self.reports.render(payload, self._filename(f'cross-{mode}.json')), table)

    def _nonlinearity(self, service: CrossingService, wall) -> dict[str, Any]:
        entry: dict[str, Any] = {'wall': list(wall.normal)}
        try:
            witness = service.nonlinearity_witness(wall)
        except PreconditionFailed as exc:
            entry['note'] = str(exc)
        except NotFound as exc:
            entry['note'] = f'not found after {exc.tried} triples'
        else:
            entry['classes'] = [_rationals(h.coords) for h in witness.classes]
            entry['values'] = _rationals(witness.values)
            entry['signs'] = list(witness.signs)
        return entry

    # --- K-ring identities ---

    def _default_classes(self, ring: RingService) -> list[KClass]:
        classes = [ring.unit(), ring.point()]
        for index, gen in enumerate(self.config.lattice.ample_gens):
            classes.append(ring.line_class(gen).labelled(f'O(H{index + 1})'))
        return classes

    def kverify(self) -> PipelineResult:
        config = self.config
        model = self.inputs.model(config)
        ring = RingService(model)
        identities = IdentityService(model, config.lattice)
        n = config.lattice.n
        if config.multipolarisation:
            h_list = [DivisorClass(h) for h in config.multipolarisation]
        else:
            total = DivisorClass.zero(config.lattice.rho)
            for gen in config.lattice.ample_gens:
                total = total + gen
            h_list = [total] * (n - 1)
        if len(h_list) != n - 1 or any(h.rank != config.lattice.rho for h in h_list):
            raise InputFormatError('multipolarisation', [f'expected {n - 1} divisors of rank {config.lattice.rho}'])
        multiples = list(config.multiples or [2] * (n - 1))
        if config.classes is None:
            classes = self._default_classes(ring)
        else:
            classes = [kclass_from_data(spec, ring) for spec in config.classes]

        entries, rows = [], []
        for c in classes:
            checks = {
                'secondway': identities.verify_secondway(c, h_list),
                'firstway': identities.verify_firstway_virtual(c, h_list),
                'scaling': identities.verify_scaling(c, h_list, multiples),
            }
            telescoping = identities.verify_telescoping(c, h_list)
            entry = {
                'class': c.label or str(c),
                'ch': _rationals(c.ch),
                **{name: {'passed': check.passed, 'difference': _rationals(check.difference.ch)}
                   for name, check in checks.items()},
                'telescoping': {
                    'passed': telescoping.passed,
                    'exponent': format_rational(telescoping.exponent),
                    'steps': [{'step': s.step, 'degree': format_rational(s.degree), 'passed': s.passed}
                              for s in telescoping.steps],
                },
            }
            entries.append(entry)
            rows.append((entry['class'], *('PASS' if check.passed else 'FAIL' for check in checks.values()),
                         'PASS' if telescoping.passed else 'FAIL'))
        # an empty class list passes vacuously
        passed = all(e[k]['passed'] for e in entries for k in ('secondway', 'firstway', 'scaling', 'telescoping'))
        payload = {
            **self._header('kverify'),
            'model': model.name,
            'multipolarisation': [_rationals(h.coords) for h in h_list],
            'multiples': multiples,
            'classes': entries,
            'passed': passed,
        }
        log_event('cmd_kverify', model=model.name, classes=len(entries), passed=passed)
        table = self.reports.table(('class', 'secondway', 'firstway', 'scaling', 'telescoping'), rows)
        return PipelineResult(self.reports.render(payload, self._filename('kverify.json')), table, passed=passed)
