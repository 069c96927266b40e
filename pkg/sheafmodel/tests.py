import random
from fractions import Fraction as F

from django.test import SimpleTestCase

from chambers.exceptions import PreconditionFailed
from chambers.services.crossing_service import segment_crossings_n1
from chambers.services.decomposition_service import DecompositionService
from chambers.services.region_service import RegionService
from cli.catalog import load_catalog_lattice, sheaf_path
from core.exceptions import EXIT_INCONSISTENT, InputFormatError
from core.serializers import read_json, validated

from lattice.types import CurveClass, DivisorClass, PowerTensor
from sheafmodel.exceptions import ConstancyViolation, IdenticallyEqual
from sheafmodel.serializers import PresentedSheafSerializer, VerdictSerializer, is_presented, load_presented
from sheafmodel.services.stability_service import StabilityService
from sheafmodel.types import PresentedSheaf, SheafKind, VerdictStatus
from walls.types import SheafNumerics, Wall


def _lines(lattice, *c1s):
    summands = [SheafNumerics.line(DivisorClass.of(*c1), lattice.n, f'O{c1}') for c1 in c1s]
    return PresentedSheaf.direct_sum(lattice, summands)


class VerdictTestCase(SimpleTestCase):
    def setUp(self):
        self.lattice = load_catalog_lattice('p1cubed')
        self.stability = StabilityService(self.lattice)
        self.sheaf = _lines(self.lattice, (1, -1, 0), (-1, 1, 0))

    def test_balanced_sum_is_properly_semistable(self):
        verdict = self.stability.verdict(self.sheaf, CurveClass.of(1, 1, 1))
        self.assertEqual(verdict.status, VerdictStatus.PROPERLY_SEMISTABLE)
        self.assertEqual(verdict.gap, 0)

    def test_unbalanced_sum_is_unstable(self):
        verdict = self.stability.verdict(self.sheaf, CurveClass.of(2, 1, 1))
        self.assertEqual(verdict.status, VerdictStatus.UNSTABLE)
        self.assertEqual(verdict.witness.summands, (0,))
        self.assertEqual(verdict.gap, 1)
        self.assertEqual(verdict.destabilizing, frozenset({'0'}))

    def test_line_class_is_stable(self):
        sheaf = _lines(self.lattice, (1, 2, 3))
        for gamma in (CurveClass.of(1, 1, 1), CurveClass.of(5, 1, 2)):
            self.assertEqual(self.stability.verdict(sheaf, gamma).status, VerdictStatus.STABLE)

    def test_sum_of_lines_is_never_stable(self):
        sheaf = _lines(self.lattice, (1, 0, 0), (0, 1, 0), (0, 0, 2))
        rng = random.Random(11)
        for _ in range(20):
            gamma = CurveClass.of(*(F(rng.randint(1, 9), rng.randint(1, 4)) for _ in range(3)))
            self.assertNotEqual(self.stability.verdict(sheaf, gamma).status, VerdictStatus.STABLE)

    def test_total_invariants(self):
        sheaf = _lines(load_catalog_lattice('p1xp1'), (1, 0), (0, 1))
        self.assertEqual(sheaf.total.r, 2)
        self.assertEqual(sheaf.total.c1, DivisorClass.of(1, 1))
        self.assertEqual(sheaf.total.c2.scalar(), 1)

    def test_filtered_verdict_uses_declared_subobjects(self):
        lattice = load_catalog_lattice('p1xp1')
        sheaf = load_presented(sheaf_path('filtered-h1-p1xp1.json'), lattice)
        self.assertEqual(sheaf.kind, SheafKind.FILTERED)
        stability = StabilityService(lattice)
        self.assertEqual(stability.verdict(sheaf, CurveClass.of(1, 2)).status, VerdictStatus.STABLE)
        self.assertEqual(stability.verdict(sheaf, CurveClass.of(1, 1)).status, VerdictStatus.PROPERLY_SEMISTABLE)
        verdict = stability.verdict(sheaf, CurveClass.of(2, 1))
        self.assertEqual(verdict.status, VerdictStatus.UNSTABLE)
        self.assertEqual(verdict.witness.label, 'O(H1)')
        data = VerdictSerializer(verdict).data
        self.assertEqual((data['status'], data['gap']), ('unstable', '1/2'))
        self.assertEqual(data['witness']['subobject'], 'O(H1)')


class FiltrationTestCase(SimpleTestCase):
    def setUp(self):
        self.lattice = load_catalog_lattice('p1cubed')
        self.stability = StabilityService(self.lattice)

    def test_groups_by_decreasing_slope(self):
        c1s = [(3, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 0)]
        groups = self.stability.hn_filtration(_lines(self.lattice, *c1s), CurveClass.of(1, 1, 1))
        self.assertEqual([g.slope for g in groups], [3, 1, 0])
        self.assertEqual([len(g.summands) for g in groups], [1, 2, 1])
        self.assertEqual(groups[0].numerics.c1, DivisorClass.of(3, 0, 0))

        reordered = self.stability.hn_filtration(_lines(self.lattice, *reversed(c1s)), CurveClass.of(1, 1, 1))
        self.assertEqual([g.numerics.c1 for g in reordered], [g.numerics.c1 for g in groups])

    def test_groups_merge_on_a_wall(self):
        sheaf = _lines(self.lattice, (1, 0, 0), (0, 1, 0))
        self.assertEqual(len(self.stability.hn_filtration(sheaf, CurveClass.of(1, 2, 1))), 2)
        self.assertEqual(len(self.stability.hn_filtration(sheaf, CurveClass.of(1, 1, 1))), 1)

    def test_jordan_holder_factors(self):
        sheaf = _lines(self.lattice, (0, 1, 0), (1, 0, 0))
        gamma = CurveClass.of(1, 1, 1)
        factors = self.stability.jordan_holder_factors(sheaf, gamma)
        self.assertEqual([f.c1 for f in factors], [DivisorClass.of(0, 1, 0), DivisorClass.of(1, 0, 0)])
        total_slope = self.stability.verdict(sheaf, gamma).slope
        for factor in factors:
            self.assertEqual(gamma.pair(factor.c1) / factor.r, total_slope)
        with self.assertRaises(PreconditionFailed):
            self.stability.jordan_holder_factors(sheaf, CurveClass.of(2, 1, 1))


class CrossingParameterTestCase(SimpleTestCase):
    def setUp(self):
        self.lattice = load_catalog_lattice('p1xp1')
        self.stability = StabilityService(self.lattice)
        self.total = SheafNumerics(2, DivisorClass.of(1, 1), PowerTensor(0, 2, {(): 1}), 'E')
        self.sub = SheafNumerics.line(DivisorClass.of(1, 0), 2, 'O(H1)')

    def test_crossing_on_the_wall(self):
        crossing = self.stability.crossing_parameter(self.sub, self.total, CurveClass.of(1, 2), CurveClass.of(2, 1))
        self.assertEqual(crossing.value, F(1, 2))
        self.assertEqual(crossing.wall, Wall.of(1, -1))

    def test_no_crossing(self):
        self.assertIsNone(
            self.stability.crossing_parameter(self.sub, self.total, CurveClass.of(1, 2), CurveClass.of(1, 3))
        )

    def test_proportional_subobject(self):
        total = SheafNumerics(2, DivisorClass.of(2, 2), PowerTensor(0, 2, {(): 2}))
        sub = SheafNumerics.line(DivisorClass.of(1, 1), 2)
        with self.assertRaises(IdenticallyEqual):
            self.stability.crossing_parameter(sub, total, CurveClass.of(1, 2), CurveClass.of(2, 1))

    def test_destabilizing_walls(self):
        sheaf = load_presented(sheaf_path('sum-h1-h2-p1xp1.json'), self.lattice)
        self.assertEqual(self.stability.destabilizing_walls(sheaf), (Wall.of(1, -1),))

    def test_verdict_changes_only_at_crossings(self):
        lattice = load_catalog_lattice('p1cubed')
        stability = StabilityService(lattice)
        sheaf = load_presented(sheaf_path('sum-h1-h2-h3-p1cubed.json'), lattice)
        walls = stability.destabilizing_walls(sheaf)
        start, end = CurveClass.of(3, 1, 1), CurveClass.of(1, 2, 4)
        crossings = [c.value for c in segment_crossings_n1(start, end, walls).crossings]
        steps = 60
        previous = None
        for k in range(steps + 1):
            u = F(k, steps)
            verdict = stability.verdict(sheaf, start.scaled(1 - u) + end.scaled(u))
            key = (verdict.status, verdict.destabilizing)
            if previous is not None and key != previous:
                self.assertTrue(any(F(k - 1, steps) <= c <= u for c in crossings), f'change near u = {u}')
            previous = key


class ConstancyTestCase(SimpleTestCase):
    def setUp(self):
        self.lattice = load_catalog_lattice('p1xp1')
        self.stability = StabilityService(self.lattice)
        self.sheaf = load_presented(sheaf_path('sum-h1-h2-p1xp1.json'), self.lattice)
        self.region = RegionService(self.lattice).segment(CurveClass.of(1, 2), CurveClass.of(2, 1))

    def test_verdicts_constant_on_each_cell(self):
        walls = self.stability.destabilizing_walls(self.sheaf)
        decomposition = DecompositionService(self.region, walls)
        chambers = decomposition.decompose()
        self.assertEqual(len(chambers), 3)
        rng = random.Random(7)
        statuses = [
            self.stability.chamber_constancy_check(self.sheaf, decomposition, chamber, 20, rng).verdict.status
            for chamber in chambers
        ]
        self.assertEqual(statuses, [VerdictStatus.UNSTABLE, VerdictStatus.PROPERLY_SEMISTABLE, VerdictStatus.UNSTABLE])

    def test_omitted_wall_is_detected(self):
        decomposition = DecompositionService(self.region, [])
        (chamber,) = decomposition.decompose()
        with self.assertRaises(ConstancyViolation) as caught:
            self.stability.chamber_constancy_check(self.sheaf, decomposition, chamber, 20, random.Random(7))
        self.assertEqual(caught.exception.exit_code, EXIT_INCONSISTENT)

    def test_single_line_is_constant(self):
        sheaf = _lines(self.lattice, (2, -1))
        decomposition = DecompositionService(self.region, [])
        (chamber,) = decomposition.decompose()
        report = self.stability.chamber_constancy_check(sheaf, decomposition, chamber, 10, random.Random(1))
        self.assertEqual(report.points, 11)


class PresentedFileTestCase(SimpleTestCase):
    def test_shipped_direct_sum(self):
        lattice = load_catalog_lattice('p1cubed')
        path = sheaf_path('sum-h1-h2-p1cubed.json')
        self.assertTrue(is_presented(read_json(path)))
        sheaf = load_presented(path, lattice)
        self.assertEqual(sheaf.total.r, 2)
        self.assertEqual(sheaf.total.c2[(2,)], 1)

    def test_direct_sum_needs_line_summands(self):
        lattice = load_catalog_lattice('p1xp1')
        payload = {'kind': 'direct-sum', 'summands': [{'rank': 2, 'c1': ['0', '0'], 'c2': []}]}
        with self.assertRaises(InputFormatError) as caught:
            validated(PresentedSheafSerializer, payload, 'bad.json', lattice=lattice)
        self.assertIn('summands', caught.exception.messages[0])
