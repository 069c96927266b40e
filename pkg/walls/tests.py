from fractions import Fraction as F
from math import gcd
from unittest import mock

from django.test import SimpleTestCase, override_settings

from chambers.services.region_service import RegionService
from cli.catalog import load_catalog_lattice, sheaf_path
from core.exceptions import EXIT_BUDGET, InputFormatError

from lattice.types import CurveClass, DivisorClass, PowerTensor
from walls.exceptions import EnumerationBudgetExceeded, InvalidNumerics, NegativeBound
from walls.serializers import WallSerializer, load_sheaf, parse_sheaf
from walls.services.invariants_service import InvariantsService
from walls.services.lattice_search import EllipsoidSearch
from walls.services.wall_service import WallService, wall_meets_region
from walls.types import SheafNumerics, Wall, WallClass


def _surface_sheaf(r, c1, c2) -> SheafNumerics:
    return SheafNumerics(r, DivisorClass.of(*c1), PowerTensor(0, 2, {(): c2}), f'({r}, {c1}, {c2})')


class InvariantsTestCase(SimpleTestCase):
    def setUp(self):
        self.lattice = load_catalog_lattice('p1xp1')
        self.invariants = InvariantsService(self.lattice)
        self.phi = DivisorClass.of(1, 1)

    def test_slope_and_discriminant(self):
        sheaf = _surface_sheaf(2, (1, 0), 3)
        self.assertEqual(self.invariants.slope(sheaf, CurveClass.of(1, 1)), F(1, 2))
        self.assertEqual(self.invariants.discriminant_pairing(sheaf, self.phi), F(3, 2))
        direct_sum = _surface_sheaf(2, (1, 1), 1)
        self.assertEqual(self.invariants.discriminant_pairing(direct_sum, self.phi), F(1, 4))

    def test_wall_bound(self):
        self.assertEqual(self.invariants.wall_bound(_surface_sheaf(2, (0, 0), 4), self.phi, 1), 4)
        self.assertEqual(self.invariants.wall_bound(_surface_sheaf(2, (0, 0), 0), self.phi, 1), 0)
        self.assertEqual(self.invariants.wall_bound(_surface_sheaf(2, (0, 0), 6), self.phi, 1), 6)
        with self.assertRaises(NegativeBound) as caught:
            self.invariants.wall_bound(_surface_sheaf(2, (0, 0), -1), self.phi, 1)
        self.assertEqual(caught.exception.value, F(-1, 2))
        with self.assertRaises(ValueError):
            self.invariants.wall_bound(_surface_sheaf(2, (0, 0), 2), self.phi, 2)

    def test_split_discriminant_balances(self):
        total = _surface_sheaf(2, (1, 1), 1)
        sub = SheafNumerics.line(DivisorClass.of(1, 0), 2, 'O(H1)')
        split = self.invariants.split_discriminant(total, sub, self.phi)
        self.assertEqual(split.zeta, DivisorClass.of(1, -1))
        self.assertEqual(split.normal_term, F(1, 4))
        self.assertEqual((split.sub_term, split.quotient_term), (0, 0))
        self.assertTrue(split.balanced)
        quotient = self.invariants.quotient(total, sub)
        self.assertEqual(quotient.c1, DivisorClass.of(0, 1))
        self.assertEqual(quotient.c2.scalar(), 0)

    def test_sub_c1_requires_the_coset(self):
        sheaf = _surface_sheaf(2, (1, 0), 3)
        self.assertEqual(self.invariants.sub_c1(sheaf, DivisorClass.of(1, -2), 1), DivisorClass.of(1, -1))
        with self.assertRaises(InvalidNumerics):
            self.invariants.sub_c1(sheaf, DivisorClass.of(2, -2), 1)

    def test_twist_keeps_the_discriminant(self):
        sheaf = _surface_sheaf(2, (1, 0), 3)
        twisted = sheaf.twist(self.lattice, DivisorClass.of(1, 1))
        self.assertEqual(twisted.c1, DivisorClass.of(3, 2))
        self.assertEqual(twisted.c2.scalar(), 6)
        self.assertEqual(self.invariants.discriminant_pairing(twisted, self.phi),
                         self.invariants.discriminant_pairing(sheaf, self.phi))

    def test_wall_class(self):
        wall_class = WallClass(DivisorClass.of(1, -2), 1, 2)
        self.assertEqual(wall_class.normal, DivisorClass.of(F(1, 2), -1))
        self.assertTrue(wall_class.in_coset(DivisorClass.of(1, 0)))
        self.assertFalse(wall_class.in_coset(DivisorClass.of(0, 0)))
        with self.assertRaises(InvalidNumerics):
            WallClass(DivisorClass.of(0, 0), 1, 2)


class SheafFileTestCase(SimpleTestCase):
    def setUp(self):
        self.lattice = load_catalog_lattice('p1xp1')

    def test_shipped_sheaf(self):
        sheaf = load_sheaf(sheaf_path('r2c10c2_3.json'), self.lattice)
        self.assertEqual((sheaf.r, sheaf.c1), (2, DivisorClass.of(1, 0)))
        self.assertEqual(sheaf.c2.scalar(), 3)

    def test_non_integral_c1_is_rejected(self):
        payload = {'label': 'bad', 'rank': 2, 'c1': ['1/2', '0'], 'c2': [{'monomial': [], 'value': '1'}]}
        with self.assertRaises(InputFormatError):
            parse_sheaf(payload, self.lattice, 'bad.json')

    def test_wrong_dimension_is_rejected(self):
        payload = {'label': 'bad', 'rank': 2, 'c1': ['0', '0'], 'c2': [{'monomial': [0], 'value': '1'}]}
        with self.assertRaises(InputFormatError):
            parse_sheaf(payload, self.lattice, 'bad.json')


class EllipsoidSearchTestCase(SimpleTestCase):
    def test_unit_disc(self):
        search = EllipsoidSearch(((F(1), F(0)), (F(0), F(1))), budget=100)
        points = set(search.points((F(0), F(0)), F(1)))
        self.assertEqual(points, {(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)})

    def test_shifted_skew_ellipse_matches_a_box_scan(self):
        gram = ((F(2), F(1)), (F(1), F(3)))
        center = (F(1, 3), F(-1, 2))
        bound = F(7)
        search = EllipsoidSearch(gram, budget=1000)
        expected = {
            (x, y) for x in range(-6, 7) for y in range(-6, 7)
            if 2 * (x - center[0]) ** 2 + 2 * (x - center[0]) * (y - center[1]) + 3 * (y - center[1]) ** 2 <= bound
        }
        self.assertEqual(set(search.points(center, bound)), expected)

    def test_budget(self):
        search = EllipsoidSearch(((F(1), F(0)), (F(0), F(1))), budget=3)
        with self.assertRaises(EnumerationBudgetExceeded) as caught:
            list(search.points((F(0), F(0)), F(100)))
        self.assertEqual(caught.exception.exit_code, EXIT_BUDGET)

    def test_indefinite_form_is_rejected(self):
        with self.assertRaises(ValueError):
            EllipsoidSearch(((F(1), F(0)), (F(0), F(-1))), budget=10)


class WallEnumerationTestCase(SimpleTestCase):
    def setUp(self):
        self.lattice = load_catalog_lattice('p1xp1')
        self.region = RegionService(self.lattice).region_around(CurveClass.of(F(1, 2), F(1, 2)), F(1, 4))

    def _walls(self, sheaf):
        service = WallService(self.lattice, sheaf)
        report = service.enumerate_walls(self.region)
        self.assertEqual(report.walls, service.brute_force_walls(self.region, box=12))
        return report

    def test_wall_meets_region(self):
        meets, witness = wall_meets_region(Wall.of(1, -2), self.region)
        self.assertTrue(meets)
        self.assertEqual(witness, CurveClass.of(F(1, 2), F(1, 4)))
        meets, witness = wall_meets_region(Wall.of(1, -1), self.region)
        self.assertTrue(meets)
        self.assertEqual(Wall.of(1, -1).evaluate(witness), 0)
        self.assertEqual(wall_meets_region(Wall.of(1, -4), self.region), (False, None))

    def test_wall_sets(self):
        cases = [
            ((2, (0, 0), 2), [Wall.of(1, -1)]),
            ((2, (0, 0), 4), [Wall.of(1, -2), Wall.of(1, -1), Wall.of(2, -1)]),
            ((2, (1, 0), 3), [Wall.of(1, -2), Wall.of(3, -2)]),
            ((3, (0, 0), 3), [Wall.of(1, -2), Wall.of(1, -1), Wall.of(2, -1)]),
        ]
        for numerics, expected in cases:
            with self.subTest(sheaf=numerics):
                report = self._walls(_surface_sheaf(*numerics))
                self.assertEqual(list(report.walls), expected)
                for wall in report.walls:
                    self.assertGreaterEqual(wall.slack, 0)
                    self.assertTrue(wall.source.in_coset(DivisorClass.of(*numerics[1])))

    def _classical_walls(self, c1, c2, box=12):
        """Rank-2 walls on P1xP1: xi = c1 mod 2, c1^2 - 4c2 <= xi^2 < 0, xi^perp meeting the region."""
        c1_square = 2 * c1[0] * c1[1]
        normals = set()
        for a in range(-box, box + 1):
            for b in range(-box, box + 1):
                if (a - c1[0]) % 2 or (b - c1[1]) % 2:
                    continue
                if not c1_square - 4 * c2 <= 2 * a * b < 0:
                    continue
                values = [a * v.coords[0] + b * v.coords[1] for v in self.region.vertices]
                if min(values) > 0 or max(values) < 0:
                    continue
                g = gcd(a, b)
                normal = (a // g, b // g) if a > 0 else (-a // g, -b // g)
                normals.add(normal)
        return [Wall.of(*normal) for normal in sorted(normals)]

    def test_surface_walls_match_the_classical_rank_two_walls(self):
        for c1 in ((0, 0), (1, 0), (1, 1)):
            for c2 in range(0, 7):
                with self.subTest(c1=c1, c2=c2):
                    service = WallService(self.lattice, _surface_sheaf(2, c1, c2))
                    report = service.enumerate_walls(self.region)
                    self.assertEqual(list(report.walls), self._classical_walls(c1, c2))

    def test_long_segment(self):
        region = RegionService(self.lattice).segment(CurveClass.of(F(1, 4), F(7, 4)), CurveClass.of(F(7, 4), F(1, 4)))
        sheaf = load_sheaf(sheaf_path('r2c0c2_2.json'), self.lattice)
        report = WallService(self.lattice, sheaf).enumerate_walls(region)
        self.assertEqual(report.walls, (Wall.of(1, -1),))

    def test_twisting_keeps_the_walls(self):
        sheaf = _surface_sheaf(2, (1, 0), 3)
        twisted = sheaf.twist(self.lattice, DivisorClass.of(1, 1))
        self.assertEqual(self._walls(twisted).walls, self._walls(sheaf).walls)

    def test_enumeration_budget(self):
        service = WallService(self.lattice, _surface_sheaf(2, (0, 0), 4))
        with self.assertRaises(EnumerationBudgetExceeded):
            service.enumerate_walls(self.region, budget=2)

    def test_report_serializer(self):
        report = self._walls(_surface_sheaf(2, (0, 0), 2))
        data = WallSerializer(report.walls, many=True).data
        self.assertEqual(data[0]['normal'], [1, -1])
        self.assertEqual(data[0]['r1'], 1)
        self.assertTrue(data[0]['candidate'])

    def test_safety_below_one_is_rejected(self):
        service = WallService(self.lattice, _surface_sheaf(2, (0, 0), 2))
        with self.assertRaises(ValueError):
            service.enumerate_walls(self.region, safety=F(1, 2))


class OracleWallTestCase(SimpleTestCase):
    def test_projective_bundle_wall(self):
        lattice = load_catalog_lattice('proj-bundle-p2')
        region = RegionService(lattice).around_divisor(DivisorClass.of(1, F(2, 5)), F(1, 4))
        self.assertEqual(region.barycenter, CurveClass.of(F(24, 25), F(49, 25)))
        service = WallService(lattice, load_sheaf(sheaf_path('r2c0c2hx2.json'), lattice))
        report = service.enumerate_walls(region)
        self.assertIn(Wall.of(2, -1), report.walls)
        self.assertEqual(report.walls, service.brute_force_walls(region, box=8))

    def _oracle_walls(self, lattice, sheaf):
        region = RegionService(lattice).default_region()
        service = WallService(lattice, sheaf)
        walls = service.enumerate_walls(region).walls
        self.assertEqual(walls, service.brute_force_walls(region))
        return walls

    def test_product_of_three_lines_matches_the_oracle(self):
        lattice = load_catalog_lattice('p1cubed')
        sheaf = SheafNumerics(2, DivisorClass.of(0, 0, 0), PowerTensor(1, 3, {(0,): 2, (1,): 2, (2,): 2}), 'c2 = (2,2,2)')
        walls = self._oracle_walls(lattice, sheaf)
        for normal in ((0, 1, -1), (1, -1, 0), (1, 0, -1)):
            self.assertIn(Wall.of(*normal), walls)

    def test_line_times_plane_matches_the_oracle(self):
        lattice = load_catalog_lattice('p1xp2')
        sheaf = SheafNumerics(2, DivisorClass.of(0, 0), PowerTensor(1, 2, {(0,): 2, (1,): 2}), 'c2 = (2,2)')
        self.assertIn(Wall.of(2, -1), self._oracle_walls(lattice, sheaf))

    def test_rank_three_matches_the_oracle(self):
        lattice = load_catalog_lattice('p1xp1')
        for c1, c2 in (((0, 0), 3), ((1, 0), 5)):
            with self.subTest(c1=c1, c2=c2):
                self.assertTrue(self._oracle_walls(lattice, _surface_sheaf(3, c1, c2)))


class RadiusDoublingTestCase(SimpleTestCase):
    """A search radius too small for the only wall: doubling has to reach it."""

    def setUp(self):
        self.lattice = load_catalog_lattice('p1xp1')
        self.region = RegionService(self.lattice).region_around(CurveClass.of(F(1, 2), F(1, 2)), F(1, 4))
        # zeta = (2, -2) has Q*(zeta) = 8, so radii 3 and 6 miss it and 12 finds it
        self.small_radius = mock.patch.object(
            WallService, 'search_radius',
            lambda service, region, safety: (F(3), service.auxiliary_gram(region.reference)[1]),
        )

    def test_wall_beyond_an_empty_doubling_is_found(self):
        with self.small_radius:
            report = WallService(self.lattice, _surface_sheaf(2, (0, 0), 2)).enumerate_walls(self.region)
        self.assertEqual(report.walls, (Wall.of(1, -1),))
        self.assertEqual(report.passes, 5)
        self.assertEqual(report.radius, 48)
        self.assertEqual(report.warnings, ())

    @override_settings(WALL_RADIUS_DOUBLINGS=1)
    def test_doubling_cap_is_reported(self):
        with self.small_radius:
            report = WallService(self.lattice, _surface_sheaf(2, (0, 0), 2)).enumerate_walls(self.region)
        self.assertEqual(report.walls, ())
        self.assertTrue(any('not stable' in warning for warning in report.warnings))
