import random
from fractions import Fraction as F

from django.test import SimpleTestCase
from sympy import Poly, Rational, Symbol

from cli.catalog import load_catalog_lattice
from core.exceptions import EXIT_INPUT

from chambers.exceptions import EmptyRegion, IdenticallyZero, NotFound, PreconditionFailed
from chambers.services.crossing_service import CrossingService, segment_crossings_n1
from chambers.services.decomposition_service import DecompositionService, same_chamber, sign_vector
from chambers.services.region_service import RegionService
from chambers.services.representative_service import RepresentativeService
from chambers.services.slice_service import SlicePlane, SliceService
from chambers.types import Chamber
from lattice.types import CurveClass, DivisorClass
from walls.exceptions import RegionNotInP
from walls.types import Wall

SQUARE = [CurveClass.of(3, 1, 2), CurveClass.of(2, 3, 1), CurveClass.of(2, 1, 3), CurveClass.of(1, 3, 2)]
SQUARE_WALLS = [Wall.of(1, -1, 0), Wall.of(0, 1, -1)]


class SignVectorTestCase(SimpleTestCase):
    def test_sign_vector(self):
        walls = [Wall.of(1, -1)]
        self.assertEqual(sign_vector(CurveClass.of(1, 2), walls), (-1,))
        self.assertEqual(sign_vector(CurveClass.of(3, 3), walls), (0,))
        self.assertEqual(sign_vector(CurveClass.of(1, 2), []), ())

    def test_same_chamber(self):
        walls = [Wall.of(1, -1)]
        self.assertTrue(same_chamber(CurveClass.of(1, 2), CurveClass.of(1, 3), walls))
        self.assertFalse(same_chamber(CurveClass.of(1, 2), CurveClass.of(2, 1), walls))
        self.assertTrue(same_chamber(CurveClass.of(5, 7), CurveClass.of(5, 7), walls))

    def test_walls_are_stored_primitive(self):
        self.assertEqual(Wall.of(-2, 4).normal, (1, -2))
        self.assertEqual(Wall.of(-2, 4), Wall.of(1, -2))


class RegionTestCase(SimpleTestCase):
    def setUp(self):
        self.lattice = load_catalog_lattice('p1xp1')
        self.regions = RegionService(self.lattice)

    def test_region_around(self):
        region = self.regions.region_around(CurveClass.of(F(1, 2), F(1, 2)), F(1, 4))
        self.assertEqual(len(region.vertices), 4)
        self.assertIn(CurveClass.of(F(1, 4), F(1, 2)), region.vertices)
        self.assertTrue(self.regions.contains(region, CurveClass.of(F(1, 2), F(1, 2))))
        self.assertFalse(self.regions.contains(region, CurveClass.of(1, 1)))

    def test_vertex_outside_p_is_rejected(self):
        with self.assertRaises(RegionNotInP) as caught:
            self.regions.certify([CurveClass.of(1, 1), CurveClass.of(-1, 1)])
        self.assertEqual(caught.exception.exit_code, EXIT_INPUT)

    def test_default_region_is_certified(self):
        lattice = load_catalog_lattice('proj-bundle-p2')
        region = RegionService(lattice).default_region()
        center = region.barycenter
        self.assertEqual(center, CurveClass.of(F(3, 4), 1))
        offsets = {max(abs(a - b) for a, b in zip(v.coords, center.coords)) for v in region.vertices}
        self.assertEqual(region.label, 'default')
        self.assertEqual(len(offsets), 1)
        self.assertLessEqual(offsets.pop(), F(1, 4))

    def test_empty_region(self):
        with self.assertRaises(EmptyRegion):
            self.regions.certify([])


class DecomposeTestCase(SimpleTestCase):
    def test_segment_with_one_wall(self):
        lattice = load_catalog_lattice('p1xp1')
        region = RegionService(lattice).segment(CurveClass.of(1, 2), CurveClass.of(2, 1))
        chambers = DecompositionService(region, [Wall.of(1, -1)]).decompose()
        self.assertEqual([c.signs for c in chambers], [(-1,), (0,), (1,)])
        self.assertEqual(chambers[1].representative, CurveClass.of(F(3, 2), F(3, 2)))
        self.assertEqual(chambers[1].walls_active, (0,))

    def test_no_walls_is_one_chamber(self):
        lattice = load_catalog_lattice('p1xp1')
        region = RegionService(lattice).segment(CurveClass.of(1, 2), CurveClass.of(2, 1))
        chambers = DecompositionService(region, []).decompose()
        self.assertEqual(len(chambers), 1)
        self.assertEqual(chambers[0].signs, ())

    def test_square_with_two_walls(self):
        lattice = load_catalog_lattice('p1cubed')
        region = RegionService(lattice).certify(SQUARE, label='square')
        service = DecompositionService(region, SQUARE_WALLS)
        chambers = service.decompose()
        self.assertEqual(len(chambers), 9)
        self.assertEqual(sum(1 for c in chambers if c.is_open), 4)
        self.assertEqual(sum(1 for c in chambers if len(c.walls_active) == 1), 4)
        point = next(c for c in chambers if c.signs == (0, 0))
        self.assertEqual(point.representative, CurveClass.of(2, 2, 2))
        rng = random.Random(5)
        for chamber in chambers:
            with self.subTest(cell=chamber.label):
                self.assertEqual(sign_vector(chamber.representative, SQUARE_WALLS), chamber.signs)
                for sample in service.sample_points(chamber, 10, rng):
                    self.assertEqual(sign_vector(sample, SQUARE_WALLS), chamber.signs)


class CrossingTestCase(SimpleTestCase):
    def setUp(self):
        self.bundle = load_catalog_lattice('proj-bundle-p2')
        self.crossings = CrossingService(self.bundle)

    def test_n1_crossings(self):
        result = segment_crossings_n1(CurveClass.of(1, 2), CurveClass.of(2, 1), [Wall.of(1, -1)])
        self.assertEqual([c.value for c in result.crossings], [F(1, 2)])
        self.assertTrue(all(c.is_rational for c in result.crossings))
        self.assertEqual(segment_crossings_n1(CurveClass.of(1, 2), CurveClass.of(1, 3), [Wall.of(1, -1)]).crossings, ())

    def test_n1_crossing_on_projective_bundle(self):
        start = CurveClass.of(F(11, 25), F(36, 25))
        end = CurveClass.of(F(56, 25), F(81, 25))
        result = segment_crossings_n1(start, end, [Wall.of(2, -1)])
        self.assertEqual(result.crossings[0].value, F(14, 45))

    def test_wall_containing_segment_is_reported(self):
        result = segment_crossings_n1(CurveClass.of(1, 1), CurveClass.of(2, 2), [Wall.of(1, -1), Wall.of(1, -3)])
        self.assertEqual(result.contained, (Wall.of(1, -1),))
        self.assertEqual(result.crossings, ())
        with self.assertRaises(PreconditionFailed):
            segment_crossings_n1(CurveClass.of(1, 1), CurveClass.of(1, 1), [])

    def test_irrational_crossing_in_ample_cone(self):
        result = self.crossings.segment_crossings_amp(
            DivisorClass.of(1, F(1, 5)), DivisorClass.of(1, F(4, 5)), Wall.of(2, -1)
        )
        self.assertEqual(result.degree, 2)
        self.assertEqual(len(result.crossings), 1)
        crossing = result.crossings[0]
        self.assertFalse(crossing.is_rational)
        self.assertEqual(crossing.algebraic.minpoly, (9, 36, -14))
        low, high = crossing.algebraic.interval
        self.assertTrue(0 < low < high < 1)
        self.assertLessEqual(high - low, F(1, 100))
        poly = Poly(9 * Symbol('x') ** 2 + 36 * Symbol('x') - 14)
        self.assertLess(poly.eval(Rational(low.numerator, low.denominator)), 0)
        self.assertGreater(poly.eval(Rational(high.numerator, high.denominator)), 0)

    def test_wall_without_amp_crossings(self):
        result = self.crossings.segment_crossings_amp(DivisorClass.of(1, F(1, 5)), DivisorClass.of(1, 3), Wall.of(1, -1))
        self.assertEqual(result.crossings, ())

    def test_signs_constant_between_amp_crossings(self):
        start, end = DivisorClass.of(1, F(1, 5)), DivisorClass.of(1, F(4, 5))
        wall = Wall.of(2, -1)
        root = self.crossings.segment_crossings_amp(start, end, wall).crossings[0].algebraic.interval
        below = [F(k, 20) for k in range(0, 7)]
        above = [F(k, 20) for k in range(8, 21)]
        self.assertTrue(all(t < root[0] for t in below) and all(t > root[1] for t in above))

        self.assertEqual({self._sign(wall, start, end, t) for t in below}, {-1})
        self.assertEqual({self._sign(wall, start, end, t) for t in above}, {1})

    def _sign(self, wall, start, end, t):
        value = self.crossings.evaluate(wall, start.scaled(1 - t) + end.scaled(t))
        return (value > 0) - (value < 0)

    def test_surface_crossings_are_linear(self):
        lattice = load_catalog_lattice('p1xp1')
        result = CrossingService(lattice).segment_crossings_amp(DivisorClass.of(1, 2), DivisorClass.of(2, 1), Wall.of(1, -1))
        self.assertEqual(result.degree, 1)
        self.assertEqual([c.value for c in result.crossings], [F(1, 2)])

    def test_identically_zero_and_generic_degree(self):
        service = CrossingService(load_catalog_lattice('p1cubed'))
        with self.assertRaises(IdenticallyZero):
            service.segment_crossings_amp(DivisorClass.of(1, 1, 1), DivisorClass.of(2, 2, 1), Wall.of(1, -1, 0))
        poly = service.pullback_polynomial(Wall.of(2, -1, -1), DivisorClass.of(1, 1, 1), DivisorClass.of(1, 2, 3))
        self.assertEqual(poly.degree(), 2)

    def test_nonlinearity_witness(self):
        service = CrossingService(load_catalog_lattice('p1cubed'))
        witness = service.nonlinearity_witness(Wall.of(2, -1, -1))
        self.assertEqual(witness.signs, (-1, 0, -1))
        low, middle, high = witness.classes
        self.assertEqual(middle - low, high - middle)
        with self.assertRaises(NotFound):
            # a.phi^2 = 2 phi_3 (phi_2 - phi_1): the sign is affine on the ample cone
            service.nonlinearity_witness(Wall.of(1, -1, 0))
        with self.assertRaises(PreconditionFailed):
            CrossingService(load_catalog_lattice('p1xp1')).nonlinearity_witness(Wall.of(1, -1))


class RepresentativeTestCase(SimpleTestCase):
    def test_open_chamber_on_p1_cubed(self):
        lattice = load_catalog_lattice('p1cubed')
        walls = [Wall.of(1, -1, 0)]
        chamber = Chamber((-1,), CurveClass.of(2, 3, 4))
        rep = RepresentativeService(lattice, walls).chamber_representative(chamber, seed=DivisorClass.of(1, 1, 1))
        self.assertEqual(rep.a, DivisorClass.of(1, 1, 1))
        self.assertEqual(rep.b, DivisorClass.of(5, 3, 1))
        self.assertEqual(rep.scale, F(1, 2))
        self.assertEqual(rep.signs, (-1,))

    def test_every_cell_of_the_square(self):
        lattice = load_catalog_lattice('p1cubed')
        region = RegionService(lattice).certify(SQUARE)
        chambers = DecompositionService(region, SQUARE_WALLS).decompose()
        service = RepresentativeService(lattice, SQUARE_WALLS)
        for chamber in chambers:
            with self.subTest(cell=chamber.label):
                rep = service.chamber_representative(chamber)
                self.assertTrue(rep.a.is_integral() and rep.b.is_integral())
                self.assertGreater(rep.scale, 0)
                self.assertEqual(rep.signs, chamber.signs)

    def test_surface_representative(self):
        lattice = load_catalog_lattice('p1xp1')
        region = RegionService(lattice).segment(CurveClass.of(1, 2), CurveClass.of(2, 1))
        walls = [Wall.of(1, -1)]
        service = RepresentativeService(lattice, walls)
        for chamber in DecompositionService(region, walls).decompose():
            with self.subTest(cell=chamber.label):
                rep = service.chamber_representative(chamber)
                self.assertEqual(rep.a, rep.b)
                self.assertEqual(rep.signs, chamber.signs)


class SliceTestCase(SimpleTestCase):
    def test_raster_ids(self):
        lattice = load_catalog_lattice('p1xp1')
        walls = [Wall.of(1, -1)]
        region = RegionService(lattice).segment(CurveClass.of(1, 2), CurveClass.of(2, 1))
        chambers = DecompositionService(region, walls).decompose()
        plane = SlicePlane(CurveClass.of(1, 2), CurveClass.of(1, -1), CurveClass.of(0, 0))
        export = SliceService(walls, chambers).export_csv(plane, 3)
        self.assertEqual(export.content.splitlines(), ['0,1,2'] * 3)
