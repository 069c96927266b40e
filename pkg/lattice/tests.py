import random
from fractions import Fraction as F

from django.test import SimpleTestCase

from cli.catalog import catalog_names, load_catalog_lattice
from core.exact import determinant
from core.exceptions import InputFormatError
from core.serializers import validated

from lattice.exceptions import (
    DegenerateForm,
    DimensionMismatch,
    PowerInversionError,
    SingularLefschetz,
)
from lattice.serializers import LatticeSerializer, lattice_to_data, validate_lattice
from lattice.services.intersection_service import IntersectionService
from lattice.services.newton_service import PowerInversionService
from lattice.services.positivity_service import PositivityService
from lattice.types import DivisorClass, PolarisedLattice, PowerTensor


def _flat_square() -> PolarisedLattice:
    """Rank-2 surface form with every pairing equal to 1."""
    form = PowerTensor(2, 2, {(0, 0): 1, (0, 1): 1, (1, 1): 1})
    return PolarisedLattice(2, 2, form, (DivisorClass.of(1, 0), DivisorClass.of(0, 1)), name='flat')


class IntersectionTestCase(SimpleTestCase):
    def setUp(self):
        self.cube = load_catalog_lattice('p1cubed')
        self.bundle = load_catalog_lattice('proj-bundle-p2')
        self.cube_ops = IntersectionService(self.cube)
        self.bundle_ops = IntersectionService(self.bundle)

    def test_intersection_numbers_on_p1_cubed(self):
        h1, h2, h3 = (self.cube.basis_divisor(i) for i in range(3))
        self.assertEqual(self.cube_ops.intersection_number(h1, h2, h3), 1)
        self.assertEqual(self.cube_ops.intersection_number(h1, h1, h2), 0)
        self.assertEqual(self.cube_ops.intersection_number(h1, DivisorClass.zero(3), h3), 0)

    def test_wrong_argument_count(self):
        with self.assertRaises(DimensionMismatch):
            self.cube_ops.intersection_number(self.cube.basis_divisor(0))
        with self.assertRaises(DimensionMismatch):
            self.cube_ops.power_map(DivisorClass.of(1, 1))

    def test_power_map(self):
        self.assertEqual(self.cube_ops.power_map(DivisorClass.of(1, 1, 1)).coords, (2, 2, 2))
        self.assertEqual(self.cube_ops.power_map(DivisorClass.zero(3)).coords, (0, 0, 0))
        for t in (F(1, 5), F(1, 2), F(3)):
            with self.subTest(t=t):
                image = self.bundle_ops.power_map(DivisorClass.of(1, t))
                self.assertEqual(image.coords[0], 2 * t + t * t)

    def test_intermediate_power_is_a_tensor(self):
        tensor = self.cube_ops.power_map(DivisorClass.of(1, 1, 1), k=1)
        self.assertEqual(tensor.order, 2)
        self.assertEqual(tensor.as_matrix(), self.cube_ops.lefschetz_map(DivisorClass.of(1, 1, 1)))

    def test_lefschetz_maps(self):
        matrix = self.cube_ops.lefschetz_map(DivisorClass.of(1, 1, 1))
        self.assertEqual(matrix, ((0, 1, 1), (1, 0, 1), (1, 1, 0)))
        self.assertEqual(self.bundle_ops.lefschetz_map(DivisorClass.of(1, 1)), ((1, 2), (2, 2)))

        surface = load_catalog_lattice('p1xp1')
        ops = IntersectionService(surface)
        self.assertEqual(ops.lefschetz_map(DivisorClass.of(1, 1)), ops.lefschetz_map(DivisorClass.of(3, 7)))

    def test_lefschetz_inverse(self):
        h = DivisorClass.of(1, 1, 1)
        solved = self.cube_ops.lefschetz_inverse(h, self.cube.curve(1, 1, 1))
        self.assertEqual(solved, DivisorClass.of(F(1, 2), F(1, 2), F(1, 2)))

        rng = random.Random(7)
        for _ in range(10):
            d = DivisorClass.of(*(F(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(3)))
            self.assertEqual(self.cube_ops.lefschetz_inverse(h, self.cube_ops.apply_lefschetz(h, d)), d)

    def test_lefschetz_inverse_singular(self):
        flat = _flat_square()
        with self.assertRaises(SingularLefschetz):
            IntersectionService(flat).lefschetz_inverse(DivisorClass.of(1, 1), flat.curve(1, 0))

    def test_multipolarisation_helpers(self):
        h1, h2, h3 = (self.cube.basis_divisor(i) for i in range(3))
        curve = self.cube_ops.complete_intersection_class([h1 + h2, h2 + h3])
        # (H1+H2)(H2+H3) = H1H2 + H1H3 + H2H3 pairs to 1 with each H_i
        self.assertEqual(curve.coords, (1, 1, 1))
        self.assertEqual(self.cube_ops.degree_vector([h1 + h2, h2 + h3]), (2, 2))
        self.assertEqual(self.cube_ops.mixed_products(DivisorClass.of(1, 1, 1), DivisorClass.of(2, 1, 1)),
                         (6, 8, 10, 12))


class PositivityTestCase(SimpleTestCase):
    def setUp(self):
        self.cube = load_catalog_lattice('p1cubed')
        self.positivity = PositivityService(self.cube)

    def test_ample_cone_membership(self):
        self.assertTrue(self.positivity.is_in_ample_cone(DivisorClass.of(1, 1, 1)))
        self.assertFalse(self.positivity.is_in_ample_cone(DivisorClass.of(1, 0, -1), strict=False))
        self.assertFalse(self.positivity.is_in_ample_cone(DivisorClass.of(1, 1, 0), strict=True))
        self.assertTrue(self.positivity.is_in_ample_cone(DivisorClass.of(1, 1, 0), strict=False))
        self.assertEqual(self.positivity.ample_margin(DivisorClass.of(1, 1, 1)), 1)

    def test_khovanskii_teissier_examples(self):
        report = self.positivity.khovanskii_teissier(DivisorClass.of(1, 1, 1), DivisorClass.of(2, 1, 1))
        self.assertTrue(report.holds)
        self.assertEqual(report.slacks, (4, 4))
        alpha = DivisorClass.of(1, 1, 1)
        self.assertEqual(self.positivity.khovanskii_teissier(alpha, alpha.scaled(3)).slacks, (0, 0))
        self.assertEqual(self.positivity.khovanskii_teissier(alpha, alpha).slacks, (0, 0))

    def test_hodge_index_on_projective_bundle(self):
        bundle = load_catalog_lattice('proj-bundle-p2')
        certificate = PositivityService(bundle).verify_hodge_index(DivisorClass.of(1, 1))
        self.assertTrue(certificate.passed)
        self.assertEqual(len(certificate.minors), 1)
        self.assertLess(certificate.minors[0], 0)

    def test_hodge_index_rank_one_is_vacuous(self):
        p2 = load_catalog_lattice('p2')
        certificate = PositivityService(p2).verify_hodge_index(DivisorClass.of(2))
        self.assertTrue(certificate.passed)
        self.assertEqual(certificate.minors, ())

    def test_degenerate_form_is_reported(self):
        with self.assertRaises(DegenerateForm) as caught:
            PositivityService(_flat_square()).verify_hodge_index(DivisorClass.of(1, 0))
        self.assertIsNotNone(caught.exception.witness)

    def test_seeded_properties_on_catalog(self):
        """Injectivity, KT, Hodge index and Hard Lefschetz on sampled ample classes."""
        rng = random.Random(20240601)
        for name in catalog_names():
            lattice = load_catalog_lattice(name)
            positivity = PositivityService(lattice)
            intersections = IntersectionService(lattice)
            with self.subTest(lattice=name):
                for _ in range(15):
                    alpha = positivity.random_ample_class(rng)
                    beta = positivity.random_ample_class(rng)
                    if alpha != beta:
                        self.assertNotEqual(intersections.power_map(alpha), intersections.power_map(beta))
                    self.assertTrue(positivity.khovanskii_teissier(alpha, beta).holds)
                    self.assertGreaterEqual(positivity.injectivity_certificate(alpha, beta), 0)
                    self.assertTrue(positivity.verify_hodge_index(alpha).passed)
                    self.assertNotEqual(determinant(intersections.lefschetz_map(alpha)), 0)


class NewtonTestCase(SimpleTestCase):
    def setUp(self):
        self.cube = load_catalog_lattice('p1cubed')
        self.newton = PowerInversionService(self.cube)

    def test_recovers_preimage_from_perturbed_seed(self):
        gamma = self.cube.curve(2, 2, 2)
        result = self.newton.newton_invert_power(gamma, seed=DivisorClass.of(1, F(9, 10), F(11, 10)))
        self.assertLessEqual(result.residual_norm, F(1, 10 ** 12))
        for coordinate in result.alpha.coords:
            self.assertLess(abs(coordinate - 1), F(1, 10 ** 6))

    def test_fixed_point_takes_zero_iterations(self):
        seed = DivisorClass.of(1, 2, 3)
        gamma = IntersectionService(self.cube).power_map(seed)
        result = self.newton.newton_invert_power(gamma, seed=seed)
        self.assertEqual(result.iterations, 0)
        self.assertEqual(result.alpha, seed)
        self.assertEqual(result.residual_norm, 0)

    def test_residuals_decay_quadratically(self):
        rng = random.Random(11)
        intersections = IntersectionService(self.cube)
        for _ in range(5):
            # coordinate ratios stay below 2, which keeps the Newton constant below 10
            alpha = DivisorClass(tuple(F(rng.randint(6, 12), 12) for _ in range(3)))
            seed = DivisorClass(tuple(c * F(rng.randint(90, 110), 100) for c in alpha.coords))
            result = self.newton.newton_invert_power(intersections.power_map(alpha), seed=seed)
            trace = result.trace
            for before, after in zip(trace, trace[1:]):
                if before < F(1, 10):
                    self.assertLessEqual(after, 10 * before * before + F(1, 2 ** 200))

    def test_target_outside_movable_cone_fails(self):
        with self.assertRaises(PowerInversionError):
            self.newton.newton_invert_power(self.cube.curve(-2, -2, -2), seed=DivisorClass.of(1, 1, 1))

    def test_default_seed_is_ample(self):
        seed = self.newton.default_seed(self.cube.curve(8, 8, 8))
        self.assertTrue(PositivityService(self.cube).is_in_ample_cone(seed))

    def test_continuation_reaches_far_target(self):
        alpha = DivisorClass.of(5, 1, F(1, 3))
        gamma = IntersectionService(self.cube).power_map(alpha)
        result = self.newton.invert_with_continuation(gamma)
        self.assertLessEqual(result.residual_norm, F(1, 10 ** 12))


class LatticeFileTestCase(SimpleTestCase):
    def _payload(self, **overrides):
        payload = lattice_to_data(load_catalog_lattice('p1xp1'))
        payload.update(overrides)
        return payload

    def test_decimal_value_is_located(self):
        payload = self._payload(form=[{'monomial': [0, 1], 'value': '1.5'}])
        with self.assertRaises(InputFormatError) as caught:
            validated(LatticeSerializer, payload, 'bad.json')
        self.assertTrue(any(line.startswith('form[0].value') for line in caught.exception.messages))

    def test_monomial_length_is_checked(self):
        payload = self._payload(form=[{'monomial': [0, 1, 1], 'value': '1'}])
        with self.assertRaises(InputFormatError) as caught:
            validated(LatticeSerializer, payload, 'bad.json')
        self.assertIn('form[0].monomial', caught.exception.messages[0])

    def test_symmetric_duplicates_must_agree(self):
        payload = self._payload(form=[
            {'monomial': [0, 1], 'value': '1'},
            {'monomial': [1, 0], 'value': '1'},
        ])
        data = validated(LatticeSerializer, payload, 'ok.json')
        self.assertEqual(data['tensor'][(1, 0)], 1)

        payload['form'][1]['value'] = '2'
        with self.assertRaises(InputFormatError):
            validated(LatticeSerializer, payload, 'bad.json')

    def test_sanity_gate_rejects_negative_generator(self):
        surface = load_catalog_lattice('p1xp1')
        broken = PolarisedLattice(2, 2, surface.form, (DivisorClass.of(1, -1), DivisorClass.of(0, 1)), name='broken')
        with self.assertRaises(InputFormatError):
            validate_lattice(broken)

    def test_catalog_entries_load(self):
        self.assertEqual(
            catalog_names(),
            ['p1cubed', 'p1xp1', 'p1xp2', 'p2', 'p3', 'proj-bundle-p2'],
        )

    def test_lattices_and_tensors_are_hashable(self):
        first, second = load_catalog_lattice('p1xp1'), load_catalog_lattice('p1xp1')
        self.assertEqual(hash(first), hash(second))
        self.assertEqual(len({first, second, load_catalog_lattice('p2')}), 2)
        self.assertEqual(hash(PowerTensor(2, 2, {(1, 0): 1})), hash(PowerTensor(2, 2, {(0, 1): F(1)})))
