import random
from fractions import Fraction as F
from math import factorial

from django.test import SimpleTestCase

from cli.catalog import MODEL_FILE, catalog_names, entry_path, load_catalog_lattice, load_catalog_model
from core.exceptions import EXIT_INCONSISTENT, InputFormatError
from core.serializers import read_json, validated

from kring.exceptions import InvalidPointLift, ModelInconsistent, ModelMismatch
from kring.serializers import CohomologyModelSerializer, check_model, model_from_data
from kring.services.identity_service import IdentityService
from kring.services.ring_service import RingService
from lattice.types import DivisorClass


def _binomial_chi(k: int, n: int) -> F:
    """chi(O_{P^n}(k)) = (k+1)...(k+n)/n!, valid for negative k too."""
    value = F(1)
    for i in range(1, n + 1):
        value *= k + i
    return value / factorial(n)


class _CatalogMixin:
    def load(self, name):
        lattice = load_catalog_lattice(name)
        model = load_catalog_model(name, lattice)
        return lattice, model, RingService(model), IdentityService(model, lattice)


class RingTestCase(_CatalogMixin, SimpleTestCase):
    def setUp(self):
        self.p3_lattice, self.p3, self.ring, _ = self.load('p3')

    def test_euler_pairing_examples(self):
        ring = self.ring
        self.assertEqual(ring.euler_pairing(ring.unit(), ring.unit()), 1)
        self.assertEqual(ring.euler_pairing(ring.point(), ring.unit()), 1)
        self.assertEqual(ring.euler_pairing(ring.zero(), ring.unit()), 0)

    def test_line_classes_on_p3(self):
        ring = self.ring
        self.assertEqual(ring.line_class(DivisorClass.of(0)).ch, ring.unit().ch)
        line = ring.line_class(DivisorClass.of(1))
        self.assertEqual(line.ch, (1, 1, F(1, 2), F(1, 6)))
        self.assertEqual(ring.chi(line), 4)
        self.assertEqual(ring.chi(ring.line_class(DivisorClass.of(-3))), 0)

    def test_chi_matches_binomial_oracle(self):
        for name, n in (('p2', 2), ('p3', 3)):
            _, _, ring, _ = self.load(name)
            for k in range(-5, 6):
                with self.subTest(model=name, k=k):
                    self.assertEqual(ring.euler_pairing(ring.line_class(DivisorClass.of(k)), ring.unit()),
                                     _binomial_chi(k, n))

    def test_projective_bundle_chi(self):
        _, _, ring, _ = self.load('proj-bundle-p2')
        self.assertEqual(ring.chi(ring.line_class(DivisorClass.of(0, 1))), 4)
        self.assertEqual(ring.chi(ring.line_class(DivisorClass.of(1, 0))), 3)
        self.assertEqual(ring.chi(ring.line_class(DivisorClass.of(0, -1))), 0)

    def test_divisor_structure_classes(self):
        _, _, ring, _ = self.load('p2')
        h = ring.divisor_structure_class(DivisorClass.of(1))
        self.assertEqual(h.ch, (0, 1, F(-1, 2)))
        self.assertEqual(ring.divisor_structure_class(DivisorClass.of(1), 2).ch, (0, 2, -2))
        for a in (1, 2, 3, 5):
            with self.subTest(a=a):
                binomial = ring.unit() - ring.power(ring.unit() - h, a)
                self.assertEqual(ring.divisor_structure_class(DivisorClass.of(1), a).ch, binomial.ch)

    def test_numerical_triviality(self):
        _, p2, ring, _ = self.load('p2')
        self.assertTrue(ring.is_numerically_trivial(ring.zero()))
        self.assertTrue(ring.is_numerically_trivial(ring.point() - ring.klass(p2.point_class)))
        self.assertFalse(ring.is_numerically_trivial(ring.divisor_structure_class(DivisorClass.of(1))))

    def test_line_classes_are_multiplicative(self):
        _, _, ring, _ = self.load('p1cubed')
        rng = random.Random(3)
        for _ in range(10):
            d = DivisorClass.of(*(F(rng.randint(-6, 6), rng.randint(1, 4)) for _ in range(3)))
            e = DivisorClass.of(*(F(rng.randint(-6, 6), rng.randint(1, 4)) for _ in range(3)))
            self.assertEqual(ring.product(ring.line_class(d), ring.line_class(e)).ch, ring.line_class(d + e).ch)

    def test_models_are_hashable(self):
        _, again, _, _ = self.load('p3')
        self.assertEqual(hash(self.p3), hash(again))
        self.assertEqual(len({self.p3, again}), 1)

    def test_classes_from_other_models_are_rejected(self):
        _, _, other, _ = self.load('p2')
        with self.assertRaises(ModelMismatch):
            self.ring.euler_pairing(self.ring.unit(), other.unit())


class ModelFileTestCase(SimpleTestCase):
    def _data(self, name='p3'):
        return read_json(entry_path(name, MODEL_FILE))

    def test_corrupted_top_todd_is_inconsistent(self):
        payload = self._data()
        payload['todd']['H3'] = '2'
        model = model_from_data(validated(CohomologyModelSerializer, payload, 'p3'))
        with self.assertRaises(ModelInconsistent) as caught:
            check_model(model, load_catalog_lattice('p3'))
        self.assertEqual(caught.exception.exit_code, EXIT_INCONSISTENT)

    def test_corrupted_middle_todd_breaks_integrality(self):
        payload = self._data()
        payload['todd']['H2'] = '2'
        model = model_from_data(validated(CohomologyModelSerializer, payload, 'p3'))
        with self.assertRaises(ModelInconsistent):
            check_model(model)

    def test_model_must_match_lattice_form(self):
        payload = self._data('p1xp1')
        payload['mult'][0]['product'] = {'ab': '2'}
        payload['integral'] = {'ab': '1'}
        model = model_from_data(validated(CohomologyModelSerializer, payload, 'p1xp1'))
        with self.assertRaises(ModelInconsistent):
            check_model(model, load_catalog_lattice('p1xp1'))

    def test_unknown_basis_names_are_located(self):
        payload = self._data()
        payload['todd']['K'] = '1'
        with self.assertRaises(InputFormatError) as caught:
            validated(CohomologyModelSerializer, payload, 'p3')
        self.assertIn('todd', caught.exception.messages[0])

    def test_conflicting_products(self):
        payload = self._data()
        payload['mult'].append({'factors': ['H', 'H'], 'product': {'H2': '3'}})
        data = validated(CohomologyModelSerializer, payload, 'p3')
        with self.assertRaises(InputFormatError):
            model_from_data(data)


class IdentityTestCase(_CatalogMixin, SimpleTestCase):
    def setUp(self):
        self.lattice, self.model, self.ring, self.identities = self.load('p3')
        self.hh = [DivisorClass.of(1), DivisorClass.of(1)]

    def test_u_class_top_level(self):
        u = self.identities.u_class(2, self.ring.unit(), self.hh)
        # -h^2 + chi(h^2)[O_x] with h^2 = H^2 - H^3 and chi(h^2) = 1
        self.assertEqual(u.ch, (0, 0, -1, 2))
        self.assertTrue(self.identities.u_class(2, self.ring.zero(), self.hh).is_zero())

    def _other_point_lift(self, lattice, ring, h_list, level):
        """Product of doubled generator classes, in reverse order, normalised on X^(level)."""
        gens = lattice.ample_gens[::-1]
        candidate = ring.product(*(
            ring.divisor_structure_class(gens[j % len(gens)], 2) for j in range(lattice.n - level)
        ))
        restriction = ring.product(*(ring.divisor_structure_class(h) for h in h_list[:level]))
        return candidate.scaled(1 / ring.chi(ring.product(restriction, candidate))), restriction

    def test_u_class_does_not_depend_on_the_point_lift(self):
        cases = [
            ('p3', self.hh, [self.ring.unit(), self.ring.line_class(DivisorClass.of(2))]),
            ('p1cubed', [DivisorClass.of(1, 1, 1)] * 2, None),
            ('p1xp2', [DivisorClass.of(1, 1), DivisorClass.of(1, 2)], None),
        ]
        for name, h_list, classes in cases:
            lattice, model, ring, identities = self.load(name)
            classes = classes or [ring.unit(), ring.line_class(lattice.basis_divisor(0))]
            for c in classes:
                for i in range(lattice.n):
                    level = lattice.n - 1 - i
                    with self.subTest(lattice=name, c=str(c), i=i):
                        point, restriction = self._other_point_lift(lattice, ring, h_list, level)
                        difference = identities.u_class(i, c, h_list) - identities.u_class(i, c, h_list, point=point)
                        for k in range(model.size):
                            self.assertEqual(ring.chi(ring.product(difference, restriction, ring.basis_lift(k))), 0)
                        if level == 0:
                            self.assertTrue(ring.is_numerically_trivial(difference))

    def test_u_class_rejects_a_non_point_lift(self):
        with self.assertRaises(InvalidPointLift):
            self.identities.u_class(1, self.ring.unit(), self.hh, point=self.ring.unit())
        with self.assertRaises(InvalidPointLift):
            self.identities.u_class(2, self.ring.unit(), self.hh, point=self.ring.point().scaled(2))

    def test_w_class_is_linear(self):
        identities, ring = self.identities, self.ring
        self.assertTrue(identities.w_class(ring.zero(), self.hh).is_zero())
        a = ring.line_class(DivisorClass.of(2))
        b = ring.line_class(DivisorClass.of(-1)) + ring.point()
        self.assertEqual(identities.w_class(a + b, self.hh).ch,
                         (identities.w_class(a, self.hh) + identities.w_class(b, self.hh)).ch)

    def test_secondway_and_firstway_on_p3(self):
        for c in (self.ring.unit(), self.ring.zero(), self.ring.line_class(DivisorClass.of(2))):
            with self.subTest(c=str(c)):
                second = self.identities.verify_secondway(c, self.hh)
                self.assertTrue(second.passed)
                self.assertTrue(second.difference.is_zero())
                self.assertTrue(self.identities.verify_firstway_virtual(c, self.hh).passed)

    def test_mixed_multipolarisations(self):
        _, _, ring, identities = self.load('p1xp2')
        c = ring.line_class(DivisorClass.of(1, 0))
        h_list = [DivisorClass.of(1, 0), DivisorClass.of(0, 1)]
        self.assertTrue(identities.verify_secondway(c, h_list).passed)

        _, _, ring, identities = self.load('p1cubed')
        diagonal = DivisorClass.of(1, 1, 1)
        self.assertTrue(identities.verify_firstway_virtual(ring.line_class(DivisorClass.of(1, 0, 0)),
                                                           [diagonal, diagonal]).passed)

    def test_scaling(self):
        _, _, ring, identities = self.load('p2')
        h = [DivisorClass.of(1)]
        check = identities.verify_scaling(ring.unit(), h, [2])
        self.assertTrue(check.passed)
        self.assertEqual(identities.u_class(1, ring.unit(), [DivisorClass.of(2)]).ch, (0, -2, 3))
        self.assertTrue(identities.verify_scaling(ring.line_class(DivisorClass.of(1)), h, [3]).passed)
        self.assertTrue(identities.verify_scaling(ring.unit(), h, [1]).difference.is_zero())
        with self.assertRaises(ValueError):
            identities.verify_scaling(ring.unit(), h, [0])

    def test_telescoping(self):
        report = self.identities.verify_telescoping(self.ring.unit(), self.hh)
        self.assertTrue(report.passed)
        self.assertEqual(len(report.steps), 2)
        self.assertEqual(report.exponent, 1)

        _, _, ring, identities = self.load('p1cubed')
        report = identities.verify_telescoping(ring.line_class(DivisorClass.of(1, 0, 0)),
                                               [DivisorClass.of(1, 1, 0), DivisorClass.of(0, 1, 1)])
        self.assertTrue(report.passed)
        self.assertEqual(report.exponent, 4)

    def test_surface_chain_is_a_single_step(self):
        _, _, ring, identities = self.load('p1xp1')
        report = identities.verify_telescoping(ring.line_class(DivisorClass.of(1, -2)), [DivisorClass.of(1, 1)])
        self.assertEqual(len(report.steps), 1)
        self.assertTrue(report.passed)

    def test_identities_on_random_classes(self):
        rng = random.Random(20240601)
        for name in catalog_names():
            lattice, _, ring, identities = self.load(name)
            for _ in range(3):
                c = ring.zero()
                for _ in range(rng.randint(1, 4)):
                    d = DivisorClass.of(*(rng.randint(-3, 3) for _ in range(lattice.rho)))
                    c = c + ring.line_class(d)
                c = c + ring.point().scaled(rng.randint(-2, 2))
                # positive integral combinations of the generators are interior ample classes
                h_list = [
                    DivisorClass.of(*(rng.randint(1, 3) for _ in range(lattice.rho))) for _ in range(lattice.n - 1)
                ]
                multiples = [rng.randint(1, 3) for _ in h_list]
                with self.subTest(model=name, c=str(c)):
                    self.assertTrue(identities.verify_secondway(c, h_list).passed)
                    self.assertTrue(identities.verify_firstway_virtual(c, h_list).passed)
                    self.assertTrue(identities.verify_scaling(c, h_list, multiples).passed)
                    self.assertTrue(identities.verify_telescoping(c, h_list).passed)
