import importlib
import os
from fractions import Fraction as F
from unittest import mock

from django.test import SimpleTestCase, override_settings

from core import exact
from core.concurrency import parallel_map
from core.lp import LinearProgram, LPStatus
from core.metrics import timed
from core.serializers import MonomialValueSerializer, flatten_errors


class RationalFormatTestCase(SimpleTestCase):
    """"p/q" parsing and formatting."""

    def test_parse_accepts_fraction_and_integer(self):
        self.assertEqual(exact.parse_rational('3/4'), F(3, 4))
        self.assertEqual(exact.parse_rational('-2'), F(-2))
        self.assertEqual(exact.parse_rational(7), F(7))
        self.assertEqual(exact.parse_rational(' 6/8 '), F(3, 4))

    def test_parse_rejects_decimals_and_floats(self):
        for raw in ('1.5', 1.5, '1e3', '', 'a/b', True, '1/0'):
            with self.subTest(raw=raw):
                with self.assertRaises(exact.RationalFormatError):
                    exact.parse_rational(raw)

    def test_format_is_exact(self):
        self.assertEqual(exact.format_rational(F(14, 45)), '14/45')
        self.assertEqual(exact.format_rational(F(-6, 3)), '-2')
        value = F(2 ** 300 + 1, 3 ** 50)
        self.assertEqual(exact.parse_rational(exact.format_rational(value)), value)


class LinearAlgebraTestCase(SimpleTestCase):
    def test_solve_and_inverse(self):
        matrix = [[F(0), F(1), F(1)], [F(1), F(0), F(1)], [F(1), F(1), F(0)]]
        self.assertEqual(exact.solve(matrix, [F(1)] * 3), (F(1, 2),) * 3)
        inv = exact.inverse(matrix)
        self.assertEqual(exact.mat_mul(matrix, inv), exact.identity(3))

    def test_singular_system_raises(self):
        with self.assertRaises(exact.SingularMatrixError):
            exact.solve([[F(1), F(1)], [F(1), F(1)]], [F(1), F(2)])

    def test_determinant_and_minors(self):
        self.assertEqual(exact.determinant([[F(1), F(2)], [F(2), F(2)]]), F(-2))
        self.assertEqual(exact.leading_minors([[F(2), F(1)], [F(1), F(2)]]), (F(2), F(3)))
        self.assertTrue(exact.is_positive_definite([[F(1), F(0)], [F(0), F(1)]]))
        self.assertFalse(exact.is_positive_definite([[F(0), F(1)], [F(1), F(0)]]))

    def test_nullspace_of_functional(self):
        basis = exact.nullspace([[F(3), F(4)]], 2)
        self.assertEqual(len(basis), 1)
        self.assertEqual(exact.dot(basis[0], (F(3), F(4))), 0)

    def test_ldl_reconstructs_matrix(self):
        matrix = [[F(4), F(2), F(0)], [F(2), F(5), F(1)], [F(0), F(1), F(3)]]
        diagonal, lower = exact.ldl_decompose(matrix)
        for i in range(3):
            for j in range(3):
                value = sum(lower[i][k] * diagonal[k] * lower[j][k] for k in range(3))
                self.assertEqual(value, matrix[i][j])

    def test_primitive_normalises_sign_and_content(self):
        self.assertEqual(exact.primitive([F(-4), F(2)]), (2, -1))
        self.assertEqual(exact.primitive([F(0), F(-3, 2), F(3)]), (0, 1, -2))

    def test_rounding_to_bits(self):
        self.assertEqual(exact.round_to_bits(F(1, 3), 2), F(1, 4))
        ints, multiplier = exact.clear_denominators([F(1, 2), F(2, 3)])
        self.assertEqual((ints, multiplier), ((3, 4), 6))


class LinearProgramTestCase(SimpleTestCase):
    """Exact simplex on small programs with known optima."""

    def test_bounded_optimum(self):
        program = LinearProgram(2)
        program.add([1, 1], '<=', 4)
        program.add([1, 0], '<=', 3)
        result = program.maximize([1, 2])
        self.assertEqual(result.status, LPStatus.OPTIMAL)
        self.assertEqual(result.objective, 8)
        self.assertEqual(result.x, (F(0), F(4)))

    def test_equality_and_lower_bound(self):
        program = LinearProgram(2)
        program.add([1, 1], '=', 1)
        program.add([1, -1], '>=', F(1, 2))
        result = program.maximize([0, 1])
        self.assertEqual(result.status, LPStatus.OPTIMAL)
        self.assertEqual(result.x, (F(3, 4), F(1, 4)))

    def test_infeasible(self):
        program = LinearProgram(1)
        program.add([1], '>=', 2)
        program.add([1], '<=', 1)
        self.assertEqual(program.maximize([1]).status, LPStatus.INFEASIBLE)

    def test_unbounded(self):
        program = LinearProgram(2)
        program.add([1, -1], '<=', 1)
        self.assertEqual(program.maximize([1, 0]).status, LPStatus.UNBOUNDED)

    def test_negative_right_hand_side(self):
        program = LinearProgram(1)
        program.add([-1], '<=', -2)
        result = program.maximize([-1])
        self.assertEqual(result.x, (F(2),))


class SerializerHelpersTestCase(SimpleTestCase):
    def test_rational_field_reports_location(self):
        serializer = MonomialValueSerializer(data={'monomial': [0, 1], 'value': '1.5'})
        self.assertFalse(serializer.is_valid())
        lines = flatten_errors({'form': [{}, {}, serializer.errors]})
        self.assertEqual(len(lines), 1)
        self.assertTrue(lines[0].startswith('form[2].value: not a rational'))


class ConcurrencyTestCase(SimpleTestCase):
    @override_settings(MW_THREADS=4)
    def test_parallel_map_keeps_order(self):
        self.assertEqual(parallel_map(lambda x: x * x, range(10)), [x * x for x in range(10)])


class SettingsTestCase(SimpleTestCase):
    """Both environments load from an empty environment."""

    def _load(self, environment: str):
        import chamberkit.settings
        from chamberkit.settings import base

        env = {key: value for key, value in os.environ.items() if key not in ('SECRET_KEY', 'ALLOWED_HOSTS')}
        env['DJANGO_ENVIRONMENT'] = environment
        with mock.patch.dict(os.environ, env, clear=True):
            importlib.reload(base)
            if environment == 'production':
                from chamberkit.settings import production
                importlib.reload(production)
            else:
                from chamberkit.settings import development
                importlib.reload(development)
            return importlib.reload(chamberkit.settings)

    def _restore(self):
        from chamberkit.settings import base, development
        import chamberkit.settings

        importlib.reload(base)
        importlib.reload(development)
        importlib.reload(chamberkit.settings)

    def test_production_needs_no_secret_key(self):
        self.addCleanup(self._restore)
        loaded = self._load('production')
        self.assertEqual(loaded.ENVIRONMENT, 'production')
        self.assertFalse(loaded.DEBUG)
        self.assertTrue(loaded.SECRET_KEY)
        self.assertIn('file', loaded.LOGGING['handlers'])

    def test_no_web_only_settings(self):
        self.addCleanup(self._restore)
        for environment in ('production', 'development'):
            with self.subTest(environment=environment):
                loaded = self._load(environment)
                self.assertFalse(hasattr(loaded, 'ALLOWED_HOSTS'))
                self.assertFalse(hasattr(loaded, 'REST_FRAMEWORK'))


class MetricsTestCase(SimpleTestCase):
    def test_timed_logs_fields_found_in_the_block(self):
        with self.assertLogs('core.metrics', level='INFO') as logs:
            with timed('walls_enumerated', lattice='p1xp1') as metric:
                metric['walls'] = 1
                metric['radius'] = F(14, 45)
        self.assertIn('metric event=walls_enumerated lattice="p1xp1" walls=1 radius=14/45 ms=', logs.output[0])
        self.assertGreaterEqual(metric['ms'], 0)

    def test_timed_marks_failures(self):
        with self.assertLogs('core.metrics', level='INFO') as logs:
            with self.assertRaises(ValueError):
                with timed('newton_done', lattice='p2'):
                    raise ValueError('no preimage')
        self.assertIn('error="ValueError"', logs.output[0])
        self.assertEqual(len(logs.output), 1)
