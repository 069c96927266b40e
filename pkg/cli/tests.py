import csv
import io
import json
import tempfile
from fractions import Fraction as F
from pathlib import Path

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from core.exceptions import EXIT_INCONSISTENT, EXIT_INPUT, InputFormatError
from core.serializers import read_json

from cli.catalog import MODEL_FILE, catalog_names, entry_path
from cli.services.config_service import ConfigService, load_preset, parse_vector
from cli.services.pipeline_service import PipelineService
from cli.services.report_service import ReportService
from cli.services.selfcheck_service import SelfCheckService


def run(command, *args, **options):
    """Run a command and return (stdout, parsed JSON report or None)."""
    out = io.StringIO()
    call_command(command, *args, stdout=out, stderr=io.StringIO(), **options)
    text = out.getvalue()
    try:
        return text, json.loads(text)
    except ValueError:
        return text, None


class TempDirMixin:
    def setUp(self):
        super().setUp()
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()
        super().tearDown()

    def write(self, name, payload):
        path = self.tmp / name
        path.write_text(json.dumps(payload), encoding='utf-8')
        return str(path)


class ConfigTestCase(SimpleTestCase):
    def test_parse_vector(self):
        self.assertEqual(parse_vector('1, 2/5', '--start'), (F(1), F(2, 5)))
        with self.assertRaises(InputFormatError) as caught:
            parse_vector('1.5,2', '--start')
        self.assertEqual(caught.exception.source, '--start')

    def test_preset_and_flags(self):
        config = ConfigService().build({'preset': 'segment-p1xp1'})
        self.assertEqual(config.source, 'p1xp1')
        self.assertEqual([w.normal for w in config.walls], [(1, -1)])
        self.assertIn('n1', config.segments)
        overridden = ConfigService().build({'preset': 'segment-p1xp1', 'wall': ['2,-1']})
        self.assertEqual([w.normal for w in overridden.walls], [(2, -1)])

    def test_unknown_preset(self):
        with self.assertRaises(InputFormatError):
            load_preset('no-such-preset')

    def test_wall_dimension_checked(self):
        with self.assertRaises(InputFormatError):
            ConfigService().build({'catalog': 'p1xp1', 'wall': ['1,-1,0']})

    def test_catalog_and_lattice_exclusive(self):
        with self.assertRaises(InputFormatError):
            ConfigService().build({'catalog': 'p2', 'lattice': str(entry_path('p2', 'lattice.json'))})


class WallsCommandTestCase(TempDirMixin, SimpleTestCase):
    def test_default_region_single_wall(self):
        _, report = run('walls', catalog='p1xp1', sheaf='r2c0c2_2.json', region='default')
        self.assertEqual(report['command'], 'walls')
        self.assertEqual([w['normal'] for w in report['walls']], [[1, -1]])
        self.assertEqual(report['region']['label'], 'default')

    def test_no_walls_is_not_an_error(self):
        _, report = run('walls', catalog='p1xp1', sheaf='r2c0c2_2.json', region='around 1,3 radius 1/8')
        self.assertEqual(report['walls'], [])

    def test_malformed_rational(self):
        sheaf = self.write('bad.json', {'rank': 2, 'c1': ['1.5', '0'], 'c2': [{'monomial': [], 'value': '2'}]})
        with self.assertRaises(CommandError) as caught:
            run('walls', catalog='p1xp1', sheaf=sheaf)
        self.assertEqual(caught.exception.returncode, EXIT_INPUT)
        self.assertIn('c1', str(caught.exception))

    def test_malformed_safety(self):
        with self.assertRaises(CommandError) as caught:
            run('walls', catalog='p1xp1', sheaf='r2c0c2_2.json', safety='1.5')
        self.assertEqual(caught.exception.returncode, EXIT_INPUT)

    def test_budget_exceeded(self):
        with self.assertRaises(CommandError) as caught:
            run('walls', catalog='p1xp1', sheaf='r2c0c2_4.json', budget=2)
        self.assertEqual(caught.exception.returncode, 3)

    def test_report_written_with_table(self):
        out = self.tmp / 'walls.json'
        text, _ = run('walls', catalog='p1xp1', sheaf='r2c0c2_2.json', out=str(out))
        self.assertIn('normal', text)
        self.assertIn('(1, -1)', text)
        self.assertEqual([w['normal'] for w in read_json(out)['walls']], [[1, -1]])


class ChambersCommandTestCase(TempDirMixin, SimpleTestCase):
    def test_segment_preset(self):
        _, report = run('chambers', preset='segment-p1xp1', samples=5)
        self.assertEqual([c['signs'] for c in report['cells']], ['-', '0', '+'])
        self.assertEqual(report['cells'][1]['representative'], ['3/2', '3/2'])
        self.assertEqual(
            [entry['verdict']['status'] for entry in report['constancy']],
            ['unstable', 'properly-semistable', 'unstable'],
        )

    def test_square_with_representatives(self):
        _, report = run('chambers', preset='square-p1cubed', representatives=True)
        self.assertEqual(len(report['cells']), 9)
        for cell in report['cells']:
            self.assertIsNotNone(cell['complete_intersection'])

    def test_slice_raster(self):
        plane = self.write('plane.json', {'origin': ['1', '2'], 'u': ['1', '-1'], 'v': ['0', '0']})
        out = self.tmp / 'chambers.json'
        run('chambers', preset='segment-p1xp1', samples=0, slice=plane, grid=5, out=str(out))
        report = read_json(out)
        self.assertEqual(report['slice'], {'file': 'chambers-slice.csv', 'grid': 5})
        rows = list(csv.reader((self.tmp / 'chambers-slice.csv').read_text().splitlines()))
        self.assertEqual(len(rows), 5)
        self.assertEqual(rows[0], ['0', '0', '1', '2', '2'])

    def test_region_outside_positive_cone(self):
        region = self.write('region.json', {'vertices': [['-1', '1'], ['1', '1']]})
        with self.assertRaises(CommandError) as caught:
            run('chambers', catalog='p1xp1', wall=['1,-1'], region=region)
        self.assertEqual(caught.exception.returncode, EXIT_INPUT)
        self.assertIn('not certified', str(caught.exception))

    def test_reruns_are_byte_identical(self):
        first, _ = run('chambers', preset='segment-p1xp1', samples=3, seed=5)
        second, _ = run('chambers', preset='segment-p1xp1', samples=3, seed=5)
        self.assertEqual(first, second)


class CrossCommandTestCase(SimpleTestCase):
    def test_schmitt_demo_amp_is_irrational(self):
        _, report = run('cross', preset='schmitt-demo', mode='amp')
        (crossing,) = report['crossings']
        self.assertFalse(crossing['is_rational'])
        self.assertEqual(crossing['minpoly'], [9, 36, -14])
        self.assertEqual(report['degree'], 2)
        self.assertEqual(report['nonlinearity'][0]['wall'], [2, -1])

    def test_schmitt_demo_n1_is_rational(self):
        _, report = run('cross', preset='schmitt-demo', mode='n1')
        self.assertEqual([c['value'] for c in report['crossings']], ['14/45'])

    def test_wall_free_segment(self):
        _, report = run('cross', catalog='p1xp1', wall=['1,-1'], start='2,1', end='3,1', mode='n1')
        self.assertEqual(report['crossings'], [])

    def test_surface_amp_is_linear(self):
        _, report = run('cross', preset='segment-p1xp1', mode='amp')
        self.assertEqual(report['degree'], 1)
        self.assertEqual(report['note'], 'linear pullback')
        self.assertEqual([c['value'] for c in report['crossings']], ['1/2'])

    def test_missing_segment(self):
        with self.assertRaises(CommandError) as caught:
            run('cross', catalog='p1xp1', wall=['1,-1'], mode='amp')
        self.assertEqual(caught.exception.returncode, EXIT_INPUT)


class KVerifyCommandTestCase(TempDirMixin, SimpleTestCase):
    def test_p3_preset_passes(self):
        _, report = run('kverify', preset='p3-identities')
        self.assertTrue(report['passed'])
        self.assertEqual(len(report['classes']), 4)
        for entry in report['classes']:
            for name in ('secondway', 'scaling'):
                self.assertTrue(entry[name]['passed'])
                self.assertEqual(set(entry[name]['difference']), {'0'})
            self.assertTrue(entry['firstway']['passed'])
            self.assertTrue(entry['telescoping']['passed'])

    def test_default_classes(self):
        _, report = run('kverify', catalog='p1xp1')
        self.assertTrue(report['passed'])
        self.assertEqual([e['class'] for e in report['classes']], ['[O_X]', '[O_x]', 'O(H1)', 'O(H2)'])

    def test_empty_class_list_passes(self):
        classes = self.write('classes.json', {'classes': []})
        _, report = run('kverify', catalog='p2', classes=classes)
        self.assertTrue(report['passed'])
        self.assertEqual(report['classes'], [])

    def test_corrupted_todd(self):
        model = read_json(entry_path('p3', MODEL_FILE))
        model['todd']['H3'] = '2'
        path = self.write('model.json', model)
        with self.assertRaises(CommandError) as caught:
            run('kverify', catalog='p3', model=path)
        self.assertEqual(caught.exception.returncode, EXIT_INCONSISTENT)


class CatalogCommandTestCase(SimpleTestCase):
    def test_list(self):
        text, _ = run('catalog', 'list')
        for name in ('p2', 'p3', 'p1xp1', 'p1xp2', 'p1cubed', 'proj-bundle-p2'):
            self.assertIn(name, text)
        self.assertEqual(len(catalog_names()), 6)

    def test_show(self):
        _, payload = run('catalog', 'show', 'p2')
        self.assertEqual(payload['lattice']['dimension'], 2)
        self.assertEqual(payload['barycenter_top_power'], '1')

    def test_unknown_entry(self):
        with self.assertRaises(CommandError) as caught:
            run('catalog', 'show', 'p9')
        self.assertEqual(caught.exception.returncode, EXIT_INPUT)


class ReportTestCase(SimpleTestCase):
    def test_table(self):
        table = ReportService.table(('a', 'bb'), [(1, 'x'), (22, 'yyy')])
        self.assertEqual(table.splitlines(), ['a   bb', '--  ---', '1   x', '22  yyy'])

    def test_reports_carry_no_floats(self):
        result = PipelineService(ConfigService().build({'preset': 'schmitt-demo'})).cross('amp')
        self.assertNotRegex(result.report.content, r'\d\.\d')


class SelfCheckTestCase(SimpleTestCase):
    def test_crossing_and_nonlinearity_criteria(self):
        results = SelfCheckService(seed=1).run([8, 9])
        self.assertEqual([r.number for r in results], [8, 9])
        self.assertTrue(all(r.passed for r in results), [r.detail for r in results])

    def test_quick_lattice_criteria(self):
        service = SelfCheckService(seed=3, catalog=['p2', 'p1xp1'])
        results = service.run([1, 3, 4])
        self.assertTrue(all(r.passed for r in results), [r.detail for r in results])

    def test_unknown_criterion(self):
        with self.assertRaises(CommandError) as caught:
            run('selfcheck', only=[12])
        self.assertEqual(caught.exception.returncode, EXIT_INPUT)
