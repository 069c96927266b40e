from django.core.management.base import BaseCommand, CommandError

from core.exact import format_rational
from core.exceptions import EXIT_INPUT, ChamberKitError
from core.serializers import dump_json
from cli.catalog import MODEL_FILE, catalog_names, entry_path, load_catalog_lattice, load_catalog_model
from cli.services.report_service import ReportService
from lattice.serializers import lattice_to_data
from lattice.services.intersection_service import IntersectionService


class Command(BaseCommand):
    help = 'List the shipped lattices or show one entry'

    def add_arguments(self, parser):
        parser.add_argument('action', choices=('list', 'show'))
        parser.add_argument('name', nargs='?', help='Entry to show')

    def handle(self, *args, **options):
        try:
            if options['action'] == 'list':
                self._list()
            else:
                if not options['name']:
                    raise CommandError('catalog show needs an entry name', returncode=EXIT_INPUT)
                self._show(options['name'])
        except ChamberKitError as exc:
            raise CommandError(str(exc), returncode=exc.exit_code)

    def _list(self):
        rows = []
        for name in catalog_names():
            lattice = load_catalog_lattice(name)
            rows.append((name, lattice.n, lattice.rho, len(lattice.ample_gens)))
        self.stdout.write(ReportService.table(('entry', 'n', 'rho', 'generators'), rows))

    def _show(self, name: str):
        lattice = load_catalog_lattice(name)
        model = load_catalog_model(name, lattice)
        payload = {
            'name': name,
            'lattice': lattice_to_data(lattice),
            'barycenter_top_power': format_rational(IntersectionService(lattice).top_power(lattice.barycenter)),
            'model': {
                'file': str(entry_path(name, MODEL_FILE)),
                'basis': [element.name for element in model.basis],
                'chi_O': format_rational(model.chi_O),
            },
        }
        self.stdout.write(dump_json(payload), ending='')
