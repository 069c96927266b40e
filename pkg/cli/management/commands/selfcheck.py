from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from core.exceptions import EXIT_INCONSISTENT, EXIT_INPUT
from cli.services.report_service import ReportService
from cli.services.selfcheck_service import SelfCheckService


class Command(BaseCommand):
    help = 'Run the seeded property suite (acceptance criteria 1-11)'

    def add_arguments(self, parser):
        parser.add_argument('--full', action='store_true', help='Use the full sample counts')
        parser.add_argument('--only', type=int, action='append', help='Run only this criterion; repeatable')
        parser.add_argument('--catalog', action='append', help='Restrict per-entry criteria to this entry')
        parser.add_argument('--seed', type=int, help='Seed for all samplers')
        parser.add_argument('--out', help='JSON report file')

    def handle(self, *args, **options):
        service = SelfCheckService(seed=options['seed'], full=options['full'], catalog=options['catalog'])
        try:
            results = service.run(options['only'])
        except ValueError as exc:
            raise CommandError(str(exc), returncode=EXIT_INPUT)

        reports = ReportService()
        rows = [(r.number, r.name, 'PASS' if r.passed else 'FAIL', r.detail) for r in results]
        self.stdout.write(reports.table(('#', 'criterion', 'result', 'detail'), rows))
        if options['out']:
            payload = {
                'command': 'selfcheck',
                'seed': service.seed,
                'full': service.full,
                'criteria': [
                    {'number': r.number, 'name': r.name, 'passed': r.passed, 'detail': r.detail}
                    for r in results
                ],
            }
            out = Path(options['out'])
            reports.write(reports.render(payload, out.name), out.parent)

        failed = [r.number for r in results if not r.passed]
        if failed:
            raise CommandError(f'criteria {failed} failed', returncode=EXIT_INCONSISTENT)
        self.stdout.write(self.style.SUCCESS(f'{len(results)} criteria passed'))
