from django.core.management.base import CommandError

from core.exceptions import EXIT_INCONSISTENT
from cli.management.base import ChamberKitCommand


class Command(ChamberKitCommand):
    help = 'Verify the K-ring identities over a class list'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--classes', help='JSON file {"classes": [...]} of K-classes to check')

    def run_pipeline(self, service):
        return service.kverify()

    def emit(self, result, out):
        super().emit(result, out)
        if not result.passed:
            raise CommandError('K-ring identities failed; see the report', returncode=EXIT_INCONSISTENT)
