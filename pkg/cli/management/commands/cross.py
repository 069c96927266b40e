from cli.management.base import ChamberKitCommand


class Command(ChamberKitCommand):
    help = 'Certify where a segment crosses walls, in N_1 or through the ample cone'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--mode', choices=('n1', 'amp'), default='n1',
                            help='n1: linear segment of curve classes; amp: segment of ample divisors')

    def run_pipeline(self, service):
        return service.cross(self.mode)

    def handle(self, *args, **options):
        self.mode = options['mode']
        super().handle(*args, **options)
