from cli.management.base import ChamberKitCommand


class Command(ChamberKitCommand):
    help = 'Decompose a region into chambers, with optional representatives and slice raster'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--representatives', action='store_true',
                            help='Represent each cell by a complete intersection curve')
        parser.add_argument('--samples', type=int, help='Constancy samples per cell for presented sheaves')
        parser.add_argument('--slice', help='Plane JSON with origin, u, v for a CSV raster of cell ids')
        parser.add_argument('--grid', type=int, help='Raster size of the slice (default 200)')

    def run_pipeline(self, service):
        return service.chambers()
