"""Shared flags and error mapping for the chamberkit management commands."""

import logging
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from core.exceptions import ChamberKitError
from cli.services.config_service import ConfigService
from cli.services.pipeline_service import PipelineResult, PipelineService
from cli.services.report_service import ReportService

logger = logging.getLogger(__name__)


class ChamberKitCommand(BaseCommand):
    """
    Base for run commands: merges a preset with flags, runs one pipeline and
    writes its report.

    With ``--out`` the JSON report and any extra files go to disk and the
    table goes to stdout; without it the JSON report itself is printed.
    """

    def add_arguments(self, parser):
        parser.add_argument('--preset', help='Preset name under PRESET_DIR or a preset file')
        parser.add_argument('--catalog', help='Catalog entry (p2, p3, p1xp1, p1xp2, p1cubed, proj-bundle-p2)')
        parser.add_argument('--lattice', help='Lattice JSON file, instead of --catalog')
        parser.add_argument('--model', help='Cohomology model JSON file')
        parser.add_argument('--sheaf', help='Sheaf invariants or presented sheaf JSON file')
        parser.add_argument('--region', help='"default", "around <divisor> radius <r>" or a region file')
        parser.add_argument('--wall', action='append', help='Fixed wall normal such as "1,-1"; repeatable')
        parser.add_argument('--start', help='Segment start, comma separated rationals')
        parser.add_argument('--end', help='Segment end, comma separated rationals')
        parser.add_argument('--safety', help='Safety factor for the search radius, at least 1')
        parser.add_argument('--budget', type=int, help='Enumeration node budget')
        parser.add_argument('--tighten', action='store_true', help='Test the wall bound only on the wall itself')
        parser.add_argument('--seed', type=int, help='Seed for sampling')
        parser.add_argument('--out', help='Report file; extra files are written next to it')

    def run_pipeline(self, service: PipelineService) -> PipelineResult:
        raise NotImplementedError

    def handle(self, *args, **options):
        try:
            config = ConfigService().build(options)
            result = self.run_pipeline(PipelineService(config))
            self.emit(result, config.out)
        except ChamberKitError as exc:
            logger.error('%s failed: %s', self.__module__.rsplit('.', 1)[-1], exc)
            raise CommandError(str(exc), returncode=exc.exit_code)

    def emit(self, result: PipelineResult, out: Path | None) -> None:
        reports = ReportService()
        if out is None:
            self.stdout.write(result.report.content, ending='')
            for extra in result.extra:
                reports.write(extra)
            return
        self.stdout.write(result.table)
        directory = out.parent
        path = reports.write(result.report, directory)
        for extra in result.extra:
            reports.write(extra, directory)
        self.stdout.write(self.style.SUCCESS(f'Report written to {path}'))
