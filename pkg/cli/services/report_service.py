import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

from core.serializers import dump_json

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ReportResult:
    filename: str
    content: str


class ReportService:
    """
    Deterministic report files plus a plain-text table for the terminal.

    JSON carries every certified value as a "p/q" string; tables are for
    reading only.
    """

    def render(self, payload: dict[str, Any], filename: str) -> ReportResult:
        return ReportResult(filename=filename, content=dump_json(payload))

    def write(self, result: ReportResult, directory: Path | None = None) -> Path:
        path = Path(result.filename) if directory is None else directory / result.filename
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(result.content, encoding='utf-8')
        logger.info('wrote %s (%d bytes)', path, len(result.content))
        return path

    @staticmethod
    def table(headers: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
        cells = [[str(c) for c in headers]] + [[str(c) for c in row] for row in rows]
        widths = [max(len(row[i]) for row in cells) for i in range(len(headers))]
        lines = ['  '.join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip() for row in cells]
        lines.insert(1, '  '.join('-' * width for width in widths))
        return '\n'.join(lines)
