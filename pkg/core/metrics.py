"""Lightweight structured metrics for long-running exact computations."""

from __future__ import annotations

import logging
import time
from contextlib import contextmanager
from fractions import Fraction
from typing import Any, Iterator

from core.exact import format_rational

logger = logging.getLogger('core.metrics')


def _render(value: Any) -> str:
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, (tuple, list)):
        return '[' + ','.join(_render(v) for v in value) + ']'
    if isinstance(value, str):
        return '"' + value.replace('"', "'")[:120] + '"'
    return str(value)


def log_event(event: str, level: int = logging.INFO, **fields: Any) -> None:
    """Emit one structured metric line (key=value, rationals as p/q)."""
    parts = [f'event={event}']
    for key, value in fields.items():
        if value is None:
            continue
        parts.append(f'{key}={_render(value)}')
    logger.log(level, 'metric %s', ' '.join(parts))


@contextmanager
def timed(event: str, level: int = logging.INFO, **fields: Any) -> Iterator[dict[str, Any]]:
    """Log ``event`` once the block ends, with ``fields`` plus its ``ms``.

    The yielded dict is the field set: counts known only inside the block are
    added to it. A block that raises logs ``error`` with the exception class.
    """
    started = time.perf_counter()
    try:
        yield fields
    except Exception as exc:
        fields['error'] = type(exc).__name__
        raise
    finally:
        fields['ms'] = round((time.perf_counter() - started) * 1000, 1)
        log_event(event, level, **fields)
