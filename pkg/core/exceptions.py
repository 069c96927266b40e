"""Base error types shared by every app.

``exit_code`` is what the management commands hand to ``CommandError``.
"""

from __future__ import annotations

EXIT_INPUT = 2
EXIT_BUDGET = 3
EXIT_INCONSISTENT = 4


class ChamberKitError(Exception):
    exit_code = EXIT_INPUT


class InputFormatError(ChamberKitError):
    """Input file failed validation; ``messages`` are ``path: message`` lines."""

    def __init__(self, source: str, messages: list[str]):
        self.source = source
        self.messages = messages
        super().__init__(f'{source}: ' + '; '.join(messages))


class BudgetExceeded(ChamberKitError):
    exit_code = EXIT_BUDGET


class InternalInconsistency(ChamberKitError):
    exit_code = EXIT_INCONSISTENT
