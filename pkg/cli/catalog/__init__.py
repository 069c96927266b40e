"""Built-in lattices and cohomology models shipped with the repository.

Each entry is a directory under ``settings.CATALOG_DIR`` holding
``lattice.json`` and ``model.json``; ``sheaves/`` holds sheaf files.
"""

from __future__ import annotations

import logging
from pathlib import Path

from django.conf import settings

from core.exceptions import InputFormatError

logger = logging.getLogger(__name__)

LATTICE_FILE = 'lattice.json'
MODEL_FILE = 'model.json'
SHEAF_DIR = 'sheaves'


def catalog_names() -> list[str]:
    root = Path(settings.CATALOG_DIR)
    if not root.is_dir():
        return []
    return sorted(entry.name for entry in root.iterdir() if (entry / LATTICE_FILE).is_file())


def entry_path(name: str, filename: str) -> Path:
    path = Path(settings.CATALOG_DIR) / name / filename
    if not path.is_file():
        available = ', '.join(catalog_names()) or 'none'
        raise InputFormatError(name, [f'unknown catalog entry or missing {filename} (available: {available})'])
    return path


def load_catalog_lattice(name: str):
    from lattice.serializers import load_lattice

    logger.debug('loading catalog lattice %s', name)
    return load_lattice(entry_path(name, LATTICE_FILE))


def load_catalog_model(name: str, lattice=None):
    from kring.serializers import load_model

    lattice = load_catalog_lattice(name) if lattice is None else lattice
    return load_model(entry_path(name, MODEL_FILE), lattice)


def sheaf_path(reference: str | Path) -> Path:
    """A path as given, or a file name inside the shipped ``sheaves/`` directory."""
    path = Path(reference)
    if path.is_file():
        return path
    shipped = Path(settings.CATALOG_DIR) / SHEAF_DIR / path.name
    return shipped if shipped.is_file() else path
