"""Resolved run configuration shared by every management command."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

from lattice.types import PolarisedLattice
from walls.types import Wall


@dataclass(frozen=True)
class Segment:
    start: tuple[Fraction, ...]
    end: tuple[Fraction, ...]


@dataclass(frozen=True)
class RunConfig:
    """Inputs of one run after presets and flags are merged and cross-validated."""

    lattice: PolarisedLattice
    source: str
    catalog: str | None = None
    model_path: Path | None = None
    sheaf_path: Path | None = None
    # 'default', 'around <divisor> radius <rational>' or a region spec dict
    region: str | dict[str, Any] = 'default'
    walls: tuple[Wall, ...] = ()
    segments: dict[str, Segment] = field(default_factory=dict)
    safety: Fraction | None = None
    budget: int | None = None
    seed: int = 0
    out: Path | None = None
    slice_path: Path | None = None
    grid: int = 200
    representatives: bool = False
    samples: int = 0
    tighten: bool = False
    # kverify inputs: class specs, H_1..H_{n-1} and scaling multiples
    classes: tuple[dict[str, Any], ...] | None = None
    multipolarisation: tuple[tuple[Fraction, ...], ...] | None = None
    multiples: tuple[int, ...] | None = None
    preset: dict[str, Any] = field(default_factory=dict)
