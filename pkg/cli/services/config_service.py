"""Merge presets and command-line flags into a cross-validated RunConfig."""

import logging
import re
from fractions import Fraction
from pathlib import Path
from typing import Any

from django.conf import settings

from core.exact import RationalFormatError, parse_rational
from core.exceptions import InputFormatError
from core.serializers import read_json, validated

from chambers.serializers import RegionSpecSerializer
from chambers.services.region_service import RegionService
from chambers.types import Region
from cli.catalog import MODEL_FILE, entry_path, load_catalog_lattice, sheaf_path
from cli.serializers import ClassListSerializer, PresetSerializer
from cli.types import RunConfig, Segment
from kring.serializers import load_model
from kring.types import CohomologyModel
from lattice.serializers import load_lattice
from lattice.types import CurveClass, DivisorClass
from sheafmodel.serializers import is_presented, load_presented
from sheafmodel.types import PresentedSheaf
from walls.serializers import load_sheaf
from walls.types import SheafNumerics, Wall

logger = logging.getLogger(__name__)

_AROUND = re.compile(r'^around\s+(\S+)\s+radius\s+(\S+)$')


def parse_vector(raw: str, source: str) -> tuple[Fraction, ...]:
    """``"1,2/5"`` -> (1, 2/5)."""
    try:
        return tuple(parse_rational(part.strip()) for part in raw.split(','))
    except RationalFormatError as exc:
        raise InputFormatError(source, [str(exc)])


def parse_scalar(raw: str, source: str) -> Fraction:
    try:
        return parse_rational(raw.strip())
    except RationalFormatError as exc:
        raise InputFormatError(source, [str(exc)])


def parse_wall(raw: str) -> Wall:
    try:
        return Wall(tuple(int(part) for part in raw.split(',')))
    except ValueError:
        raise InputFormatError('--wall', [f'not an integral normal: {raw!r}'])


def load_preset(reference: str) -> dict[str, Any]:
    path = Path(reference)
    if not path.is_file():
        path = Path(settings.PRESET_DIR) / f'{reference}.json'
    if not path.is_file():
        names = sorted(p.stem for p in Path(settings.PRESET_DIR).glob('*.json'))
        raise InputFormatError(reference, [f'unknown preset (available: {", ".join(names) or "none"})'])
    return dict(validated(PresetSerializer, read_json(path), str(path)))


class ConfigService:
    def build(self, options: dict[str, Any]) -> RunConfig:
        preset = load_preset(options['preset']) if options.get('preset') else {}

        def pick(key: str, preset_key: str | None = None):
            value = options.get(key)
            return value if value is not None else preset.get(preset_key or key)

        catalog, lattice_path = pick('catalog'), pick('lattice')
        if catalog and lattice_path:
            raise InputFormatError('--catalog', ['give a catalog entry or a lattice path, not both'])
        if lattice_path:
            lattice, source = load_lattice(lattice_path), str(lattice_path)
        else:
            catalog = catalog or 'p1xp1'
            lattice, source = load_catalog_lattice(catalog), catalog

        model = pick('model')
        model_path = Path(model) if model else (entry_path(catalog, MODEL_FILE) if catalog else None)
        sheaf = pick('sheaf')

        if options.get('wall'):
            walls = tuple(parse_wall(raw) for raw in options['wall'])
        else:
            walls = tuple(Wall(tuple(normal)) for normal in preset.get('walls', []))
        bad = [str(w) for w in walls if w.rank != lattice.rho]
        if bad:
            raise InputFormatError('--wall', [f'expected {lattice.rho} coordinates: {", ".join(bad)}'])

        segments = {
            mode: Segment(tuple(data['start']), tuple(data['end']))
            for mode in ('n1', 'amp') if (data := preset.get(mode))
        }
        if options.get('start') or options.get('end'):
            if not (options.get('start') and options.get('end')):
                raise InputFormatError('--start', ['--start and --end go together'])
            segment = Segment(parse_vector(options['start'], '--start'), parse_vector(options['end'], '--end'))
            segments = {mode: segment for mode in ('n1', 'amp')}
        for mode, segment in segments.items():
            if len(segment.start) != lattice.rho or len(segment.end) != lattice.rho:
                raise InputFormatError(mode, [f'segment endpoints need {lattice.rho} coordinates'])

        classes = preset.get('classes')
        if options.get('classes'):
            classes = validated(ClassListSerializer, read_json(options['classes']), options['classes'])['classes']
        multipolarisation = preset.get('multipolarisation')

        safety = options.get('safety')
        if safety is not None:
            safety = parse_scalar(safety, '--safety')
            if safety < 1:
                raise InputFormatError('--safety', [f'safety factor must be at least 1, got {safety}'])
        config = RunConfig(
            lattice=lattice,
            source=source,
            catalog=catalog,
            model_path=model_path,
            sheaf_path=sheaf_path(sheaf) if sheaf else None,
            region=pick('region') or 'default',
            walls=walls,
            segments=segments,
            safety=safety,
            budget=options.get('budget'),
            seed=options.get('seed') if options.get('seed') is not None else settings.DEFAULT_SEED,
            out=Path(options['out']) if options.get('out') else None,
            slice_path=Path(options['slice']) if options.get('slice') else None,
            grid=options.get('grid') or 200,
            representatives=bool(options.get('representatives')),
            samples=options['samples'] if options.get('samples') is not None else settings.CONSTANCY_SAMPLES,
            tighten=bool(options.get('tighten')),
            classes=tuple(classes) if classes is not None else None,
            multipolarisation=tuple(tuple(h) for h in multipolarisation) if multipolarisation else None,
            multiples=tuple(preset['multiples']) if preset.get('multiples') else None,
            preset=preset,
        )
        logger.info('run on %s (region %s, %d fixed walls)', source, config.region, len(walls))
        return config

    # --- referenced inputs ---

    def model(self, config: RunConfig) -> CohomologyModel:
        if config.model_path is None:
            raise InputFormatError('--model', ['a cohomology model is required for this command'])
        return load_model(config.model_path, config.lattice)

    def sheaf(self, config: RunConfig) -> tuple[SheafNumerics, PresentedSheaf | None]:
        """Invariants to enumerate walls for, plus the presentation when the file carries one."""
        if config.sheaf_path is None:
            raise InputFormatError('--sheaf', ['a sheaf invariants file is required for this command'])
        payload = read_json(config.sheaf_path)
        if is_presented(payload):
            presented = load_presented(config.sheaf_path, config.lattice)
            return presented.total, presented
        return load_sheaf(config.sheaf_path, config.lattice), None

    def region(self, config: RunConfig) -> Region:
        regions = RegionService(config.lattice)
        spec = config.region
        if isinstance(spec, dict):
            return _from_spec(validated(RegionSpecSerializer, spec, '--region', lattice=config.lattice), regions)
        if spec == 'default':
            return regions.default_region()
        match = _AROUND.match(spec.strip())
        if match:
            alpha = DivisorClass(parse_vector(match.group(1), '--region'))
            radius = parse_scalar(match.group(2), '--region')
            config.lattice.check(alpha)
            return regions.around_divisor(alpha, radius)
        path = Path(spec)
        if path.is_file():
            return _from_spec(validated(RegionSpecSerializer, read_json(path), str(path), lattice=config.lattice), regions)
        raise InputFormatError('--region', [f'expected "default", "around <divisor> radius <r>" or a file: {spec!r}'])


def _from_spec(data: dict, regions: RegionService) -> Region:
    if 'vertices' in data:
        return regions.certify([CurveClass(tuple(v)) for v in data['vertices']], label='given')
    return regions.region_around(CurveClass(tuple(data['around'])), data['radius'])
