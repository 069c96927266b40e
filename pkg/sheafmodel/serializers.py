from __future__ import annotations

import logging
from pathlib import Path
from typing import Any

from rest_framework import serializers

from core.exact import format_rational
from core.exceptions import InputFormatError
from core.serializers import read_json, validated

from lattice.types import PolarisedLattice
from walls.exceptions import InvalidNumerics
from walls.serializers import SheafNumericsSerializer, sheaf_from_data, sheaf_to_data

from .exceptions import SheafModelError
from .types import PresentedSheaf, SheafKind, Verdict

logger = logging.getLogger(__name__)


class PresentedSheafSerializer(serializers.Serializer):
    """``{"kind": "direct-sum", "summands": [...]}`` or ``{"kind": "filtered", "total": ..., "subobjects": [...]}``."""

    kind = serializers.ChoiceField(choices=[kind.value for kind in SheafKind])
    label = serializers.CharField(max_length=120, required=False, default='')
    summands = SheafNumericsSerializer(many=True, required=False, default=list)
    total = SheafNumericsSerializer(required=False)
    subobjects = SheafNumericsSerializer(many=True, required=False, default=list)

    def validate(self, data):
        if data['kind'] == SheafKind.DIRECT_SUM.value:
            if not data['summands']:
                raise serializers.ValidationError({'summands': ['a direct sum needs at least one summand']})
            errors = {i: ['summands must have rank 1'] for i, s in enumerate(data['summands']) if s['rank'] != 1}
            if errors:
                raise serializers.ValidationError({'summands': errors})
        elif 'total' not in data:
            raise serializers.ValidationError({'total': ['a filtered sheaf needs its total invariants']})
        return data


def presented_from_data(data: dict, lattice: PolarisedLattice, source: str) -> PresentedSheaf:
    try:
        if data['kind'] == SheafKind.DIRECT_SUM.value:
            summands = [sheaf_from_data(item) for item in data['summands']]
            label = data['label'] or ' + '.join(s.label or '?' for s in summands)
            return PresentedSheaf.direct_sum(lattice, summands, label)
        total = sheaf_from_data(data['total'])
        total.check(lattice)
        return PresentedSheaf.filtered(total, [sheaf_from_data(item) for item in data['subobjects']], data['label'])
    except (InvalidNumerics, SheafModelError) as exc:
        raise InputFormatError(source, [str(exc)])


def load_presented(path: str | Path, lattice: PolarisedLattice) -> PresentedSheaf:
    data = validated(PresentedSheafSerializer, read_json(path), str(path), lattice=lattice)
    sheaf = presented_from_data(data, lattice, str(path))
    if not sheaf.label:
        sheaf = PresentedSheaf(sheaf.kind, sheaf.total, sheaf.summands, sheaf.subobjects, Path(path).stem)
    logger.debug('loaded presented sheaf %s (%s, rank %d)', sheaf.label, sheaf.kind.value, sheaf.total.r)
    return sheaf


def is_presented(payload: Any) -> bool:
    return isinstance(payload, dict) and 'kind' in payload


class VerdictSerializer(serializers.Serializer):
    status = serializers.SerializerMethodField()
    slope = serializers.SerializerMethodField()
    witness = serializers.SerializerMethodField()
    gap = serializers.SerializerMethodField()
    destabilizing = serializers.SerializerMethodField()
    note = serializers.SerializerMethodField()

    def get_status(self, verdict: Verdict):
        return verdict.status.value

    def get_slope(self, verdict: Verdict):
        return format_rational(verdict.slope)

    def get_witness(self, verdict: Verdict):
        if verdict.witness is None:
            return None
        return {**sheaf_to_data(verdict.witness.numerics), 'subobject': verdict.witness.label}

    def get_gap(self, verdict: Verdict):
        return format_rational(verdict.gap) if verdict.gap is not None else None

    def get_destabilizing(self, verdict: Verdict):
        return sorted(verdict.destabilizing)

    def get_note(self, verdict: Verdict):
        return 'checked against summand-generated or declared subobjects only'
