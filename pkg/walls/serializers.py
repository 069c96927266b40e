from __future__ import annotations

import logging
from pathlib import Path
from typing import Any

from rest_framework import serializers

from core.exact import format_rational
from core.exceptions import InputFormatError
from core.serializers import MonomialValueSerializer, RationalVectorField, read_json, validated

from lattice.types import DivisorClass, PolarisedLattice, PowerTensor

from .exceptions import InvalidNumerics
from .types import SheafNumerics, Wall

logger = logging.getLogger(__name__)


class SheafNumericsSerializer(serializers.Serializer):
    """Sheaf-invariants file: rank, integral c1 and the c2 pairings on degree n-2 monomials.

    Pass ``lattice`` in the context to check shapes against N^1.
    """

    label = serializers.CharField(max_length=120, required=False, default='')
    rank = serializers.IntegerField(min_value=1)
    c1 = RationalVectorField(allow_empty=False)
    c2 = MonomialValueSerializer(many=True, required=False, default=list)

    def validate_c1(self, value):
        if any(c.denominator != 1 for c in value):
            raise serializers.ValidationError('c1 must be integral')
        return value

    def validate(self, data):
        lattice: PolarisedLattice | None = self.context.get('lattice')
        rho = lattice.rho if lattice else len(data['c1'])
        order = lattice.n - 2 if lattice else None
        errors: dict[str, Any] = {}
        if len(data['c1']) != rho:
            errors['c1'] = [f'expected {rho} coordinates, got {len(data["c1"])}']

        c2_errors = {}
        seen: dict[tuple[int, ...], Any] = {}
        for index, entry in enumerate(data['c2']):
            monomial = entry['monomial']
            if order is None:
                order = len(monomial)
            if len(monomial) != order:
                c2_errors[index] = {'monomial': [f'expected {order} indices, got {len(monomial)}']}
            elif any(i >= rho for i in monomial):
                c2_errors[index] = {'monomial': [f'index out of range for rank {rho}']}
            else:
                key = tuple(sorted(monomial))
                if key in seen and seen[key] != entry['value']:
                    c2_errors[index] = {'value': [f'conflicts with an earlier entry for {list(key)}']}
                seen[key] = entry['value']
        if c2_errors:
            errors['c2'] = c2_errors
        if order is None:
            errors.setdefault('c2', []).append('cannot infer the dimension without a lattice or c2 entries')
        if errors:
            raise serializers.ValidationError(errors)
        data['tensor'] = PowerTensor(order, rho, seen)
        return data


def sheaf_from_data(data: dict) -> SheafNumerics:
    return SheafNumerics(
        r=data['rank'],
        c1=DivisorClass(tuple(data['c1'])),
        c2=data['tensor'],
        label=data['label'],
    )


def sheaf_to_data(sheaf: SheafNumerics) -> dict:
    return {
        'label': sheaf.label,
        'rank': sheaf.r,
        'c1': [format_rational(c) for c in sheaf.c1.coords],
        'c2': [
            {'monomial': list(key), 'value': format_rational(value)}
            for key, value in sorted(sheaf.c2.values.items())
        ],
    }


def parse_sheaf(payload: Any, lattice: PolarisedLattice, source: str) -> SheafNumerics:
    data = validated(SheafNumericsSerializer, payload, source, lattice=lattice)
    try:
        sheaf = sheaf_from_data(data)
        sheaf.check(lattice)
    except InvalidNumerics as exc:
        raise InputFormatError(source, [str(exc)])
    return sheaf


def load_sheaf(path: str | Path, lattice: PolarisedLattice) -> SheafNumerics:
    sheaf = parse_sheaf(read_json(path), lattice, str(path))
    if not sheaf.label:
        sheaf = SheafNumerics(sheaf.r, sheaf.c1, sheaf.c2, Path(path).stem)
    logger.debug('loaded sheaf %s (rank %d)', sheaf.label, sheaf.r)
    return sheaf


class WallSerializer(serializers.Serializer):
    """Wall-list report entry."""

    normal = serializers.ListField(child=serializers.IntegerField())
    zeta = serializers.SerializerMethodField()
    r1 = serializers.SerializerMethodField()
    witness = serializers.SerializerMethodField()
    slack = serializers.SerializerMethodField()
    candidate = serializers.SerializerMethodField()

    def get_zeta(self, wall: Wall):
        return [format_rational(c) for c in wall.source.zeta.coords] if wall.source else None

    def get_r1(self, wall: Wall):
        return wall.source.r1 if wall.source else None

    def get_witness(self, wall: Wall):
        return [format_rational(c) for c in wall.witness.coords] if wall.witness else None

    def get_slack(self, wall: Wall):
        return format_rational(wall.slack) if wall.slack is not None else None

    def get_candidate(self, wall: Wall):
        # numerical candidates only; no subsheaf is constructed
        return True


def wall_from_data(coords: list[int]) -> Wall:
    return Wall(tuple(coords))


