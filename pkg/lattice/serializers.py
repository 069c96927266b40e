from __future__ import annotations

import logging
from fractions import Fraction
from pathlib import Path
from typing import Any

from rest_framework import serializers

from core.exact import format_rational, rank
from core.exceptions import InputFormatError
from core.serializers import MonomialValueSerializer, RationalVectorField, read_json, validated

from .exceptions import DegenerateForm, LatticeError
from .services.intersection_service import IntersectionService
from .services.positivity_service import PositivityService
from .types import DivisorClass, PolarisedLattice, PowerTensor

logger = logging.getLogger(__name__)


class LatticeSerializer(serializers.Serializer):
    """Lattice definition file: dimension, rank, stored form monomials, ample generators."""

    name = serializers.CharField(max_length=120)
    dimension = serializers.IntegerField(min_value=2)
    rank = serializers.IntegerField(min_value=1)
    form = MonomialValueSerializer(many=True)
    ample_generators = serializers.ListField(child=RationalVectorField(), allow_empty=False)

    def validate(self, data):
        n, rho = data['dimension'], data['rank']
        errors: dict[str, Any] = {}

        form_errors = {}
        seen: dict[tuple[int, ...], Fraction] = {}
        for index, entry in enumerate(data['form']):
            monomial = entry['monomial']
            if len(monomial) != n:
                form_errors[index] = {'monomial': [f'expected {n} indices, got {len(monomial)}']}
                continue
            if any(i >= rho for i in monomial):
                form_errors[index] = {'monomial': [f'index out of range for rank {rho}']}
                continue
            key = tuple(sorted(monomial))
            if key in seen and seen[key] != entry['value']:
                form_errors[index] = {'value': [f'conflicts with an earlier entry for {list(key)}']}
                continue
            seen[key] = entry['value']
        if form_errors:
            errors['form'] = form_errors

        gen_errors = {
            index: [f'expected {rho} coordinates, got {len(gen)}']
            for index, gen in enumerate(data['ample_generators'])
            if len(gen) != rho
        }
        if gen_errors:
            errors['ample_generators'] = gen_errors
        if errors:
            raise serializers.ValidationError(errors)

        data['tensor'] = PowerTensor(n, rho, seen)
        return data


def lattice_from_data(data: dict) -> PolarisedLattice:
    return PolarisedLattice(
        n=data['dimension'],
        rho=data['rank'],
        form=data['tensor'],
        ample_gens=tuple(DivisorClass(tuple(g)) for g in data['ample_generators']),
        name=data['name'],
    )


def lattice_to_data(lattice: PolarisedLattice) -> dict:
    return {
        'name': lattice.name,
        'dimension': lattice.n,
        'rank': lattice.rho,
        'form': [
            {'monomial': list(key), 'value': format_rational(value)}
            for key, value in sorted(lattice.form.values.items())
        ],
        'ample_generators': [[format_rational(c) for c in g.coords] for g in lattice.ample_gens],
    }


def validate_lattice(lattice: PolarisedLattice, source: str = '') -> None:
    """Data-sanity gate: generators span N^1, are nef-positive, Hodge index at the barycenter."""
    source = source or lattice.name
    intersections = IntersectionService(lattice)
    problems = []
    if rank([g.coords for g in lattice.ample_gens]) != lattice.rho:
        problems.append(f'ample_generators: do not span a rank-{lattice.rho} cone')
    for index, gen in enumerate(lattice.ample_gens):
        if intersections.top_power(gen) < 0:
            problems.append(f'ample_generators[{index}]: negative top self-intersection')
    barycenter = lattice.barycenter
    if intersections.top_power(barycenter) <= 0:
        problems.append('ample_generators: barycenter has non-positive top self-intersection')
    if problems:
        raise InputFormatError(source, problems)
    try:
        certificate = PositivityService(lattice).verify_hodge_index(barycenter)
    except (DegenerateForm, LatticeError) as exc:
        raise InputFormatError(source, [f'form: {exc}'])
    if not certificate.passed:
        raise InputFormatError(source, [f'form: Hodge index fails at the barycenter, witness {certificate.witness}'])
    logger.debug('lattice %s passed the sanity gate', lattice.name)


def load_lattice(path: str | Path) -> PolarisedLattice:
    data = validated(LatticeSerializer, read_json(path), str(path))
    try:
        lattice = lattice_from_data(data)
    except LatticeError as exc:
        raise InputFormatError(str(path), [str(exc)])
    validate_lattice(lattice, str(path))
    return lattice
