from __future__ import annotations

import logging
from fractions import Fraction
from itertools import combinations_with_replacement, product
from pathlib import Path
from typing import Any

from rest_framework import serializers

from core.exact import determinant
from core.exceptions import InputFormatError
from core.serializers import RationalField, RationalVectorField, read_json, validated

from lattice.types import PolarisedLattice

from .exceptions import ModelInconsistent
from .services.ring_service import RingService
from .types import BasisElement, CohomologyModel, KClass

logger = logging.getLogger(__name__)


class BasisEntrySerializer(serializers.Serializer):
    name = serializers.CharField(max_length=40)
    degree = serializers.IntegerField(min_value=0)


class MultEntrySerializer(serializers.Serializer):
    factors = serializers.ListField(child=serializers.CharField(), min_length=2, max_length=2)
    product = serializers.DictField(child=RationalField())


class CohomologyModelSerializer(serializers.Serializer):
    """Cohomology model file; classes are sparse ``{basis name: "p/q"}`` maps."""

    name = serializers.CharField(max_length=120)
    dimension = serializers.IntegerField(min_value=1)
    basis = BasisEntrySerializer(many=True, allow_empty=False)
    mult = MultEntrySerializer(many=True, required=False, default=list)
    integral = serializers.DictField(child=RationalField())
    todd = serializers.DictField(child=RationalField())
    point_class = serializers.DictField(child=RationalField())
    divisor_embedding = serializers.ListField(child=serializers.DictField(child=RationalField()), allow_empty=False)
    chi_O = RationalField(required=False, default=Fraction(1))

    def validate(self, data):
        n = data['dimension']
        errors: dict[str, Any] = {}
        degrees: dict[str, int] = {}
        basis_errors = {}
        for index, entry in enumerate(data['basis']):
            if entry['name'] in degrees:
                basis_errors[index] = {'name': [f'duplicate basis name {entry["name"]!r}']}
            elif entry['degree'] > n:
                basis_errors[index] = {'degree': [f'degree exceeds the dimension {n}']}
            degrees[entry['name']] = entry['degree']
        units = [name for name, degree in degrees.items() if degree == 0]
        if len(units) != 1:
            basis_errors.setdefault('non_field_errors', []).append('exactly one degree-0 element is required')
        if basis_errors:
            raise serializers.ValidationError({'basis': basis_errors})

        def unknown(sparse: dict, only_degree: int | None = None) -> list[str]:
            problems = [f'unknown basis element {name!r}' for name in sparse if name not in degrees]
            if only_degree is not None:
                problems += [
                    f'{name!r} has degree {degrees[name]}, expected {only_degree}'
                    for name, value in sparse.items()
                    if name in degrees and value and degrees[name] != only_degree
                ]
            return problems

        mult_errors = {}
        for index, entry in enumerate(data['mult']):
            left, right = entry['factors']
            problems = unknown({left: 1, right: 1}) + unknown(entry['product'])
            if not problems:
                expected = degrees[left] + degrees[right]
                problems = [
                    f'{name!r} has degree {degrees[name]}, expected {expected}'
                    for name, value in entry['product'].items()
                    if value and degrees[name] != expected
                ]
            if problems:
                mult_errors[index] = problems
        if mult_errors:
            errors['mult'] = mult_errors

        for key, only in (('integral', n), ('todd', None), ('point_class', n)):
            problems = unknown(data[key], only)
            if problems:
                errors[key] = problems
        embedding_errors = {
            index: problems
            for index, image in enumerate(data['divisor_embedding'])
            if (problems := unknown(image, 1))
        }
        if embedding_errors:
            errors['divisor_embedding'] = embedding_errors
        if errors:
            raise serializers.ValidationError(errors)
        return data


def model_from_data(data: dict, source: str = '') -> CohomologyModel:
    """Build the model with a degree-sorted basis (unit first) and symmetric products."""
    ordered = sorted(
        (BasisElement(entry['name'], entry['degree']) for entry in data['basis']),
        key=lambda element: element.degree,
    )
    index = {element.name: i for i, element in enumerate(ordered)}
    size = len(ordered)

    def dense(sparse: dict) -> tuple[Fraction, ...]:
        values = [Fraction(0)] * size
        for name, value in sparse.items():
            values[index[name]] += value
        return tuple(values)

    mult: dict[tuple[int, int], dict[int, Fraction]] = {}
    for element in ordered:
        mult[(0, index[element.name])] = {index[element.name]: Fraction(1)}
    for entry in data['mult']:
        i, j = sorted(index[name] for name in entry['factors'])
        table = {k: v for k, v in enumerate(dense(entry['product'])) if v}
        if i == 0:
            if table != mult[(0, j)]:
                raise InputFormatError(source or data['name'], [f'mult: the unit must act trivially on {ordered[j].name!r}'])
            continue
        if mult.get((i, j), table) != table:
            raise InputFormatError(source or data['name'], [f'mult: conflicting entries for {entry["factors"]}'])
        mult[(i, j)] = table

    return CohomologyModel(
        name=data['name'],
        n=data['dimension'],
        basis=tuple(ordered),
        mult=mult,
        integral=dense(data['integral']),
        todd=dense(data['todd']),
        point_class=dense(data['point_class']),
        divisor_embedding=tuple(dense(image) for image in data['divisor_embedding']),
        chi_O=data['chi_O'],
    )


def check_model(model: CohomologyModel, lattice: PolarisedLattice | None = None, source: str = '') -> None:
    """Load-time consistency of ring, integration and Todd data.

    Input-shaped problems raise InputFormatError; data that parses but
    contradicts itself raises ModelInconsistent.
    """
    source = source or model.name
    if model.integrate(model.point_class) != 1:
        raise InputFormatError(source, ['point_class: integrates to '
                                        f'{model.integrate(model.point_class)}, expected 1'])
    if lattice is not None and (lattice.n, lattice.rho) != (model.n, model.rho):
        raise InputFormatError(source, [
            f'model has dimension {model.n} and rank {model.rho}, lattice {lattice.name!r} '
            f'has {lattice.n} and {lattice.rho}'
        ])

    for i, j, k in product(range(model.size), repeat=3):
        if model.degree(i) + model.degree(j) + model.degree(k) > model.n:
            continue
        left = model.multiply(model.multiply(model.basis_vector(i), model.basis_vector(j)), model.basis_vector(k))
        right = model.multiply(model.basis_vector(i), model.multiply(model.basis_vector(j), model.basis_vector(k)))
        if left != right:
            names = [model.basis[x].name for x in (i, j, k)]
            raise ModelInconsistent(f'{source}: multiplication is not associative on {names}')

    chi = model.integrate(model.todd)
    if chi != model.chi_O:
        raise ModelInconsistent(f'{source}: integral of the Todd class is {chi}, declared chi(O) is {model.chi_O}')
    if model.todd[0] != 1:
        raise ModelInconsistent(f'{source}: Todd class must start with 1, got {model.todd[0]}')

    gram = [
        [model.integrate(model.multiply(model.multiply(model.basis_vector(i), model.basis_vector(j)), model.todd))
         for j in range(model.size)]
        for i in range(model.size)
    ]
    if determinant(gram) == 0:
        raise ModelInconsistent(f'{source}: Euler pairing is degenerate on the basis')

    _check_integrality(model, source)
    if lattice is not None:
        _check_against_lattice(model, lattice, source)
    logger.debug('model %s passed load-time checks', model.name)


def _check_integrality(model: CohomologyModel, source: str) -> None:
    """chi(O(D)) must be an integer for small integral D (Riemann-Roch integrality)."""
    ring = RingService(model)
    rho = model.rho
    samples = []
    for i in range(rho):
        unit = tuple(Fraction(int(k == i)) for k in range(rho))
        samples += [unit, tuple(-c for c in unit), tuple(2 * c for c in unit)]
    for i, j in combinations_with_replacement(range(rho), 2):
        if i != j:
            samples.append(tuple(Fraction(int(k in (i, j))) for k in range(rho)))
    for coords in samples:
        chi = ring.chi(ring.line_class(coords))
        if chi.denominator != 1:
            raise ModelInconsistent(f'{source}: chi(O(D)) = {chi} is not an integer for D = {list(map(str, coords))}')


def _check_against_lattice(model: CohomologyModel, lattice: PolarisedLattice, source: str) -> None:
    for monomial in lattice.form.monomials():
        value = model.unit()
        for index in monomial:
            value = model.multiply(value, model.embed(lattice.basis_divisor(index).coords))
        if model.integrate(value) != lattice.form[monomial]:
            raise ModelInconsistent(
                f'{source}: model gives {model.integrate(value)} for monomial {list(monomial)}, '
                f'lattice {lattice.name!r} stores {lattice.form[monomial]}'
            )


def load_model(path: str | Path, lattice: PolarisedLattice | None = None) -> CohomologyModel:
    data = validated(CohomologyModelSerializer, read_json(path), str(path))
    model = model_from_data(data, str(path))
    check_model(model, lattice, str(path))
    return model


class LineTermSerializer(serializers.Serializer):
    c1 = RationalVectorField(allow_empty=False)
    coefficient = RationalField(required=False, default=Fraction(1))


class KClassSpecSerializer(serializers.Serializer):
    """A class of K(X)_num as sum coefficient.[O(D)] + points.[O_x]."""

    label = serializers.CharField(max_length=120, required=False, default='')
    lines = LineTermSerializer(many=True, required=False, default=list)
    points = RationalField(required=False, default=Fraction(0))


def kclass_from_data(data: dict, ring: RingService) -> KClass:
    value = ring.point().scaled(data['points'])
    for term in data['lines']:
        value = value + ring.line_class(term['c1']).scaled(term['coefficient'])
    return value.labelled(data['label'])
