from __future__ import annotations

import logging
from typing import Any

from rest_framework import serializers

from core.exact import format_rational
from core.serializers import RationalField, RationalVectorField

from lattice.types import CurveClass, PolarisedLattice

from .services.slice_service import SlicePlane
from .types import Chamber, ChamberRepresentative, CrossingParameter, Region, sign_label

logger = logging.getLogger(__name__)


def _rationals(values) -> list[str]:
    return [format_rational(v) for v in values]


class RegionSpecSerializer(serializers.Serializer):
    """Either ``{"vertices": [...]}`` or ``{"around": [...], "radius": "p/q"}`` in N_1 coordinates."""

    vertices = serializers.ListField(child=RationalVectorField(), required=False, allow_empty=False)
    around = RationalVectorField(required=False)
    radius = RationalField(required=False)

    def validate_radius(self, value):
        if value <= 0:
            raise serializers.ValidationError('radius must be positive')
        return value

    def validate(self, data):
        lattice: PolarisedLattice | None = self.context.get('lattice')
        has_vertices = 'vertices' in data
        has_ball = 'around' in data or 'radius' in data
        if has_vertices == has_ball:
            raise serializers.ValidationError('give either vertices or around + radius')
        if has_ball and not ('around' in data and 'radius' in data):
            raise serializers.ValidationError('around and radius go together')
        if lattice is not None:
            errors: dict[str, Any] = {}
            if has_vertices:
                bad = {
                    index: [f'expected {lattice.rho} coordinates, got {len(vertex)}']
                    for index, vertex in enumerate(data['vertices'])
                    if len(vertex) != lattice.rho
                }
                if bad:
                    errors['vertices'] = bad
            elif len(data['around']) != lattice.rho:
                errors['around'] = [f'expected {lattice.rho} coordinates, got {len(data["around"])}']
            if errors:
                raise serializers.ValidationError(errors)
        return data


class PlaneSerializer(serializers.Serializer):
    origin = RationalVectorField(allow_empty=False)
    u = RationalVectorField(allow_empty=False)
    v = RationalVectorField(allow_empty=False)

    def validate(self, data):
        if not len(data['origin']) == len(data['u']) == len(data['v']):
            raise serializers.ValidationError('origin, u and v must have the same length')
        return data


def plane_from_data(data: dict) -> SlicePlane:
    return SlicePlane(
        origin=CurveClass(tuple(data['origin'])),
        u=CurveClass(tuple(data['u'])),
        v=CurveClass(tuple(data['v'])),
    )


class RegionReportSerializer(serializers.Serializer):
    label = serializers.CharField()
    vertices = serializers.SerializerMethodField()
    preimages = serializers.SerializerMethodField()
    residuals = serializers.SerializerMethodField()
    certification = serializers.SerializerMethodField()

    def get_vertices(self, region: Region):
        return [_rationals(v.coords) for v in region.vertices]

    def get_preimages(self, region: Region):
        return [_rationals(phi.coords) for phi in region.preimages]

    def get_residuals(self, region: Region):
        return _rationals(region.residuals)

    def get_certification(self, region: Region):
        return 'vertices only: P(X) is open but not known to be convex'


class RepresentativeSerializer(serializers.Serializer):
    a = serializers.SerializerMethodField()
    b = serializers.SerializerMethodField()
    scale = RationalField()
    target = serializers.SerializerMethodField()
    steps = serializers.IntegerField()

    def get_a(self, rep: ChamberRepresentative):
        return _rationals(rep.a.coords)

    def get_b(self, rep: ChamberRepresentative):
        return _rationals(rep.b.coords)

    def get_target(self, rep: ChamberRepresentative):
        return _rationals(rep.target.coords)


class ChamberSerializer(serializers.Serializer):
    signs = serializers.SerializerMethodField()
    walls_active = serializers.ListField(child=serializers.IntegerField())
    representative = serializers.SerializerMethodField()
    complete_intersection = serializers.SerializerMethodField()

    def get_signs(self, chamber: Chamber):
        return sign_label(chamber.signs)

    def get_representative(self, chamber: Chamber):
        return _rationals(chamber.representative.coords)

    def get_complete_intersection(self, chamber: Chamber):
        representative = self.context.get('representatives', {}).get(chamber.signs)
        return RepresentativeSerializer(representative).data if representative else None


class CrossingSerializer(serializers.Serializer):
    wall = serializers.SerializerMethodField()
    is_rational = serializers.BooleanField()
    value = serializers.SerializerMethodField()
    minpoly = serializers.SerializerMethodField()
    interval = serializers.SerializerMethodField()
    multiplicity = serializers.IntegerField()

    def get_wall(self, crossing: CrossingParameter):
        return list(crossing.wall.normal)

    def get_value(self, crossing: CrossingParameter):
        return format_rational(crossing.value) if crossing.is_rational else None

    def get_minpoly(self, crossing: CrossingParameter):
        return list(crossing.algebraic.minpoly) if crossing.algebraic else None

    def get_interval(self, crossing: CrossingParameter):
        return _rationals(crossing.algebraic.interval) if crossing.algebraic else None
