from rest_framework import serializers

from core.serializers import RationalVectorField
from kring.serializers import KClassSpecSerializer


class SegmentSerializer(serializers.Serializer):
    start = RationalVectorField(allow_empty=False)
    end = RationalVectorField(allow_empty=False)

    def validate(self, data):
        if len(data['start']) != len(data['end']):
            raise serializers.ValidationError('start and end must have the same length')
        return data


class PresetSerializer(serializers.Serializer):
    """Stored defaults for a run; explicit command-line flags win."""

    name = serializers.CharField(max_length=120)
    catalog = serializers.CharField(required=False)
    lattice = serializers.CharField(required=False)
    model = serializers.CharField(required=False)
    sheaf = serializers.CharField(required=False)
    region = serializers.JSONField(required=False)
    walls = serializers.ListField(
        child=serializers.ListField(child=serializers.IntegerField(), allow_empty=False),
        required=False,
    )
    n1 = SegmentSerializer(required=False)
    amp = SegmentSerializer(required=False)
    multipolarisation = serializers.ListField(child=RationalVectorField(), required=False)
    multiples = serializers.ListField(child=serializers.IntegerField(min_value=1), required=False)
    classes = KClassSpecSerializer(many=True, required=False)

    def validate(self, data):
        if 'catalog' in data and 'lattice' in data:
            raise serializers.ValidationError('give a catalog entry or a lattice path, not both')
        return data


class ClassListSerializer(serializers.Serializer):
    """``{"classes": [...]}`` file for kverify."""

    classes = KClassSpecSerializer(many=True, allow_empty=True)
