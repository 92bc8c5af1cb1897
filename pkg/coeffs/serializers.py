# coeffs/serializers.py
from rest_framework import serializers

from fourterm.exceptions import ProfileError
from .models import FAMILY_KINDS
from .services import build_profile


class StrictSerializer(serializers.Serializer):
    """Serializer that rejects keys it does not declare"""

    def validate(self, attrs):
        unknown = set(getattr(self, 'initial_data', {}) or {}) - set(self.fields)
        if unknown:
            raise serializers.ValidationError(
                {key: "Unknown field." for key in sorted(unknown)}
            )
        return super().validate(attrs)


class CoefficientTableSerializer(StrictSerializer):
    """Exact working coefficients for one N"""
    N = serializers.IntegerField(min_value=1)
    b = serializers.ListField(child=serializers.FloatField(), allow_empty=False)
    c = serializers.ListField(child=serializers.FloatField(), allow_empty=False)
    d = serializers.ListField(child=serializers.FloatField(), allow_empty=False)

    def validate(self, attrs):
        attrs = super().validate(attrs)
        if not (len(attrs['b']) == len(attrs['c']) == len(attrs['d'])):
            raise serializers.ValidationError("b, c and d must have the same length.")
        return attrs


class FamilyDescriptorSerializer(StrictSerializer):
    """Serializer for family descriptor files"""
    name = serializers.CharField(max_length=100)
    kind = serializers.ChoiceField(choices=FAMILY_KINDS)
    alpha = serializers.JSONField(required=False)
    scale_exponent = serializers.FloatField(min_value=0, required=False, default=0.0)
    coefficients = CoefficientTableSerializer(required=False)

    def validate_alpha(self, value):
        """Validate alpha is a nonnegative continuous profile"""
        try:
            build_profile(value)
        except ProfileError as e:
            raise serializers.ValidationError(e.message)
        return value

    def validate(self, attrs):
        attrs = super().validate(attrs)
        kind = attrs['kind']
        alpha = attrs.get('alpha')

        if kind in ('constant', 'custom') and alpha is None:
            raise serializers.ValidationError({'alpha': f"alpha is required for a {kind} family."})
        if kind == 'constant' and not isinstance(alpha, (int, float)):
            raise serializers.ValidationError({'alpha': "A constant family needs a numeric alpha."})
        if kind == 'constant' and alpha < 0:
            raise serializers.ValidationError({'alpha': "alpha must be nonnegative."})
        if attrs.get('coefficients') and kind != 'custom':
            raise serializers.ValidationError(
                {'coefficients': "Exact coefficients are only accepted for custom families."}
            )
        return attrs


class FamilySerializer(serializers.Serializer):
    """Read-only rendering of a family for reports"""
    name = serializers.CharField()
    kind = serializers.CharField()
    alpha = serializers.SerializerMethodField()
    scale_exponent = serializers.FloatField()

    def get_alpha(self, obj):
        return obj.profile.describe()


class LimitDeviationSerializer(serializers.Serializer):
    N = serializers.IntegerField()
    n = serializers.IntegerField()
    t = serializers.FloatField()
    b_error = serializers.FloatField()
    c_error = serializers.FloatField()
    d_error = serializers.FloatField()
    worst = serializers.FloatField()
