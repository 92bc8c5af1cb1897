# reports/serializers.py
from django.conf import settings
from rest_framework import serializers

from coeffs.models import FAMILY_KINDS
from coeffs.serializers import StrictSerializer
from measures.models import MEASURE_KINDS
from .utils import to_plain

COMMANDS = ['zeros', 'density', 'ks', 'ratio', 'phi_check', 'toeplitz', 'verify']
VERIFY_GROUPS = ['phi', 'measures', 'zeros', 'ratio', 'ks', 'toeplitz']
PHI_CHECKS = ['identity', 'oracle', 'tail', 'analyticity', 'jump', 'growth', 'stieltjes']
TOEPLITZ_CHECKS = ['closed_form', 'charpoly', 'total_nonnegativity', 'equivariance', 'limit']

# Parameters of the two published density plots
DENSITY_PRESETS = {
    'laguerre_figure': {'measure': 'nu_L', 't': 8 / 27},
    'macdonald_figure': {'measure': 'nu_M', 't': 2 / (3 * 3 ** 0.5)},
}


class ComplexField(serializers.Field):
    """Complex number given as a JSON number or a string such as '1.5+1.5j'"""
    default_error_messages = {
        'invalid': "Not a complex number: {value}.",
    }

    def to_internal_value(self, data):
        if isinstance(data, bool):
            self.fail('invalid', value=data)
        if isinstance(data, (int, float)):
            return complex(data)
        try:
            return complex(str(data).replace(' ', ''))
        except ValueError:
            self.fail('invalid', value=data)

    def to_representation(self, value):
        return str(complex(value))


class RunConfigSerializer(StrictSerializer):
    """One command-line run: merged config file and flags"""
    command = serializers.ChoiceField(choices=COMMANDS)
    family = serializers.ChoiceField(choices=FAMILY_KINDS + ['zero'], default='constant')
    alpha = serializers.FloatField(min_value=0, required=False)
    spec = serializers.CharField(required=False)
    n = serializers.IntegerField(min_value=1, required=False)
    N = serializers.IntegerField(min_value=1, required=False)
    t = serializers.FloatField(required=False)
    out = serializers.CharField(required=False)
    format = serializers.ChoiceField(choices=['csv', 'json'], default='csv')
    seed = serializers.IntegerField(min_value=0, required=False)
    tol = serializers.DictField(child=serializers.FloatField(min_value=0), required=False, default=dict)
    points = serializers.ListField(child=ComplexField(), required=False, allow_empty=False)
    n_schedule = serializers.ListField(
        child=serializers.IntegerField(min_value=1), required=False, allow_empty=False,
    )
    measure = serializers.ChoiceField(choices=MEASURE_KINDS, required=False)
    preset = serializers.ChoiceField(choices=sorted(DENSITY_PRESETS), required=False)
    count = serializers.IntegerField(min_value=2, max_value=1_000_000, required=False)
    levels = serializers.BooleanField(default=False)
    only = serializers.ListField(
        child=serializers.ChoiceField(choices=VERIFY_GROUPS), required=False, allow_empty=False,
    )
    checks = serializers.ListField(
        child=serializers.ChoiceField(choices=PHI_CHECKS + TOEPLITZ_CHECKS),
        required=False, allow_empty=False,
    )
    skip_validation = serializers.BooleanField(default=False)

    def validate_tol(self, value):
        """Only gates that exist can be overridden"""
        unknown = sorted(set(value) - set(settings.FOURTERM_CHECK_TOLERANCES))
        if unknown:
            raise serializers.ValidationError(f"Unknown tolerance keys: {', '.join(unknown)}.")
        return value

    def validate_t(self, value):
        horizon = settings.FOURTERM_T_HORIZON
        if not 0 < value <= horizon:
            raise serializers.ValidationError(f"t must lie in (0, {horizon}].")
        return value

    def validate(self, attrs):
        attrs = super().validate(attrs)
        family = attrs.get('family')

        if attrs.get('spec'):
            attrs['family'] = 'custom'
        elif family == 'custom':
            raise serializers.ValidationError({'spec': "A custom family needs a descriptor file."})
        elif family == 'constant' and 'alpha' not in attrs and self._needs_family(attrs):
            raise serializers.ValidationError({'alpha': "The constant family needs alpha."})

        if attrs.get('n') and attrs.get('N') and attrs['n'] > attrs['N'] * settings.FOURTERM_T_HORIZON:
            raise serializers.ValidationError({'n': "n/N is beyond the working horizon."})

        preset = attrs.get('preset')
        if preset:
            for key, value in DENSITY_PRESETS[preset].items():
                attrs.setdefault(key, value)
        return attrs

    @staticmethod
    def _needs_family(attrs):
        if attrs['command'] in ('zeros', 'ks', 'ratio'):
            return True
        return attrs['command'] == 'density' and not (attrs.get('measure') or attrs.get('preset'))


class CheckReportSerializer(serializers.Serializer):
    """Read-only rendering of a CheckReport for JSON reports"""
    name = serializers.CharField()
    achieved = serializers.FloatField()
    required = serializers.FloatField()
    passed = serializers.BooleanField()
    details = serializers.SerializerMethodField()
    rows = serializers.SerializerMethodField()

    def get_details(self, obj):
        return to_plain(obj.details)

    def get_rows(self, obj):
        return 0 if obj.table is None else len(obj.table)
