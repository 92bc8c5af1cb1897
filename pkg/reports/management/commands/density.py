from measures.models import MEASURE_KINDS
from reports.management.base import FourTermCommand
from reports.serializers import DENSITY_PRESETS


class Command(FourTermCommand):
    help = 'Density and cdf table of a limit zero distribution'
    command_name = 'density'
    extra_flags = ['measure', 'preset', 'count']

    def add_command_arguments(self, parser):
        parser.add_argument('--measure', choices=MEASURE_KINDS)
        parser.add_argument('--preset', choices=sorted(DENSITY_PRESETS),
                            help='t = 8/27 for nu_L or t = 2/(3 sqrt 3) for nu_M')
        parser.add_argument('--count', type=int, help='Number of interior points (default 1000)')
