from reports.management.base import FourTermCommand
from reports.serializers import PHI_CHECKS


class Command(FourTermCommand):
    help = 'Numerical checks of the branch function phi'
    command_name = 'phi_check'
    extra_flags = ['checks', 'count', 'points']

    def add_command_arguments(self, parser):
        parser.add_argument('--checks', nargs='+', choices=PHI_CHECKS)
        parser.add_argument('--count', type=int, help='Size of the random point grid (default 1000)')
        parser.add_argument('--points', nargs='+', help='Use these points instead of the random grids')
