from reports.management.base import FourTermCommand
from reports.serializers import TOEPLITZ_CHECKS


class Command(FourTermCommand):
    help = 'Eigenvalues of the banded Toeplitz matrix T_n and its structural checks'
    command_name = 'toeplitz'
    extra_flags = ['checks', 'n_schedule']

    def add_command_arguments(self, parser):
        parser.add_argument('--checks', nargs='+', choices=TOEPLITZ_CHECKS)
        parser.add_argument('--n-schedule', type=int, nargs='+',
                            help='Sizes for the limit check (default 100 200 400)')
