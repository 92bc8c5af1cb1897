from reports.management.base import FourTermCommand


class Command(FourTermCommand):
    help = 'Kolmogorov-Smirnov distance of zero distributions to their limit along an n-schedule'
    command_name = 'ks'
    extra_flags = ['n_schedule']

    def add_command_arguments(self, parser):
        parser.add_argument('--n-schedule', type=int, nargs='+', help='Degrees (default 100 200 400)')
