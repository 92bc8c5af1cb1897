from reports.management.base import FourTermCommand


class Command(FourTermCommand):
    help = 'Ratio asymptotics P_n/P_{n+1} against the scaled phi limit'
    command_name = 'ratio'
    extra_flags = ['n_schedule', 'points', 'skip_validation']

    def add_command_arguments(self, parser):
        parser.add_argument('--n-schedule', type=int, nargs='+', help='Degrees (default 50 100 200 400)')
        parser.add_argument('--points', nargs='+', help="Complex points such as 3 -1 1.5+1.5j")
        parser.add_argument('--skip-validation', action='store_true',
                            help='Do not compute the zeros to keep the points away from them')
