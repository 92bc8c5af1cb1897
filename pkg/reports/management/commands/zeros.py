from reports.management.base import FourTermCommand


class Command(FourTermCommand):
    help = 'Zeros of P_{n,N} by the interlacing cascade, with a hypothesis report'
    command_name = 'zeros'
    extra_flags = ['levels', 'skip_validation']

    def add_command_arguments(self, parser):
        parser.add_argument('--levels', action='store_true', help='List the zeros of every P_k, k <= n')
        parser.add_argument('--skip-validation', action='store_true')
