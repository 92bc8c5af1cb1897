from reports.management.base import FourTermCommand
from reports.serializers import VERIFY_GROUPS


class Command(FourTermCommand):
    help = 'Run the acceptance suite; exits 3 when a gated check fails'
    command_name = 'verify'
    extra_flags = ['only']

    def add_command_arguments(self, parser):
        parser.add_argument('--only', nargs='+', choices=VERIFY_GROUPS)
