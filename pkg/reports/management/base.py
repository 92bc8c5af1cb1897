# reports/management/base.py
import logging

from django.core.management.base import BaseCommand, CommandError

from coeffs.models import FAMILY_KINDS
from fourterm.exceptions import EXIT_NUMERIC, FourTermError
from reports.services import COMMAND_RUNNERS, build_run_config, parse_tol

logger = logging.getLogger(__name__)

COMMON_FLAGS = ['family', 'alpha', 'spec', 'n', 'N', 't', 'out', 'format', 'seed']


class FourTermCommand(BaseCommand):
    """Shared flags, config merging and exit codes for the report commands.

    Subclasses set ``command_name`` and declare their own flags in
    ``add_command_arguments``; ``extra_flags`` lists the option names
    forwarded into the run config.
    """
    command_name = None
    extra_flags = []

    def add_arguments(self, parser):
        parser.add_argument('--config', help='JSON run configuration; flags take precedence')
        parser.add_argument('--family', choices=FAMILY_KINDS + ['zero'])
        parser.add_argument('--alpha', type=float)
        parser.add_argument('--spec', help='Family descriptor JSON (implies --family custom)')
        parser.add_argument('--n', type=int, help='Degree')
        parser.add_argument('--N', type=int, help='Scaling parameter, defaults to n')
        parser.add_argument('--t', type=float)
        parser.add_argument('--out', help='Output directory')
        parser.add_argument('--format', choices=['csv', 'json'])
        parser.add_argument('--seed', type=int)
        parser.add_argument('--tol', action='append', metavar='KEY=VAL',
                            help='Override one acceptance gate for this run')
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def collect_flags(self, options):
        flags = {key: options.get(key) for key in COMMON_FLAGS + self.extra_flags}
        flags['tol'] = parse_tol(options.get('tol')) or None
        # store_true flags left unset must not override the config file
        return {key: value for key, value in flags.items() if value is not None and value is not False}

    def handle(self, *args, **options):
        try:
            config = build_run_config(self.command_name, self.collect_flags(options), options.get('config'))
            result = COMMAND_RUNNERS[self.command_name](config)
        except FourTermError as e:
            logger.error(f"{self.command_name} failed: {type(e).__name__}: {e.message}")
            raise CommandError(f"{type(e).__name__}: {e.message}", returncode=e.code)

        self.stdout.write(result.summary())
        for path in result.files:
            self.stdout.write(f"  {path}")

        if not result.passed:
            failed = '; '.join(
                f"{report.name} achieved {report.achieved:.3g} > required {report.required:.3g}"
                if report.achieved > report.required else f"{report.name} not monotone: {report.details}"
                for report in result.failures
            )
            raise CommandError(f"Failed checks: {failed}", returncode=EXIT_NUMERIC)
        self.stdout.write(self.style.SUCCESS(f"{self.command_name}: all checks passed"))
