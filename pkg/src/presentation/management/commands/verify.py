import argparse

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from application.use_cases.verify_properties import SuiteOutcome, VerifyPropertiesUseCase


class Command(BaseCommand):
    help = "Check the numerical invariants on random inputs; exit code 1 with a counterexample on failure."

    def add_arguments(self, parser):
        defaults = settings.EIGENSOLVER
        parser.add_argument('--samples', type=int, default=defaults['VERIFY_SAMPLES'],
                            help="sample count of the largest suite; the others scale with it")
        parser.add_argument('--seed', type=int, default=defaults['SEED'], help="overridden by FK_SEED")
        parser.add_argument('--flip-branch-rule', action='store_true', help=argparse.SUPPRESS)

    def handle(self, *args, **options):
        seed = options['seed']
        if settings.EIGENSOLVER.get('SEED_OVERRIDE') is not None:
            seed = int(settings.EIGENSOLVER['SEED_OVERRIDE'])

        use_case = VerifyPropertiesUseCase(
            samples=options['samples'],
            seed=seed,
            flip_branch_rule=options['flip_branch_rule'],
        )
        outcomes = use_case.execute(on_outcome=self._report)

        failed = [outcome for outcome in outcomes if not outcome.passed]
        if failed:
            first = failed[0]
            raise CommandError(f"{first.name}: {first.counterexample}", returncode=1)
        self.stdout.write(self.style.SUCCESS(f"all {len(outcomes)} suites passed"))

    def _report(self, outcome: SuiteOutcome):
        status = self.style.SUCCESS('pass') if outcome.passed else self.style.ERROR('FAIL')
        self.stdout.write(f"{status}  {outcome.name} ({outcome.cases} cases)")
