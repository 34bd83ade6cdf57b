from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from application.use_cases.run_sweep import RunSweepUseCase
from domain.entities.problem import SweepAxis, SweepSpec
from domain.entities.solver import Method
from domain.exceptions.exceptions import DomainException, ProblemException
from infrastructure.repositories.csv_result_repository import CsvResultRepository
from infrastructure.repositories.problem_matrix_repository import ProblemMatrixRepository


class Command(BaseCommand):
    help = (
        "Count products against the restart number (--vary nr) or the filter degree (--vary m) "
        "and append one row per run to <outdir>/sweep.csv. Exit code 2 if a run did not converge."
    )

    def add_arguments(self, parser):
        defaults = settings.EIGENSOLVER
        parser.add_argument('--problem', default='case1', help="case1, case2 or mm:<path to .mtx>")
        parser.add_argument('--N', type=int, help="interior grid points per dimension (case1/case2)")
        parser.add_argument('--methods', default='fks,cd,rfks', help="comma separated subset of rfks,fks,cd,ac")
        parser.add_argument('--vary', required=True, choices=[axis.value for axis in SweepAxis],
                            help="parameter to sweep")
        parser.add_argument('--values', required=True, help="comma separated values of the swept parameter")
        parser.add_argument('--m', type=int, help="filter degree when sweeping nr")
        parser.add_argument('--nr', type=int, help="restart number when sweeping m")
        parser.add_argument('--tol', type=float, default=defaults['TOL'], help="relative residual tolerance")
        parser.add_argument('--max-outer', type=int, default=defaults['MAX_OUTER'])
        parser.add_argument('--zeta-fraction', type=float, default=defaults['ZETA_FRACTION'])
        parser.add_argument('--warmup', type=int, default=defaults['ARNOLDI_WARMUP'],
                            help="Arnoldi steps behind the frozen filter")
        parser.add_argument('--seed', type=int, default=defaults['SEED'], help="overridden by FK_SEED")
        parser.add_argument('--outdir', default=str(defaults['OUTPUT_DIR']))

    def handle(self, *args, **options):
        try:
            spec = self._sweep_spec(options)
            use_case = RunSweepUseCase(
                ProblemMatrixRepository(),
                CsvResultRepository(spec.output_dir),
            )
            rows = use_case.execute(spec)
        except ProblemException as e:
            raise CommandError(f"problem error: {e}", returncode=1)
        except DomainException as e:
            raise CommandError(str(e), returncode=1)

        for row in rows:
            line = f"{row.method.value:5s} m={row.m:<4d} n_r={row.n_r:<4d} IT={row.iterations:<7d} MV={row.mv_total}"
            if row.converged:
                self.stdout.write(self.style.SUCCESS(line))
            else:
                self.stdout.write(self.style.WARNING(f"{line} (not converged)"))
        self.stdout.write(f"results in {spec.output_dir / 'sweep.csv'}")

        failed = sorted({row.method.value for row in rows if not row.converged})
        if failed:
            raise CommandError(f"not converged: {', '.join(failed)}", returncode=2)

    def _sweep_spec(self, options) -> SweepSpec:
        axis = SweepAxis(options['vary'])
        fixed = options['m'] if axis is SweepAxis.RESTART else options['nr']
        if fixed is None:
            other = '--m' if axis is SweepAxis.RESTART else '--nr'
            raise CommandError(f"{other} is required when sweeping {axis.value}", returncode=1)
        try:
            values = [int(value) for value in options['values'].split(',') if value.strip()]
        except ValueError:
            raise CommandError(f"--values must be comma separated integers, got {options['values']!r}",
                               returncode=1) from None

        seed = options['seed']
        if settings.EIGENSOLVER.get('SEED_OVERRIDE') is not None:
            seed = int(settings.EIGENSOLVER['SEED_OVERRIDE'])

        return SweepSpec(
            problem=options['problem'],
            N=options['N'],
            methods=Method.parse_list(options['methods']),
            axis=axis,
            values=values,
            fixed=fixed,
            output_dir=Path(options['outdir']),
            tol=options['tol'],
            max_outer=options['max_outer'],
            zeta_fraction=options['zeta_fraction'],
            arnoldi_warmup=options['warmup'],
            seed=seed,
        )
