from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from application.use_cases.run_benchmark import RunBenchmarkUseCase
from domain.entities.problem import BenchSpec
from domain.entities.solver import FilterPolicy, Method, SStrategy
from domain.exceptions.exceptions import DomainException, ProblemException
from infrastructure.repositories.csv_result_repository import CsvResultRepository
from infrastructure.repositories.problem_matrix_repository import ProblemMatrixRepository

# (m, n_r, AC cycle length) of the two experiment tables
PRESETS = {
    'table1': (60, 40, 20),
    'table2': (60, 60, 30),
}


class Command(BaseCommand):
    help = (
        "Run eigensolvers on a test problem and write <outdir>/<method>_history.csv "
        "plus a row per method in <outdir>/summary.csv. Exit code 2 if a method did not converge."
    )

    def add_arguments(self, parser):
        defaults = settings.EIGENSOLVER
        parser.add_argument('--problem', required=True, help="case1, case2 or mm:<path to .mtx>")
        parser.add_argument('--N', type=int, help="interior grid points per dimension (case1/case2)")
        parser.add_argument('--methods', default='rfks,fks,cd,ac', help="comma separated subset of rfks,fks,cd,ac")
        parser.add_argument('--preset', choices=sorted(PRESETS), help="set m, n_r and the AC cycle length")
        parser.add_argument('--m', type=int, help="Chebyshev filter degree")
        parser.add_argument('--nr', type=int, help="restart number (maximum subspace dimension)")
        parser.add_argument('--ac-nr', type=int, help="Arnoldi cycle length for ac (default: --nr)")
        parser.add_argument('--tol', type=float, default=defaults['TOL'], help="relative residual tolerance")
        parser.add_argument('--max-outer', type=int, default=defaults['MAX_OUTER'])
        parser.add_argument('--s-strategy', default='refined', help="last, weighted[:beta], ritz or refined (rfks)")
        parser.add_argument('--zeta-fraction', type=float, default=defaults['ZETA_FRACTION'])
        parser.add_argument('--warmup', type=int, default=defaults['ARNOLDI_WARMUP'],
                            help="Arnoldi steps behind the frozen filter")
        parser.add_argument('--filter-policy', choices=[policy.value for policy in FilterPolicy],
                            default=FilterPolicy.DYNAMIC.value, help="filter rebuild policy for rfks")
        parser.add_argument('--seed', type=int, default=defaults['SEED'], help="overridden by FK_SEED")
        parser.add_argument('--outdir', default=str(defaults['OUTPUT_DIR']))

    def handle(self, *args, **options):
        try:
            spec = self._bench_spec(options)
            use_case = RunBenchmarkUseCase(
                ProblemMatrixRepository(),
                CsvResultRepository(spec.output_dir),
            )
            rows = use_case.execute(spec)
        except ProblemException as e:
            raise CommandError(f"problem error: {e}", returncode=1)
        except DomainException as e:
            raise CommandError(str(e), returncode=1)

        for row in rows:
            line = (f"{row.method.value:5s} IT={row.iterations:<7d} MV={row.mv_total:<9d} "
                    f"CPU={row.cpu_s:8.3f}s lambda={row.eigenvalue:.12g}")
            if row.converged:
                self.stdout.write(self.style.SUCCESS(line))
            else:
                self.stdout.write(self.style.WARNING(f"{line} (not converged)"))
        self.stdout.write(f"results in {spec.output_dir}")

        failed = [row.method.value for row in rows if not row.converged]
        if failed:
            raise CommandError(f"not converged: {', '.join(failed)}", returncode=2)

    def _bench_spec(self, options) -> BenchSpec:
        m, n_r, ac_n_r = PRESETS.get(options['preset'], (None, None, None))
        m = options['m'] if options['m'] is not None else m
        n_r = options['nr'] if options['nr'] is not None else n_r
        ac_n_r = options['ac_nr'] if options['ac_nr'] is not None else ac_n_r
        if m is None or n_r is None:
            raise CommandError("--m and --nr are required unless --preset is given", returncode=1)

        seed = options['seed']
        if settings.EIGENSOLVER.get('SEED_OVERRIDE') is not None:
            seed = int(settings.EIGENSOLVER['SEED_OVERRIDE'])

        return BenchSpec(
            problem=options['problem'],
            N=options['N'],
            methods=Method.parse_list(options['methods']),
            m=m,
            n_r=n_r,
            ac_n_r=ac_n_r,
            output_dir=Path(options['outdir']),
            tol=options['tol'],
            max_outer=options['max_outer'],
            s_strategy=SStrategy.parse(options['s_strategy']),
            zeta_fraction=options['zeta_fraction'],
            arnoldi_warmup=options['warmup'],
            filter_policy=FilterPolicy(options['filter_policy']),
            seed=seed,
        )
