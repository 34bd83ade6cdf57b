import logging
import time

import numpy as np

from application.interfaces.repositories import MatrixRepository, ResultRepository
from domain.entities.problem import BenchSpec, SummaryRow
from domain.entities.solver import Method, SolveResult, SolverConfig
from domain.exceptions.exceptions import NotConvergedException
from domain.services.solvers import solve

logger = logging.getLogger(__name__)


class RunBenchmarkUseCase:
    """Use case for comparing eigensolvers on one test problem"""

    def __init__(self, matrix_repository: MatrixRepository, result_repository: ResultRepository):
        self.matrix_repository = matrix_repository
        self.result_repository = result_repository

    def execute(self, spec: BenchSpec) -> list[SummaryRow]:
        """
        Run every requested method from the normalized all-ones vector.

        Methods run one after the other; the time is taken around the
        solve call only. A method that does not converge still gets its
        history and summary row (converged=false).

        Args:
            spec: problem, methods and solver parameters

        Returns:
            list[SummaryRow]: one row per method, in the requested order
        """
        A = self.matrix_repository.load(spec.problem, spec.N)
        v0 = np.ones(A.n) / np.sqrt(A.n)
        logger.info("problem %s: n=%d nnz=%d", spec.case_label, A.n, A.nnz)

        rows = []
        for method in spec.methods:
            config = solver_config(spec, method)
            started = time.perf_counter()
            try:
                result = solve(A, config, v0)
            except NotConvergedException as exc:
                result = exc.result
            cpu_s = time.perf_counter() - started

            self.result_repository.save_history(result)
            row = self._summary_row(spec, config, result, cpu_s)
            self.result_repository.append_summary(row)
            logger.info("%s: IT=%d MV=%d converged=%s", method.value, row.iterations,
                        row.mv_total, row.converged)
            rows.append(row)
        return rows

    @staticmethod
    def _summary_row(spec: BenchSpec, config: SolverConfig, result: SolveResult,
                     cpu_s: float) -> SummaryRow:
        return SummaryRow(
            method=result.method,
            case=spec.case_label,
            N=spec.N if spec.is_pde else None,
            m=config.m,
            n_r=config.n_r,
            iterations=result.iterations,
            mv_total=result.mv_total,
            cpu_s=cpu_s,
            eigenvalue=complex(result.eigenvalue),
            converged=result.converged,
        )


def solver_config(spec: BenchSpec, method: Method) -> SolverConfig:
    """Solver parameters of one method under a bench spec"""
    return SolverConfig(
        method=method,
        m=spec.m,
        n_r=spec.cycle_length(method),
        tol=spec.tol,
        max_outer=spec.max_outer,
        s_strategy=spec.s_strategy,
        zeta_fraction=spec.zeta_fraction,
        arnoldi_warmup=spec.arnoldi_warmup,
        filter_policy=spec.filter_policy,
        seed=spec.seed,
    )
