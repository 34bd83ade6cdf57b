import logging

import numpy as np

from application.interfaces.repositories import MatrixRepository, ResultRepository
from application.use_cases.run_benchmark import solver_config
from domain.entities.problem import SweepRow, SweepSpec
from domain.exceptions.exceptions import NotConvergedException
from domain.services.solvers import solve

logger = logging.getLogger(__name__)


class RunSweepUseCase:
    """Use case for the product count against the restart number or the filter degree"""

    def __init__(self, matrix_repository: MatrixRepository, result_repository: ResultRepository):
        self.matrix_repository = matrix_repository
        self.result_repository = result_repository

    def execute(self, spec: SweepSpec) -> list[SweepRow]:
        """
        Solve once per (swept value, method) from the normalized all-ones vector.

        Each run appends one sweep row; a run that hits max_outer is
        recorded with converged=false.

        Returns:
            list[SweepRow]: value-major, methods in the requested order
        """
        A = self.matrix_repository.load(spec.problem, spec.N)
        v0 = np.ones(A.n) / np.sqrt(A.n)

        rows = []
        for m, n_r in spec.points():
            bench = spec.bench_spec(m, n_r)
            for method in spec.methods:
                config = solver_config(bench, method)
                try:
                    result = solve(A, config, v0)
                except NotConvergedException as exc:
                    result = exc.result
                row = SweepRow(
                    method=method,
                    case=bench.case_label,
                    N=bench.N if bench.is_pde else None,
                    m=config.m,
                    n_r=config.n_r,
                    iterations=result.iterations,
                    mv_total=result.mv_total,
                    converged=result.converged,
                )
                self.result_repository.append_sweep(row)
                logger.info("%s m=%d n_r=%d: IT=%d MV=%d converged=%s", method.value, m, n_r,
                            row.iterations, row.mv_total, row.converged)
                rows.append(row)
        return rows
