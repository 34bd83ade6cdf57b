import csv
import logging
from pathlib import Path

from application.interfaces.repositories import ResultRepository
from domain.entities.problem import SummaryRow, SweepRow
from domain.entities.solver import RunRecord, SolveResult

logger = logging.getLogger(__name__)

HISTORY_HEADER = [
    'step', 'theta_re', 'theta_im', 'resnorm', 'relresnorm', 'mv_total',
    'elapsed_s', 'restarted', 'filter_d', 'filter_a', 'filter_m',
]
SUMMARY_HEADER = [
    'method', 'case', 'N', 'm', 'n_r', 'IT', 'MV', 'CPU_s', 'lambda_re', 'lambda_im', 'converged',
]
SWEEP_HEADER = ['method', 'case', 'N', 'm', 'n_r', 'IT', 'MV', 'converged']


def _number(value) -> str:
    """Shortest repr that round-trips the double"""
    return repr(float(value))


def _flag(value: bool) -> str:
    return 'true' if value else 'false'


class CsvResultRepository(ResultRepository):
    """<outdir>/<method>_history.csv per run, shared <outdir>/summary.csv and <outdir>/sweep.csv"""

    def __init__(self, output_dir: Path):
        self.output_dir = Path(output_dir)

    @property
    def summary_path(self) -> Path:
        return self.output_dir / 'summary.csv'

    @property
    def sweep_path(self) -> Path:
        return self.output_dir / 'sweep.csv'

    def history_path(self, method: str) -> Path:
        return self.output_dir / f'{method}_history.csv'

    def save_history(self, result: SolveResult) -> Path:
        self.output_dir.mkdir(parents=True, exist_ok=True)
        path = self.history_path(result.method.value)
        with path.open('w', newline='') as handle:
            writer = csv.writer(handle, lineterminator='\n')
            writer.writerow(HISTORY_HEADER)
            writer.writerows(self._history_row(record) for record in result.history)
        logger.info("wrote %d history rows to %s", len(result.history), path)
        return path

    def append_summary(self, row: SummaryRow) -> Path:
        return self._append(self.summary_path, SUMMARY_HEADER, [
            row.method.value,
            row.case,
            '' if row.N is None else row.N,
            row.m,
            row.n_r,
            row.iterations,
            row.mv_total,
            _number(row.cpu_s),
            _number(row.eigenvalue.real),
            _number(row.eigenvalue.imag),
            _flag(row.converged),
        ])

    def append_sweep(self, row: SweepRow) -> Path:
        return self._append(self.sweep_path, SWEEP_HEADER, [
            row.method.value,
            row.case,
            '' if row.N is None else row.N,
            row.m,
            row.n_r,
            row.iterations,
            row.mv_total,
            _flag(row.converged),
        ])

    def _append(self, path: Path, header: list[str], cells: list) -> Path:
        """Append one row, writing the header first when the file is new or empty"""
        self.output_dir.mkdir(parents=True, exist_ok=True)
        new_file = not path.exists() or path.stat().st_size == 0
        with path.open('a', newline='') as handle:
            writer = csv.writer(handle, lineterminator='\n')
            if new_file:
                writer.writerow(header)
            writer.writerow(cells)
        return path

    @staticmethod
    def _history_row(record: RunRecord) -> list:
        spec = record.filter_used
        if spec is None:
            filter_cells = ['', '', '']
        else:
            filter_cells = [_number(spec.ellipse.d), _number(spec.ellipse.a_mod), spec.m]
        theta = complex(record.theta)
        return [
            record.step,
            _number(theta.real),
            _number(theta.imag),
            _number(record.res_norm),
            _number(record.rel_res_norm),
            record.mv_total,
            _number(record.elapsed_s),
            _flag(record.restarted),
            *filter_cells,
        ]
