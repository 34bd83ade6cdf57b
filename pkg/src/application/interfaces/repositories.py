from abc import ABC, abstractmethod
from pathlib import Path

from domain.entities.linalg import CsrMatrix
from domain.entities.problem import SummaryRow, SweepRow
from domain.entities.solver import SolveResult


class MatrixRepository(ABC):
    """Abstract source of benchmark matrices"""

    @abstractmethod
    def load(self, problem: str, N: int = None) -> CsrMatrix:
        """Matrix for 'case1', 'case2' (grid size N) or 'mm:<path>'"""
        pass


class MatrixFileRepository(ABC):
    """Abstract repository interface for matrix files"""

    @abstractmethod
    def read(self, path: Path) -> CsrMatrix:
        """Read a matrix file"""
        pass

    @abstractmethod
    def write(self, matrix: CsrMatrix, path: Path) -> Path:
        """Write a matrix file"""
        pass


class ResultRepository(ABC):
    """Abstract sink for run histories and summary rows"""

    @abstractmethod
    def save_history(self, result: SolveResult) -> Path:
        """Write the per-step history of one solver run"""
        pass

    @abstractmethod
    def append_summary(self, row: SummaryRow) -> Path:
        """Append one row to the summary table"""
        pass

    @abstractmethod
    def append_sweep(self, row: SweepRow) -> Path:
        """Append one row to the parameter sweep table"""
        pass
