from pathlib import Path
from typing import Optional

from application.interfaces.repositories import MatrixFileRepository, MatrixRepository
from domain.entities.linalg import CsrMatrix
from domain.entities.problem import PdeCase, PdeKind
from domain.exceptions.exceptions import ProblemException
from domain.services.problems import assemble_pde
from infrastructure.repositories.matrix_market_repository import MatrixMarketRepository


class ProblemMatrixRepository(MatrixRepository):
    """Assembles the PDE operators and reads 'mm:<path>' problems from disk"""

    def __init__(self, file_repository: Optional[MatrixFileRepository] = None):
        self.file_repository = file_repository or MatrixMarketRepository()

    def load(self, problem: str, N: int = None) -> CsrMatrix:
        if problem.startswith('mm:'):
            return self.file_repository.read(Path(problem[3:]))
        try:
            kind = PdeKind(problem)
        except ValueError:
            raise ProblemException(
                f"unknown problem {problem!r}; expected case1, case2 or mm:<path>"
            ) from None
        if N is None:
            raise ProblemException(f"problem {problem!r} needs a grid size N")
        return assemble_pde(PdeCase(kind, N))
