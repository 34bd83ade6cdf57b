import logging
from pathlib import Path

import scipy.io as scio

from application.interfaces.repositories import MatrixFileRepository
from domain.entities.linalg import CsrMatrix
from domain.exceptions.exceptions import InvalidMatrixException, MatrixMarketParseException

logger = logging.getLogger(__name__)

BANNER = '%%matrixmarket'
SUPPORTED_FIELDS = {'real', 'integer'}
SUPPORTED_SYMMETRIES = {'general', 'symmetric', 'skew-symmetric'}


class MatrixMarketRepository(MatrixFileRepository):
    """Matrix Market coordinate files, read through scipy.io after a header check"""

    def read(self, path: Path) -> CsrMatrix:
        """
        Read a real coordinate file into CSR.

        Duplicate entries are summed and symmetric storage is expanded.

        Raises:
            MatrixMarketParseException: malformed header, size line or entries,
                with the offending line number
        """
        path = Path(path)
        try:
            with path.open('r', encoding='ascii', errors='replace') as handle:
                rows, cols, nnz, line_number = self._check_header(handle)
                self._check_entries(handle, line_number, rows, nnz)
        except OSError as exc:
            raise MatrixMarketParseException(f"cannot read {path}: {exc}") from exc

        try:
            matrix = scio.mmread(str(path))
        except (ValueError, IndexError, OverflowError) as exc:
            raise MatrixMarketParseException(f"{path}: malformed entries ({exc})") from exc

        try:
            csr = CsrMatrix.from_scipy(matrix)
        except InvalidMatrixException as exc:
            raise MatrixMarketParseException(f"{path}: {exc}") from exc
        logger.info("read %s: n=%d, %d stored entries, nnz=%d", path, rows, nnz, csr.nnz)
        return csr

    def write(self, matrix: CsrMatrix, path: Path) -> Path:
        """Write as 'coordinate real general' with 17 significant digits"""
        path = Path(path)
        if path.suffix != '.mtx':
            path = path.with_suffix(path.suffix + '.mtx')
        path.parent.mkdir(parents=True, exist_ok=True)
        scio.mmwrite(str(path), matrix.scipy, field='real', precision=17, symmetry='general')
        return path

    def _check_header(self, handle) -> tuple[int, int, int, int]:
        """Validate the banner and the size line; returns (rows, cols, entries, size line number)"""
        banner = handle.readline()
        tokens = banner.strip().lower().split()
        if not tokens or tokens[0] != BANNER:
            raise MatrixMarketParseException("missing %%MatrixMarket banner", line_number=1)
        if len(tokens) != 5:
            raise MatrixMarketParseException(
                f"banner needs 'matrix coordinate <field> <symmetry>', got {banner.strip()!r}",
                line_number=1,
            )
        _, obj, layout, field, symmetry = tokens
        if obj != 'matrix' or layout != 'coordinate':
            raise MatrixMarketParseException(
                f"only 'matrix coordinate' files are supported, got '{obj} {layout}'", line_number=1
            )
        if field not in SUPPORTED_FIELDS:
            raise MatrixMarketParseException(f"field must be real, got '{field}'", line_number=1)
        if symmetry not in SUPPORTED_SYMMETRIES:
            raise MatrixMarketParseException(f"unsupported symmetry '{symmetry}'", line_number=1)

        line_number = 1
        for line in handle:
            line_number += 1
            stripped = line.strip()
            if not stripped or stripped.startswith('%'):
                continue
            parts = stripped.split()
            try:
                rows, cols, nnz = (int(part) for part in parts)
            except ValueError:
                raise MatrixMarketParseException(
                    f"size line must hold three integers, got {stripped!r}", line_number=line_number
                ) from None
            if rows != cols:
                raise MatrixMarketParseException(
                    f"matrix must be square, got {rows} x {cols}", line_number=line_number
                )
            if rows < 0 or nnz < 0:
                raise MatrixMarketParseException("negative size", line_number=line_number)
            return rows, cols, nnz, line_number
        raise MatrixMarketParseException("missing size line", line_number=line_number + 1)

    def _check_entries(self, handle, line_number: int, n: int, nnz: int):
        """Each entry line holds 'i j value' with 1 <= i, j <= n, and there are nnz of them"""
        entries = 0
        for line in handle:
            line_number += 1
            stripped = line.strip()
            if not stripped or stripped.startswith('%'):
                continue
            entries += 1
            if entries > nnz:
                raise MatrixMarketParseException(
                    f"more entries than the {nnz} declared on the size line", line_number=line_number
                )
            parts = stripped.split()
            if len(parts) != 3:
                raise MatrixMarketParseException(
                    f"entry must be 'row col value', got {stripped!r}", line_number=line_number
                )
            try:
                i, j = int(parts[0]), int(parts[1])
                float(parts[2])
            except ValueError:
                raise MatrixMarketParseException(
                    f"malformed entry {stripped!r}", line_number=line_number
                ) from None
            if not (1 <= i <= n and 1 <= j <= n):
                raise MatrixMarketParseException(
                    f"index ({i}, {j}) outside the {n} x {n} matrix", line_number=line_number
                )
        if entries < nnz:
            raise MatrixMarketParseException(
                f"{entries} entries found, {nnz} declared on the size line", line_number=line_number + 1
            )
