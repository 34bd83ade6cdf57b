from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import sparse

from domain.exceptions.exceptions import InvalidMatrixException


@dataclass(frozen=True, eq=False)
class CsrMatrix:
    """Real sparse n x n matrix in compressed-sparse-row form"""
    n: int
    row_ptr: np.ndarray
    col_idx: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        row_ptr = np.asarray(self.row_ptr, dtype=np.int64)
        col_idx = np.asarray(self.col_idx, dtype=np.int64)
        values = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, 'row_ptr', row_ptr)
        object.__setattr__(self, 'col_idx', col_idx)
        object.__setattr__(self, 'values', values)
        self._validate()

    def _validate(self):
        """Check the CSR structural invariants"""
        if self.n < 0:
            raise InvalidMatrixException(f"negative dimension {self.n}")
        if self.row_ptr.shape != (self.n + 1,):
            raise InvalidMatrixException(
                f"row_ptr has length {self.row_ptr.size}, expected {self.n + 1}"
            )
        if self.row_ptr[0] != 0 or np.any(np.diff(self.row_ptr) < 0):
            raise InvalidMatrixException("row_ptr must start at 0 and be non-decreasing")
        nnz = int(self.row_ptr[-1])
        if self.col_idx.size != nnz or self.values.size != nnz:
            raise InvalidMatrixException(
                f"row_ptr[n]={nnz} but col_idx/values have "
                f"{self.col_idx.size}/{self.values.size} entries"
            )
        if nnz and (self.col_idx.min() < 0 or self.col_idx.max() >= self.n):
            raise InvalidMatrixException("column index out of range")
        # strictly increasing columns inside each row
        if nnz > 1:
            steps = np.diff(self.col_idx)
            row_starts = np.zeros(nnz, dtype=bool)
            row_starts[self.row_ptr[:-1][self.row_ptr[:-1] < nnz]] = True
            if np.any(steps[~row_starts[1:]] <= 0):
                raise InvalidMatrixException("column indices must increase strictly within a row")

    @classmethod
    def from_triplets(cls, n: int, rows, cols, vals) -> 'CsrMatrix':
        """Assemble from (row, col, value) triplets; duplicates are summed, order is free"""
        coo = sparse.coo_matrix(
            (np.asarray(vals, dtype=np.float64),
             (np.asarray(rows, dtype=np.int64), np.asarray(cols, dtype=np.int64))),
            shape=(n, n),
        )
        return cls.from_scipy(coo)

    @classmethod
    def from_scipy(cls, matrix) -> 'CsrMatrix':
        """Wrap any square scipy sparse matrix"""
        if matrix.shape[0] != matrix.shape[1]:
            raise InvalidMatrixException(f"matrix is not square: {matrix.shape}")
        csr = sparse.csr_matrix(matrix, dtype=np.float64)
        csr.sum_duplicates()
        csr.sort_indices()
        return cls(n=csr.shape[0], row_ptr=csr.indptr, col_idx=csr.indices, values=csr.data)

    @classmethod
    def from_dense(cls, array) -> 'CsrMatrix':
        return cls.from_scipy(sparse.csr_matrix(np.asarray(array, dtype=np.float64)))

    @property
    def nnz(self) -> int:
        return int(self.row_ptr[-1])

    @cached_property
    def scipy(self) -> sparse.csr_matrix:
        """scipy view sharing this matrix's arrays"""
        return sparse.csr_matrix((self.values, self.col_idx, self.row_ptr), shape=(self.n, self.n))

    def to_dense(self) -> np.ndarray:
        return self.scipy.toarray()

    def frobenius_norm(self) -> float:
        return float(np.linalg.norm(self.values))


@dataclass
class MatvecCounter:
    """Number of products with the large sparse matrix (the MV metric)"""
    count: int = 0

    def increment(self):
        self.count += 1


@dataclass(eq=False)
class DenseColumns:
    """Tall n x k block stored column-major, grown one column at a time"""
    n: int
    capacity: int = 1
    k: int = 0
    _data: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self._data = np.zeros((self.n, max(self.capacity, 1)), order='F')

    @classmethod
    def from_array(cls, array) -> 'DenseColumns':
        array = np.asarray(array, dtype=np.float64)
        if array.ndim == 1:
            array = array[:, None]
        block = cls(n=array.shape[0], capacity=array.shape[1])
        block._data[:, :array.shape[1]] = array
        block.k = array.shape[1]
        return block

    @property
    def data(self) -> np.ndarray:
        """The k filled columns (a view)"""
        return self._data[:, :self.k]

    def column(self, j: int) -> np.ndarray:
        return self._data[:, j]

    def append(self, column: np.ndarray):
        if self.k == self._data.shape[1]:
            grown = np.zeros((self.n, 2 * self._data.shape[1]), order='F')
            grown[:, :self.k] = self._data[:, :self.k]
            self._data = grown
            self.capacity = grown.shape[1]
        self._data[:, self.k] = column
        self.k += 1

    def orthonormality_error(self) -> float:
        """max |V^T V - I| over the filled columns"""
        if self.k == 0:
            return 0.0
        gram = self.data.T @ self.data
        return float(np.max(np.abs(gram - np.eye(self.k))))
