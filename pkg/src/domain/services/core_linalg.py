"""Counted sparse products and modified Gram-Schmidt orthonormalization."""
import math

import numpy as np

from domain.entities.linalg import CsrMatrix, MatvecCounter
from domain.exceptions.exceptions import DimensionMismatchException, SubspaceExhaustedException

REORTHOGONALIZATION_RATIO = 1 / math.sqrt(2)
BREAKDOWN_TOLERANCE = 1e-14


def matvec(A: CsrMatrix, x: np.ndarray, counter: MatvecCounter) -> np.ndarray:
    """y = A x, one counted product"""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (A.n,):
        raise DimensionMismatchException(f"matrix is {A.n} x {A.n} but vector has shape {x.shape}")
    y = A.scipy @ x
    counter.increment()
    return y


def mgs_orthonormalize(V: np.ndarray, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Orthonormalize z against the orthonormal columns of V.

    One modified Gram-Schmidt sweep, repeated once when the norm drops
    below 1/sqrt(2) of its value before projection.

    Returns:
        (v_new, h): unit vector orthogonal to V and the projection coefficients

    Raises:
        SubspaceExhaustedException: z lies (numerically) in span(V)
    """
    z = np.array(z, dtype=np.float64)
    k = V.shape[1] if V.ndim == 2 else 0
    if V.ndim == 2 and V.shape[0] != z.size:
        raise DimensionMismatchException(f"basis has {V.shape[0]} rows, vector has {z.size}")
    norm_in = np.linalg.norm(z)
    if norm_in == 0:
        raise SubspaceExhaustedException("zero vector cannot extend the basis")

    h = np.zeros(k)
    norm_out = _mgs_sweep(V, z, h)
    if norm_out < REORTHOGONALIZATION_RATIO * norm_in:
        norm_out = _mgs_sweep(V, z, h)
    if norm_out <= BREAKDOWN_TOLERANCE * norm_in:
        raise SubspaceExhaustedException(
            f"residual norm {norm_out:.3e} after projection onto {k} columns (input norm {norm_in:.3e})",
            coefficients=h,
        )
    return z / norm_out, h


def _mgs_sweep(V: np.ndarray, z: np.ndarray, h: np.ndarray) -> float:
    for j in range(h.size):
        coefficient = V[:, j] @ z
        z -= coefficient * V[:, j]
        h[j] += coefficient
    return float(np.linalg.norm(z))


def real_unit_vector(y: np.ndarray) -> np.ndarray:
    """
    Real unit vector closest in direction to a (possibly complex) vector.

    The phase of y is rotated so that its real part has maximal norm
    before the real part is taken and renormalized.
    """
    y = np.asarray(y)
    if np.iscomplexobj(y):
        if np.any(y.imag != 0):
            phase = np.angle(np.sum(y * y)) / 2
            y = y * np.exp(-1j * phase)
        y = y.real
    norm = np.linalg.norm(y)
    if norm == 0:
        raise SubspaceExhaustedException("vector has no real component")
    return y / norm
