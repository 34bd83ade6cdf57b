"""Eigensolvers for the small dense projected matrices."""
from typing import Optional

import numpy as np
from scipy import linalg

from domain.entities.spectrum import EigenPairSet
from domain.exceptions.exceptions import DimensionMismatchException, EigFailedException
from domain.services.core_linalg import real_unit_vector

HERMITIAN_TOLERANCE = 1e-10


def eig_real(M: np.ndarray) -> EigenPairSet:
    """
    All eigenpairs of a real square matrix, sorted by decreasing real part.

    Ties on the real part are broken by decreasing imaginary part, then by
    the LAPACK index, so a conjugate pair always lists +Im first.
    """
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
        raise DimensionMismatchException(f"expected a non-empty square matrix, got shape {M.shape}")
    try:
        values, vectors = linalg.eig(M, check_finite=True)
    except (linalg.LinAlgError, ValueError) as exc:
        raise EigFailedException(f"QR iteration failed on a {M.shape[0]} x {M.shape[0]} matrix: {exc}") from exc
    index = np.arange(values.size)
    order = np.lexsort((index, -values.imag, -values.real))
    return EigenPairSet(values=values[order], vectors=vectors[:, order], order=order)


def hermitian_smallest_eigvec(M: np.ndarray) -> tuple[float, np.ndarray]:
    """Algebraically smallest eigenvalue of a Hermitian matrix and a unit eigenvector"""
    M = np.asarray(M)
    scale = max(1.0, float(np.linalg.norm(M)))
    asymmetry = float(np.max(np.abs(M - M.conj().T))) if M.size else 0.0
    if asymmetry > HERMITIAN_TOLERANCE * scale:
        raise AssertionError(f"matrix is not Hermitian: asymmetry {asymmetry:.3e}")
    M = (M + M.conj().T) / 2
    values, vectors = linalg.eigh(M, subset_by_index=[0, 0])
    return float(values[0]), vectors[:, 0]


def refined_s(V: np.ndarray, W: np.ndarray, H: np.ndarray, theta: complex,
              WtW: Optional[np.ndarray] = None,
              WtV: Optional[np.ndarray] = None) -> tuple[np.ndarray, float]:
    """
    Refined combination vector: argmin over unit s of ||(A - theta I) V s||.

    Uses the cross-product matrix
        Hhat = W^T W - conj(theta) W^T V - theta V^T W + |theta|^2 I
    WtW and WtV may be supplied when they are kept up to date
    incrementally; otherwise they are formed from W and V. For complex
    theta the minimizer is complex and its phase-aligned real part is
    returned.

    Returns:
        (s, sigma_min)
    """
    H = np.asarray(H, dtype=np.float64)
    k = H.shape[0]
    if k == 0:
        raise DimensionMismatchException("refined vector needs a non-empty basis")
    if WtW is None:
        WtW = W.T @ W
    if WtV is None:
        WtV = W.T @ V
    theta = complex(theta)
    if theta.imag == 0:
        t = theta.real
        Hhat = WtW - t * WtV - t * WtV.T + t * t * np.eye(k)
    else:
        Hhat = WtW - np.conj(theta) * WtV - theta * WtV.T + abs(theta) ** 2 * np.eye(k)
    value, vec = hermitian_smallest_eigvec(Hhat)
    sigma_min = float(np.sqrt(max(0.0, value)))
    if np.iscomplexobj(vec):
        vec = real_unit_vector(vec)
    else:
        vec = vec / np.linalg.norm(vec)
    return vec, sigma_min
