"""Rayleigh-Ritz subspace engine shared by the eigensolvers."""
from typing import NamedTuple

import numpy as np

from domain.entities.linalg import CsrMatrix, DenseColumns, MatvecCounter
from domain.entities.solver import SStrategy, SStrategyKind, SubspaceState
from domain.exceptions.exceptions import DimensionMismatchException, SubspaceExhaustedException
from domain.services.core_linalg import matvec, mgs_orthonormalize, real_unit_vector
from domain.services.dense_eig import eig_real, refined_s


class ArnoldiFactorization(NamedTuple):
    """A V_k = V_{k+1} Hbar_k, or A V_k = V_k H_k after a breakdown"""
    V: np.ndarray
    H: np.ndarray
    breakdown: bool

    @property
    def steps(self) -> int:
        return self.H.shape[1]

    @property
    def square_H(self) -> np.ndarray:
        return self.H[:self.steps, :self.steps]

    @property
    def basis(self) -> np.ndarray:
        """The k columns the square H is expressed in"""
        return self.V[:, :self.steps]

    @property
    def subdiagonal(self) -> float:
        """h_{k+1,k}, zero after a breakdown"""
        return 0.0 if self.breakdown else float(self.H[-1, -1])


def arnoldi(A: CsrMatrix, v0: np.ndarray, steps: int, counter: MatvecCounter) -> ArnoldiFactorization:
    """Arnoldi process with modified Gram-Schmidt; stops early on an invariant subspace"""
    if not 1 <= steps <= A.n:
        raise DimensionMismatchException(f"steps must lie in [1, {A.n}], got {steps}")
    V = DenseColumns(n=A.n, capacity=steps + 1)
    V.append(np.asarray(v0, dtype=np.float64) / np.linalg.norm(v0))
    H = np.zeros((steps + 1, steps))

    for j in range(steps):
        w = matvec(A, V.column(j), counter)
        try:
            v_new, h = mgs_orthonormalize(V.data, w)
        except SubspaceExhaustedException as exc:
            H[:j + 1, j] = exc.coefficients
            return ArnoldiFactorization(V=V.data.copy(), H=H[:j + 1, :j + 1].copy(), breakdown=True)
        H[:j + 1, j] = h
        H[j + 1, j] = v_new @ w
        V.append(v_new)
    return ArnoldiFactorization(V=V.data.copy(), H=H, breakdown=False)


def arnoldi_relation_residual(A: CsrMatrix, V: np.ndarray, H: np.ndarray) -> float:
    """Largest column norm of A V_k - V_{k+1} Hbar_k (uncounted products)"""
    k = H.shape[1]
    residual = A.scipy @ V[:, :k] - V[:, :H.shape[0]] @ H
    return float(np.max(np.linalg.norm(residual, axis=0)))


def start_subspace(A: CsrMatrix, v1: np.ndarray, counter: MatvecCounter, capacity: int = 8) -> SubspaceState:
    """One-dimensional subspace span{v1}; its Ritz value is the Rayleigh quotient"""
    v1 = np.asarray(v1, dtype=np.float64)
    v1 = v1 / np.linalg.norm(v1)
    w1 = matvec(A, v1, counter)
    V = DenseColumns(n=A.n, capacity=capacity)
    W = DenseColumns(n=A.n, capacity=capacity)
    V.append(v1)
    W.append(w1)
    state = SubspaceState(
        V=V,
        W=W,
        H=np.array([[v1 @ w1]]),
        WtW=np.array([[w1 @ w1]]),
        WtV=np.array([[w1 @ v1]]),
    )
    _refresh_ritz(state)
    return state


def rr_extend(state: SubspaceState, A: CsrMatrix, z: np.ndarray, counter: MatvecCounter) -> SubspaceState:
    """
    Extend the basis by z and redo the Rayleigh-Ritz projection.

    The projected matrix and the cross products W^T W, W^T V are bordered
    with one new row and column; only w_{k+1} = A v_{k+1} costs a product.

    Raises:
        SubspaceExhaustedException: z adds no new direction
    """
    Vk, Wk = state.V.data, state.W.data
    v_new, _ = mgs_orthonormalize(Vk, z)
    w_new = matvec(A, v_new, counter)

    h_upper = Vk.T @ w_new
    h_lower = Wk.T @ v_new
    h_corner = v_new @ w_new
    g = Wk.T @ w_new

    state.H = np.block([[state.H, h_upper[:, None]], [h_lower[None, :], np.array([[h_corner]])]])
    state.WtW = np.block([[state.WtW, g[:, None]], [g[None, :], np.array([[w_new @ w_new]])]])
    state.WtV = np.block([[state.WtV, h_lower[:, None]], [h_upper[None, :], np.array([[h_corner]])]])
    state.V.append(v_new)
    state.W.append(w_new)
    _refresh_ritz(state)
    return state


def _refresh_ritz(state: SubspaceState):
    """Ritz pairs of H, current Ritz vector and residual ||W y1 - theta1 V y1||"""
    ritz = eig_real(state.H)
    y1 = ritz.leading_vector
    theta1 = ritz.leading_value
    Vy = state.V.data @ y1
    Wy = state.W.data @ y1
    state.ritz = ritz
    state.theta_cur = theta1
    state.res_norm = float(np.linalg.norm(Wy - theta1 * Vy))
    state.x_cur = real_unit_vector(Vy)


def select_s(strategy: SStrategy, state: SubspaceState) -> np.ndarray:
    """Unit combination vector s_k; the filter starts from V_k s_k"""
    k = state.k
    if k == 1:
        return np.ones(1)
    if strategy.kind is SStrategyKind.LAST_VECTOR:
        s = np.zeros(k)
        s[-1] = 1.0
        return s
    if strategy.kind is SStrategyKind.WEIGHTED:
        weights = strategy.beta ** np.arange(k - 1, -1, -1, dtype=np.float64)
        return weights / np.linalg.norm(weights)
    if strategy.kind is SStrategyKind.RITZ_VECTOR:
        return real_unit_vector(state.y_cur)
    s, _ = refined_s(state.V.data, state.W.data, state.H, state.theta_cur,
                     WtW=state.WtW, WtV=state.WtV)
    return s
