"""
Rightmost-eigenpair solvers: RFKS, FKS, Chebyshev-Davidson and Arnoldi-Chebyshev.

RFKS, FKS and CD share one engine that grows a Rayleigh-Ritz subspace by
filtered vectors p(A) V_k s_k; they differ only in the choice of s_k and in
whether the filter is rebuilt every step or frozen per restart cycle. AC
alternates fixed-length Arnoldi cycles with one Chebyshev-filtered restart
vector.
"""
import logging
import time
from dataclasses import replace
from typing import Callable, Optional

import numpy as np

from domain.entities.linalg import CsrMatrix, DenseColumns, MatvecCounter
from domain.entities.spectrum import FilterSpec, describe_filter
from domain.entities.solver import (
    FilterPolicy,
    Method,
    RunRecord,
    SolveResult,
    SolverConfig,
    SStrategy,
    SubspaceState,
)
from domain.exceptions.exceptions import (
    FilterDegenerateException,
    NoSeparationException,
    NotConvergedException,
    RangeExceededException,
    SubspaceExhaustedException,
)
from domain.services.chebyshev_filter import chebyshev_apply, determine_ellipse
from domain.services.core_linalg import matvec, real_unit_vector
from domain.services.dense_eig import eig_real
from domain.services.rayleigh_ritz import arnoldi, rr_extend, select_s, start_subspace

logger = logging.getLogger(__name__)

StepObserver = Callable[[SubspaceState, RunRecord], None]

PERTURBATION = 1e-8


def rfks_solve(A: CsrMatrix, config: SolverConfig, v0: np.ndarray,
               counter: Optional[MatvecCounter] = None,
               on_step: Optional[StepObserver] = None) -> SolveResult:
    """Relaxed filtered Krylov subspace method with the configured s_k rule and filter policy"""
    return _FilteredKrylovRun(A, config, config.s_strategy, config.filter_policy,
                              counter, on_step).solve(v0)


def fks_solve(A: CsrMatrix, config: SolverConfig, v0: np.ndarray,
              counter: Optional[MatvecCounter] = None,
              on_step: Optional[StepObserver] = None) -> SolveResult:
    """Filtered Krylov subspace method: last basis vector, filter fixed by an Arnoldi warmup"""
    config = replace(config, method=Method.FKS)
    return _FilteredKrylovRun(A, config, SStrategy.last_vector(), FilterPolicy.WARMUP_FROZEN,
                              counter, on_step).solve(v0)


def cd_solve(A: CsrMatrix, config: SolverConfig, v0: np.ndarray,
             counter: Optional[MatvecCounter] = None,
             on_step: Optional[StepObserver] = None) -> SolveResult:
    """Chebyshev-Davidson method: the filter starts from the current Ritz vector"""
    config = replace(config, method=Method.CD)
    return _FilteredKrylovRun(A, config, SStrategy.ritz_vector(), FilterPolicy.DYNAMIC,
                              counter, on_step).solve(v0)


def ac_solve(A: CsrMatrix, config: SolverConfig, v0: np.ndarray,
             counter: Optional[MatvecCounter] = None,
             on_step: Optional[StepObserver] = None) -> SolveResult:
    """
    Arnoldi-Chebyshev method.

    Each cycle runs n_r Arnoldi steps, extracts the rightmost Ritz pair,
    filters its (real) Ritz vector with an m-degree Chebyshev polynomial
    and restarts from the filtered vector, so a cycle costs n_r + m products.
    """
    config = replace(config, method=Method.AC)
    counter = MatvecCounter() if counter is None else counter
    started = time.perf_counter()
    steps = min(config.n_r, A.n)
    start = np.asarray(v0, dtype=np.float64) / np.linalg.norm(v0)
    history: list[RunRecord] = []
    res0 = None
    best = None

    for cycle in range(1, config.max_outer + 1):
        factorization = arnoldi(A, start, steps, counter)
        if res0 is None:
            res0 = abs(factorization.H[1, 0]) if factorization.H.shape[0] > 1 else 0.0
        ritz = eig_real(factorization.square_H)
        theta = ritz.leading_value
        y1 = ritz.leading_vector
        res_norm = factorization.subdiagonal * abs(y1[-1])
        x = real_unit_vector(factorization.basis @ y1)
        if best is None or res_norm < best[2]:
            best = (theta, x, res_norm)

        spec = _filter_from_ritz_values(ritz.values, config)
        start, spec = _ac_restart_vector(A, x, spec, config.m, counter)

        record = RunRecord(
            step=cycle,
            theta=theta,
            res_norm=res_norm,
            rel_res_norm=res_norm / res0 if res0 > 0 else 0.0,
            mv_total=counter.count,
            elapsed_s=time.perf_counter() - started,
            restarted=cycle > 1,
            filter_used=spec,
        )
        history.append(record)
        logger.debug("ac cycle %d theta=%s rel=%.3e mv=%d", cycle, theta, record.rel_res_norm, counter.count)
        if on_step is not None:
            on_step(_arnoldi_state(factorization, ritz, x, theta, res_norm), record)
        if record.rel_res_norm <= config.tol:
            return SolveResult(Method.AC, theta, x, history, True, counter.count, res0)

    theta, x, _ = best
    result = SolveResult(Method.AC, theta, x, history, False, counter.count, res0)
    logger.warning("ac did not converge in %d cycles (rel residual %.3e)",
                   config.max_outer, history[-1].rel_res_norm)
    raise NotConvergedException(f"ac did not converge within {config.max_outer} cycles", result=result)


def solve(A: CsrMatrix, config: SolverConfig, v0: np.ndarray,
          counter: Optional[MatvecCounter] = None,
          on_step: Optional[StepObserver] = None) -> SolveResult:
    """Dispatch on config.method"""
    solver = {
        Method.RFKS: rfks_solve,
        Method.FKS: fks_solve,
        Method.CD: cd_solve,
        Method.AC: ac_solve,
    }[config.method]
    return solver(A, config, v0, counter=counter, on_step=on_step)


class _FilteredKrylovRun:
    """One run of the relaxed filtered Krylov engine"""

    def __init__(self, A: CsrMatrix, config: SolverConfig, strategy: SStrategy,
                 policy: FilterPolicy, counter: Optional[MatvecCounter],
                 on_step: Optional[StepObserver]):
        self.A = A
        self.config = config
        self.strategy = strategy
        self.policy = policy
        self.counter = MatvecCounter() if counter is None else counter
        self.on_step = on_step
        self.rng = np.random.default_rng(config.seed)
        self.history: list[RunRecord] = []
        self.res0 = 0.0
        self._started = 0.0
        self._cycle_filter: Optional[FilterSpec] = None
        self._cycle_filter_ready = False
        self._leftmost: Optional[float] = None
        self._best = None

    def solve(self, v0: np.ndarray) -> SolveResult:
        config = self.config
        self._started = time.perf_counter()
        state = self._reseed(v0)
        self.res0 = state.res_norm
        record = self._record(state, 0, False, None)

        step = 0
        while record.rel_res_norm > config.tol:
            if step >= config.max_outer:
                return self._not_converged(state)
            step += 1
            if state.k >= config.n_r:
                state = self._reseed(state.x_cur)
                record = self._record(state, step, True, None)
                continue

            spec = self._filter_for(state)
            s = select_s(self.strategy, state)
            z, spec = self._apply_filter(state, s, spec)
            restarted = False
            try:
                state = rr_extend(state, self.A, z, self.counter)
            except SubspaceExhaustedException as exc:
                logger.info("%s: subspace exhausted at k=%d (%s); restarting from a perturbed Ritz vector",
                            config.method.value, state.k, exc)
                state = self._reseed(self._perturb(state.x_cur))
                restarted = True
            record = self._record(state, step, restarted, spec)

        return SolveResult(config.method, state.theta_cur, state.x_cur, self.history,
                           True, self.counter.count, self.res0)

    def _reseed(self, v1: np.ndarray) -> SubspaceState:
        """Start or restart: V_1 = [v1], new filter cycle"""
        self._cycle_filter_ready = False
        return start_subspace(self.A, v1, self.counter, capacity=self.config.n_r)

    def _filter_for(self, state: SubspaceState) -> Optional[FilterSpec]:
        """
        Filter for this step; None means p(lambda) = lambda.

        A frozen filter is calibrated when its cycle starts and used from
        the first extension on, so every cycle spans K(p(A), v1). A dynamic
        filter needs an unwanted Ritz value, which k = 1 does not have.
        """
        if self.policy is FilterPolicy.WARMUP_FROZEN:
            if not self._cycle_filter_ready:
                self._cycle_filter = self._warmup_filter(state.V.column(0))
                self._cycle_filter_ready = True
            return self._cycle_filter
        if state.k < 2:
            return None
        return self._filter_from(state.ritz.values)

    def _warmup_filter(self, v1: np.ndarray) -> Optional[FilterSpec]:
        steps = min(self.config.arnoldi_warmup, self.A.n)
        factorization = arnoldi(self.A, v1, steps, self.counter)
        spec = self._filter_from(eig_real(factorization.square_H).values)
        logger.debug("%s: warmup filter %s", self.config.method.value, describe_filter(spec))
        return spec

    def _filter_from(self, values: np.ndarray) -> Optional[FilterSpec]:
        """
        Filter from the current Ritz values, widened to the leftmost unwanted
        real part seen so far in the run.

        Ritz values of a filtered subspace lose the far end of the spectrum
        within a few steps; a circle that stops short of it by more than the
        gap Re(lambda_1) - x+ amplifies those modes instead of lambda_1.
        """
        unwanted = _unwanted_ritz_values(values)
        if unwanted.size:
            left = float(np.min(unwanted.real))
            self._leftmost = left if self._leftmost is None else min(self._leftmost, left)
        return _filter_from_ritz_values(values, self.config, leftmost=self._leftmost)

    def _apply_filter(self, state: SubspaceState, s: np.ndarray,
                      spec: Optional[FilterSpec]) -> tuple[np.ndarray, Optional[FilterSpec]]:
        """z = p(A) V s; the identity filter is read off W s without a product"""
        if spec is None:
            return state.W.data @ s, None
        try:
            return chebyshev_apply(self.A, state.V.data @ s, spec, self.counter), spec
        except (FilterDegenerateException, RangeExceededException) as exc:
            logger.info("%s: filter fallback to identity: %s", self.config.method.value, exc)
            return state.W.data @ s, None

    def _perturb(self, x: np.ndarray) -> np.ndarray:
        noise = self.rng.uniform(-1.0, 1.0, x.size)
        return x + PERTURBATION * np.linalg.norm(x) * noise / np.linalg.norm(noise)

    def _record(self, state: SubspaceState, step: int, restarted: bool,
                spec: Optional[FilterSpec]) -> RunRecord:
        record = RunRecord(
            step=step,
            theta=state.theta_cur,
            res_norm=state.res_norm,
            rel_res_norm=state.res_norm / self.res0 if self.res0 > 0 else 0.0,
            mv_total=self.counter.count,
            elapsed_s=time.perf_counter() - self._started,
            restarted=restarted,
            filter_used=spec,
        )
        self.history.append(record)
        if self._best is None or state.res_norm < self._best[2]:
            self._best = (state.theta_cur, state.x_cur.copy(), state.res_norm)
        logger.debug("%s step %d k=%d theta=%s rel=%.3e mv=%d %s", self.config.method.value, step,
                     state.k, state.theta_cur, record.rel_res_norm, record.mv_total,
                     describe_filter(spec))
        if self.on_step is not None:
            self.on_step(state, record)
        return record

    def _not_converged(self, state: SubspaceState) -> SolveResult:
        theta, x, _ = self._best
        result = SolveResult(self.config.method, theta, x, self.history, False,
                             self.counter.count, self.res0)
        logger.warning("%s did not converge in %d steps (rel residual %.3e)",
                       self.config.method.value, self.config.max_outer, self.history[-1].rel_res_norm)
        raise NotConvergedException(
            f"{self.config.method.value} did not converge within {self.config.max_outer} steps",
            result=result,
        )


def _unwanted_ritz_values(values: np.ndarray) -> np.ndarray:
    """All Ritz values but theta_1 and, for complex theta_1, its conjugate"""
    theta1 = values[0]
    rest = values[1:]
    if theta1.imag != 0 and rest.size:
        partner = int(np.argmin(np.abs(rest - np.conj(theta1))))
        rest = np.delete(rest, partner)
    return rest


def _filter_from_ritz_values(values: np.ndarray, config: SolverConfig,
                             leftmost: Optional[float] = None) -> Optional[FilterSpec]:
    """
    Chebyshev filter around the unwanted Ritz values, or None when none can be built.

    A leftmost bound to the left of every unwanted value is added to the set
    as the real point (leftmost, 0); it can only move x- and hence d.
    """
    unwanted = _unwanted_ritz_values(values)
    if unwanted.size == 0:
        return None
    if leftmost is not None and leftmost < np.min(unwanted.real):
        unwanted = np.append(unwanted, leftmost)
    theta1 = complex(values[0])
    try:
        ellipse, _ = determine_ellipse(unwanted, theta1, config.zeta_fraction)
    except NoSeparationException as exc:
        logger.debug("no filter this step: %s", exc)
        return None
    return FilterSpec(ellipse=ellipse, m=config.m, lambda_ref=theta1.real)


def _ac_restart_vector(A: CsrMatrix, x: np.ndarray, spec: Optional[FilterSpec], m: int,
                       counter: MatvecCounter) -> tuple[np.ndarray, Optional[FilterSpec]]:
    """Filtered restart vector; falls back to m normalized power steps"""
    if spec is not None:
        try:
            z = chebyshev_apply(A, x, spec, counter)
            return z / np.linalg.norm(z), spec
        except (FilterDegenerateException, RangeExceededException) as exc:
            logger.info("ac: filter fallback to power steps: %s", exc)
    z = x
    for _ in range(m):
        image = matvec(A, z, counter)
        norm = np.linalg.norm(image)
        if norm == 0:
            break
        z = image / norm
    return z, None


def _arnoldi_state(factorization, ritz, x: np.ndarray, theta: complex, res_norm: float) -> SubspaceState:
    """SubspaceState view of an Arnoldi cycle (W = V_{k+1} Hbar needs no products)"""
    V = DenseColumns.from_array(factorization.basis)
    W = DenseColumns.from_array(factorization.V[:, :factorization.H.shape[0]] @ factorization.H)
    return SubspaceState(
        V=V,
        W=W,
        H=factorization.square_H,
        WtW=W.data.T @ W.data,
        WtV=W.data.T @ V.data,
        ritz=ritz,
        x_cur=x,
        theta_cur=theta,
        res_norm=res_norm,
    )
