from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from domain.entities.linalg import DenseColumns
from domain.entities.spectrum import EigenPairSet, FilterSpec
from domain.exceptions.exceptions import InvalidSolverConfigException


class Method(str, Enum):
    RFKS = 'rfks'
    FKS = 'fks'
    CD = 'cd'
    AC = 'ac'

    @classmethod
    def parse_list(cls, text: str) -> list['Method']:
        """Parse a comma separated method list such as 'rfks,fks,cd,ac'"""
        try:
            return [cls(token.strip().lower()) for token in text.split(',') if token.strip()]
        except ValueError as exc:
            raise InvalidSolverConfigException(f"unknown method in {text!r}") from exc


class SStrategyKind(str, Enum):
    LAST_VECTOR = 'last'
    WEIGHTED = 'weighted'
    RITZ_VECTOR = 'ritz'
    REFINED = 'refined'


@dataclass(frozen=True)
class SStrategy:
    """Rule for the combination vector s_k that seeds the filter"""
    kind: SStrategyKind
    beta: float = 0.5

    def __post_init__(self):
        if self.kind is SStrategyKind.WEIGHTED and not 0 < self.beta <= 1:
            raise InvalidSolverConfigException(f"weight ratio beta must lie in (0, 1], got {self.beta}")

    @classmethod
    def last_vector(cls) -> 'SStrategy':
        return cls(SStrategyKind.LAST_VECTOR)

    @classmethod
    def weighted(cls, beta: float) -> 'SStrategy':
        return cls(SStrategyKind.WEIGHTED, beta)

    @classmethod
    def ritz_vector(cls) -> 'SStrategy':
        return cls(SStrategyKind.RITZ_VECTOR)

    @classmethod
    def refined(cls) -> 'SStrategy':
        return cls(SStrategyKind.REFINED)

    @classmethod
    def parse(cls, text: str) -> 'SStrategy':
        """Parse 'last', 'ritz', 'refined' or 'weighted[:beta]'"""
        name, _, beta = text.strip().lower().partition(':')
        try:
            kind = SStrategyKind(name)
        except ValueError as exc:
            raise InvalidSolverConfigException(f"unknown s strategy {text!r}") from exc
        if kind is SStrategyKind.WEIGHTED and beta:
            return cls(kind, float(beta))
        return cls(kind)

    def __str__(self) -> str:
        if self.kind is SStrategyKind.WEIGHTED:
            return f"weighted:{self.beta:g}"
        return self.kind.value


class FilterPolicy(str, Enum):
    DYNAMIC = 'dynamic'
    WARMUP_FROZEN = 'frozen'


@dataclass(frozen=True)
class SolverConfig:
    """Parameters shared by the four eigensolvers"""
    method: Method
    m: int
    n_r: int
    tol: float = 1e-10
    max_outer: int = 20000
    s_strategy: SStrategy = field(default_factory=SStrategy.refined)
    zeta_fraction: float = 0.5
    arnoldi_warmup: int = 20
    filter_policy: FilterPolicy = FilterPolicy.DYNAMIC
    seed: int = 0

    def __post_init__(self):
        if self.m < 1:
            raise InvalidSolverConfigException(f"filter degree m must be >= 1, got {self.m}")
        if self.n_r < 2:
            raise InvalidSolverConfigException(f"restart number n_r must be >= 2, got {self.n_r}")
        if not self.tol > 0:
            raise InvalidSolverConfigException(f"tolerance must be positive, got {self.tol}")
        if self.max_outer < 1:
            raise InvalidSolverConfigException(f"max_outer must be >= 1, got {self.max_outer}")
        if not 0 < self.zeta_fraction < 1:
            raise InvalidSolverConfigException(f"zeta_fraction must lie in (0, 1), got {self.zeta_fraction}")
        if self.arnoldi_warmup < 1:
            raise InvalidSolverConfigException(f"arnoldi_warmup must be >= 1, got {self.arnoldi_warmup}")


@dataclass(eq=False)
class SubspaceState:
    """Growing orthonormal basis V, its image W = A V and the projected data"""
    V: DenseColumns
    W: DenseColumns
    H: np.ndarray
    WtW: np.ndarray
    WtV: np.ndarray
    ritz: Optional[EigenPairSet] = None
    x_cur: Optional[np.ndarray] = None
    theta_cur: complex = 0j
    res_norm: float = float('inf')

    @property
    def k(self) -> int:
        return self.V.k

    @property
    def y_cur(self) -> np.ndarray:
        """Leading (complex, unit) eigenvector of H"""
        return self.ritz.leading_vector


@dataclass(frozen=True)
class RunRecord:
    """One Rayleigh-Ritz process (one AC cycle) of a solver run"""
    step: int
    theta: complex
    res_norm: float
    rel_res_norm: float
    mv_total: int
    elapsed_s: float
    restarted: bool
    filter_used: Optional[FilterSpec]

    def trajectory(self) -> tuple:
        """Everything except the wall-clock time"""
        return (self.step, self.theta, self.res_norm, self.rel_res_norm,
                self.mv_total, self.restarted, self.filter_used)


@dataclass(eq=False)
class SolveResult:
    """Rightmost eigenpair approximation and the run history"""
    method: Method
    eigenvalue: complex
    eigenvector: np.ndarray
    history: list[RunRecord]
    converged: bool
    mv_total: int
    res_norm0: float

    @property
    def iterations(self) -> int:
        return len(self.history)

    @property
    def elapsed_s(self) -> float:
        return self.history[-1].elapsed_s if self.history else 0.0

    def __iter__(self):
        """Unpack as (eigenvalue, eigenvector, history)"""
        return iter((self.eigenvalue, self.eigenvector, self.history))
