from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Optional

from domain.entities.solver import FilterPolicy, Method, SStrategy
from domain.exceptions.exceptions import InvalidSolverConfigException, ProblemException


class PdeKind(str, Enum):
    CASE_I = 'case1'
    CASE_II = 'case2'


@dataclass(frozen=True)
class PdeCase:
    """Convection-diffusion test operator on an N x N interior grid"""
    kind: PdeKind
    N: int

    def __post_init__(self):
        if self.N < 1:
            raise ProblemException(f"grid size N must be >= 1, got {self.N}")

    @property
    def dimension(self) -> int:
        return self.N * self.N

    @property
    def h(self) -> float:
        """Mesh width on [-1, 1]^2"""
        return 2.0 / (self.N + 1)


@dataclass(frozen=True)
class BenchSpec:
    """One `run` invocation: a problem, the methods to compare and their parameters"""
    problem: str
    methods: list[Method]
    m: int
    n_r: int
    output_dir: Path
    N: Optional[int] = None
    ac_n_r: Optional[int] = None
    tol: float = 1e-10
    max_outer: int = 20000
    s_strategy: SStrategy = field(default_factory=SStrategy.refined)
    zeta_fraction: float = 0.5
    arnoldi_warmup: int = 20
    filter_policy: FilterPolicy = FilterPolicy.DYNAMIC
    seed: int = 0

    def __post_init__(self):
        if not self.methods:
            raise InvalidSolverConfigException("at least one method is required")
        if self.is_pde and (self.N is None or self.N < 1):
            raise ProblemException(f"problem {self.problem!r} needs a grid size N >= 1")

    @property
    def is_pde(self) -> bool:
        return self.problem in {kind.value for kind in PdeKind}

    @property
    def case_label(self) -> str:
        if self.problem.startswith('mm:'):
            return Path(self.problem[3:]).stem
        return self.problem

    def cycle_length(self, method: Method) -> int:
        """Restart number, or the Arnoldi cycle length for AC"""
        if method is Method.AC and self.ac_n_r is not None:
            return self.ac_n_r
        return self.n_r


@dataclass(frozen=True)
class SummaryRow:
    """One line of summary.csv: the IT/MV/CPU figures of one method on one case"""
    method: Method
    case: str
    N: Optional[int]
    m: int
    n_r: int
    iterations: int
    mv_total: int
    cpu_s: float
    eigenvalue: complex
    converged: bool


class SweepAxis(str, Enum):
    RESTART = 'nr'
    DEGREE = 'm'


@dataclass(frozen=True)
class SweepSpec:
    """One `sweep` invocation: MV against the restart number or the filter degree"""
    problem: str
    methods: list[Method]
    axis: SweepAxis
    values: list[int]
    fixed: int
    output_dir: Path
    N: Optional[int] = None
    tol: float = 1e-10
    max_outer: int = 20000
    zeta_fraction: float = 0.5
    arnoldi_warmup: int = 20
    seed: int = 0

    def __post_init__(self):
        if not self.values:
            raise InvalidSolverConfigException("a sweep needs at least one value")
        if any(value < 1 for value in self.values) or self.fixed < 1:
            raise InvalidSolverConfigException(f"sweep values must be >= 1, got {self.values} and {self.fixed}")

    def points(self) -> list[tuple[int, int]]:
        """(m, n_r) for every swept value, in the given order"""
        if self.axis is SweepAxis.RESTART:
            return [(self.fixed, value) for value in self.values]
        return [(value, self.fixed) for value in self.values]

    def bench_spec(self, m: int, n_r: int) -> BenchSpec:
        return BenchSpec(
            problem=self.problem,
            methods=self.methods,
            m=m,
            n_r=n_r,
            output_dir=self.output_dir,
            N=self.N,
            tol=self.tol,
            max_outer=self.max_outer,
            zeta_fraction=self.zeta_fraction,
            arnoldi_warmup=self.arnoldi_warmup,
            seed=self.seed,
        )


@dataclass(frozen=True)
class SweepRow:
    """One line of sweep.csv"""
    method: Method
    case: str
    N: Optional[int]
    m: int
    n_r: int
    iterations: int
    mv_total: int
    converged: bool
