import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import linalg, sparse

from domain.entities.linalg import CsrMatrix, DenseColumns, MatvecCounter
from domain.entities.problem import PdeCase, PdeKind
from domain.entities.solver import Method, SolverConfig
from domain.entities.spectrum import Ellipse, FilterSpec
from domain.exceptions.exceptions import DomainException
from domain.services.chebyshev_filter import (
    arithmetic_sqrt,
    chebyshev_apply,
    damping_report,
    filter_value,
    modulus_largest_root,
)
from domain.services.core_linalg import matvec, mgs_orthonormalize
from domain.services.dense_eig import eig_real, refined_s
from domain.services.problems import assemble_pde
from domain.services.rayleigh_ritz import arnoldi, arnoldi_relation_residual
from domain.services.solvers import solve

logger = logging.getLogger(__name__)

# (cases checked, first counterexample or None)
SuiteResult = tuple[int, Optional[str]]


@dataclass(frozen=True)
class SuiteOutcome:
    name: str
    passed: bool
    cases: int
    counterexample: Optional[str] = None


@dataclass(frozen=True)
class _RandomFilter:
    spec: FilterSpec
    half_width: float
    half_height: float


class VerifyPropertiesUseCase:
    """Use case for checking the numerical invariants on random inputs"""

    def __init__(self, samples: int = 100000, seed: int = 0, flip_branch_rule: bool = False):
        self.samples = max(1, int(samples))
        self.seed = seed
        # fault injection: pick the other root of (w + 1/w)/2 = z
        self.flip_branch_rule = flip_branch_rule

    def suites(self) -> list[tuple[str, Callable[[np.random.Generator], SuiteResult]]]:
        return [
            ('root-modulus inequalities', self._root_modulus_inequalities),
            ('damping bound', self._damping_bound),
            ('branch invariance', self._branch_invariance),
            ('recurrence vs closed form', self._recurrence_closed_form),
            ('filter normalization', self._filter_normalization),
            ('mgs orthonormality', self._mgs_orthonormality),
            ('matvec oracle', self._matvec_oracle),
            ('companion eigenvalues', self._companion_eigenvalues),
            ('refined vector optimality', self._refined_optimality),
            ('arnoldi relation', self._arnoldi_relation),
            ('solver oracle', self._solver_oracle),
        ]

    def execute(self, on_outcome: Callable[[SuiteOutcome], None] = None) -> list[SuiteOutcome]:
        """
        Run every suite with its own generator seeded from (seed, suite index).

        Args:
            on_outcome: called after each suite, for progress output

        Returns:
            list[SuiteOutcome]: one outcome per suite, in order
        """
        outcomes = []
        for index, (name, suite) in enumerate(self.suites()):
            rng = np.random.default_rng([self.seed, index])
            try:
                cases, counterexample = suite(rng)
            except DomainException as exc:
                cases, counterexample = 0, f"unexpected {type(exc).__name__}: {exc}"
            outcome = SuiteOutcome(name, counterexample is None, cases, counterexample)
            logger.info("suite %s: %s (%d cases)", name, 'pass' if outcome.passed else 'FAIL', cases)
            outcomes.append(outcome)
            if on_outcome is not None:
                on_outcome(outcome)
        return outcomes

    def _scaled(self, divisor: int, minimum: int) -> int:
        return max(minimum, self.samples // divisor)

    @property
    def trial_counts(self) -> dict[str, int]:
        """
        Random instances per suite for this sample budget.

        The default budget of 100000 gives 1000 damping-bound ellipses and
        100 recurrence specs; smaller budgets scale down to the minimums.
        """
        return {
            'damping bound': self._scaled(100, 30),
            'branch invariance': self._scaled(1000, 50),
            'recurrence vs closed form': self._scaled(1000, 12),
            'filter normalization': min(self.samples, 10000),
            'mgs orthonormality': self._scaled(20000, 5),
            'matvec oracle': self._scaled(20000, 5),
            'companion eigenvalues': self._scaled(20000, 5),
            'refined vector optimality': self._scaled(20000, 5),
            'arnoldi relation': self._scaled(30000, 3),
        }

    @property
    def refined_directions(self) -> int:
        """Random unit vectors each refined vector is compared against"""
        return self._scaled(100, 20)

    def _root_modulus_inequalities(self, rng) -> SuiteResult:
        """|1/w| <= ||z| + sqrt(|z|^2-1)| <= |w| <= |z| + sqrt(|z|^2+1) in both half planes"""
        n = self.samples
        checked = 0
        for label, sign in (('Re z > 0', 1.0), ('Re z < 0', -1.0)):
            modulus = 10.0 ** rng.uniform(-3, 3, n)
            angle = rng.uniform(-np.pi / 2, np.pi / 2, n)
            z = sign * modulus * np.exp(1j * angle)
            z = z[z.real != 0]

            w = modulus_largest_root(z)
            if self.flip_branch_rule:
                w = 1 / w
            lower = np.abs(1 / w)
            upper = np.abs(w)
            middle = np.abs(np.abs(z) + arithmetic_sqrt(np.abs(z) ** 2 - 1))
            cap = np.abs(z) + np.sqrt(np.abs(z) ** 2 + 1)
            slack = 1e-12 * cap

            checks = (
                (lower <= middle + slack, 'other root |1/w|', lower, '||z| + sqrt(|z|^2-1)|', middle),
                (middle <= upper + slack, '||z| + sqrt(|z|^2-1)|', middle, 'branch-rule root |w|', upper),
                (upper <= cap + slack, 'branch-rule root |w|', upper, '|z| + sqrt(|z|^2+1)', cap),
            )
            for ok, left_name, left, right_name, right in checks:
                bad = np.flatnonzero(~ok)
                if bad.size:
                    i = bad[0]
                    return checked, (f"{label}: z={z[i]!r}, w={w[i]!r}: "
                                     f"{left_name}={left[i]!r} > {right_name}={right[i]!r}")
            checked += z.size
        return checked, None

    def _damping_bound(self, rng) -> SuiteResult:
        """kappa_max <= bound for eigenvalues inside circles, fat and thin ellipses"""
        trials = self.trial_counts['damping bound']
        for trial in range(trials):
            sample = _random_filter(rng, kind=trial % 3, m=1)
            points = _points_inside(rng, sample, 50)
            report = damping_report(points, sample.spec)
            if not report.within_bound(1e-12):
                worst = points[int(np.argmax(report.kappas))]
                return trial, (f"{sample.spec.ellipse}, lambda_ref={sample.spec.lambda_ref!r}, "
                               f"lambda={worst!r}: kappa_max={report.kappa_max!r} > bound={report.bound!r}")
        return trials, None

    def _branch_invariance(self, rng) -> SuiteResult:
        """p_m is the same whichever root of (w + 1/w)/2 = xi is used"""
        trials = self.trial_counts['branch invariance']
        for trial in range(trials):
            sample = _random_filter(rng, kind=1 + trial % 2, m=int(rng.integers(1, 21)))
            spec, ellipse, m = sample.spec, sample.spec.ellipse, sample.spec.m
            lam = complex(ellipse.d + rng.uniform(-2, 2) * ellipse.a_mod,
                          rng.uniform(-2, 2) * ellipse.a_mod)

            c = arithmetic_sqrt(ellipse.c2)
            w = modulus_largest_root((lam - ellipse.d) / c)
            w1 = modulus_largest_root((spec.lambda_ref - ellipse.d) / c)
            normalizer = w1 ** m + w1 ** -m
            plus = (w ** m + w ** -m) / normalizer
            minus = ((1 / w) ** m + (1 / w) ** -m) / normalizer
            closed = complex(filter_value(spec, lam))
            scale = (abs(w) ** m + abs(w) ** -m) / abs(normalizer)
            for name, value in (('w-', minus), ('filter_value', closed)):
                if abs(value - plus) > 1e-12 * scale:
                    return trial, (f"{spec}, lambda={lam!r}: p(w+)={plus!r} != p({name})={value!r}")
        return trials, None

    def _recurrence_closed_form(self, rng) -> SuiteResult:
        """chebyshev_apply on a diagonal matrix reproduces filter_value per eigenvalue"""
        trials = self.trial_counts['recurrence vs closed form']
        for trial in range(trials):
            m = int(rng.integers(1, 61))
            sample = _random_filter(rng, kind=trial % 3, m=m)
            spec = sample.spec
            eigenvalues = spec.ellipse.d + sample.half_width * rng.uniform(-1, 1, 30)
            eigenvalues = np.append(eigenvalues, spec.lambda_ref)
            A = CsrMatrix.from_scipy(sparse.diags(eigenvalues))
            counter = MatvecCounter()

            z = chebyshev_apply(A, np.ones(A.n), spec, counter)
            expected = np.real(filter_value(spec, eigenvalues))
            error = np.abs(z - expected)
            tolerance = 1e-10 * max(1.0, float(np.max(np.abs(expected))))
            if counter.count != m:
                return trial, f"{spec}: {counter.count} products counted, expected {m}"
            if np.max(error) > tolerance:
                i = int(np.argmax(error))
                return trial, (f"{spec}, lambda={eigenvalues[i]!r}: recurrence={z[i]!r} "
                               f"closed form={expected[i]!r}")
        return trials, None

    def _filter_normalization(self, rng) -> SuiteResult:
        trials = self.trial_counts['filter normalization']
        for trial in range(trials):
            spec = _random_filter(rng, kind=trial % 3, m=int(rng.integers(1, 61))).spec
            value = complex(filter_value(spec, spec.lambda_ref))
            if abs(value - 1) > 1e-13:
                return trial, f"{spec}: p(lambda_ref)={value!r} != 1"
        return trials, None

    def _mgs_orthonormality(self, rng) -> SuiteResult:
        trials = self.trial_counts['mgs orthonormality']
        n, k = 200, 30
        for trial in range(trials):
            V = DenseColumns(n=n, capacity=k)
            for j in range(k):
                z = rng.standard_normal(n)
                if j % 5 == 4:
                    # nearly dependent on the current basis
                    z = V.data @ rng.standard_normal(V.k) + 1e-10 * z
                v_new, _ = mgs_orthonormalize(V.data, z)
                V.append(v_new)
            error = V.orthonormality_error()
            if error > 1e-12:
                return trial, f"n={n}, k={k}: max |V^T V - I| = {error!r} > 1e-12"
        return trials, None

    def _matvec_oracle(self, rng) -> SuiteResult:
        trials = self.trial_counts['matvec oracle']
        for trial in range(trials):
            n = int(rng.integers(1, 80))
            A = CsrMatrix.from_scipy(sparse.random(n, n, density=0.1, random_state=rng))
            x = rng.standard_normal(n)
            counter = MatvecCounter()
            y = matvec(A, x, counter)
            error = float(np.linalg.norm(y - A.to_dense() @ x))
            tolerance = 1e-13 * (1 + A.frobenius_norm() * np.linalg.norm(x))
            if counter.count != 1 or error > tolerance:
                return trial, f"n={n}, nnz={A.nnz}: |Ax - dense Ax| = {error!r}, count={counter.count}"
        return trials, None

    def _companion_eigenvalues(self, rng) -> SuiteResult:
        """eig_real recovers the roots of a polynomial from its companion matrix"""
        trials = self.trial_counts['companion eigenvalues']
        for trial in range(trials):
            real_roots = rng.choice(np.arange(-4, 5), size=int(rng.integers(1, 5)), replace=False)
            pair_re = rng.choice(np.arange(-4, 4) + 0.25, size=int(rng.integers(0, 3)), replace=False)
            pair_im = rng.uniform(0.5, 2.0, pair_re.size)
            roots = np.concatenate([
                real_roots.astype(np.complex128),
                pair_re + 1j * pair_im,
                pair_re - 1j * pair_im,
            ])
            coefficients = np.real(np.poly(roots))
            expected = roots[np.lexsort((-roots.imag, -roots.real))]

            found = eig_real(linalg.companion(coefficients)).values
            error = float(np.max(np.abs(found - expected)))
            if error > 1e-8 * (1 + np.max(np.abs(roots))):
                return trial, f"roots {expected!r}: eig_real gave {found!r}"
        return trials, None

    def _refined_optimality(self, rng) -> SuiteResult:
        """The refined s minimizes ||(W - theta V) s|| over real unit vectors"""
        trials = self.trial_counts['refined vector optimality']
        n, k = 40, 6
        for trial in range(trials):
            A = rng.standard_normal((n, n))
            V, _ = np.linalg.qr(rng.standard_normal((n, k)))
            W = A @ V
            theta = float(rng.standard_normal())
            s, sigma = refined_s(V, W, V.T @ W, theta)
            R = W - theta * V
            residual = float(np.linalg.norm(R @ s))
            if abs(residual - sigma) > 1e-8 * (1 + residual):
                return trial, f"theta={theta!r}: ||R s||={residual!r} but sigma_min={sigma!r}"
            T = rng.standard_normal((k, self.refined_directions))
            T /= np.linalg.norm(T, axis=0)
            others = np.linalg.norm(R @ T, axis=0)
            bad = np.flatnonzero(residual > others + 1e-12 * (1 + others))
            if bad.size:
                j = bad[0]
                return trial, (f"theta={theta!r}: ||R s||={residual!r} > ||R t||={others[j]!r} "
                               f"for t={T[:, j]!r}")
        return trials, None

    def _arnoldi_relation(self, rng) -> SuiteResult:
        trials = self.trial_counts['arnoldi relation']
        n, steps = 100, 20
        for trial in range(trials):
            B = sparse.random(n, n, density=0.05, random_state=rng) + sparse.eye(n)
            A = CsrMatrix.from_scipy(B)
            counter = MatvecCounter()
            factorization = arnoldi(A, rng.standard_normal(n), steps, counter)
            residual = arnoldi_relation_residual(A, factorization.V, factorization.H)
            orthonormality = DenseColumns.from_array(factorization.V).orthonormality_error()
            scale = max(1.0, A.frobenius_norm())
            if residual > 1e-12 * scale or orthonormality > 1e-12:
                return trial, (f"n={n}, steps={factorization.steps}: ||AV - VH|| = {residual!r}, "
                               f"orthonormality error {orthonormality!r}")
            if counter.count != factorization.steps:
                return trial, f"{counter.count} products for {factorization.steps} Arnoldi steps"
        return trials, None

    def _solver_oracle(self, rng) -> SuiteResult:
        """All four methods find the rightmost eigenvalue of a small convection-diffusion matrix"""
        checked = 0
        for kind in PdeKind:
            A = assemble_pde(PdeCase(kind, 6))
            dense = eig_real(A.to_dense()).leading_value
            v0 = np.ones(A.n) / np.sqrt(A.n)
            for method in Method:
                config = SolverConfig(method=method, m=8, n_r=16, max_outer=2000)
                result = solve(A, config, v0)
                error = abs(complex(result.eigenvalue) - dense)
                if error > 1e-8 * A.frobenius_norm():
                    return checked, (f"{kind.value} N=6 {method.value}: lambda={result.eigenvalue!r}, "
                                     f"dense oracle={dense!r}")
                checked += 1
        return checked, None


def _random_filter(rng, kind: int, m: int) -> _RandomFilter:
    """Random circle (kind 0), fat (1) or thin (2) ellipse with a real reference point to its right"""
    d = rng.uniform(-5, 5)
    a_mod = rng.uniform(0.5, 3.0)
    if kind == 0:
        c2 = 0.0
    elif kind == 1:
        c2 = a_mod ** 2 * rng.uniform(0.05, 0.95)
    else:
        c2 = -a_mod ** 2 * rng.uniform(0.05, 0.95)
    minor = np.sqrt(a_mod ** 2 - abs(c2))
    half_width, half_height = (a_mod, minor) if c2 >= 0 else (minor, a_mod)
    lambda_ref = d + half_width + rng.uniform(0.05, 3.0) * a_mod
    spec = FilterSpec(ellipse=Ellipse(d=d, c2=c2, a_mod=a_mod), m=m, lambda_ref=lambda_ref)
    return _RandomFilter(spec, half_width, half_height)


def _points_inside(rng, sample: _RandomFilter, count: int) -> np.ndarray:
    """Rejection sampling from the bounding box"""
    ellipse = sample.spec.ellipse
    candidates = (ellipse.d + sample.half_width * rng.uniform(-1, 1, 4 * count)
                  + 1j * sample.half_height * rng.uniform(-1, 1, 4 * count))
    inside = [lam for lam in candidates if ellipse.contains(lam)]
    return np.asarray(inside[:count] or [complex(ellipse.d)])
