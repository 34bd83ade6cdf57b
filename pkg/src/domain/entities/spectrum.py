import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from domain.exceptions.exceptions import InvalidFilterException


@dataclass(frozen=True, eq=False)
class EigenPairSet:
    """Eigenpairs of a small projected matrix, sorted by decreasing real part"""
    values: np.ndarray
    vectors: np.ndarray
    order: np.ndarray

    def __len__(self) -> int:
        return self.values.size

    @property
    def leading_value(self) -> complex:
        return complex(self.values[0])

    @property
    def leading_vector(self) -> np.ndarray:
        return self.vectors[:, 0]


@dataclass(frozen=True)
class Ellipse:
    """Filter ellipse E(d, c, a) with real centre d, foci d +- c and |a|"""
    d: float
    c2: float
    a_mod: float

    def __post_init__(self):
        if not (math.isfinite(self.d) and math.isfinite(self.c2) and math.isfinite(self.a_mod)):
            raise InvalidFilterException(f"non-finite ellipse parameters {self}")
        if self.a_mod < 0:
            raise InvalidFilterException(f"negative semiaxis {self.a_mod}")
        if self.c2 > 0 and self.a_mod ** 2 < self.c2 * (1 - 1e-12):
            raise InvalidFilterException(
                f"semiaxis {self.a_mod} shorter than focal distance {math.sqrt(self.c2)}"
            )

    @property
    def c(self) -> complex:
        """Focal offset: real for c2 >= 0, purely imaginary otherwise"""
        if self.c2 >= 0:
            return complex(math.sqrt(self.c2), 0.0)
        return complex(0.0, math.sqrt(-self.c2))

    @property
    def is_fat(self) -> bool:
        return self.c2 >= 0

    @property
    def minor_semiaxis(self) -> float:
        return math.sqrt(max(0.0, self.a_mod ** 2 - abs(self.c2)))

    def contains(self, lam: complex, slack: float = 0.0) -> bool:
        focus_left = self.d - self.c
        focus_right = self.d + self.c
        return abs(lam - focus_left) + abs(lam - focus_right) <= 2 * self.a_mod + slack


@dataclass(frozen=True)
class FilterSpec:
    """Scaled Chebyshev filter p_m normalized at the real point lambda_ref"""
    ellipse: Ellipse
    m: int
    lambda_ref: float

    def __post_init__(self):
        if self.m < 1:
            raise InvalidFilterException(f"filter degree must be >= 1, got {self.m}")
        if not abs(self.lambda_ref - self.ellipse.d) > 0:
            raise InvalidFilterException("lambda_ref coincides with the ellipse centre")


@dataclass(frozen=True)
class DampingReport:
    """Damping coefficients of unwanted eigenvalues and their theoretical bound"""
    kappas: tuple
    kappa_max: float
    bound: float

    def within_bound(self, slack: float = 1e-12) -> bool:
        return self.kappa_max <= self.bound + slack


def describe_filter(spec: Optional[FilterSpec]) -> str:
    if spec is None:
        return "identity"
    e = spec.ellipse
    return f"cheb(m={spec.m}, d={e.d:.6g}, c2={e.c2:.3g}, a={e.a_mod:.6g}, ref={spec.lambda_ref:.6g})"
