"""
Complex Chebyshev filters on ellipses E(d, c, a).

Scalars are handled through numpy so that every function also accepts
arrays of points; 0-d results come back as numpy scalars.
"""
import logging
import math

import numpy as np

from domain.entities.linalg import CsrMatrix, MatvecCounter
from domain.entities.spectrum import DampingReport, Ellipse, FilterSpec
from domain.exceptions.exceptions import (
    FilterDegenerateException,
    InvalidFilterException,
    NoSeparationException,
    RangeExceededException,
)
from domain.services.core_linalg import matvec

logger = logging.getLogger(__name__)

MAX_LOG_MAGNITUDE = 700.0
DEGENERATE_DENOMINATOR = 1e-300
SEPARATION_TOLERANCE = 1e-12
POINT_RADIUS = 1e-8
RESCALE_THRESHOLD = 1e100


def arithmetic_sqrt(z):
    """Square root with Re > 0, or Re = 0 and Im >= 0"""
    root = np.sqrt(np.asarray(z, dtype=np.complex128))
    flip = (root.real < 0) | ((root.real == 0) & (root.imag < 0))
    return np.where(flip, -root, root)[()]


def _upper_branch(xi) -> np.ndarray:
    xi = np.asarray(xi, dtype=np.complex128)
    return (xi.real > 0) | ((xi.real == 0) & (xi.imag >= 0))


def modulus_largest_root(xi):
    """Root w of (w + 1/w)/2 = xi with |w| >= 1"""
    xi = np.asarray(xi, dtype=np.complex128)
    s = arithmetic_sqrt(xi * xi - 1)
    return np.where(_upper_branch(xi), xi + s, xi - s)[()]


def cheb_T(m: int, xi):
    """Chebyshev polynomial of the first kind, T_m(xi) = (w^m + w^-m)/2"""
    if m < 0:
        raise InvalidFilterException(f"degree must be >= 0, got {m}")
    w = modulus_largest_root(xi)
    _check_range(m * np.log(np.abs(w)), f"T_{m} at {xi}")
    wm = w ** m
    return np.asarray((wm + 1 / wm) / 2)[()]


def _check_range(log_magnitude, what: str):
    if np.any(np.asarray(log_magnitude) > MAX_LOG_MAGNITUDE):
        raise RangeExceededException(f"{what} exceeds the double range")


def filter_value(spec: FilterSpec, lam):
    """p_m(lam) = T_m[(lam - d)/c] / T_m[(lambda_ref - d)/c], with its c = 0 limit"""
    lam = np.asarray(lam, dtype=np.complex128)
    ellipse, m = spec.ellipse, spec.m
    ref = np.complex128(spec.lambda_ref)

    with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
        if ellipse.c2 == 0:
            ratio = (lam - ellipse.d) / (ref - ellipse.d)
            _check_range(m * np.log(np.abs(ratio)), "filter value")
            value = ratio ** m
        else:
            c = arithmetic_sqrt(ellipse.c2)
            w = modulus_largest_root((lam - ellipse.d) / c)
            w1 = modulus_largest_root((ref - ellipse.d) / c)
            _check_range(m * np.log(np.abs(w / w1)), "filter value")
            value = (w / w1) ** m * (1 + w ** (-2 * m)) / (1 + w1 ** (-2 * m))
    if not np.all(np.isfinite(value)):
        raise RangeExceededException(f"filter normalization T_m at {spec.lambda_ref} vanishes")
    return np.asarray(value)[()]


def chebyshev_apply(A: CsrMatrix, z0: np.ndarray, spec: FilterSpec,
                    counter: MatvecCounter) -> np.ndarray:
    """
    Filtered vector p_m(A) z0 by the three-term recurrence in c^2 form.

        rho_1 = 1/(lambda_ref - d),  z_1 = rho_1 (A - dI) z_0
        rho_{k+1} = 1/(2(lambda_ref - d) - c^2 rho_k)
        z_{k+1} = 2 rho_{k+1} (A - dI) z_k - c^2 rho_k rho_{k+1} z_{k-1}

    Exactly m products with A. Only c^2 enters, so c = 0 is a regular
    case. If the iterates approach overflow, both recurrence vectors are
    scaled down together; the direction of the result is unchanged.

    Raises:
        FilterDegenerateException: a recurrence denominator vanishes
    """
    z0 = np.asarray(z0, dtype=np.float64)
    if not np.linalg.norm(z0) > 0:
        raise InvalidFilterException("filter start vector is zero")
    d, c2 = spec.ellipse.d, spec.ellipse.c2
    delta = spec.lambda_ref - d

    rho = 1.0 / delta
    z_prev = z0
    z = rho * (matvec(A, z0, counter) - d * z0)
    for _ in range(1, spec.m):
        denominator = 2 * delta - c2 * rho
        if abs(denominator) <= DEGENERATE_DENOMINATOR:
            raise FilterDegenerateException(
                f"recurrence denominator {denominator:.3e} (lambda_ref inside the focal segment)"
            )
        rho_next = 1.0 / denominator
        z_next = 2 * rho_next * (matvec(A, z, counter) - d * z) - (c2 * rho * rho_next) * z_prev
        z_prev, z, rho = z, z_next, rho_next
        scale = np.max(np.abs(z))
        if scale > RESCALE_THRESHOLD:
            z_prev = z_prev / scale
            z = z / scale
    if not np.all(np.isfinite(z)):
        raise RangeExceededException("filtered vector is not finite")
    return z


def damping_report(unwanted, spec: FilterSpec) -> DampingReport:
    """Damping coefficients kappa_i = |w_i / w_1| and their upper bound"""
    lam = np.atleast_1d(np.asarray(unwanted, dtype=np.complex128))
    ellipse = spec.ellipse
    delta1 = spec.lambda_ref - ellipse.d

    if ellipse.c2 == 0:
        kappas = np.abs(lam - ellipse.d) / abs(delta1)
    else:
        c = arithmetic_sqrt(ellipse.c2)
        w1 = modulus_largest_root(delta1 / c)
        kappas = np.abs(modulus_largest_root((lam - ellipse.d) / c)) / np.abs(w1)

    c_abs2 = abs(ellipse.c2)
    a = ellipse.a_mod
    numerator = a + math.sqrt(a * a + c_abs2)
    denominator = abs(abs(delta1) + arithmetic_sqrt(delta1 * delta1 - c_abs2))
    kappa_max = float(np.max(kappas)) if kappas.size else 0.0
    return DampingReport(
        kappas=tuple(float(k) for k in kappas),
        kappa_max=kappa_max,
        bound=float(numerator / denominator),
    )


def determine_ellipse(unwanted, theta1: complex, zeta_fraction: float = 0.5) -> tuple[Ellipse, float]:
    """
    Fat ellipse (a circle, c = 0) enclosing the unwanted Ritz values.

    Branch 1 centres the circle between the extreme real parts and passes it
    through (x+, y+); branch 2, used when the imaginary parts dominate,
    passes it through (x+, y+) and (zeta, 0) with the smallest area.

    Returns:
        (ellipse, kappa_u) where kappa_u = |a| / |theta1 - d|

    Raises:
        NoSeparationException: theta1 is not to the right of the unwanted set
    """
    lam = np.atleast_1d(np.asarray(unwanted, dtype=np.complex128))
    if lam.size == 0:
        raise InvalidFilterException("an ellipse needs at least one unwanted value")
    theta1 = complex(theta1)
    x_plus = float(np.max(lam.real))
    x_minus = float(np.min(lam.real))
    y_plus = float(np.max(np.abs(lam.imag)))

    separation = theta1.real - x_plus
    if separation <= SEPARATION_TOLERANCE * (1 + abs(x_plus)):
        raise NoSeparationException(
            f"Re(theta1)={theta1.real:.6g} does not exceed max unwanted real part {x_plus:.6g}"
        )
    if theta1.imag != 0:
        zeta = theta1.real
    else:
        zeta = x_plus + zeta_fraction * separation

    if y_plus ** 2 < (zeta - x_plus) * (zeta - x_minus):
        d = (x_plus + x_minus) / 2
        a_mod = math.hypot(x_plus - d, y_plus)
    else:
        d = (zeta ** 2 - x_plus ** 2 - y_plus ** 2) / (2 * (zeta - x_plus))
        a_mod = zeta - d

    if a_mod == 0:
        a_mod = POINT_RADIUS * (1 + abs(x_plus))
    distance = abs(theta1 - d)
    if a_mod >= distance:
        raise NoSeparationException(f"ellipse radius {a_mod:.6g} reaches theta1 (distance {distance:.6g})")
    ellipse = Ellipse(d=d, c2=0.0, a_mod=a_mod)
    logger.debug("ellipse d=%.6g a=%.6g for theta1=%s over %d unwanted values", d, a_mod, theta1, lam.size)
    return ellipse, a_mod / distance
