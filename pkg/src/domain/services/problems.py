"""
Convection-diffusion test operators.

    -d/dx(omega u_x) - d/dy(gamma u_y) + d/dx(mu u) + d/dy(nu u) = lambda u

on [-1, 1]^2 with homogeneous Dirichlet data, discretized by the 5-point
stencil on an N x N interior grid (h = 2/(N+1), rows ordered j outer, i inner).
"""
from typing import Callable, NamedTuple

import numpy as np

from domain.entities.linalg import CsrMatrix
from domain.entities.problem import PdeCase, PdeKind

Coefficient = Callable[[np.ndarray, np.ndarray], np.ndarray]


class Coefficients(NamedTuple):
    omega: Coefficient
    gamma: Coefficient
    mu: Coefficient
    nu: Coefficient


def _inverse_bilinear(x, y):
    return 1.0 / (1.0 + x * y)


COEFFICIENTS = {
    PdeKind.CASE_I: Coefficients(
        omega=lambda x, y: -np.ones_like(x),
        gamma=lambda x, y: -10.0 * _inverse_bilinear(x, y),
        mu=lambda x, y: np.ones_like(x),
        nu=_inverse_bilinear,
    ),
    PdeKind.CASE_II: Coefficients(
        omega=lambda x, y: -np.exp(x * y),
        gamma=lambda x, y: -10.0 * _inverse_bilinear(x, y),
        mu=lambda x, y: np.sin(1.0 + x * y),
        nu=_inverse_bilinear,
    ),
}


def assemble_pde(case: PdeCase) -> CsrMatrix:
    """Sparse N^2 x N^2 operator for one of the two coefficient sets"""
    coeff = COEFFICIENTS[case.kind]
    N, h = case.N, case.h
    grid = -1.0 + h * np.arange(1, N + 1)
    # x varies along axis 1 (i), y along axis 0 (j)
    x, y = np.meshgrid(grid, grid)
    index = np.arange(N * N).reshape(N, N)
    half, h2 = h / 2, h * h

    omega_e, omega_w = coeff.omega(x + half, y), coeff.omega(x - half, y)
    gamma_n, gamma_s = coeff.gamma(x, y + half), coeff.gamma(x, y - half)

    rows = [index.ravel()]
    cols = [index.ravel()]
    vals = [((omega_e + omega_w + gamma_n + gamma_s) / h2).ravel()]

    neighbours = (
        # (slice of points that have the neighbour, offset, value)
        ((slice(None), slice(0, N - 1)), 1, -omega_e / h2 + coeff.mu(x + h, y) / (2 * h)),
        ((slice(None), slice(1, N)), -1, -omega_w / h2 - coeff.mu(x - h, y) / (2 * h)),
        ((slice(0, N - 1), slice(None)), N, -gamma_n / h2 + coeff.nu(x, y + h) / (2 * h)),
        ((slice(1, N), slice(None)), -N, -gamma_s / h2 - coeff.nu(x, y - h) / (2 * h)),
    )
    for points, offset, value in neighbours:
        rows.append(index[points].ravel())
        cols.append(index[points].ravel() + offset)
        vals.append(value[points].ravel())

    return CsrMatrix.from_triplets(
        n=N * N,
        rows=np.concatenate(rows),
        cols=np.concatenate(cols),
        vals=np.concatenate(vals),
    )
