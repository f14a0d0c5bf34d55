"""Discrete periodic operators on the unit cell.

Every problem is posed in the fast variable ``y = x / L`` on ``[0, 1)``; the
period only enters through the ``1/L^2`` and ``lambda/L`` prefactors.

Operators are cyclic tridiagonal and kept in *difference form*::

    (A v)_i = lower_i (v_{i-1} - v_i) + upper_i (v_{i+1} - v_i) + pot_i v_i

so ``lower``/``upper`` are the off-diagonals and ``pot`` is the row sum. Pure
diffusion has ``pot == 0`` and annihilates constants exactly in floating point.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .coefficients import PeriodicCoefficient


@dataclass(frozen=True)
class PeriodicGrid:
    N: int = 256

    def __post_init__(self):
        if self.N < 16:
            raise ValueError(f"grid needs N >= 16, got {self.N}")

    @property
    def h(self) -> float:
        return 1.0 / self.N

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.N) / self.N

    @property
    def midpoints(self) -> np.ndarray:
        return (np.arange(self.N) + 0.5) / self.N


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    lower: np.ndarray
    upper: np.ndarray
    pot: np.ndarray

    @property
    def N(self) -> int:
        return self.pot.size

    @property
    def diag(self) -> np.ndarray:
        return self.pot - self.lower - self.upper

    def matvec(self, v: np.ndarray) -> np.ndarray:
        return (self.lower * (np.roll(v, 1) - v) + self.upper * (np.roll(v, -1) - v)
                + self.pot * v)

    __matmul__ = matvec

    def bilinear(self, w: np.ndarray, v: np.ndarray) -> float:
        """``w^T A v`` summed edge by edge, so large symmetric fluxes cancel before rounding."""
        dv = np.roll(v, -1) - v  # v_{i+1} - v_i on edge i+1/2
        edge = self.upper * w - np.roll(self.lower * w, -1)
        return float(np.dot(edge, dv) + np.dot(self.pot * w, v))

    def __neg__(self) -> OperatorMatrix:
        return OperatorMatrix(-self.lower, -self.upper, -self.pot)

    def __add__(self, other: OperatorMatrix) -> OperatorMatrix:
        return OperatorMatrix(self.lower + other.lower, self.upper + other.upper,
                              self.pot + other.pot)

    def add_diagonal(self, d) -> OperatorMatrix:
        return OperatorMatrix(self.lower, self.upper, self.pot + d)

    def transpose(self) -> OperatorMatrix:
        lo = np.roll(self.upper, 1)   # (A^T)_{i,i-1} = A_{i-1,i}
        up = np.roll(self.lower, -1)  # (A^T)_{i,i+1} = A_{i+1,i}
        colsum = self.pot + (lo - self.lower) + (up - self.upper)
        return OperatorMatrix(lo, up, colsum)

    @property
    def is_symmetric(self) -> bool:
        return bool(np.array_equal(np.roll(self.upper, 1), self.lower))

    def norm_inf(self) -> float:
        return float(np.max(np.abs(self.lower) + np.abs(self.upper) + np.abs(self.diag)))

    def offdiag_min(self) -> float:
        return float(min(self.lower.min(), self.upper.min()))

    def to_sparse(self) -> sp.csc_matrix:
        n = self.N
        i = np.arange(n)
        rows = np.concatenate([i, i, i])
        cols = np.concatenate([i, (i - 1) % n, (i + 1) % n])
        vals = np.concatenate([self.diag, self.lower, self.upper])
        return sp.csc_matrix((vals, (rows, cols)), shape=(n, n))

    def to_dense(self) -> np.ndarray:
        return self.to_sparse().toarray()


#: smallest period accepted by the sweep drivers; below it the 1/L^2 scaling swamps
#: the O(1) terms in double precision. Single solves still accept any L > 0.
MIN_SWEEP_PERIOD = 1.0 / 1024


def check_sweep_periods(L_list) -> list[float]:
    L_list = [float(L) for L in L_list]
    if any(not L > 0 for L in L_list):
        raise ValueError("all periods must be positive")
    if any(L < MIN_SWEEP_PERIOD for L in L_list):
        raise ValueError(f"sweeps are limited to L >= 1/1024 (ill-conditioned below), got {min(L_list):g}")
    return L_list


def _check_L(L: float):
    if not L > 0:
        raise ValueError(f"period L must be positive, got {L}")


def assemble_diffusion(a: PeriodicCoefficient, grid: PeriodicGrid, L: float) -> OperatorMatrix:
    """Flux-form ``u -> (1/L^2) (a u')'`` with ``a`` sampled at cell midpoints."""
    _check_L(L)
    scale = 1.0 / (L * L * grid.h * grid.h)
    a_half = np.asarray(a(grid.midpoints), dtype=float) * scale  # a_{i+1/2}
    upper = a_half
    lower = np.roll(a_half, 1)  # a_{i-1/2}, bitwise the same numbers
    return OperatorMatrix(lower, upper, np.zeros(grid.N))


def assemble_linearized(a: PeriodicCoefficient, mu: PeriodicCoefficient, grid: PeriodicGrid,
                        L: float) -> OperatorMatrix:
    """``Phi -> -(1/L^2)(a Phi')' - mu Phi``; its principal (smallest) eigenvalue is rho_1."""
    return -assemble_lambda_operator(a, mu, grid, L, 0.0)


def assemble_lambda_operator(a: PeriodicCoefficient, mu: PeriodicCoefficient, grid: PeriodicGrid,
                             L: float, lam: float) -> OperatorMatrix:
    """Unit-cell form of the weighted eigenproblem whose Perron root is ``k(lambda, L)``.

    ``(1/L^2)(a psi')' + (lambda/L)[(a psi)' + a psi'] + lambda^2 a psi + mu psi``,
    the bracket being ``2 a psi' + a' psi`` without differentiating ``a``.
    First derivatives are centred.
    """
    _check_L(L)
    if lam < 0:
        raise ValueError(f"lambda must be >= 0, got {lam}")
    D = assemble_diffusion(a, grid, L)
    a_n = np.asarray(a(grid.nodes), dtype=float)
    mu_n = np.asarray(mu(grid.nodes), dtype=float)
    beta = lam / (2.0 * L * grid.h)
    a_next = np.roll(a_n, -1)
    a_prev = np.roll(a_n, 1)
    up = beta * (a_next + a_n)    # coefficient of psi_{i+1}
    down = beta * (a_prev + a_n)  # minus the coefficient of psi_{i-1}
    drift_pot = beta * (a_next - a_prev)
    return OperatorMatrix(D.lower - down, D.upper + up,
                          drift_pot + (lam * lam) * a_n + mu_n)


def gershgorin_shift(a: PeriodicCoefficient, mu: PeriodicCoefficient, grid: PeriodicGrid,
                     L: float, lam: float = 0.0) -> float:
    """Computable bound on the spectral radius of the assembled operators."""
    h = grid.h
    mu_max = float(np.max(np.abs(mu(grid.nodes))))
    return (lam * 2.0 * a.alpha2 / (L * h) + lam * lam * a.alpha2 + mu_max
            + 2.0 * a.alpha2 / (L * L * h * h))
