"""Principal (Perron) eigenpairs of the assembled periodic operators."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .coefficients import PeriodicCoefficient
from .discretization import (OperatorMatrix, PeriodicGrid, assemble_lambda_operator,
                             assemble_linearized)


class EigenSolverError(RuntimeError):
    pass


class PerronStructureError(EigenSolverError):
    """Negative off-diagonal entry: the Perron-Frobenius argument does not apply."""


@dataclass(frozen=True, eq=False)
class EigenPair:
    value: float
    eigenfunction: np.ndarray
    residual: float
    iterations: int = 0


def _collatz_wielandt(A: OperatorMatrix, v: np.ndarray):
    # entries near round-off of the solve carry no information about the ratio
    keep = v >= 1e-8 * v.max()
    r = A.matvec(v)[keep] / v[keep]
    return float(r.min()), float(r.max())


def _noda(A: OperatorMatrix, tol: float, max_iter: int):
    """Inverse iteration shifted by the Collatz-Wielandt upper bound.

    For a Metzler matrix and a positive iterate ``v``, ``max_i (Av)_i / v_i`` is
    an upper bound of the Perron root, so ``(sigma I - A)`` stays a nonsingular
    M-matrix and its inverse keeps ``v`` positive. Converges quadratically.
    """
    n = A.N
    v = np.ones(n)
    Asp = A.to_sparse()
    eye = sp.identity(n, format="csc")
    lo, hi = _collatz_wielandt(A, v)
    best_gap = hi - lo
    stall = 0
    it = 0
    for it in range(1, max_iter + 1):
        gap = hi - lo
        if gap <= tol:
            break
        margin = 1e-3 * gap
        for _ in range(30):
            sigma = hi + margin
            x = splu((sigma * eye - Asp).tocsc()).solve(v)
            if x.sum() < 0:
                x = -x
            if np.all(x > 0):
                break
            margin *= 10.0
        else:
            raise EigenSolverError("shifted solve lost positivity")
        v = x / x.max()
        lo, hi = _collatz_wielandt(A, v)
        if hi - lo < 0.5 * best_gap:
            best_gap = hi - lo
            stall = 0
        else:
            stall += 1
            if stall >= 8:  # rounding floor of the ratios reached
                break
    return v, it


def _power(A: OperatorMatrix, shift: float, tol: float, max_iter: int):
    """Power iteration on ``A + shift I``, stopped on the Collatz-Wielandt gap."""
    v = np.ones(A.N)
    for it in range(1, max_iter + 1):
        w = A.matvec(v) + shift * v
        v = w / w.max()
        if it % 50 == 0:
            lo, hi = _collatz_wielandt(A, v)
            if hi - lo <= tol:
                return v, it
    raise EigenSolverError(f"power iteration did not converge in {max_iter} iterations")


def principal_eigenpair(A: OperatorMatrix, sense: str = "max", method: str = "noda",
                        tol: float = 1e-10, max_iter: int = 100_000) -> EigenPair:
    """Eigenvalue of ``A`` carrying a positive eigenfunction.

    ``sense="max"`` treats ``A`` as Metzler (nonnegative off-diagonals) and returns
    its Perron root; ``sense="min"`` does the same for ``-A`` and flips the sign.
    The start vector is all ones. The returned value is the two-sided Rayleigh
    quotient ``w^T A v / w^T v`` with ``w`` the left Perron vector, which is
    accurate to second order in the eigenvector errors.

    ``method="power"`` runs plain power iteration on ``A + sigma I`` with the
    Gershgorin shift; it is only practical for coarse grids.
    """
    if sense not in ("max", "min"):
        raise ValueError("sense must be 'max' or 'min'")
    B = A if sense == "max" else -A
    if B.offdiag_min() < 0:
        raise PerronStructureError(
            f"off-diagonal entry {B.offdiag_min():.3g} < 0; refine the grid (lambda L h too large)")
    scale = max(1.0, float(np.max(np.abs(B.pot))))
    if method == "noda":
        v, it = _noda(B, tol * scale, max_iter)
        if B.is_symmetric:
            w = v
        else:
            w, it2 = _noda(B.transpose(), tol * scale, max_iter)
            it += it2
    elif method == "power":
        sigma = B.norm_inf()
        v, it = _power(B, sigma, tol * scale, max_iter)
        w = v if B.is_symmetric else _power(B.transpose(), sigma, tol * scale, max_iter)[0]
    else:
        raise ValueError(f"unknown method {method!r}")
    value = B.bilinear(w, v) / float(np.dot(w, v))
    if not np.all(v > 0):
        raise EigenSolverError("converged eigenvector has a nonpositive entry")
    v = v / v.max()
    residual = float(np.max(np.abs(B.matvec(v) - value * v)))
    if residual > 1e-9 * B.norm_inf():
        raise EigenSolverError(f"residual {residual:.3e} above 1e-9 ||A||")
    if sense == "min":
        value = -value
    return EigenPair(value=value, eigenfunction=v, residual=residual, iterations=it)


def rho1(a: PeriodicCoefficient, mu: PeriodicCoefficient, L: float,
         grid: PeriodicGrid | None = None) -> float:
    """Principal eigenvalue of ``-(a_L Phi')' - mu_L Phi`` with periodic conditions."""
    grid = grid or PeriodicGrid()
    return principal_eigenpair(assemble_linearized(a, mu, grid, L), sense="min").value


def linearized_eigenpair(a, mu, L, grid=None) -> EigenPair:
    grid = grid or PeriodicGrid()
    return principal_eigenpair(assemble_linearized(a, mu, grid, L), sense="min")


def k_of_lambda(a: PeriodicCoefficient, mu: PeriodicCoefficient, L: float, lam: float,
                grid: PeriodicGrid | None = None) -> float:
    """Principal eigenvalue ``k(lambda, L)`` of the exponentially weighted problem."""
    grid = grid or PeriodicGrid()
    return principal_eigenpair(assemble_lambda_operator(a, mu, grid, L, lam), sense="max").value
