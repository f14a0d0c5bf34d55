"""Periodic stationary states ``p_L`` and the homogenized travelling-front profile."""
from __future__ import annotations

import csv
import io
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import MatrixRankWarning, spsolve

from .coefficients import (MeanSet, PeriodicCoefficient, ReactionModel, aggregate_dg, aggregate_g,
                           find_p0)
from .discretization import OperatorMatrix, PeriodicGrid, assemble_diffusion, check_sweep_periods
from .spectral import rho1


class SteadyStateError(RuntimeError):
    pass


class NoMonotoneConnectionError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class StationaryState:
    values: np.ndarray
    L: float
    residual: float
    newton_iters: int
    marched: bool = False

    @property
    def p_min(self) -> float:
        return float(self.values.min())

    @property
    def p_max(self) -> float:
        return float(self.values.max())


def _residual(D: OperatorMatrix, r: ReactionModel, y, p):
    return D.matvec(p) + r(y, p)


def _target(D: OperatorMatrix, r, y, p) -> float:
    # 1e-9 relative to |f|, floored at what rounding allows: one ulp in p moves
    # D p by about eps * ||D||, which dominates once L is small
    fscale = max(1.0, float(np.max(np.abs(r(y, p)))))
    floor = 32 * np.finfo(float).eps * D.norm_inf() * float(np.max(np.abs(p)))
    return max(1e-9 * fscale, floor)


def _newton(D, r, y, p, M, max_iter=60):
    """Damped Newton on ``D p + f(y, p) = 0``. Returns ``(p, |F|_inf, iters, ok)``.

    Iterates until the update itself is at round-off, then judges the residual.
    """
    Dsp = D.to_sparse()
    F = _residual(D, r, y, p)
    res = float(np.max(np.abs(F)))
    for it in range(1, max_iter + 1):
        J = (Dsp + sp.diags(r.ds(y, p))).tocsc()
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", MatrixRankWarning)
            step = spsolve(J, -F)
        if not np.all(np.isfinite(step)):  # singular Jacobian, e.g. f_s = 0 at a constant start
            return p, res, it - 1, False
        size = float(np.max(np.abs(step)))
        if size <= 1e-13 * float(np.max(np.abs(p))):
            return p, res, it - 1, res < _target(D, r, y, p)
        t = 1.0
        while t > 1e-4:
            cand = p + t * step
            if np.all(cand > 0) and np.all(cand <= 2 * M):
                Fc = _residual(D, r, y, cand)
                rc = float(np.max(np.abs(Fc)))
                # near the solution the residual is rounding noise; take full steps
                if rc < (1 - 1e-4 * t) * res or (t == 1.0 and size < 1e-6 * float(np.max(p))):
                    p, F, res = cand, Fc, rc
                    break
            t *= 0.5
        else:
            return p, res, it, res < _target(D, r, y, p)
    return p, res, max_iter, res < _target(D, r, y, p)


def _march(D, r, y, p, M, tol, max_steps=20000):
    """Backward-Euler diffusion / explicit reaction until the residual drops below ``tol``."""
    Dsp = D.to_sparse()
    eye = sp.identity(D.N, format="csc")
    fs_max = float(np.max(np.abs(r.ds(y, np.linspace(0, M, 64)[:, None]))))
    dt = 0.5 / max(fs_max, 1e-12)
    for _ in range(max_steps):
        p = spsolve((eye - dt * Dsp).tocsc(), p + dt * r(y, p))
        if not (np.all(np.isfinite(p)) and np.all(p > 0) and np.all(p <= 2 * M)):
            raise SteadyStateError("time marching left (0, 2M]")
        if np.max(np.abs(_residual(D, r, y, p))) < max(tol, _target(D, r, y, p)):
            return p
    raise SteadyStateError("time marching did not reach the residual target")


def stationary_state(a: PeriodicCoefficient, r: ReactionModel, L: float,
                     grid: PeriodicGrid | None = None, guess=None,
                     check_existence: bool = True) -> StationaryState:
    """The unique positive periodic solution of ``(1/L^2)(a p')' + f(y, p) = 0`` on the unit cell.

    Damped Newton from ``p = p0`` (or ``guess``); if Newton stalls, implicit time
    marching brings the iterate close and Newton polishes.
    """
    grid = grid or PeriodicGrid()
    if check_existence:
        rho = rho1(a, r.mu, L, grid)
        if rho >= 0:
            raise SteadyStateError(f"rho_1 = {rho:.6g} >= 0: no positive bounded stationary state")
    D = assemble_diffusion(a, grid, L)
    y = grid.nodes
    M = float(r.M)
    if guess is None:
        p = np.full(grid.N, find_p0(r))
    else:
        p = np.broadcast_to(np.asarray(guess, dtype=float), (grid.N,)).copy()
    p0 = find_p0(r)
    p, res, iters, ok = _newton(D, r, y, p, M)
    # p = 0 also solves the equation; landing near it means Newton missed p_L
    ok = ok and float(p.max()) > 1e-3 * p0
    marched = False
    if not ok:
        p = _march(D, r, y, np.clip(p, 1e-3 * M, M), M, tol=1e-6)
        p, res, more, ok = _newton(D, r, y, p, M)
        iters += more
        marched = True
        if not ok:
            raise SteadyStateError(f"Newton polish failed, residual {res:.3e}")
    if np.any(p <= 0) or np.any(p > M * (1 + 1e-10)):
        raise SteadyStateError("stationary state violates 0 < p <= M")
    return StationaryState(values=p, L=L, residual=res, newton_iters=iters, marched=marched)


@dataclass(frozen=True)
class SteadyRow:
    L: float
    p_min: float
    p_max: float
    sup_gap: float
    error: str | None = None


def stationary_sweep(a, r, L_list, grid=None, threads: int = 1) -> list[SteadyRow]:
    L_list = check_sweep_periods(L_list)
    grid = grid or PeriodicGrid()
    p0 = find_p0(r)

    def one(L):
        try:
            st = stationary_state(a, r, float(L), grid)
        except (SteadyStateError, RuntimeError) as exc:
            return SteadyRow(float(L), math.nan, math.nan, math.nan, str(exc))
        return SteadyRow(float(L), st.p_min, st.p_max, float(np.max(np.abs(st.values - p0))))

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(one, L_list))
    return [one(L) for L in L_list]


def steady_rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("L", "p_min", "p_max", "sup_gap"))
    for row in rows:
        w.writerow([repr(row.L), repr(row.p_min), repr(row.p_max), repr(row.sup_gap)])
    return buf.getvalue()


# -- homogenized front ------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FrontProfile:
    xs: np.ndarray
    values: np.ndarray
    c: float
    p0: float
    residual: float = 0.0
    a_eff: float = 1.0

    def __call__(self, z):
        """``U0(z)``, extended by its limits 0 and ``p0`` outside the truncated line."""
        return np.interp(z, self.xs, self.values, left=0.0, right=self.p0)


def homogenized_front(means: MeanSet, r: ReactionModel, c: float, X_d: float | None = None,
                      N_line: int = 4096, tol: float = 1e-9) -> FrontProfile:
    """Monotone solution of ``<a>_H U'' - c U' + g(U) = 0`` from 0 to ``p0``, pinned at ``U(0) = p0/2``.

    For fixed ``c`` the connection is fixed by two conditions: the pin, and
    arrival along the stable direction of the saddle ``p0`` (a Robin condition
    at ``X_d``). The state 0 is an unstable node, so marching left from the pin
    decays on its own and the left end needs no condition; ``U(-X_d)`` comes out
    at the size of the true tail and is reported, not imposed.
    """
    a = means.a_harm
    p0 = means.p0
    g0 = aggregate_dg(r, 0.0)
    gp = aggregate_dg(r, p0)
    c_min = 2.0 * math.sqrt(a * g0)
    if c < c_min * (1 - 1e-9):
        raise NoMonotoneConnectionError(
            f"c = {c:.6g} is below the homogenized minimal speed {c_min:.6g}: no monotone front")
    s_right = (-c + math.sqrt(c * c - 4 * a * gp)) / (2 * a)
    if X_d is None:
        X_d = 40.0 / math.sqrt(g0 / a)
    if N_line % 2:
        N_line += 1
    n = N_line
    xs = np.linspace(-X_d, X_d, n + 1)
    dx = xs[1] - xs[0]
    mid = n // 2

    kappa = max((c - math.sqrt(max(c * c - 4 * a * g0, 0.0))) / (4 * a), 1e-3)
    U = 0.5 * p0 * (1 + np.tanh(kappa * xs))

    ia = a / dx**2
    ic = c / (2 * dx)
    j = np.arange(1, n)

    def residual(U):
        F = np.empty(n + 1)
        F[0] = U[mid] - 0.5 * p0
        F[j] = (ia * (U[j + 1] - 2 * U[j] + U[j - 1]) - ic * (U[j + 1] - U[j - 1])
                + aggregate_g(r, np.maximum(U[j], 0.0)))
        F[n] = (U[n] - U[n - 1]) / dx - s_right * (p0 - 0.5 * (U[n] + U[n - 1]))
        return F

    def jacobian(U):
        rows = np.concatenate([[0], j, j, j, [n, n]])
        cols = np.concatenate([[mid], j - 1, j, j + 1, [n - 1, n]])
        vals = np.concatenate([
            [1.0],
            np.full(n - 1, ia + ic),
            -2 * ia + aggregate_dg(r, np.maximum(U[j], 0.0)),
            np.full(n - 1, ia - ic),
            [-1 / dx + 0.5 * s_right, 1 / dx + 0.5 * s_right],
        ])
        return sp.csc_matrix((vals, (rows, cols)), shape=(n + 1, n + 1))

    F = residual(U)
    res = float(np.max(np.abs(F)))
    for _ in range(100):
        if res < tol:
            break
        step = spsolve(jacobian(U), -F)
        t = 1.0
        while t > 1e-6:
            Uc = U + t * step
            Fc = residual(Uc)
            rc = float(np.max(np.abs(Fc)))
            if rc < (1 - 1e-4 * t) * res:
                U, F, res = Uc, Fc, rc
                break
            t *= 0.5
        else:
            break
    if res >= tol:
        raise NoMonotoneConnectionError(f"front Newton did not converge (residual {res:.3e})")
    if np.any(np.diff(U) < -1e-10 * p0) or U[0] < -1e-10 * p0:
        raise NoMonotoneConnectionError("converged profile is not monotone")
    return FrontProfile(xs=xs, values=U, c=float(c), p0=p0, residual=res, a_eff=a)


def profile_csv(profile: FrontProfile) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("x", "U0"))
    for x, u in zip(profile.xs, profile.values):
        w.writerow([repr(float(x)), repr(float(u))])
    return buf.getvalue()


def uniqueness_probe(a, r, L: float, grid=None, starts=(1.0, 0.5, 1.5)) -> float:
    """Largest sup-norm disagreement between stationary states from starts ``k * p0`` (clipped to ``M``)."""
    grid = grid or PeriodicGrid()
    p0 = find_p0(r)
    sols = [stationary_state(a, r, L, grid, guess=min(k * p0, r.M)).values for k in starts]
    return max(float(np.max(np.abs(s - sols[0]))) for s in sols[1:])
