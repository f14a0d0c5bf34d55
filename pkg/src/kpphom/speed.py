"""Minimal pulsating-front speeds from the variational formula ``c* = min k(lambda)/lambda``."""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brent

from .coefficients import MeanSet, PeriodicCoefficient, ReactionModel, arithmetic_mean, harmonic_mean
from .discretization import PeriodicGrid, check_sweep_periods
from .spectral import EigenSolverError, k_of_lambda

LAMBDA_MIN, LAMBDA_MAX = 1e-4, 1e4


class SpeedError(RuntimeError):
    pass


@dataclass(frozen=True)
class SpeedResult:
    c_star: float
    lambda_star: float
    L: float
    evaluations: int
    bracket: tuple[float, float]


def homogenized_speed(means: MeanSet) -> float:
    return 2.0 * math.sqrt(means.a_harm * means.mu_arith)


def lower_bound(a: PeriodicCoefficient, r: ReactionModel) -> float:
    """``2 sqrt(alpha1 <mu>_A)``, valid for every period."""
    return 2.0 * math.sqrt(a.alpha1 * arithmetic_mean(r.mu))


def minimal_speed(a: PeriodicCoefficient, r: ReactionModel, L: float,
                  grid: PeriodicGrid | None = None, rtol: float = 1e-8) -> SpeedResult:
    """Minimize ``k(lambda, L) / lambda`` over ``lambda > 0``.

    The bracket grows geometrically from the homogenized minimizer
    ``sqrt(<mu>_A / <a>_H)``; Brent's method (golden section with parabolic
    steps) then refines it to relative tolerance ``rtol`` in lambda.
    """
    grid = grid or PeriodicGrid()
    mu = r.mu
    count = 0
    cache: dict[float, float] = {}

    def h(lam: float) -> float:
        nonlocal count
        if lam in cache:
            return cache[lam]
        if not (LAMBDA_MIN <= lam <= LAMBDA_MAX):
            raise SpeedError(f"no interior minimum found for lambda in [{LAMBDA_MIN:g}, {LAMBDA_MAX:g}]")
        count += 1
        try:
            val = k_of_lambda(a, mu, L, lam, grid) / lam
        except EigenSolverError as exc:
            raise SpeedError(f"eigen-solve failed at lambda = {lam:.6g}: {exc}") from exc
        cache[lam] = val
        return val

    lam0 = math.sqrt(arithmetic_mean(mu) / harmonic_mean(a))
    ratio = 1.5
    lo, mid, hi = lam0 / ratio, lam0, lam0 * ratio
    h_lo, h_mid, h_hi = h(lo), h(mid), h(hi)
    while not (h_mid <= h_lo and h_mid <= h_hi):
        if h_lo < h_mid:
            hi, h_hi = mid, h_mid
            mid, h_mid = lo, h_lo
            lo = lo / ratio
            h_lo = h(lo)
        else:
            lo, h_lo = mid, h_mid
            mid, h_mid = hi, h_hi
            hi = hi * ratio
            h_hi = h(hi)

    lam_star, c_star, _, _ = brent(h, brack=(lo, mid, hi), tol=rtol, full_output=True)
    lam_star = float(lam_star)
    c_star = float(c_star)
    if h_mid < c_star:  # brent never returns worse than the bracket centre in practice
        lam_star, c_star = mid, h_mid
    return SpeedResult(c_star=c_star, lambda_star=lam_star, L=L, evaluations=count,
                       bracket=(lo, hi))


@dataclass(frozen=True)
class SpeedRow:
    L: float
    c_star: float
    lambda_star: float
    c_hom: float
    error: str | None = None

    @property
    def gap(self) -> float:
        return self.c_star - self.c_hom


def speed_sweep(a: PeriodicCoefficient, r: ReactionModel, L_list, grid: PeriodicGrid | None = None,
                threads: int = 1) -> list[SpeedRow]:
    """One row per period; a failing ``L`` yields a NaN row carrying the error message."""
    L_list = check_sweep_periods(L_list)
    grid = grid or PeriodicGrid()
    c_hom = 2.0 * math.sqrt(harmonic_mean(a) * arithmetic_mean(r.mu))

    def one(L):
        try:
            res = minimal_speed(a, r, L, grid)
        except (SpeedError, EigenSolverError) as exc:
            return SpeedRow(L, math.nan, math.nan, c_hom, str(exc))
        return SpeedRow(L, res.c_star, res.lambda_star, c_hom)

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(one, L_list))
    return [one(L) for L in L_list]


SPEED_HEADER = ("L", "c_star", "lambda_star", "c_hom", "gap")


def speed_rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SPEED_HEADER)
    for row in rows:
        w.writerow([repr(row.L), repr(row.c_star), repr(row.lambda_star), repr(row.c_hom), repr(row.gap)])
    return buf.getvalue()


def is_local_min(a, r, res: SpeedResult, grid=None, rel: float = 1e-3, slack: float = 1e-9) -> bool:
    grid = grid or PeriodicGrid()
    h0 = k_of_lambda(a, r.mu, res.L, res.lambda_star, grid) / res.lambda_star
    for s in (1 - rel, 1 + rel):
        lam = res.lambda_star * s
        if k_of_lambda(a, r.mu, res.L, lam, grid) / lam < h0 - slack:
            return False
    return bool(np.isfinite(h0))
