"""Time-dependent simulation of ``u_t = (a(x/L) u_x)_x + f(x/L, u)`` and front diagnostics.

The line is truncated to ``[x_left, x_left + 2X]`` with ``2X`` a multiple of
``L`` and ``L / n_per`` nodes per period. Stepping is IMEX: backward-Euler
diffusion (one banded solve, factorized once) and explicit reaction. The
front invades to the left, so the frame is shifted left by whole periods to
keep it inside the domain; whole-period shifts are exact symmetries of the
equation and keep the coefficient grid, the matrix and the right boundary
value unchanged.
"""
from __future__ import annotations

import csv
import io
import math
import struct
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sp
from scipy.integrate import trapezoid
from scipy.optimize import bisect
from scipy.sparse.linalg import spsolve, splu

from .coefficients import PeriodicCoefficient, ReactionModel, compute_means, find_p0
from .discretization import PeriodicGrid
from .steady import FrontProfile, homogenized_front, stationary_state

INITIAL_KINDS = ("step", "tanh", "bump", "subsolution", "profile", "equilibrium")


class SimulationError(RuntimeError):
    pass


@dataclass(frozen=True)
class SimulationConfig:
    """Numerical parameters of one run.

    ``X`` is the half-width of the domain and must be a whole number of periods.
    Snapshots of ``u`` are kept every ``snapshot_dt`` (rounded to whole steps)
    from ``record_from`` on. Setting ``align_speed = c`` shortens ``dt`` so that
    ``L / c`` is a whole number of steps and snapshots land exactly one
    pulsation apart.
    """

    L: float
    X: float = 40.0
    n_per: int = 32
    dt: float = 0.01
    T: float = 60.0
    theta: float = 0.5
    initial: str = "step"
    x0: float = 0.0
    tanh_rate: float = 0.5
    bump_width: float = 2.0
    snapshot_dt: float = 0.5
    record_from: float = 0.0
    recenter: bool = True
    align_speed: float | None = None

    def __post_init__(self):
        if not self.L > 0:
            raise ValueError(f"period must be positive, got {self.L}")
        ratio = self.X / self.L
        if not self.X > 0 or abs(ratio - round(ratio)) > 1e-9 * max(1.0, ratio):
            raise ValueError(f"X = {self.X} must be a positive whole multiple of L = {self.L}")
        if not 0 < self.theta < 1:
            raise ValueError("theta must lie in (0, 1)")
        if self.n_per < 16:
            raise ValueError("n_per must be at least 16")
        if not (self.dt > 0 and self.T > 0):
            raise ValueError("dt and T must be positive")
        if self.initial not in INITIAL_KINDS:
            raise ValueError(f"unknown initial condition {self.initial!r}; choose from {INITIAL_KINDS}")
        if self.align_speed is not None and not self.align_speed > 0:
            raise ValueError("align_speed must be positive")

    @property
    def periods(self) -> int:
        return int(round(2 * self.X / self.L))

    @property
    def N_x(self) -> int:
        return self.periods * self.n_per + 1

    @property
    def dx(self) -> float:
        return self.L / self.n_per

    def step_plan(self) -> tuple[float, int, int]:
        """``(dt_eff, n_steps, snapshot_stride)``."""
        if self.align_speed is not None:
            tau = self.L / self.align_speed
            m = math.ceil(tau / self.dt * (1 - 1e-12))
            if m > 10**6:
                raise ValueError(f"cannot align snapshots to L/c = {tau:.3g} with dt = {self.dt:g}")
            dt = tau / m
            stride = m * max(1, round(self.snapshot_dt / tau))
        else:
            dt = self.dt
            stride = max(1, round(self.snapshot_dt / dt))
        return dt, int(round(self.T / dt)), stride


def stability_bound(r: ReactionModel, n: int = 256) -> float:
    """Largest admissible ``dt`` for the explicit reaction, ``0.5 / max |f_s|`` on ``[0, M]``."""
    y = (np.arange(n) / n)[:, None]
    s = np.linspace(0.0, float(r.M), 65)[None, :]
    fmax = float(np.max(np.abs(r.ds(y, s))))
    return math.inf if fmax == 0 else 0.5 / fmax


@dataclass(frozen=True, eq=False)
class FrontField:
    """Space-time samples of one run.

    Snapshot ``j`` holds ``u[j, i]`` at ``x = x0[j] + i dx``; ``x0`` moves by whole
    periods when the frame is recentred. ``level_x`` is the level-set position
    recorded at every step.
    """

    times: np.ndarray
    x0: np.ndarray
    dx: float
    u: np.ndarray
    level_times: np.ndarray
    level_x: np.ndarray
    L: float
    n_per: int
    p0: float
    theta: float
    dt: float
    monotone_in_t: bool
    below_stationary: bool
    u_min: float
    u_max: float
    boundary_hit: float | None
    config: SimulationConfig = field(repr=False)

    @property
    def N_x(self) -> int:
        return self.u.shape[1]

    @property
    def T(self) -> float:
        return float(self.level_times[-1])

    def offsets(self) -> np.ndarray:
        """Absolute node index of the first node of every snapshot."""
        return np.rint(self.x0 / self.dx).astype(np.int64)

    def xs(self, j: int) -> np.ndarray:
        return self.x0[j] + self.dx * np.arange(self.N_x)

    def level_at(self, t: float) -> float:
        return float(np.interp(t, self.level_times, self.level_x))


def _level_position(u, x_left, dx, thr) -> float:
    above = u >= thr
    i = int(np.argmax(above))
    if not above[i]:
        return math.nan
    if i == 0:
        return x_left
    u0, u1 = u[i - 1], u[i]
    return x_left + dx * (i - 1 + (thr - u0) / (u1 - u0))


def _initial_data(kind, xs, pL, p0, cfg, r, a, grid_y, A_diff, profile):
    x = xs
    if kind == "step":
        return np.where(x >= cfg.x0, pL, 0.0)
    if kind == "tanh":
        return pL * 0.5 * (1.0 + np.tanh(cfg.tanh_rate * (x - cfg.x0)))
    if kind == "bump":
        w = cfg.bump_width
        return np.where(np.abs(x - cfg.x0) < w, pL * np.cos(0.5 * np.pi * (x - cfg.x0) / w) ** 2, 0.0)
    if kind == "equilibrium":
        return pL.copy()
    if kind == "profile":
        return profile(x - cfg.x0) * pL / p0
    if kind == "subsolution":
        return _subsolution(x, pL, cfg, r, grid_y, A_diff)
    raise ValueError(kind)


def _subsolution(x, pL, cfg, r, y, A_diff, kappa=0.999):
    """Zero left of ``x0``, then ``kappa`` times the stationary state of the half line.

    For KPP reactions ``f(kappa w) >= kappa f(w)``, so the scaled state is a
    discrete subsolution and the run increases in time at every node.
    """
    n = x.size
    i0 = int(np.searchsorted(x, cfg.x0))
    if i0 < 1 or i0 >= n - 2:
        raise ValueError("x0 must lie strictly inside the domain")
    idx = np.arange(i0 + 1, n - 1)  # unknowns strictly between the zero node and the right end
    lower = A_diff[0][idx]
    upper = A_diff[1][idx]
    m = idx.size
    J0 = sp.diags([lower[1:], -(lower + upper), upper[:-1]], [-1, 0, 1], format="csc")
    rhs_bc = np.zeros(m)
    rhs_bc[-1] = upper[-1] * pL[-1]
    yy = y[idx]
    w = pL[idx] * np.tanh(0.5 * (x[idx] - x[i0]))
    M = float(r.M)

    def resid(w):
        return J0 @ w + rhs_bc + r(yy, w)

    F = resid(w)
    res = float(np.max(np.abs(F)))
    for _ in range(100):
        step = spsolve((J0 + sp.diags(r.ds(yy, w))).tocsc(), -F)
        if float(np.max(np.abs(step))) <= 1e-14 * M:
            break
        t = 1.0
        while t > 1e-6:
            cand = w + t * step
            if np.all(cand > 0):
                Fc = resid(cand)
                rc = float(np.max(np.abs(Fc)))
                if rc < (1 - 1e-4 * t) * res or float(np.max(np.abs(step))) < 1e-8 * M:
                    w, F, res = cand, Fc, rc
                    break
            t *= 0.5
        else:
            break
    if np.any(w <= 0) or np.any(w > pL[idx] * (1 + 1e-9)):
        raise SimulationError("half-line stationary state not found")
    u = np.zeros(n)
    u[idx] = kappa * w
    u[-1] = pL[-1]
    return u


def simulate(a: PeriodicCoefficient, r: ReactionModel, cfg: SimulationConfig,
             p_right: np.ndarray | float | None = None, p_ref: float | None = None,
             profile: FrontProfile | None = None) -> FrontField:
    """Advance the front from the configured initial data to time ``T``.

    Dirichlet values are the initial values at the two ends, which for every
    front-like kind are 0 on the left and the stationary state on the right.
    ``p_right`` overrides the right state (needed when ``f`` has no positive
    stationary state, e.g. ``f = 0``); ``p_ref`` overrides ``p0`` in the level.
    """
    dt, n_steps, stride = cfg.step_plan()
    bound = stability_bound(r)
    if dt > bound * (1 + 1e-12):
        raise ValueError(f"dt = {dt:g} exceeds the explicit-reaction bound 0.5/max|f_s| = {bound:.6g}")
    N = cfg.N_x
    dx = cfg.dx
    n_per = cfg.n_per
    L = cfg.L
    x_left = -cfg.X
    xs = x_left + dx * np.arange(N)
    y = (np.arange(N) % n_per) / n_per

    if p_ref is None:
        p_ref = find_p0(r)
    if p_right is None:
        cell = stationary_state(a, r, L, PeriodicGrid(n_per)).values
    else:
        cell = np.broadcast_to(np.asarray(p_right, dtype=float), (n_per,)).copy()
    pL = cell[np.arange(N) % n_per]

    # conservative diffusion, a at half nodes
    a_half = np.asarray(a((np.arange(N - 1) % n_per + 0.5) / n_per), dtype=float) / (dx * dx)
    lower = np.zeros(N)
    upper = np.zeros(N)
    lower[1:] = a_half
    upper[:-1] = a_half

    if cfg.initial == "profile" and profile is None:
        means = compute_means(a, r)
        profile = homogenized_front(means, r, means.c_star_hom)
    u = _initial_data(cfg.initial, xs, pL, p_ref, cfg, r, a, y, (lower, upper), profile)
    left_bc, right_bc = float(u[0]), float(u[-1])
    left_cell = u[:n_per].copy()  # far-field state ahead of the front, frozen like the boundary values

    inner = np.arange(1, N - 1)
    diag = np.ones(N)
    diag[inner] += dt * (lower[inner] + upper[inner])
    lo = np.zeros(N - 1)
    up = np.zeros(N - 1)
    lo[inner - 1] = -dt * lower[inner]  # entry (i, i-1)
    up[inner] = -dt * upper[inner]      # entry (i, i+1)
    lu = splu(sp.diags([lo, diag, up], [-1, 0, 1], format="csc"))

    M = float(r.M)
    init_max = float(u.max())
    cap = max(M, init_max)
    thr = cfg.theta * p_ref
    record_from_step = int(math.ceil(cfg.record_from / dt - 1e-9))

    snaps_t, snaps_x0, snaps_u = [], [], []
    lev_t = np.empty(n_steps + 1)
    lev_x = np.empty(n_steps + 1)
    monotone = True
    below = bool(np.all(u <= pL + 1e-12))
    u_min, u_max = float(u.min()), float(u.max())
    boundary_hit = None
    margin = 10 * L
    center = x_left + cfg.X

    def record(k):
        snaps_t.append(k * dt)
        snaps_x0.append(x_left)
        snaps_u.append(u.copy())

    lev_t[0] = 0.0
    lev_x[0] = _level_position(u, x_left, dx, thr)
    if record_from_step == 0:
        record(0)
    for k in range(1, n_steps + 1):
        rhs = u + dt * r(y, u)
        rhs[0], rhs[-1] = left_bc, right_bc
        new = lu.solve(rhs)
        if not np.all(np.isfinite(new)):
            raise SimulationError(f"non-finite values at t = {k * dt:.6g}")
        lo_v, hi_v = float(new.min()), float(new.max())
        if lo_v < -1e-10 or hi_v > 2 * M:
            raise SimulationError(f"u left [-1e-10, 2M] at t = {k * dt:.6g} (range {lo_v:.3g}..{hi_v:.3g})")
        if monotone and np.any(new < u - 1e-12):
            monotone = False
        u = new
        u_min, u_max = min(u_min, lo_v), max(u_max, hi_v)
        if below and np.any(u > pL + 1e-12):
            below = False
        xt = _level_position(u, x_left, dx, thr)
        if cfg.recenter and math.isfinite(xt) and xt < center - cfg.X / 4:
            m = int(round((center - xt) / L)) * n_per
            if m > 0:
                # new nodes take the initial left state, whole periods so the phase is kept
                u = np.concatenate([np.tile(left_cell, m // n_per), u[:-m]])
                u[-1] = right_bc
                x_left -= m * dx
                center -= m * dx
        elif (boundary_hit is None and math.isfinite(xt)
              and (xt - x_left < margin or x_left + 2 * cfg.X - xt < margin)):
            boundary_hit = k * dt
        lev_t[k] = k * dt
        lev_x[k] = xt
        if k >= record_from_step and (k - record_from_step) % stride == 0:
            record(k)

    if not snaps_t:
        record(n_steps)
    U = np.array(snaps_u)
    for arr in (U, lev_t, lev_x):
        arr.setflags(write=False)
    times = np.array(snaps_t)
    x0 = np.array(snaps_x0)
    times.setflags(write=False)
    x0.setflags(write=False)
    return FrontField(times=times, x0=x0, dx=dx, u=U, level_times=lev_t, level_x=lev_x, L=L,
                      n_per=n_per, p0=p_ref, theta=cfg.theta, dt=dt, monotone_in_t=monotone,
                      below_stationary=below, u_min=u_min, u_max=u_max, boundary_hit=boundary_hit,
                      config=cfg)


# -- diagnostics ----------------------------------------------------------------------


@dataclass(frozen=True)
class SpeedEstimate:
    c_measured: float
    fit_window: tuple[float, float]
    fit_residual: float
    crossings: float


def measure_speed(fld: FrontField, window: tuple[float, float] | None = None,
                  min_crossings: float = 20.0) -> SpeedEstimate:
    """Least-squares slope of the level-set trace on ``[T/2, T]`` (or ``window``)."""
    T = fld.T
    t_a, t_b = window if window is not None else (T / 2, T)
    if fld.boundary_hit is not None:
        if fld.boundary_hit <= t_a:
            raise SimulationError(f"front came within 10 L of the boundary at t = {fld.boundary_hit:.4g}, "
                                  "before the fit window; enlarge X")
        t_b = min(t_b, fld.boundary_hit)
    sel = (fld.level_times >= t_a) & (fld.level_times <= t_b)
    t = fld.level_times[sel]
    xq = fld.level_x[sel]
    if t.size < 3 or not np.all(np.isfinite(xq)):
        raise SimulationError("level set undefined in the fit window")
    slope, icpt = np.polyfit(t, xq, 1)
    travel = abs(float(xq[-1] - xq[0]))
    crossings = travel / fld.L
    if crossings < min_crossings:
        raise SimulationError(f"no propagating level set: {crossings:.3g} period crossings in the fit window "
                              f"(need {min_crossings:g})")
    dev = float(np.max(np.abs(xq - (slope * t + icpt))))
    if dev >= 0.05 * travel:
        raise SimulationError(f"level set is not moving linearly: deviation {dev:.3g} vs travel {travel:.3g}")
    return SpeedEstimate(c_measured=abs(float(slope)), fit_window=(float(t[0]), float(t[-1])),
                         fit_residual=dev, crossings=crossings)


def pulsating_residual(fld: FrontField, L: float, c: float, k: int = 1,
                       window: tuple[float, float] | None = None) -> float:
    """``max ||u(t + kL/c, .) - u(t, . + kL)||_inf`` over stored pairs in ``window``.

    Only the middle half of the later snapshot's domain is compared.
    """
    tau = k * L / c
    shift = k * L / fld.dx
    if abs(shift - round(shift)) > 1e-9:
        raise ValueError("kL is not a whole number of grid cells")
    shift = int(round(shift))
    times = fld.times
    t_a, t_b = window if window is not None else (times[0], times[-1])
    offs = fld.offsets()
    N = fld.N_x
    lo_i, hi_i = N // 4, 3 * N // 4
    best = -1.0
    for j in range(times.size):
        if times[j] < t_a - 1e-12:
            continue
        target = times[j] + tau
        if target > t_b + 1e-9:
            break
        jj = int(np.searchsorted(times, target - 1e-9 * max(1.0, tau)))
        if jj >= times.size or abs(times[jj] - target) > 1e-7 * max(1.0, tau):
            continue
        # node i of the later snapshot sits at absolute index offs[jj] + i;
        # the earlier snapshot is read kL further right
        g = offs[jj] + np.arange(lo_i, hi_i) + shift
        src = g - offs[j]
        ok = (src >= 0) & (src < N)
        if not np.all(ok):
            continue
        d = float(np.max(np.abs(fld.u[jj, lo_i:hi_i] - fld.u[j, src])))
        best = max(best, d)
    if best < 0:
        raise ValueError(f"no snapshot pair {tau:.6g} apart in the window: snapshots are not aligned "
                         "to L/c (set align_speed)")
    return best


def _cell_mass(fld: FrontField, x_shift: float) -> np.ndarray:
    """``X(t_j) = int_0^1 u(t_j, x + x_shift) dx`` by the trapezoid rule on grid nodes."""
    n = 1.0 / fld.dx
    if abs(n - round(n)) > 1e-9 or abs(x_shift / fld.dx - round(x_shift / fld.dx)) > 1e-9:
        raise ValueError("the unit interval and the shift must be whole numbers of cells")
    n = int(round(n))
    start = int(round(x_shift / fld.dx)) - fld.offsets()
    if np.any(start < 0) or np.any(start + n >= fld.N_x):
        raise ValueError("unit cell outside the stored domain")
    w = np.full(n + 1, fld.dx)
    w[[0, -1]] *= 0.5
    rows = np.arange(fld.times.size)[:, None]
    cols = start[:, None] + np.arange(n + 1)[None, :]
    return fld.u[rows, cols] @ w


def _running_integral(t, v, s):
    """Integral of the piecewise-linear interpolant of ``(t, v)`` from ``t[0]`` to ``s``."""
    dtk = np.diff(t)
    C = np.concatenate([[0.0], np.cumsum(0.5 * dtk * (v[1:] + v[:-1]))])
    s = np.asarray(s, dtype=float)
    j = np.clip(np.searchsorted(t, s, side="right") - 1, 0, t.size - 2)
    tau = s - t[j]
    slope = (v[j + 1] - v[j]) / dtk[j]
    return C[j] + v[j] * tau + 0.5 * slope * tau * tau


def normalize_phase(fld: FrontField, p0: float, x_shift: float = 0.0, tol: float | None = None) -> float:
    """Time shift ``s*`` with ``int_0^1 int_0^1 u(t + s*, x + x_shift) dt dx = p0 / 2``.

    The inner integrals use the stored snapshots (linear in time between them);
    the root is bracketed on the snapshot times and refined by bisection.
    """
    t = fld.times
    if t.size < 2 or t[-1] - t[0] < 1.0:
        raise ValueError("need snapshots spanning more than one time unit")
    mass = _cell_mass(fld, x_shift)
    half = 0.5 * p0

    def I(s):
        return float(_running_integral(t, mass, s + 1.0) - _running_integral(t, mass, s))

    s_lo, s_hi = float(t[0]), float(t[-1] - 1.0)
    grid = t[t <= s_hi]
    vals = np.array([I(s) for s in grid]) - half
    if np.all(np.abs(vals) <= 1e-12 * max(1.0, p0)):
        return 0.0 if s_lo <= 0.0 <= s_hi else s_lo
    sign = np.flatnonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) <= 0)
    if sign.size == 0:
        raise ValueError("the cell average does not cross p0/2 inside the simulated span")
    j = int(sign[0])
    if vals[j] == 0:
        return float(grid[j])
    tol = tol if tol is not None else 1e-10 * max(1.0, abs(grid[j]))
    return float(bisect(lambda s: I(s) - half, grid[j], grid[j + 1], xtol=tol))


def profile_phase(profile: FrontProfile, c: float, n: int = 257) -> float:
    """Shift ``xi`` such that ``U0(x + c t + xi)`` satisfies the unit-square normalization."""
    q = np.linspace(0.0, 1.0, n)
    w = np.full(n, 1.0 / (n - 1))
    w[[0, -1]] *= 0.5
    X, Tm = np.meshgrid(q, q, indexing="ij")
    half = 0.5 * profile.p0

    def I(xi):
        return float(w @ profile(X + c * Tm + xi) @ w) - half

    lo, hi = -1.0, 1.0
    while I(lo) > 0:
        lo *= 2
    while I(hi) < 0:
        hi *= 2
    return float(bisect(I, lo, hi, xtol=1e-12))


def profile_compare(fld: FrontField, profile: FrontProfile, window: tuple[float, float],
                    s_star: float, x_shift: float = 0.0, c: float | None = None) -> float:
    """Discrete L2 distance over ``x in (0, 1)``, ``t in window`` between the normalized
    field ``u(t + s*, x + x_shift)`` and ``U0(x + c t + xi)``.

    ``xi`` puts the profile under the same unit-square normalization as the field,
    so both sides are phase-normalized the same way. Trapezoid rule in ``x`` on
    grid nodes and in ``t`` on snapshot times.
    """
    c = profile.c if c is None else c
    t_a, t_b = window
    if not t_b > t_a:
        raise ValueError("empty window")
    rel = fld.times - s_star
    if t_a < rel[0] - 1e-9 or t_b > rel[-1] + 1e-9:
        raise ValueError(f"window {window} outside the simulated range [{rel[0]:.4g}, {rel[-1]:.4g}]")
    xi = profile_phase(profile, c)
    n = int(round(1.0 / fld.dx))
    start = int(round(x_shift / fld.dx)) - fld.offsets()
    if np.any(start < 0) or np.any(start + n >= fld.N_x):
        raise ValueError("unit cell outside the stored domain")
    x = np.arange(n + 1) * fld.dx
    wx = np.full(n + 1, fld.dx)
    wx[[0, -1]] *= 0.5
    sel = np.flatnonzero((rel >= t_a - 1e-9) & (rel <= t_b + 1e-9))
    if sel.size < 2:
        raise ValueError("fewer than two snapshots inside the window")
    e2 = np.empty(sel.size)
    for q, j in enumerate(sel):
        uj = fld.u[j, start[j]: start[j] + n + 1]
        e2[q] = wx @ (uj - profile(x + c * rel[j] + xi)) ** 2
    return float(math.sqrt(trapezoid(e2, rel[sel])))


# -- composite experiments ---------------------------------------------------------------


@dataclass(frozen=True)
class PulsatingCheck:
    c_measured: float
    c_aligned: float
    residual: float
    estimate: SpeedEstimate


def pulsating_check(a, r, cfg: SimulationConfig, late: float = 0.25, k: int = 1,
                    first: FrontField | None = None) -> PulsatingCheck:
    """Measure the speed, rerun with snapshots one pulsation ``L/c`` apart, return the late residual.

    ``late`` is the fraction of ``[0, T]`` at the end used as the window;
    ``first`` reuses an existing run of ``cfg`` for the speed measurement.
    """
    first = first if first is not None else simulate(a, r, cfg)
    est = measure_speed(first)
    t_from = cfg.T * (1 - late)
    cfg2 = replace(cfg, align_speed=est.c_measured, record_from=t_from, snapshot_dt=0.0)
    second = simulate(a, r, cfg2)
    res = pulsating_residual(second, cfg.L, est.c_measured, k=k)
    return PulsatingCheck(c_measured=est.c_measured, c_aligned=measure_speed(second).c_measured,
                          residual=res, estimate=est)


@dataclass(frozen=True)
class ComparisonRow:
    L: float
    c_measured: float
    c_hom: float
    s_star: float
    x_shift: float
    distance: float


def compare_with_homogenized(a, r, L: float, T: float = 16.0, dt: float = 0.002, n_per: int = 32,
                             X: float = 20.0, window: tuple[float, float] = (-2.0, 2.0),
                             initial: str = "profile", theta: float = 0.5,
                             snapshot_dt: float = 0.01) -> ComparisonRow:
    """Simulate, phase-normalize late in the run and measure the L2 distance to ``U0(x + c t)``."""
    means = compute_means(a, r)
    prof = homogenized_front(means, r, means.c_star_hom)
    t_ref = T - window[1] - 1.5
    record_from = max(0.0, t_ref + window[0] - 1.0)
    cfg = SimulationConfig(L=L, X=X, n_per=n_per, dt=dt, T=T, theta=theta, initial=initial,
                           snapshot_dt=snapshot_dt, record_from=record_from)
    fld = simulate(a, r, cfg, profile=prof)
    x_front = fld.level_at(t_ref + 0.5)
    x_shift = L * round((x_front - 0.5) / L)
    s_star = normalize_phase(fld, means.p0, x_shift)
    dist = profile_compare(fld, prof, window, s_star, x_shift, c=means.c_star_hom)
    c_meas = measure_speed(fld, min_crossings=0.0).c_measured
    return ComparisonRow(L=L, c_measured=c_meas, c_hom=means.c_star_hom, s_star=s_star,
                         x_shift=x_shift, distance=dist)


# -- output ---------------------------------------------------------------------------------


def level_trace_csv(fld: FrontField, every: int = 1) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("t", "x_theta"))
    for t, x in zip(fld.level_times[::every], fld.level_x[::every]):
        w.writerow([repr(float(t)), repr(float(x))])
    return buf.getvalue()


def field_csv(fld: FrontField) -> str:
    """Long format ``t,x,u``, one line per stored node."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("t", "x", "u"))
    for j, t in enumerate(fld.times):
        for x, v in zip(fld.xs(j), fld.u[j]):
            w.writerow([repr(float(t)), repr(float(x)), repr(float(v))])
    return buf.getvalue()


_HEADER = struct.Struct("<qqd")


def write_field_binary(fld: FrontField, path) -> None:
    """Layout (little endian): int64 N_x, int64 n_snap, float64 dx, float64 times[n_snap],
    float64 x0[n_snap], float64 u[n_snap, N_x] row-major."""
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(fld.N_x, fld.times.size, fld.dx))
        fh.write(np.ascontiguousarray(fld.times, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(fld.x0, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(fld.u, dtype="<f8").tobytes())


def read_field_binary(path):
    """Inverse of :func:`write_field_binary`: ``(times, x0, dx, u)``."""
    with open(path, "rb") as fh:
        N, n, dx = _HEADER.unpack(fh.read(_HEADER.size))
        times = np.frombuffer(fh.read(8 * n), dtype="<f8")
        x0 = np.frombuffer(fh.read(8 * n), dtype="<f8")
        u = np.frombuffer(fh.read(8 * n * N), dtype="<f8").reshape(n, N)
    return times, x0, dx, u
