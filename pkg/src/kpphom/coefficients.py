"""Periodic coefficients, KPP reactions and the homogenized scalar quantities.

A coefficient lives on the unit period in the fast variable ``y = x / L``.
Trigonometric series are the canonical representation; sampled fields are
converted to their trigonometric interpolant on construction, so evaluation
and differentiation share one code path.
"""
from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

TWO_PI = 2.0 * np.pi

#: default size of the composite-trapezoid quadrature grid
QUAD_N = 512


@dataclass(frozen=True, eq=False)
class PeriodicCoefficient:
    """A 1-periodic scalar field ``c(y) = c0 + sum_k cos_k cos(2 pi k y) + sin_k sin(2 pi k y)``.

    ``alpha1``/``alpha2`` are the declared lower/upper bounds. When omitted they
    are taken from a dense sampling of the series. Bounds are *declared*, not
    enforced here: :func:`validate_hypotheses` checks them.
    """

    const: float
    cos: np.ndarray = field(default_factory=lambda: np.zeros(0))
    sin: np.ndarray = field(default_factory=lambda: np.zeros(0))
    alpha1: float | None = None
    alpha2: float | None = None
    nyquist: float = 0.0
    nyquist_k: int = 0

    def __post_init__(self):
        cos = np.atleast_1d(np.asarray(self.cos, dtype=float))
        sin = np.atleast_1d(np.asarray(self.sin, dtype=float))
        n = max(cos.size, sin.size)
        cos = np.pad(cos, (0, n - cos.size))
        sin = np.pad(sin, (0, n - sin.size))
        object.__setattr__(self, "cos", cos)
        object.__setattr__(self, "sin", sin)
        object.__setattr__(self, "const", float(self.const))
        if self.alpha1 is None or self.alpha2 is None:
            vals = self(np.arange(4096) / 4096.0)
            if self.alpha1 is None:
                object.__setattr__(self, "alpha1", float(vals.min()))
            if self.alpha2 is None:
                object.__setattr__(self, "alpha2", float(vals.max()))

    @classmethod
    def constant(cls, value: float) -> PeriodicCoefficient:
        return cls(const=value)

    @classmethod
    def from_samples(cls, samples, alpha1=None, alpha2=None) -> PeriodicCoefficient:
        """Trigonometric interpolant of uniform samples ``samples[i] = c(i / N)``."""
        samples = np.asarray(samples, dtype=float)
        n = samples.size
        if n < 2:
            raise ValueError("need at least two samples")
        X = np.fft.rfft(samples) / n
        kmax = (n - 1) // 2
        cos = 2.0 * X[1 : kmax + 1].real
        sin = -2.0 * X[1 : kmax + 1].imag
        nyq = float(X[n // 2].real) if n % 2 == 0 else 0.0
        return cls(
            const=float(X[0].real),
            cos=cos,
            sin=sin,
            alpha1=alpha1,
            alpha2=alpha2,
            nyquist=nyq,
            nyquist_k=n // 2 if n % 2 == 0 else 0,
        )

    @property
    def degree(self) -> int:
        return max(self.cos.size, self.nyquist_k)

    @property
    def is_constant(self) -> bool:
        return not (np.any(self.cos) or np.any(self.sin) or self.nyquist)

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        out = np.full(y.shape, self.const)
        for k in range(1, self.cos.size + 1):
            ck, sk = self.cos[k - 1], self.sin[k - 1]
            if ck:
                out = out + ck * np.cos(TWO_PI * k * y)
            if sk:
                out = out + sk * np.sin(TWO_PI * k * y)
        if self.nyquist:
            out = out + self.nyquist * np.cos(TWO_PI * self.nyquist_k * y)
        return out

    def derivative(self, y):
        """Exact derivative d/dy of the series."""
        y = np.asarray(y, dtype=float)
        out = np.zeros(y.shape)
        for k in range(1, self.cos.size + 1):
            w = TWO_PI * k
            ck, sk = self.cos[k - 1], self.sin[k - 1]
            if ck:
                out = out - ck * w * np.sin(w * y)
            if sk:
                out = out + sk * w * np.cos(w * y)
        if self.nyquist:
            w = TWO_PI * self.nyquist_k
            out = out - self.nyquist * w * np.sin(w * y)
        return out

    def scaled(self, factor: float) -> PeriodicCoefficient:
        return PeriodicCoefficient(
            const=self.const * factor,
            cos=self.cos * factor,
            sin=self.sin * factor,
            alpha1=None if self.alpha1 is None else self.alpha1 * factor,
            alpha2=None if self.alpha2 is None else self.alpha2 * factor,
            nyquist=self.nyquist * factor,
            nyquist_k=self.nyquist_k,
        )


@dataclass(frozen=True, eq=False)
class ReactionModel:
    """Nonlinearity ``f(y, s)`` on the unit cell.

    ``f`` and ``df`` (the partial derivative in ``s``) must broadcast over numpy
    arrays. ``mu`` is the linearization at ``s = 0``. ``M`` is the saturation
    bound and ``s0`` an optional common zero ``f(y, s0) = 0``.
    """

    f: Callable[[np.ndarray, np.ndarray], np.ndarray]
    mu: PeriodicCoefficient
    M: float
    s0: float | None = None
    df: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None
    name: str = "custom"

    def __call__(self, y, s):
        return self.f(np.asarray(y, dtype=float), np.asarray(s, dtype=float))

    def ds(self, y, s):
        y = np.asarray(y, dtype=float)
        s = np.asarray(s, dtype=float)
        if self.df is not None:
            return self.df(y, s)
        eps = 1e-7 * np.maximum(1.0, np.abs(s))
        return (self.f(y, s + eps) - self.f(y, s - eps)) / (2.0 * eps)


def logistic(mu: PeriodicCoefficient, capacity: float = 1.0) -> ReactionModel:
    """``f(y, s) = mu(y) s (1 - s / K)``; every ``y`` shares the zero ``s0 = K``."""
    K = float(capacity)

    def f(y, s):
        return mu(y) * s * (1.0 - s / K)

    def df(y, s):
        return mu(y) * (1.0 - 2.0 * s / K)

    return ReactionModel(f=f, df=df, mu=mu, M=K, s0=K, name="logistic")


def quadratic(mu: PeriodicCoefficient, nu: PeriodicCoefficient | float = 1.0,
              M: float | None = None) -> ReactionModel:
    """``f(y, s) = mu(y) s - nu(y) s^2``; the zero of ``f(y, .)`` moves with ``y``."""
    if not isinstance(nu, PeriodicCoefficient):
        nu = PeriodicCoefficient.constant(nu)

    def f(y, s):
        return s * (mu(y) - nu(y) * s)

    def df(y, s):
        return mu(y) - 2.0 * nu(y) * s

    if M is None:
        M = float(mu.alpha2 / nu.alpha1)
    common = None
    if mu.is_constant and nu.is_constant:
        common = mu.const / nu.const
    return ReactionModel(f=f, df=df, mu=mu, M=M, s0=common, name="quadratic")


@dataclass(frozen=True)
class MeanSet:
    a_arith: float
    a_harm: float
    mu_arith: float
    p0: float
    c_star_hom: float


def _quad_nodes(n: int = QUAD_N) -> np.ndarray:
    return np.arange(n) / n


def arithmetic_mean(c: PeriodicCoefficient | Callable, n: int = QUAD_N) -> float:
    """Integral of ``c`` over one period (composite trapezoid, uniform nodes)."""
    if isinstance(c, PeriodicCoefficient):
        n = max(n, 8 * c.degree + 8)
    return float(np.mean(c(_quad_nodes(n))))


def harmonic_mean(c: PeriodicCoefficient | Callable, n: int = QUAD_N) -> float:
    """``(int_0^1 1 / c)^-1``. Raises ``ValueError`` if any sample is ``<= 0``."""
    if isinstance(c, PeriodicCoefficient):
        n = max(n, 8 * c.degree + 8)
    vals = np.asarray(c(_quad_nodes(n)), dtype=float)
    if np.any(vals <= 0):
        i = int(np.argmin(vals))
        raise ValueError(f"harmonic mean needs a positive field; c({i / n:.6g}) = {vals[i]:.6g}")
    return float(1.0 / np.mean(1.0 / vals))


def aggregate_g(r: ReactionModel, s, n: int = QUAD_N):
    """Arithmetic mean over the cell, ``g(s) = <f(., s)>_A``.

    Scalar or array ``s``; the result has the shape of ``s``.
    """
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise ValueError("g(s) is only defined for s >= 0")
    y = _quad_nodes(n)
    vals = r(y.reshape((n,) + (1,) * s.ndim), s[None, ...])
    out = vals.mean(axis=0)
    return float(out) if s.ndim == 0 else out


def aggregate_dg(r: ReactionModel, s, n: int = QUAD_N):
    s = np.asarray(s, dtype=float)
    y = _quad_nodes(n)
    out = r.ds(y.reshape((n,) + (1,) * s.ndim), s[None, ...]).mean(axis=0)
    return float(out) if s.ndim == 0 else out


def find_p0(r: ReactionModel) -> float:
    """The unique positive zero of ``g``.

    A geometric ladder on ``[1e-8 M, 2M]`` brackets the first sign change, then
    Brent's method polishes it.
    """
    M = float(r.M)
    ladder = np.geomspace(1e-8 * M, 2.0 * M, 200)
    gv = aggregate_g(r, ladder)
    if gv[0] <= 0:
        raise ValueError("g is not positive near 0: <mu>_A must be positive")
    idx = np.flatnonzero(gv <= 0)
    if idx.size == 0:
        raise ValueError("g has no sign change on (0, 2M]; the reaction violates the KPP hypotheses")
    j = int(idx[0])
    if gv[j] == 0.0:
        return float(ladder[j])
    dg0 = abs(arithmetic_mean(r.mu))
    gtol = 1e-12 * max(1.0, dg0 * M)
    p0 = brentq(lambda s: aggregate_g(r, s), ladder[j - 1], ladder[j], xtol=1e-15, rtol=1e-15)
    if abs(aggregate_g(r, p0)) > gtol:
        raise ValueError(f"p0 polish failed: |g(p0)| = {abs(aggregate_g(r, p0)):.3e}")
    return float(p0)


def compute_means(a: PeriodicCoefficient, r: ReactionModel) -> MeanSet:
    a_h = harmonic_mean(a)
    mu_a = arithmetic_mean(r.mu)
    return MeanSet(
        a_arith=arithmetic_mean(a),
        a_harm=a_h,
        mu_arith=mu_a,
        p0=find_p0(r),
        c_star_hom=2.0 * float(np.sqrt(a_h * mu_a)),
    )


# -- hypothesis checks --------------------------------------------------------

#: hypotheses needed for the stationary problem; the others only matter for fronts
CORE_HYPOTHESES = ("ca2", "cf1-zero", "cf1-saturation", "cf3", "hypl1")


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""
    where: tuple[float, ...] | None = None


@dataclass(frozen=True)
class HypothesisReport:
    checks: tuple[Check, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def core_passed(self) -> bool:
        return all(c.passed for c in self.checks if c.name in CORE_HYPOTHESES)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def format(self) -> str:
        lines = []
        for c in self.checks:
            mark = "ok  " if c.passed else "FAIL"
            extra = f"  {c.detail}" if c.detail else ""
            lines.append(f"[{mark}] {c.name}{extra}")
        return "\n".join(lines)


def validate_hypotheses(a: PeriodicCoefficient, r: ReactionModel, N: int = 256,
                        n_ladder: int = 64) -> HypothesisReport:
    """Sampled check of the standing assumptions on ``a`` and ``f``.

    ``y`` runs over ``4N`` uniform points, ``s`` over a geometric ladder of
    ``n_ladder`` points up to ``2M``. Never raises; failures carry the first
    offending sample.
    """
    y = np.arange(4 * N) / (4 * N)
    M = float(r.M)
    checks = []

    # (ca2)
    av = a(y)
    a1, a2 = a.alpha1, a.alpha2
    if not (a1 > 0):
        checks.append(Check("ca2", False, f"alpha1 = {a1:g} is not positive"))
    else:
        bad = np.flatnonzero((av < a1 * (1 - 1e-12)) | (av > a2 * (1 + 1e-12)))
        if bad.size:
            i = bad[0]
            checks.append(Check("ca2", False, f"a({y[i]:.6g}) = {av[i]:.6g} outside [{a1:g}, {a2:g}]",
                                (float(y[i]),)))
        else:
            checks.append(Check("ca2", True))

    # (cf1) f(y, 0) = 0
    f0 = r(y, np.zeros_like(y))
    bad = np.flatnonzero(f0 != 0)
    if bad.size:
        i = bad[0]
        checks.append(Check("cf1-zero", False, f"f({y[i]:.6g}, 0) = {f0[i]:.3g}", (float(y[i]), 0.0)))
    else:
        checks.append(Check("cf1-zero", True))

    # (cf1) f <= 0 on [M, 2M]
    s_hi = np.linspace(M, 2 * M, 33)
    Y, S = np.meshgrid(y, s_hi, indexing="ij")
    F = r(Y, S)
    tol = 1e-14 * max(1.0, float(np.max(np.abs(F))))
    bad = np.argwhere(F > tol)
    if bad.size:
        i, j = bad[0]
        checks.append(Check("cf1-saturation", False, f"f({Y[i, j]:.6g}, {S[i, j]:.6g}) = {F[i, j]:.3g} > 0",
                            (float(Y[i, j]), float(S[i, j]))))
    else:
        checks.append(Check("cf1-saturation", True))

    # positivity on (0, M)
    ladder = np.geomspace(1e-6 * M, 2 * M, n_ladder)
    s_lo = ladder[ladder < M]
    Y, S = np.meshgrid(y, s_lo, indexing="ij")
    F = r(Y, S)
    bad = np.argwhere(F < -tol)
    if bad.size:
        i, j = bad[0]
        checks.append(Check("positivity", False, f"f({Y[i, j]:.6g}, {S[i, j]:.6g}) = {F[i, j]:.3g} < 0",
                            (float(Y[i, j]), float(S[i, j]))))
    else:
        checks.append(Check("positivity", True))

    # (cf3) f(y, s) / s strictly decreasing along the ladder
    Y, S = np.meshgrid(y, ladder, indexing="ij")
    Q = r(Y, S) / S
    dq = np.diff(Q, axis=1)
    bad = np.argwhere(dq >= 0)
    if bad.size:
        i, j = bad[0]
        checks.append(Check("cf3", False,
                            f"f/s not decreasing at y = {y[i]:.6g} between s = {ladder[j]:.4g} and {ladder[j + 1]:.4g}",
                            (float(y[i]), float(ladder[j]))))
    else:
        checks.append(Check("cf3", True))

    # mu consistency with the slope of f at 0
    eps = 1e-8
    slope = r(y, np.full_like(y, eps)) / eps
    muv = r.mu(y)
    err = np.abs(slope - muv) / np.maximum(1.0, np.abs(muv))
    i = int(np.argmax(err))
    if err[i] > 1e-5:
        checks.append(Check("mu-consistency", False, f"f(y, eps)/eps = {slope[i]:.6g} vs mu = {muv[i]:.6g} at y = {y[i]:.6g}",
                            (float(y[i]),)))
    else:
        checks.append(Check("mu-consistency", True))

    # (hypl1)
    mu_a = arithmetic_mean(r.mu)
    checks.append(Check("hypl1", mu_a > 0, f"<mu>_A = {mu_a:.6g}"))
    return HypothesisReport(tuple(checks))
