"""Command-line entry point: ``kpphom <subcommand> --preset NAME ...``.

Exit codes: 0 success, 1 numerical failure, 2 validation failure (bad preset,
violated hypotheses, inadmissible parameters, usage errors).
"""
from __future__ import annotations

import argparse
import csv
import io
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import propagation as prop
from .coefficients import compute_means, validate_hypotheses
from .discretization import PeriodicGrid
from .presets import BUILTIN, PresetError, load_preset
from .spectral import EigenSolverError, k_of_lambda, rho1
from .speed import SpeedError, minimal_speed, speed_rows_to_csv, speed_sweep
from .steady import (SteadyStateError, homogenized_front, profile_csv, stationary_sweep,
                     steady_rows_to_csv, uniqueness_probe)

log = logging.getLogger("kpphom")

EXIT_OK, EXIT_NUMERIC, EXIT_INVALID = 0, 1, 2

DEFAULT_SWEEP = ("1/4", "1/8", "1/16", "1/32", "1/64", "1/128")


class ValidationFailure(Exception):
    pass


@dataclass(frozen=True)
class RunManifest:
    """Everything that determines the outputs of one invocation."""

    subcommand: str
    presets: tuple[str, ...]
    L: tuple[float, ...]
    grid_n: int
    dt: float | None
    T: float | None
    theta: float
    out: str
    threads: int
    extra: dict = field(default_factory=dict)
    deterministic: bool = True


def parse_period(text: str) -> float:
    """``L`` as a decimal or a fraction such as ``1/16``; must lie in (0, 1]."""
    try:
        value = float(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not 0 < value <= 1:
        raise argparse.ArgumentTypeError(f"period L must lie in (0, 1], got {text}")
    return value


def _write(out: Path, name: str, text: str) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    path.write_text(text)
    print(f"wrote {path}")
    return path


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _load(name):
    p = load_preset(name)
    report = validate_hypotheses(p.a, p.r)
    if not report.core_passed:
        print(report.format())
        raise ValidationFailure(f"preset {p.name!r} violates the standing hypotheses")
    for chk in report.failures():
        log.warning("preset %s: %s check failed (%s); not needed for this computation", p.name, chk.name, chk.detail)
    return p, report


def _map(fn, items, threads):
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


# -- subcommands -----------------------------------------------------------------


def cmd_means(args) -> int:
    p = load_preset(args.preset[0])
    report = validate_hypotheses(p.a, p.r)
    print(report.format())
    if not report.core_passed:
        print(f"preset {p.name!r}: hypothesis validation failed", file=sys.stderr)
        return EXIT_INVALID
    m = compute_means(p.a, p.r)
    print(f"<a>_A = {m.a_arith!r}\n<a>_H = {m.a_harm!r}\n<mu>_A = {m.mu_arith!r}\n"
          f"p0 = {m.p0!r}\nc*_hom = {m.c_star_hom!r}")
    _write(Path(args.out), "means.csv",
           _csv(("a_arith", "a_harm", "mu_arith", "p0", "c_star_hom"),
                [(m.a_arith, m.a_harm, m.mu_arith, m.p0, m.c_star_hom)]))
    return EXIT_OK


def cmd_eigen(args) -> int:
    grid = PeriodicGrid(args.grid_n)
    rows = []
    for name in args.preset:
        p, _ = _load(name)
        mu_mean = compute_means(p.a, p.r).mu_arith
        for L in args.L:
            rho = rho1(p.a, p.r.mu, L, grid)
            k0 = k_of_lambda(p.a, p.r.mu, L, 0.0, grid)
            rows.append((p.name, L, rho, k0, abs(k0 + rho), abs(rho + mu_mean)))
    _write(Path(args.out), "eigen.csv", _csv(("preset", "L", "rho1", "k_zero", "identity_gap", "limit_gap"), rows))
    return EXIT_OK


def cmd_speed_sweep(args) -> int:
    p, _ = _load(args.preset[0])
    rows = speed_sweep(p.a, p.r, args.L, PeriodicGrid(args.grid_n), threads=args.threads)
    _write(Path(args.out), "speed_sweep.csv", speed_rows_to_csv(rows))
    bad = [row for row in rows if row.error]
    for row in bad:
        print(f"L = {row.L!r}: {row.error}", file=sys.stderr)
    return EXIT_NUMERIC if bad else EXIT_OK


def cmd_steady_sweep(args) -> int:
    p, _ = _load(args.preset[0])
    rows = stationary_sweep(p.a, p.r, args.L, PeriodicGrid(args.grid_n), threads=args.threads)
    _write(Path(args.out), "steady_sweep.csv", steady_rows_to_csv(rows))
    bad = [row for row in rows if row.error]
    for row in bad:
        print(f"L = {row.L!r}: {row.error}", file=sys.stderr)
    return EXIT_NUMERIC if bad else EXIT_OK


def cmd_uniqueness(args) -> int:
    grid = PeriodicGrid(args.grid_n)
    rows = []
    for name in args.preset:
        p, _ = _load(name)
        for L in args.L:
            rows.append((p.name, L, uniqueness_probe(p.a, p.r, L, grid)))
    _write(Path(args.out), "uniqueness.csv", _csv(("preset", "L", "max_disagreement"), rows))
    return EXIT_OK


def _sim_config(args, L) -> prop.SimulationConfig:
    return prop.SimulationConfig(L=L, X=args.X, n_per=args.n_per, dt=args.dt, T=args.T, theta=args.theta,
                                 initial=args.initial, snapshot_dt=args.snapshot_dt,
                                 record_from=args.record_from)


def cmd_simulate(args) -> int:
    p, _ = _load(args.preset[0])
    L = args.L[0]
    cfg = _sim_config(args, L)
    out = Path(args.out)
    fld = prop.simulate(p.a, p.r, cfg)
    est = prop.measure_speed(fld)
    c_var = minimal_speed(p.a, p.r, L, PeriodicGrid(args.grid_n)).c_star
    _write(out, "front.csv", prop.level_trace_csv(fld, every=args.trace_every))
    _write(out, "speed.csv", _csv(("L", "c_measured", "c_star", "rel_diff", "t_a", "t_b", "fit_residual"),
                                  [(L, est.c_measured, c_var, est.c_measured / c_var - 1.0,
                                    est.fit_window[0], est.fit_window[1], est.fit_residual)]))
    print(f"c_measured = {est.c_measured!r}  c*_L = {c_var!r}  rel diff = {est.c_measured / c_var - 1:+.3e}")
    if args.dump == "csv":
        _write(out, "field.csv", prop.field_csv(fld))
    elif args.dump == "bin":
        out.mkdir(parents=True, exist_ok=True)
        prop.write_field_binary(fld, out / "field.bin")
        print(f"wrote {out / 'field.bin'}")
    if args.pulsating:
        chk = prop.pulsating_check(p.a, p.r, cfg, first=fld)
        res = chk.residual
        p0 = fld.p0
        _write(out, "pulsating.csv", _csv(("L", "c_measured", "residual", "residual_over_p0"),
                                          [(L, est.c_measured, res, res / p0)]))
        print(f"pulsating residual = {res!r} ({res / p0:.3e} p0)")
    return EXIT_OK


def cmd_compare(args) -> int:
    p, _ = _load(args.preset[0])
    means = compute_means(p.a, p.r)
    prof = homogenized_front(means, p.r, means.c_star_hom)
    window = (-args.window, args.window)

    def one(L):
        return prop.compare_with_homogenized(p.a, p.r, L, T=args.T, dt=args.dt, n_per=args.n_per, X=args.X,
                                             window=window, initial=args.initial, theta=args.theta)

    rows = _map(one, list(args.L), args.threads)
    out = Path(args.out)
    _write(out, "profile.csv", profile_csv(prof))
    _write(out, "convergence.csv",
           _csv(("L", "c_measured", "c_hom", "s_star", "x_shift", "distance"),
                [(r.L, r.c_measured, r.c_hom, r.s_star, r.x_shift, r.distance) for r in rows]))
    for r in rows:
        print(f"L = {r.L:<10.6g} distance = {r.distance:.4e}")
    return EXIT_OK


# -- parser -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kpphom", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true", help="log the run manifest and progress")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, L_default, multi_preset=False, preset_default=None):
        sp.add_argument("--preset", action="append", default=None,
                        help="built-in preset name or path to a preset file" +
                             (" (repeatable)" if multi_preset else ""))
        sp.add_argument("--L", action="append", type=parse_period, default=None,
                        help="period in (0, 1], decimal or fraction (repeatable)")
        sp.add_argument("--grid-n", type=int, default=256, help="grid points per period for cell problems")
        sp.add_argument("--out", default="results", help="output directory")
        sp.add_argument("--threads", type=int, default=os.cpu_count() or 1, help="worker threads for sweeps")
        sp.add_argument("--theta", type=float, default=0.5, help="level for front tracking, in (0, 1)")
        sp.set_defaults(L_default=L_default, multi_preset=multi_preset, preset_default=preset_default)

    def sim_opts(sp, T, dt, X, n_per, initial, snapshot_dt):
        sp.add_argument("--dt", type=float, default=dt)
        sp.add_argument("--T", type=float, default=T)
        sp.add_argument("--X", type=float, default=X, help="domain half-width, a multiple of L")
        sp.add_argument("--n-per", type=int, default=n_per, help="grid points per period")
        sp.add_argument("--initial", default=initial, choices=prop.INITIAL_KINDS)
        sp.add_argument("--snapshot-dt", type=float, default=snapshot_dt)
        sp.add_argument("--record-from", type=float, default=0.0)

    s = sub.add_parser("means", help="homogenized means, p0 and c*_hom; writes means.csv")
    common(s, ())
    s.set_defaults(func=cmd_means)

    s = sub.add_parser("eigen", help="rho_1 and k(0, L) per preset and period; writes eigen.csv")
    common(s, ("1", "1/8", "1/64"), multi_preset=True, preset_default=BUILTIN)
    s.set_defaults(func=cmd_eigen)

    s = sub.add_parser("speed-sweep", help="minimal speeds over periods; writes speed_sweep.csv")
    common(s, DEFAULT_SWEEP)
    s.set_defaults(func=cmd_speed_sweep)

    s = sub.add_parser("steady-sweep", help="stationary states over periods; writes steady_sweep.csv")
    common(s, ("1",) + DEFAULT_SWEEP)
    s.set_defaults(func=cmd_steady_sweep)

    s = sub.add_parser("uniqueness", help="stationary states from three starts; writes uniqueness.csv")
    common(s, ("1/16",), multi_preset=True, preset_default=BUILTIN)
    s.set_defaults(func=cmd_uniqueness)

    s = sub.add_parser("simulate", help="front simulation and measured speed; writes front.csv, speed.csv")
    common(s, ("1/16",))
    sim_opts(s, T=60.0, dt=0.01, X=40.0, n_per=32, initial="step", snapshot_dt=0.5)
    s.add_argument("--dump", choices=("none", "csv", "bin"), default="none", help="space-time dump format")
    s.add_argument("--trace-every", type=int, default=10, help="keep every k-th step in front.csv")
    s.add_argument("--pulsating", action="store_true",
                   help="rerun aligned to L/c and write the pulsating residual to pulsating.csv")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("compare", help="L2 distance to the homogenized front; writes convergence.csv")
    common(s, ("1/8", "1/16", "1/32"))
    sim_opts(s, T=16.0, dt=0.002, X=20.0, n_per=32, initial="profile", snapshot_dt=0.01)
    s.add_argument("--window", type=float, default=2.0, help="half-length of the time window")
    s.set_defaults(func=cmd_compare)
    return ap


def manifest_from_args(args) -> RunManifest:
    return RunManifest(subcommand=args.command, presets=tuple(args.preset), L=tuple(args.L),
                       grid_n=args.grid_n, dt=getattr(args, "dt", None), T=getattr(args, "T", None),
                       theta=args.theta, out=args.out, threads=args.threads)


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    if args.preset is None:
        if args.preset_default is None:
            ap.error("--preset is required")
        args.preset = list(args.preset_default)
    elif not args.multi_preset and len(args.preset) > 1:
        ap.error("this subcommand takes a single --preset")
    if args.L is None:
        args.L = [parse_period(v) for v in args.L_default]
    if args.command == "simulate" and len(args.L) != 1:
        ap.error("simulate takes exactly one --L")
    if not 0 < args.theta < 1:
        ap.error("--theta must lie in (0, 1)")
    if args.grid_n < 16:
        ap.error("--grid-n must be at least 16")
    if args.threads < 1:
        ap.error("--threads must be positive")
    log.info("manifest: %s", manifest_from_args(args))
    try:
        return args.func(args)
    except (ValidationFailure, PresetError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (SpeedError, SteadyStateError, EigenSolverError, prop.SimulationError, RuntimeError,
            FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
