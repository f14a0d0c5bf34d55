"""L2 distance between the phase-normalized front u_L and the homogenized profile.

Runs the comparison for profile and step initial data so the two can be set
side by side; step data carry a slow transient that floors the distance.

    python3 scripts/profile_homogenization.py --preset cos-diffusion-05
"""
import argparse
import time

from kpphom.presets import load_preset
from kpphom.propagation import compare_with_homogenized

PERIODS = [1 / 8, 1 / 16, 1 / 32]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--preset", action="append", default=None)
    ap.add_argument("--initial", action="append", default=None, choices=("profile", "step"))
    args = ap.parse_args()
    settings = {"profile": dict(T=16.0, dt=0.002), "step": dict(T=40.0, dt=0.005)}
    for name in args.preset or ["fisher-const", "cos-diffusion-05"]:
        p = load_preset(name)
        for kind in args.initial or ["profile", "step"]:
            print(f"\n{name}, {kind} data {settings[kind]}")
            print(f"{'L':>9} {'distance':>11} {'c_measured':>11} {'c_hom':>10} {'sec':>6}")
            first = None
            for L in PERIODS:
                t = time.perf_counter()
                row = compare_with_homogenized(p.a, p.r, L, initial=kind, **settings[kind])
                first = first or row.distance
                print(f"{L:>9.5g} {row.distance:>11.4e} {row.c_measured:>11.6f} {row.c_hom:>10.6f} "
                      f"{time.perf_counter() - t:>6.1f}")
            print(f"decrease from L = 1/8 to 1/32: {1 - row.distance / first:.0%}")


if __name__ == "__main__":
    main()
