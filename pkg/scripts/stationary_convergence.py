"""Periodic stationary states p_L: convergence to p0 and agreement of Newton starts.

    python3 scripts/stationary_convergence.py --preset het-mu
"""
import argparse

import numpy as np

from kpphom.coefficients import find_p0
from kpphom.presets import BUILTIN, load_preset
from kpphom.steady import stationary_state, uniqueness_probe

PERIODS = [1.0, 1 / 4, 1 / 8, 1 / 16, 1 / 32, 1 / 64, 1 / 128]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--preset", action="append", default=None)
    args = ap.parse_args()
    for name in args.preset or BUILTIN:
        p = load_preset(name)
        p0 = find_p0(p.r)
        print(f"\n{name}: p0 = {p0:.12f}")
        print(f"{'L':>9} {'min p_L':>12} {'max p_L':>12} {'|p_L - p0|':>12} {'newton':>7} {'starts':>10}")
        for L in PERIODS:
            st = stationary_state(p.a, p.r, L)
            gap = float(np.max(np.abs(st.values - p0)))
            spread = uniqueness_probe(p.a, p.r, L)
            print(f"{L:>9.5g} {st.p_min:>12.8f} {st.p_max:>12.8f} {gap:>12.3e} {st.newton_iters:>7d} {spread:>10.1e}")


if __name__ == "__main__":
    main()
