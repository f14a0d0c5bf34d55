"""Principal eigenvalues rho_1,L and the lambda = 0 identity on all presets.

    python3 scripts/eigen_limits.py
"""
from kpphom.coefficients import arithmetic_mean
from kpphom.presets import BUILTIN, load_preset
from kpphom.spectral import k_of_lambda, rho1

PERIODS = [1.0, 1 / 2, 1 / 4, 1 / 8, 1 / 16, 1 / 32, 1 / 64]


def main():
    print(f"{'preset':>18} {'L':>9} {'rho1':>16} {'|k(0)+rho1|':>12} {'|rho1+<mu>|':>12}")
    for name in BUILTIN:
        p = load_preset(name)
        m = arithmetic_mean(p.r.mu)
        for L in PERIODS:
            rho = rho1(p.a, p.r.mu, L)
            k0 = k_of_lambda(p.a, p.r.mu, L, 0.0)
            print(f"{name:>18} {L:>9.5g} {rho:>16.12f} {abs(k0 + rho):>12.2e} {abs(rho + m):>12.3e}")


if __name__ == "__main__":
    main()
