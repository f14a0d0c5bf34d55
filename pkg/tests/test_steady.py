import math

import numpy as np
import pytest

from kpphom.coefficients import PeriodicCoefficient as P
from kpphom.coefficients import compute_means, logistic, quadratic
from kpphom.discretization import PeriodicGrid
from kpphom.steady import (NoMonotoneConnectionError, SteadyStateError, homogenized_front,
                           profile_csv, stationary_state, stationary_sweep, steady_rows_to_csv,
                           uniqueness_probe)

FISHER = logistic(P(1.0))


@pytest.mark.parametrize("L", [1.0, 1 / 8, 1 / 64, 1 / 128])
def test_common_zero_is_the_stationary_state(presets, L):
    p = presets["common-zero"]
    st = stationary_state(p.a, p.r, L)
    assert np.max(np.abs(st.values - 1.0)) < 1e-10


@pytest.mark.parametrize("m", [0.5, 2.0])
def test_constant_quadratic(m):
    st = stationary_state(P(1.0, [0.4]), quadratic(P(m), M=2 * m), 0.5)
    assert np.max(np.abs(st.values - m)) < 1e-10


def test_moving_zero_converges_to_p0(presets):
    p = presets["het-mu"]
    coarse = stationary_state(p.a, p.r, 1 / 8)
    fine = stationary_state(p.a, p.r, 1 / 128)
    gap = lambda s: np.max(np.abs(s.values - 1.0))  # noqa: E731
    assert gap(fine) < 0.25 * gap(coarse)
    assert coarse.p_min > 0 and fine.p_min > 0


def test_half_amplitude_growth_small_period():
    st = stationary_state(P(1.0), quadratic(P(1.0, [0.5]), M=1.5), 1 / 64)
    assert np.max(np.abs(st.values - 1.0)) < 5e-2


def test_bounds_and_residual(presets):
    for p in presets.values():
        st = stationary_state(p.a, p.r, 0.5)
        assert 0 < st.p_min <= st.p_max <= p.r.M * (1 + 1e-10), p.name
        assert st.residual < 1e-6, p.name


def test_large_period_tracks_local_equilibrium():
    # away from the diffusive layer p_L follows mu(y) when f = mu s - s^2
    mu = P(2.0, [0.5])
    y = PeriodicGrid().nodes
    gaps = [np.max(np.abs(stationary_state(P(1.0), quadratic(mu, M=2.5), L).values - mu(y)))
            for L in (20.0, 200.0)]
    assert gaps[1] < 2e-3
    assert gaps[0] / gaps[1] == pytest.approx(100, rel=0.1)  # O(1/L^2)


def test_no_state_when_rho1_nonnegative():
    with pytest.raises(SteadyStateError, match="rho_1"):
        stationary_state(P(1.0), quadratic(P(-0.1), M=1.0), 1.0)


def test_singular_start_falls_back_to_marching():
    a = P(1.0, [0.5])
    ref = stationary_state(a, FISHER, 1 / 4)
    st = stationary_state(a, FISHER, 1 / 4, guess=0.5)
    assert st.marched
    assert np.max(np.abs(st.values - ref.values)) < 1e-10


def test_uniqueness_probe_on_presets(presets):
    for p in presets.values():
        assert uniqueness_probe(p.a, p.r, 1 / 16) < 1e-8, p.name


def test_sweep_and_csv(presets):
    p = presets["het-mu"]
    rows = stationary_sweep(p.a, p.r, [1 / 8, 1 / 32])
    assert rows[0].sup_gap > rows[1].sup_gap > 0
    lines = steady_rows_to_csv(rows).splitlines()
    assert lines[0] == "L,p_min,p_max,sup_gap" and len(lines) == 3


def test_sweep_records_failure(monkeypatch):
    import kpphom.steady as steady_mod

    real = steady_mod.stationary_state

    def flaky(a, r, L, grid=None):
        if L == 0.5:
            raise SteadyStateError("synthetic failure")
        return real(a, r, L, grid)

    monkeypatch.setattr(steady_mod, "stationary_state", flaky)
    rows = stationary_sweep(P(1.0, [0.5]), FISHER, [1.0, 0.5])
    assert rows[0].error is None and rows[0].sup_gap < 1e-10
    assert rows[1].error == "synthetic failure" and math.isnan(rows[1].sup_gap)


# -- homogenized front ----------------------------------------------------------


def fisher_means():
    return compute_means(P(1.0), FISHER)


def test_front_at_minimal_speed():
    prof = homogenized_front(fisher_means(), FISHER, 2.0)
    assert prof.residual < 1e-9
    assert np.all(np.diff(prof.values) >= -1e-10)
    assert prof(0.0) == pytest.approx(0.5, abs=1e-12)
    assert prof.values[0] < 1e-6
    assert prof.values[-1] == pytest.approx(1.0, abs=1e-6)


def test_front_tail_decays_at_slow_rate():
    c = 2.5
    prof = homogenized_front(fisher_means(), FISHER, c)
    lam = (c - math.sqrt(c * c - 4)) / 2  # slow root of lam^2 - c lam + 1
    x1, x2 = -25.0, -15.0
    slope = (math.log(prof(x2)) - math.log(prof(x1))) / (x2 - x1)
    assert slope == pytest.approx(lam, rel=1e-3)


def test_front_with_heterogeneous_means(presets):
    p = presets["cos-diffusion-09"]
    m = compute_means(p.a, p.r)
    prof = homogenized_front(m, p.r, m.c_star_hom)
    assert prof.a_eff == pytest.approx(math.sqrt(0.19), rel=1e-10)
    assert prof.residual < 1e-9


def test_front_below_minimal_speed_rejected():
    with pytest.raises(NoMonotoneConnectionError):
        homogenized_front(fisher_means(), FISHER, 1.0)


def test_front_extension_and_csv():
    prof = homogenized_front(fisher_means(), FISHER, 3.0, X_d=30.0, N_line=1024)
    assert prof(-1e3) == 0.0 and prof(1e3) == 1.0
    lines = profile_csv(prof).splitlines()
    assert lines[0] == "x,U0" and len(lines) == 1026
