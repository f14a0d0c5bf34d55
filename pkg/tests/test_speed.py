import math

import numpy as np
import pytest

import kpphom.speed as speed_mod
from kpphom.coefficients import PeriodicCoefficient as P
from kpphom.coefficients import compute_means, logistic
from kpphom.discretization import PeriodicGrid
from kpphom.speed import (SPEED_HEADER, SpeedError, homogenized_speed, is_local_min, lower_bound,
                          minimal_speed, speed_rows_to_csv, speed_sweep)
from oracles import fourier_speed

SWEEP = [1 / 4, 1 / 8, 1 / 16, 1 / 32, 1 / 64, 1 / 128]
C_HOM_05 = 2 * 0.75**0.25  # 1.86121...

# Fourier-Galerkin minimal speeds (oracles.fourier_speed, 48 modes), frozen
FOURIER_C05 = {1 / 4: 1.8614566838361069, 1 / 16: 1.8612252616573037, 1 / 128: 1.8612099609253536}
FOURIER_C09_16 = 1.867755389


def test_frozen_speed_reproduces_from_oracle():
    c, lam = fourier_speed((1.0, [0.5], []), (1.0, [], []), 1 / 16)
    assert c == pytest.approx(FOURIER_C05[1 / 16], abs=1e-9)


@pytest.mark.parametrize("L", [1.0, 1 / 4, 1 / 16])
def test_constant_fisher_exact(L):
    res = minimal_speed(P(1.0), logistic(P(1.0)), L)
    assert abs(res.c_star - 2.0) < 1e-6
    assert abs(res.lambda_star - 1.0) < 1e-6


def test_constant_diffusion_four():
    res = minimal_speed(P(4.0), logistic(P(1.0)), 0.5)
    assert res.c_star == pytest.approx(4.0, abs=1e-6)
    assert res.lambda_star == pytest.approx(0.5, abs=1e-6)


@pytest.mark.parametrize("L", [1 / 2, 1 / 8])
def test_diffusion_scaling_law(L):
    # doubling a is the same as shrinking the period by sqrt(2) after rescaling lambda
    a, r = P(1.0, [0.5]), logistic(P(1.0, [0.3]))
    double = minimal_speed(a.scaled(2.0), r, L)
    base = minimal_speed(a, r, L / math.sqrt(2))
    assert double.c_star == pytest.approx(math.sqrt(2) * base.c_star, rel=1e-9)
    assert double.lambda_star == pytest.approx(base.lambda_star / math.sqrt(2), rel=1e-5)


@pytest.mark.parametrize("L", sorted(FOURIER_C05))
def test_matches_fourier_reference(L):
    res = minimal_speed(P(1.0, [0.5]), logistic(P(1.0)), L)
    # finite-difference floor at N = 256 is about 2.2e-5
    assert res.c_star == pytest.approx(FOURIER_C05[L], abs=3e-5)


def test_grid_refinement_approaches_reference():
    a, r = P(1.0, [0.5]), logistic(P(1.0))
    e256 = abs(minimal_speed(a, r, 1 / 16).c_star - FOURIER_C05[1 / 16])
    e512 = abs(minimal_speed(a, r, 1 / 16, PeriodicGrid(512)).c_star - FOURIER_C05[1 / 16])
    assert e256 / e512 == pytest.approx(4, rel=0.15)


def test_strong_contrast_against_reference(presets):
    p = presets["cos-diffusion-09"]
    assert minimal_speed(p.a, p.r, 1 / 16).c_star == pytest.approx(FOURIER_C09_16, rel=2e-4)


def test_homogenized_limit_and_gap_decay(presets):
    p = presets["cos-diffusion-05"]
    rows = speed_sweep(p.a, p.r, SWEEP)
    assert rows[0].c_hom == pytest.approx(C_HOM_05, rel=1e-12)
    assert abs(rows[-1].c_star - C_HOM_05) < 1e-2
    gaps = [r.gap for r in rows]
    assert all(g > 0 for g in gaps)
    assert np.all(np.diff(gaps) < 0)
    assert gaps[0] / gaps[-1] >= 4


def test_lower_bound_on_every_preset(presets):
    for p in presets.values():
        lb = lower_bound(p.a, p.r)
        for row in speed_sweep(p.a, p.r, [1.0] + SWEEP[::2]):
            assert row.error is None
            assert row.c_star >= lb - 1e-6, (p.name, row.L)


def test_result_is_local_minimum(presets):
    p = presets["het-mu"]
    res = minimal_speed(p.a, p.r, 1 / 8)
    assert is_local_min(p.a, p.r, res)
    assert res.bracket[0] < res.lambda_star < res.bracket[1]


def test_homogenized_speed_formula(presets):
    m = compute_means(presets["cos-diffusion-09"].a, presets["cos-diffusion-09"].r)
    assert homogenized_speed(m) == pytest.approx(2 * math.sqrt(math.sqrt(0.19) * 2.0), rel=1e-12)


def test_sweep_records_failures_without_aborting(monkeypatch):
    real = speed_mod.minimal_speed

    def flaky(a, r, L, grid=None):
        if L == 0.5:
            raise SpeedError("synthetic failure")
        return real(a, r, L, grid)

    monkeypatch.setattr(speed_mod, "minimal_speed", flaky)
    rows = speed_sweep(P(1.0), logistic(P(1.0)), [1.0, 0.5, 0.25])
    assert [r.error is None for r in rows] == [True, False, True]
    assert math.isnan(rows[1].c_star) and "synthetic" in rows[1].error
    assert rows[2].c_star == pytest.approx(2.0, abs=1e-6)


def test_sweep_rejects_nonpositive_period():
    with pytest.raises(ValueError):
        speed_sweep(P(1.0), logistic(P(1.0)), [1.0, 0.0])
    with pytest.raises(ValueError, match="1/1024"):
        speed_sweep(P(1.0), logistic(P(1.0)), [1 / 2048])


def test_threads_do_not_change_results():
    a, r = P(1.0, [0.5]), logistic(P(1.0))
    one = speed_sweep(a, r, SWEEP[:3])
    two = speed_sweep(a, r, SWEEP[:3], threads=2)
    assert [x.c_star for x in one] == [x.c_star for x in two]


def test_csv_layout():
    rows = speed_sweep(P(1.0), logistic(P(1.0)), [1.0, 0.5])
    lines = speed_rows_to_csv(rows).splitlines()
    assert lines[0] == ",".join(SPEED_HEADER)
    assert len(lines) == 3
    assert float(lines[1].split(",")[1]) == rows[0].c_star
