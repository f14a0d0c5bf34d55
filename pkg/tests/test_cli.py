import csv

import pytest
import yaml

from kpphom.cli import main, parse_period


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_period_parsing():
    assert parse_period("1/16") == 0.0625
    assert parse_period("0.5") == 0.5
    for bad in ("0", "2", "-1/4", "abc"):
        with pytest.raises(Exception):
            parse_period(bad)


def test_means(tmp_path, capsys):
    assert main(["means", "--preset", "cos-diffusion-05", "--out", str(tmp_path)]) == 0
    row = read_csv(tmp_path / "means.csv")[0]
    assert float(row["a_harm"]) == pytest.approx(0.75**0.5, rel=1e-12)
    assert float(row["c_star_hom"]) == pytest.approx(2 * 0.75**0.25, rel=1e-12)
    assert "[ok  ] ca2" in capsys.readouterr().out


def test_violated_hypotheses_exit_two(tmp_path):
    path = tmp_path / "degenerate.yaml"
    path.write_text(yaml.safe_dump({"diffusion": {"const": 1.0, "cos": [1.0]},
                                    "reaction": {"kind": "logistic"}, "M": 1.0}))
    assert main(["means", "--preset", str(path), "--out", str(tmp_path)]) == 2
    assert main(["speed-sweep", "--preset", str(path), "--out", str(tmp_path)]) == 2


def test_non_core_failure_only_warns(tmp_path):
    assert main(["means", "--preset", "het-mu", "--out", str(tmp_path)]) == 0


def test_usage_errors_exit_two(tmp_path):
    for argv in (["means", "--preset", "fisher-const", "--L", "0"],
                 ["means"],
                 ["speed-sweep", "--preset", "fisher-const", "--preset", "het-mu"],
                 ["simulate", "--preset", "fisher-const", "--L", "1/4", "--L", "1/8"],
                 ["means", "--preset", "fisher-const", "--theta", "1.5"]):
        with pytest.raises(SystemExit) as exc:
            main(argv + ["--out", str(tmp_path)])
        assert exc.value.code == 2


def test_bad_preset_and_inadmissible_step(tmp_path):
    assert main(["means", "--preset", "nope", "--out", str(tmp_path)]) == 2
    assert main(["simulate", "--preset", "fisher-const", "--L", "1/4", "--dt", "0.6", "--T", "1",
                 "--X", "5", "--out", str(tmp_path)]) == 2


def test_numerical_failure_exit_one(tmp_path):
    # pure diffusion over a short time has no propagating level set
    assert main(["simulate", "--preset", "fisher-const", "--L", "1/4", "--T", "0.5", "--X", "5",
                 "--out", str(tmp_path)]) == 1


def test_sweep_output_is_deterministic(tmp_path):
    args = ["speed-sweep", "--preset", "cos-diffusion-05", "--L", "1/4", "--L", "1/16", "--grid-n", "64"]
    assert main(args + ["--out", str(tmp_path / "a"), "--threads", "1"]) == 0
    assert main(args + ["--out", str(tmp_path / "b"), "--threads", "2"]) == 0
    a = (tmp_path / "a" / "speed_sweep.csv").read_bytes()
    assert a == (tmp_path / "b" / "speed_sweep.csv").read_bytes()
    assert a.splitlines()[0] == b"L,c_star,lambda_star,c_hom,gap"


def test_eigen_and_uniqueness_tables(tmp_path):
    assert main(["eigen", "--preset", "het-mu", "--preset", "fisher-const", "--L", "1/8",
                 "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "eigen.csv")
    assert [r["preset"] for r in rows] == ["het-mu", "fisher-const"]
    assert all(float(r["identity_gap"]) < 1e-10 for r in rows)
    assert main(["uniqueness", "--preset", "common-zero", "--out", str(tmp_path)]) == 0
    assert float(read_csv(tmp_path / "uniqueness.csv")[0]["max_disagreement"]) < 1e-8


def test_steady_sweep_table(tmp_path):
    assert main(["steady-sweep", "--preset", "het-mu", "--L", "1/8", "--L", "1/32",
                 "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "steady_sweep.csv")
    assert float(rows[0]["sup_gap"]) > float(rows[1]["sup_gap"])


def test_simulate_outputs(tmp_path):
    out = tmp_path / "sim"
    assert main(["simulate", "--preset", "fisher-const", "--L", "1/4", "--T", "40", "--X", "40",
                 "--n-per", "16", "--dump", "bin", "--out", str(out)]) == 0
    row = read_csv(out / "speed.csv")[0]
    assert abs(float(row["rel_diff"])) < 0.05
    assert (out / "front.csv").read_text().startswith("t,x_theta\n")
    assert (out / "field.bin").stat().st_size > 0


def test_compare_outputs(tmp_path):
    assert main(["compare", "--preset", "fisher-const", "--L", "1/8", "--T", "8", "--dt", "0.005",
                 "--X", "10", "--window", "1", "--out", str(tmp_path)]) == 0
    row = read_csv(tmp_path / "convergence.csv")[0]
    assert float(row["distance"]) < 2e-2
    assert (tmp_path / "profile.csv").read_text().startswith("x,U0\n")
