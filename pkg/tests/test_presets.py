import numpy as np
import pytest
import yaml

from kpphom.presets import BUILTIN, PresetError, load_preset, parse_coefficient, preset_from_dict

MINIMAL = {"diffusion": 1.0, "reaction": {"kind": "logistic"}, "M": 1.0}


def test_builtins_load(presets):
    assert set(presets) == set(BUILTIN)
    a = presets["cos-diffusion-05"].a
    assert a.const == 1.0 and list(a.cos) == [0.5]
    hm = presets["het-mu"]
    assert hm.r.name == "quadratic" and hm.r.M == 2.0 and hm.r.s0 is None
    assert presets["common-zero"].r.s0 == 1.0


def test_file_roundtrip(tmp_path):
    data = {"name": "mine", "diffusion": {"const": 2.0, "sin": [0.3]},
            "reaction": {"kind": "quadratic", "mu": {"const": 1.0, "cos": [0.2]}, "nu": 0.5}, "M": 3.0}
    path = tmp_path / "mine.yaml"
    path.write_text(yaml.safe_dump(data))
    p = load_preset(path)
    assert p.name == "mine" and p.source == str(path)
    assert p.a(0.25) == pytest.approx(2.3)
    assert p.r(0.0, 1.0) == pytest.approx(1.2 - 0.5)


def test_samples_coefficient():
    c = parse_coefficient({"samples": [1.0, 1.5, 1.0, 0.5]}, "diffusion")
    assert np.allclose(c(np.arange(4) / 4), [1.0, 1.5, 1.0, 0.5])


@pytest.mark.parametrize("data, match", [
    ({**MINIMAL, "extra": 1}, "unknown top-level"),
    ({k: v for k, v in MINIMAL.items() if k != "M"}, "missing required key 'M'"),
    ({**MINIMAL, "M": -1.0}, "M must be positive"),
    ({**MINIMAL, "reaction": {"kind": "cubic"}}, "unknown kind"),
    ({**MINIMAL, "reaction": {"mu": 1.0}}, "needs a 'kind'"),
    ({**MINIMAL, "reaction": {"kind": "logistic", "nu": 1.0}}, "unknown keys"),
    ({**MINIMAL, "diffusion": {"cos": [0.5]}}, "missing 'const'"),
    ({**MINIMAL, "diffusion": {"const": 1.0, "amp": 2}}, "unknown keys"),
    ({**MINIMAL, "diffusion": {"const": 1.0, "samples": [1, 2]}}, "either samples or a series"),
    ({**MINIMAL, "diffusion": "one"}, "expected a number or a mapping"),
    ({**MINIMAL, "diffusion": {"const": "x"}}, "diffusion"),
])
def test_schema_errors(data, match):
    with pytest.raises(PresetError, match=match):
        preset_from_dict(data)


def test_unknown_name_and_bad_yaml(tmp_path):
    with pytest.raises(PresetError, match="no preset named"):
        load_preset("no-such-preset")
    bad = tmp_path / "bad.yaml"
    bad.write_text("diffusion: [1, 2\n")
    with pytest.raises(PresetError, match="not valid YAML"):
        load_preset(bad)
