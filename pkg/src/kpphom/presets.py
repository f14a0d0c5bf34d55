"""Preset files: the single source of coefficients for the command line and the tests.

Schema (YAML)::

    name: cos-diffusion-05          # optional, defaults to the file stem
    description: free text          # optional
    diffusion:                      # a(y); either a trigonometric series ...
      const: 1.0
      cos: [0.5]                    # cos_k for k = 1, 2, ...
      sin: []                       # sin_k for k = 1, 2, ...
      alpha1: 0.5                   # optional declared bounds; sampled when absent
      alpha2: 1.5
    #   ... or uniform samples on [0, 1):  samples: [1.0, 1.2, ...]
    reaction:
      kind: logistic                # f = mu s (1 - s / capacity)
      mu: {const: 1.0, cos: [..]}   # same coefficient syntax as diffusion
      capacity: 1.0
    # or kind: quadratic            # f = mu s - nu s^2; nu a number or a coefficient
    M: 1.0                          # saturation bound (required)
    s0: 1.0                         # optional common zero of f(y, .)

Built-in presets ship with the package and are addressed by name.
"""
from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import yaml

from .coefficients import PeriodicCoefficient, ReactionModel, logistic, quadratic

BUILTIN = ("fisher-const", "cos-diffusion-05", "cos-diffusion-09", "het-mu", "common-zero")

_COEF_KEYS = {"const", "cos", "sin", "alpha1", "alpha2", "samples"}
_TOP_KEYS = {"name", "description", "diffusion", "reaction", "M", "s0"}


class PresetError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Preset:
    name: str
    a: PeriodicCoefficient
    r: ReactionModel
    description: str = ""
    source: str = ""


def parse_coefficient(entry, where: str) -> PeriodicCoefficient:
    if isinstance(entry, (int, float)):
        return PeriodicCoefficient.constant(float(entry))
    if not isinstance(entry, dict):
        raise PresetError(f"{where}: expected a number or a mapping, got {type(entry).__name__}")
    unknown = set(entry) - _COEF_KEYS
    if unknown:
        raise PresetError(f"{where}: unknown keys {sorted(unknown)}")
    bounds = {k: float(entry[k]) for k in ("alpha1", "alpha2") if k in entry}
    try:
        if "samples" in entry:
            if set(entry) & {"const", "cos", "sin"}:
                raise PresetError(f"{where}: give either samples or a series, not both")
            return PeriodicCoefficient.from_samples([float(v) for v in entry["samples"]], **bounds)
        if "const" not in entry:
            raise PresetError(f"{where}: missing 'const'")
        return PeriodicCoefficient(const=float(entry["const"]),
                                   cos=[float(v) for v in entry.get("cos") or []],
                                   sin=[float(v) for v in entry.get("sin") or []], **bounds)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, PresetError):
            raise
        raise PresetError(f"{where}: {exc}") from exc


def preset_from_dict(data: dict, name: str = "custom", source: str = "") -> Preset:
    if not isinstance(data, dict):
        raise PresetError("preset must be a mapping")
    unknown = set(data) - _TOP_KEYS
    if unknown:
        raise PresetError(f"unknown top-level keys {sorted(unknown)}")
    for key in ("diffusion", "reaction", "M"):
        if key not in data:
            raise PresetError(f"missing required key '{key}'")
    a = parse_coefficient(data["diffusion"], "diffusion")
    rx = data["reaction"]
    if not isinstance(rx, dict) or "kind" not in rx:
        raise PresetError("reaction: needs a 'kind'")
    M = float(data["M"])
    if not M > 0:
        raise PresetError("M must be positive")
    mu = parse_coefficient(rx.get("mu", 1.0), "reaction.mu")
    kind = rx["kind"]
    if kind == "logistic":
        extra = set(rx) - {"kind", "mu", "capacity"}
        if extra:
            raise PresetError(f"reaction: unknown keys {sorted(extra)}")
        r = logistic(mu, float(rx.get("capacity", 1.0)))
    elif kind == "quadratic":
        extra = set(rx) - {"kind", "mu", "nu"}
        if extra:
            raise PresetError(f"reaction: unknown keys {sorted(extra)}")
        r = quadratic(mu, parse_coefficient(rx.get("nu", 1.0), "reaction.nu"), M=M)
    else:
        raise PresetError(f"reaction: unknown kind {kind!r} (logistic | quadratic)")
    s0 = data.get("s0", r.s0)
    r = ReactionModel(f=r.f, df=r.df, mu=r.mu, M=M, s0=None if s0 is None else float(s0), name=kind)
    return Preset(name=str(data.get("name", name)), a=a, r=r,
                  description=str(data.get("description", "")), source=source)


def load_preset(name_or_path: str | Path) -> Preset:
    """Load a built-in preset by name or a preset file by path."""
    text = None
    source = str(name_or_path)
    stem = Path(source).stem
    if str(name_or_path) in BUILTIN:
        text = resources.files("kpphom").joinpath(f"preset_files/{name_or_path}.yaml").read_text()
    else:
        path = Path(name_or_path)
        if not path.is_file():
            raise PresetError(f"no preset named {source!r} (built-ins: {', '.join(BUILTIN)}) and no such file")
        text = path.read_text()
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise PresetError(f"{source}: not valid YAML: {exc}") from exc
    return preset_from_dict(data, name=stem, source=source)
