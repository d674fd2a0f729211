"""Strict run configuration: schema, presets, defaults and overrides."""

import copy
import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .tiling import PARITIES

COMMANDS = ("bands", "superspace", "pwe", "trace-scan", "interface", "convergence",
            "tiling-info")
TOP_KEYS = {"command", "preset", "problem", "discretization", "output"}

PROBLEM_DEFAULTS = {
    "field": "sin2d",
    "theta": "golden",
    "offset": [0.0, 0.0],
    "generalized": False,
    "tiles": {"a": [1.0, 1.0], "b": [1.0, 2.0]},
    "rule": {"alphabet": ["a", "b"], "images": {"a": "ab", "b": "a"}},
    "boundary": "dirichlet",
}

DISCRETIZATION_DEFAULTS = {
    "bands": {"points_per_unit": 40, "alpha_count": 64, "n_bands": 20, "window": [0.0, 30.0],
              "level": 2},
    "superspace": {"h": 0.02, "alpha_count": 24, "alpha": 0.0, "beta": 0.0, "n_bands": 40,
                   "mode_target": None},
    "pwe": {"N_pw": 50, "h": 0.02, "alpha_count": 24, "beta": 0.0, "margin": 1e-3,
            "levels": [2, 4, 6], "points_per_unit": 50, "window": [0.0, 30.0]},
    "trace-scan": {"omega_window": [0.0, 10.0], "resolution": 2000, "eps": 1e-3,
                   "n_max": 40},
    "interface": {"h": 0.005, "L": 34.0, "window": [0.0, 30.0], "levels": [6, 7, 8],
                  "decay_levels": [2, 3, 4, 5, 6], "points_per_unit": 40},
    "convergence": {"levels": [2, 4, 6, 8], "window": [0.0, 20.0], "alpha_count": 64,
                    "points_per_unit": 40},
    "tiling-info": {"generations": 10, "generation_parity": "all"},
}

# keys that may legitimately be zero or negative
SIGNED_KEYS = {"alpha", "beta", "offset", "level", "levels", "decay_levels", "window",
               "omega_window", "mode_target"}
INTEGER_KEYS = {"points_per_unit", "alpha_count", "n_bands", "N_pw", "level", "resolution",
                "n_max", "generations"}

PRESETS = {
    "sin2d-schrodinger": {"problem": {"field": "sin2d", "theta": "golden",
                                      "generalized": False}},
    "sin2d-generalized": {"problem": {"field": "sin2d+3", "theta": "golden",
                                      "generalized": True}},
    "golden-laminate": {"problem": {"tiles": {"a": [1.0, 1.0], "b": [1.0, 2.0]},
                                    "rule": {"alphabet": ["a", "b"],
                                             "images": {"a": "ab", "b": "a"}}}},
    "reflected-schrodinger": {
        "problem": {"field": "sin2d", "theta": "golden", "generalized": False,
                    "boundary": "dirichlet"},
        "discretization": {"L": 233.0, "h": 0.005, "levels": [6, 7, 8],
                           "window": [0.0, 30.0]}},
    "reflected-generalized": {
        "problem": {"field": "sin2d+3", "theta": "golden", "generalized": True,
                    "boundary": "dirichlet"},
        "discretization": {"L": 34.0, "h": 0.005, "levels": [3, 4, 5],
                           "window": [0.0, 12.0]}},
}


@dataclass
class RunConfig:
    command: str
    problem: dict
    discretization: dict
    output: str = None
    preset: str = None
    defaults: dict = field(default_factory=dict)

    def meta(self):
        return {"command": self.command, "preset": self.preset, "problem": self.problem,
                "discretization": self.discretization, "defaults_filled": self.defaults}


def _check_keys(block, allowed, where):
    if not isinstance(block, dict):
        raise ConfigError(f"{where} must be an object")
    unknown = set(block) - set(allowed)
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {sorted(unknown)}")


def _validate_number(key, v):
    if isinstance(v, bool):
        raise ConfigError(f"{key} must be a number, got {v!r}")
    if key in INTEGER_KEYS and int(v) != v:
        raise ConfigError(f"{key} must be an integer, got {v!r}")
    if key not in SIGNED_KEYS and not v > 0:
        raise ConfigError(f"{key} must be positive, got {v!r}")


def _validate_discretization(d):
    for key, v in d.items():
        if v is None:
            continue
        if key in ("window", "omega_window"):
            if (not isinstance(v, list) or len(v) != 2
                    or not all(isinstance(t, (int, float)) for t in v)):
                raise ConfigError(f"{key} must be [lo, hi]")
            if not v[0] < v[1]:
                raise ConfigError(f"{key} must satisfy lo < hi, got {v}")
        elif key in ("levels", "decay_levels"):
            if not isinstance(v, list) or not v or not all(
                    isinstance(t, int) and not isinstance(t, bool) and t >= 0 for t in v):
                raise ConfigError(f"{key} must be a nonempty list of convergent indices")
        elif key == "generation_parity":
            if v not in PARITIES:
                raise ConfigError(f"generation_parity must be one of {PARITIES}, got {v!r}")
        elif isinstance(v, (int, float)):
            _validate_number(key, v)
        else:
            raise ConfigError(f"{key} must be numeric, got {v!r}")


def _validate_problem(p):
    if not isinstance(p["generalized"], bool):
        raise ConfigError("generalized must be true or false")
    off = p["offset"]
    if not isinstance(off, list) or len(off) != 2:
        raise ConfigError("offset must be [y1, y2]")
    tiles = p["tiles"]
    if not isinstance(tiles, dict) or not tiles:
        raise ConfigError("tiles must map letters to [length, wavespeed]")
    for k, v in tiles.items():
        if not isinstance(v, list) or len(v) != 2 or not all(
                isinstance(t, (int, float)) and not isinstance(t, bool) and t > 0 for t in v):
            raise ConfigError(f"tile {k!r} must be [length, wavespeed] with positive values")
    rule = p["rule"]
    _check_keys(rule, {"alphabet", "images"}, "problem.rule")
    if set(rule) != {"alphabet", "images"}:
        raise ConfigError("rule needs both 'alphabet' and 'images'")


def build_config(raw, overrides=(), out=None):
    """Validate a raw config dict, apply preset, overrides and defaults."""
    raw = copy.deepcopy(raw)
    _check_keys(raw, TOP_KEYS, "config")
    for item in overrides:
        apply_override(raw, item)
    command = raw.get("command")
    if command not in COMMANDS:
        raise ConfigError(f"command must be one of {COMMANDS}, got {command!r}")
    preset = raw.get("preset")
    if preset is not None and preset not in PRESETS:
        raise ConfigError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
    disc_defaults = DISCRETIZATION_DEFAULTS[command]
    user_problem = raw.get("problem", {})
    user_disc = raw.get("discretization", {})
    _check_keys(user_problem, PROBLEM_DEFAULTS, "problem")
    _check_keys(user_disc, disc_defaults, f"discretization for {command}")
    preset_block = PRESETS.get(preset, {})
    problem, disc, filled = {}, {}, {}
    for key, default in PROBLEM_DEFAULTS.items():
        if key in user_problem:
            problem[key] = user_problem[key]
        elif key in preset_block.get("problem", {}):
            problem[key] = copy.deepcopy(preset_block["problem"][key])
        else:
            problem[key] = copy.deepcopy(default)
            filled[f"problem.{key}"] = default
    for key, default in disc_defaults.items():
        if key in user_disc:
            disc[key] = user_disc[key]
        elif key in preset_block.get("discretization", {}):
            disc[key] = copy.deepcopy(preset_block["discretization"][key])
        else:
            disc[key] = copy.deepcopy(default)
            filled[f"discretization.{key}"] = default
    _validate_problem(problem)
    _validate_discretization(disc)
    output = out if out is not None else raw.get("output")
    if output is None:
        raise ConfigError("no output directory: set 'output' or pass --out")
    return RunConfig(command, problem, disc, str(output), preset, filled)


def parse_value(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_override(raw, item):
    """Apply `key=value` (dotted key, JSON value) to the raw config dict."""
    if "=" not in item:
        raise ConfigError(f"override must look like key=value, got {item!r}")
    key, text = item.split("=", 1)
    parts = key.strip().split(".")
    if parts[0] not in TOP_KEYS:
        raise ConfigError(f"unknown override key {key!r}")
    node = raw
    for p in parts[:-1]:
        node = node.setdefault(p, {})
        if not isinstance(node, dict):
            raise ConfigError(f"cannot override inside non-object {key!r}")
    node[parts[-1]] = parse_value(text)


def load_config(path, overrides=(), out=None):
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return build_config(raw, overrides, out)
