"""Declarative run configuration: one JSON document per run.

The schema rejects unknown keys everywhere so that typos fail loudly
before any computation starts.  Mode-specific requirements (which sections
must be present) are checked after schema validation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema

from .errors import ConfigError

MODES = ("portrait", "area", "evolve", "sweep", "fit", "convert-units")

_POS = {"type": "number", "exclusiveMinimum": 0}
_NONNEG = {"type": "number", "minimum": 0}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["mode"],
    "properties": {
        "mode": {"enum": list(MODES)},
        "seed": {"type": "integer", "minimum": 0},
        "out": {"type": "string"},
        "workers": {"type": "integer", "minimum": 1},
        "kicks": {"type": "integer", "minimum": 0},
        "stride": {"type": "integer", "minimum": 1},
        "quantum": {
            "type": "object",
            "additionalProperties": False,
            "required": ["k", "tau", "eta"],
            "properties": {
                "k": _NONNEG,
                "tau": _POS,
                "eta": {"type": "number"},
                "n_min": {"type": "integer"},
                "n_max": {"type": "integer"},
            },
        },
        "ensemble": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "count": {"type": "integer", "minimum": 1},
                "beta_center": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
                "beta_fwhm": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
                "initial_n": {"type": "integer"},
            },
        },
        "se": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "enabled": {"type": "boolean"},
                "mode": {"enum": ["off", "fixed", "formula"]},
                "p_per_kick": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
                "detuning": _POS,
                "lifetime": _POS,
            },
        },
        "window": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "width": {"type": "integer", "minimum": 1},
                "t0": {
                    "oneOf": [
                        {"type": "integer", "minimum": 0},
                        {"enum": ["auto"]},
                    ]
                },
                "separation_sigmas": _POS,
                "fit_t_start": {"type": "integer", "minimum": 0},
                "fit_t_end": {"type": "integer", "minimum": 1},
            },
        },
        "map": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "grid_resolution": {"type": "integer", "minimum": 64},
                "area_kicks": {"type": "integer", "minimum": 1},
                "seeds": {"type": "integer", "minimum": 1},
                "portrait_kicks": {"type": "integer", "minimum": 1},
                "portrait_seeds": {"type": "integer", "minimum": 1},
                "write_occupancy": {"type": "boolean"},
            },
        },
        "sweep": {
            "type": "object",
            "additionalProperties": False,
            "required": ["family"],
            "properties": {
                "family": {"enum": ["fixed-tau", "fixed-classical"]},
                "tau": _POS,
                "points": {
                    "type": "array",
                    "minItems": 1,
                    "items": {
                        "type": "object",
                        "additionalProperties": False,
                        "required": ["k", "eta"],
                        "properties": {
                            "k": _POS,
                            "eta": {"type": "number"},
                            "p_se": {"type": "number", "minimum": 0,
                                     "exclusiveMaximum": 1},
                        },
                    },
                },
                "k_tilde": _POS,
                "eta": {"type": "number"},
                "eps_sign": {"enum": [-1, 1]},
                "eps_values": {
                    "type": "array",
                    "minItems": 1,
                    "items": _POS,
                },
                "p_se_per_k": {"type": "number", "minimum": 0},
                "kicks": {"type": "integer", "minimum": 1},
                "rotors": {"type": "integer", "minimum": 1},
                "stride": {"type": "integer", "minimum": 1},
                "write_histograms": {"type": "boolean"},
            },
        },
        "fit": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "survival_csv": {"type": "string"},
                "rates_csv": {"type": "string"},
                "t_start": {"type": "integer", "minimum": 0},
                "t_end": {"type": "integer", "minimum": 1},
            },
        },
        "units": {
            "type": "object",
            "additionalProperties": False,
            "required": ["wavelength", "mass", "pulse_period"],
            "properties": {
                "wavelength": _POS,
                "mass": _POS,
                "pulse_period": _POS,
                "gravity": _POS,
                "rabi_frequency": _POS,
                "detuning": _POS,
                "pulse_length": _POS,
            },
        },
    },
}

_MODE_REQUIRES = {
    "portrait": ["quantum"],
    "area": ["quantum"],
    "evolve": ["quantum", "ensemble", "kicks"],
    "sweep": ["sweep"],
    "fit": ["fit"],
    "convert-units": ["units"],
}


@dataclass(frozen=True)
class RunConfig:
    """Validated configuration; `raw` is the normalized document."""

    mode: str
    raw: dict = field(repr=False)

    def section(self, name: str, default=None):
        return self.raw.get(name, {} if default is None else default)


def validate_config(doc: dict) -> RunConfig:
    try:
        jsonschema.validate(doc, SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config invalid at {path}: {exc.message}") from exc
    mode = doc["mode"]
    for key in _MODE_REQUIRES[mode]:
        if key not in doc:
            raise ConfigError(f"mode {mode!r} requires a {key!r} section")
    if mode == "sweep":
        _validate_sweep(doc["sweep"])
    if mode == "fit":
        fit = doc["fit"]
        if ("survival_csv" in fit) == ("rates_csv" in fit):
            raise ConfigError(
                "fit mode needs exactly one of survival_csv or rates_csv"
            )
    return RunConfig(mode=mode, raw=doc)


def _validate_sweep(sweep: dict):
    family = sweep["family"]
    if family == "fixed-tau":
        for key in ("tau", "points"):
            if key not in sweep:
                raise ConfigError(f"fixed-tau sweep requires {key!r}")
        for bad in ("k_tilde", "eps_values", "eps_sign"):
            if bad in sweep:
                raise ConfigError(f"{bad!r} is a fixed-classical key")
    else:
        for key in ("k_tilde", "eta", "eps_values"):
            if key not in sweep:
                raise ConfigError(f"fixed-classical sweep requires {key!r}")
        if "points" in sweep or "tau" in sweep:
            raise ConfigError("fixed-classical sweeps derive k and tau from "
                              "k_tilde and eps_values")


def load_config(path: str | Path) -> RunConfig:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a JSON object")
    return validate_config(doc)
