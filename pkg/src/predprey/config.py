"""Run configuration: one JSON document drives every CLI command.

The schema is flat and versioned:

    {
      "schema_version": 1,
      "model": "damped_pp",            // oscillator | lotka_volterra |
                                       // damped_pp | virus | plant
      "params": { ... model rates ... },
      "init": [x0, y0] or [x0, y0, L0],
      "t_end": 100.0,
      "t_start": 0.0,                  // optional
      "sample_every": 0.1,             // optional, default span/1000
      "integrator": {"rel_tol": 1e-8, ...},   // optional overrides
      "bbox": [x0, y0, x1, y1], "n": 20,      // field-grid only
      "name": "anything"               // optional, ignored by runs
    }

Validation is strict: unknown keys and ill-typed values fail before any
output file is opened.
"""

from __future__ import annotations

import dataclasses
import json
import sys
from dataclasses import dataclass
from typing import Any

from .errors import ConfigError
from .integrators import IntegratorConfig
from .models import (
    DampedPPParams,
    LotkaVolterraParams,
    OscillatorParams,
    PlantParams,
    ThresholdSpec,
    VirusParams,
)

SCHEMA_VERSION = 1

MODEL_NAMES = ("oscillator", "lotka_volterra", "damped_pp", "virus", "plant")

_PARAM_FIELDS = {
    "oscillator": ("a", "b"),
    "lotka_volterra": ("a", "beta", "gamma", "sigma"),
    "damped_pp": ("alpha", "beta", "gamma", "delta", "sigma"),
    "virus": ("delta", "alpha", "gamma", "q", "sigma"),
    "plant": ("v", "gamma", "sigma", "threshold"),
}

_TOP_KEYS = {
    "schema_version",
    "model",
    "params",
    "init",
    "t_start",
    "t_end",
    "sample_every",
    "integrator",
    "bbox",
    "n",
    "name",
}

_INTEGRATOR_KEYS = {
    "rel_tol",
    "abs_tol",
    "max_step",
    "initial_step",
    "max_rejections",
    "quadrant_guard_epsilon",
}


@dataclass(frozen=True)
class RunConfig:
    model: str
    params: Any
    init: tuple[float, ...] | None
    t_start: float
    t_end: float | None
    sample_every: float | None
    integrator: IntegratorConfig
    bbox: tuple[float, float, float, float] | None
    n: int | None
    name: str | None


def load_document(source: str) -> dict:
    """Read a JSON config from a file path or standard input ('-')."""
    try:
        if source == "-":
            text = sys.stdin.read()
        else:
            with open(source, "r", encoding="utf-8") as fh:
                text = fh.read()
    except OSError as e:
        raise ConfigError(f"cannot read config {source!r}: {e}") from e
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"config is not valid JSON: {e}") from e
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    return doc


def parse_config(doc: dict) -> RunConfig:
    """Validate a config document; raises ConfigError on any defect."""
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    version = doc.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {version!r}")

    model = doc.get("model")
    if model not in MODEL_NAMES:
        raise ConfigError(f"model must be one of {MODEL_NAMES}, got {model!r}")
    params = build_params(model, doc.get("params"))

    init = None
    if "init" in doc:
        init = _number_list(doc["init"], "init")
        want = 3 if model == "plant" else 2
        if len(init) != want:
            raise ConfigError(f"init must have {want} components for {model}")
    t_start = _number(doc.get("t_start", 0.0), "t_start")
    t_end = None
    if "t_end" in doc:
        t_end = _number(doc["t_end"], "t_end")
        if t_end <= t_start:
            raise ConfigError("t_end must exceed t_start")
    sample_every = None
    if "sample_every" in doc:
        sample_every = _number(doc["sample_every"], "sample_every")
        if sample_every <= 0:
            raise ConfigError("sample_every must be > 0")

    integrator = build_integrator(doc.get("integrator"))

    bbox = None
    if "bbox" in doc:
        vals = _number_list(doc["bbox"], "bbox")
        if len(vals) != 4 or vals[2] <= vals[0] or vals[3] <= vals[1]:
            raise ConfigError("bbox must be [x0, y0, x1, y1] with x1>x0, y1>y0")
        bbox = (vals[0], vals[1], vals[2], vals[3])
    n = None
    if "n" in doc:
        n = doc["n"]
        if not isinstance(n, int) or isinstance(n, bool) or n < 2:
            raise ConfigError("n must be an integer >= 2")

    name = doc.get("name")
    if name is not None and not isinstance(name, str):
        raise ConfigError("name must be a string")

    return RunConfig(
        model, params, tuple(init) if init else None, t_start, t_end,
        sample_every, integrator, bbox, n, name,
    )


def build_params(model: str, raw: Any):
    if not isinstance(raw, dict):
        raise ConfigError("params must be a JSON object")
    fields = _PARAM_FIELDS[model]
    unknown = set(raw) - set(fields)
    if unknown:
        raise ConfigError(f"unknown {model} params: {sorted(unknown)}")
    missing = [f for f in fields if f not in raw and f != "threshold"]
    if model == "plant" and "threshold" not in raw:
        missing.append("threshold")
    if missing:
        raise ConfigError(f"missing {model} params: {missing}")
    try:
        if model == "oscillator":
            return OscillatorParams(a=_number(raw["a"], "a"), b=_number(raw["b"], "b"))
        if model == "lotka_volterra":
            return LotkaVolterraParams(
                a=_number(raw["a"], "a"),
                beta=_number(raw["beta"], "beta"),
                gamma=_number(raw["gamma"], "gamma"),
                sigma=_number(raw["sigma"], "sigma"),
            )
        if model == "damped_pp":
            return DampedPPParams(
                alpha=_number(raw["alpha"], "alpha"),
                beta=_number(raw["beta"], "beta"),
                gamma=_number(raw["gamma"], "gamma"),
                delta=_number(raw["delta"], "delta"),
                sigma=_number(raw["sigma"], "sigma"),
            )
        if model == "virus":
            return VirusParams(
                delta=_number(raw["delta"], "delta"),
                alpha=_number(raw["alpha"], "alpha"),
                gamma=_number(raw["gamma"], "gamma"),
                q=_number(raw["q"], "q"),
                sigma=_number(raw["sigma"], "sigma"),
            )
        return PlantParams(
            v=_number(raw["v"], "v"),
            gamma=_number(raw["gamma"], "gamma"),
            sigma=_number(raw["sigma"], "sigma"),
            threshold=_build_threshold(raw["threshold"]),
        )
    except ValueError as e:
        raise ConfigError(f"invalid {model} params: {e}") from e


def _build_threshold(raw: Any) -> ThresholdSpec:
    if not isinstance(raw, dict):
        raise ConfigError("threshold must be a JSON object")
    unknown = set(raw) - {"y_f", "k", "shape"}
    if unknown:
        raise ConfigError(f"unknown threshold keys: {sorted(unknown)}")
    if "y_f" not in raw:
        raise ConfigError("threshold needs y_f")
    return ThresholdSpec(
        y_f=_number(raw["y_f"], "y_f"),
        k=_number(raw.get("k", 1.0), "k"),
        shape=raw.get("shape", "ramp"),
    )


def build_integrator(raw: Any) -> IntegratorConfig:
    if raw is None:
        return IntegratorConfig()
    if not isinstance(raw, dict):
        raise ConfigError("integrator must be a JSON object")
    unknown = set(raw) - _INTEGRATOR_KEYS
    if unknown:
        raise ConfigError(f"unknown integrator keys: {sorted(unknown)}")
    kwargs = {}
    for key in _INTEGRATOR_KEYS:
        if key in raw:
            if key == "max_rejections":
                if not isinstance(raw[key], int) or isinstance(raw[key], bool):
                    raise ConfigError("max_rejections must be an integer")
                kwargs[key] = raw[key]
            else:
                kwargs[key] = _number(raw[key], key)
    try:
        return IntegratorConfig(**kwargs)
    except ValueError as e:
        raise ConfigError(f"invalid integrator config: {e}") from e


def params_to_dict(params) -> dict:
    d = dataclasses.asdict(params)
    if isinstance(params, PlantParams):
        d["threshold"] = dataclasses.asdict(params.threshold)
    return d


def _number(v: Any, name: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{name} must be a number, got {v!r}")
    return float(v)


def _number_list(v: Any, name: str) -> list[float]:
    if not isinstance(v, list):
        raise ConfigError(f"{name} must be a list of numbers")
    return [_number(item, f"{name}[{i}]") for i, item in enumerate(v)]
