"""Run configuration: a single JSON document, schema-checked before any compute.

The document has five sections. Unknown keys anywhere are rejected so typos
fail loudly instead of silently running defaults.

  grid     {"sizes": [512]}
  model    {"equation": "1d"|"nd", "nu": 0.0, "gamma": 0.0, "delta": 0.0,
            "epsilon": 0.0, "velocity_family": null|name, "alpha": 0.0,
            "beta": 0.0, "linear_only": false}
  stepper  {"t_end": 1.0, "dt": 1e-4, "scheme": "if_rk4", "adaptive": false,
            "cfl_safety": 0.5, "snapshot_stride": 1, "max_steps": 10000000}
  initial  {"kind": name, "params": {...}, "require_nonneg": false,
            "m0_floor": null}
  outputs  {"directory": null, "formats": ["csv", "snapshots", "metadata"]}
  checks   [name | {"name": name, "tol": float}, ...]
  sweep    optional; {"axes": [{"path": "model.epsilon", "values": [...]}],
            "mode": "product" | "zip"}

A ConfigError carries a human-readable path to the offending key.
"""

from __future__ import annotations

import json
from typing import Any

from .grid import TorusGrid
from .initial import KINDS, make_initial
from .models import ModelParams
from .operators import FAMILY_NAMES, family_from_name
from .stepping import SCHEMES, StepperConfig


class ConfigError(ValueError):
    """Configuration document rejected before any compute."""


CHECK_NAMES = (
    "entropy", "l2", "hhalf", "lyap2", "mass", "min_principle",
    "extrema", "positivity", "wiener", "envelope", "weak_form",
)

# name -> default tolerance semantics (relative for balance checks,
# absolute slack otherwise); see cli.run_checks for exact meanings
DEFAULT_TOLS = {
    "entropy": 1e-5,
    "l2": 1e-6,
    "hhalf": 1e-6,
    "lyap2": 1e-5,
    "mass": 1e-10,
    "min_principle": 1e-8,
    "extrema": 1e-8,
    "positivity": 1e-10,
    "wiener": 1e-10,
    "envelope": 0.0,
    "weak_form": 1e-5,
}

_SECTIONS = ("grid", "model", "stepper", "initial", "outputs", "checks", "sweep")

_MODEL_KEYS = {
    "equation": None,
    "nu": 0.0,
    "gamma": 0.0,
    "delta": 0.0,
    "epsilon": 0.0,
    "velocity_family": None,
    "alpha": 0.0,
    "beta": 0.0,
    "linear_only": False,
}
_STEPPER_KEYS = {
    "t_end": None,
    "dt": None,
    "scheme": "if_rk4",
    "adaptive": False,
    "cfl_safety": 0.5,
    "snapshot_stride": 1,
    "max_steps": 10_000_000,
}
_INITIAL_KEYS = {
    "kind": None,
    "params": None,
    "require_nonneg": False,
    "m0_floor": None,
}
_OUTPUT_KEYS = {
    "directory": None,
    "formats": ("csv", "snapshots", "metadata"),
}
_FORMATS = ("csv", "snapshots", "metadata")


def _reject_unknown(section: str, doc: dict, allowed) -> None:
    extra = set(doc) - set(allowed)
    if extra:
        raise ConfigError(f"{section}: unknown keys {sorted(extra)}")


def _section(doc: dict, name: str, defaults: dict, required: bool = True) -> dict:
    if name not in doc:
        if required:
            raise ConfigError(f"missing required section {name!r}")
        return dict(defaults)
    got = doc[name]
    if not isinstance(got, dict):
        raise ConfigError(f"{name}: expected an object")
    _reject_unknown(name, got, defaults)
    merged = dict(defaults)
    merged.update(got)
    for key, val in merged.items():
        if val is None and defaults[key] is None and key in (
            "equation", "t_end", "dt", "kind", "params",
        ):
            raise ConfigError(f"{name}.{key} is required")
    return merged


def validate_config(doc: dict) -> dict:
    """Normalize a parsed document, applying defaults; raises ConfigError."""
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    _reject_unknown("top level", doc, _SECTIONS)

    out: dict[str, Any] = {}

    grid_doc = doc.get("grid")
    if not isinstance(grid_doc, dict):
        raise ConfigError("missing required section 'grid'")
    _reject_unknown("grid", grid_doc, {"sizes"})
    sizes = grid_doc.get("sizes")
    if not isinstance(sizes, (list, tuple)) or not sizes:
        raise ConfigError("grid.sizes must be a non-empty list")
    if not all(isinstance(n, int) and not isinstance(n, bool) for n in sizes):
        raise ConfigError("grid.sizes must be integers")
    out["grid"] = {"sizes": [int(n) for n in sizes]}

    out["model"] = _section(doc, "model", _MODEL_KEYS)
    fam = out["model"]["velocity_family"]
    if fam is not None and fam not in FAMILY_NAMES:
        raise ConfigError(
            f"model.velocity_family {fam!r} is not one of {sorted(FAMILY_NAMES)}"
        )

    out["stepper"] = _section(doc, "stepper", _STEPPER_KEYS)
    if out["stepper"]["scheme"] not in SCHEMES:
        raise ConfigError(f"stepper.scheme must be one of {SCHEMES}")

    out["initial"] = _section(doc, "initial", _INITIAL_KEYS)
    if out["initial"]["kind"] not in KINDS:
        raise ConfigError(f"initial.kind must be one of {KINDS}")
    if not isinstance(out["initial"]["params"], dict):
        raise ConfigError("initial.params must be an object")

    out["outputs"] = _section(doc, "outputs", _OUTPUT_KEYS, required=False)
    formats = out["outputs"]["formats"]
    if not isinstance(formats, (list, tuple)):
        raise ConfigError("outputs.formats must be a list")
    bad = set(formats) - set(_FORMATS)
    if bad:
        raise ConfigError(f"outputs.formats: unknown entries {sorted(bad)}")
    out["outputs"]["formats"] = list(formats)

    checks = doc.get("checks", [])
    if not isinstance(checks, list):
        raise ConfigError("checks must be a list")
    normalized = []
    for item in checks:
        if isinstance(item, str):
            item = {"name": item}
        if not isinstance(item, dict):
            raise ConfigError("checks entries must be names or objects")
        _reject_unknown("checks entry", item, {"name", "tol"})
        name = item.get("name")
        if name not in CHECK_NAMES:
            raise ConfigError(f"unknown check {name!r}, expected one of {CHECK_NAMES}")
        tol = float(item.get("tol", DEFAULT_TOLS[name]))
        normalized.append({"name": name, "tol": tol})
    out["checks"] = normalized

    if "sweep" in doc:
        sweep = doc["sweep"]
        if not isinstance(sweep, dict):
            raise ConfigError("sweep must be an object")
        _reject_unknown("sweep", sweep, {"axes", "mode"})
        axes = sweep.get("axes")
        if not isinstance(axes, list) or not axes:
            raise ConfigError("sweep.axes must be a non-empty list")
        for ax in axes:
            if not isinstance(ax, dict):
                raise ConfigError("sweep.axes entries must be objects")
            _reject_unknown("sweep axis", ax, {"path", "values"})
            if not isinstance(ax.get("path"), str):
                raise ConfigError("sweep axis needs a string 'path'")
            if not isinstance(ax.get("values"), list) or not ax["values"]:
                raise ConfigError("sweep axis needs a non-empty 'values' list")
        mode = sweep.get("mode", "product")
        if mode not in ("product", "zip"):
            raise ConfigError("sweep.mode must be 'product' or 'zip'")
        out["sweep"] = {"axes": axes, "mode": mode}

    return out


def load_config(path: str) -> dict:
    """Read and validate a JSON config file."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return validate_config(doc)


def build_grid(cfg: dict) -> TorusGrid:
    try:
        return TorusGrid(tuple(cfg["grid"]["sizes"]))
    except ValueError as exc:
        raise ConfigError(f"grid: {exc}") from exc


def build_model(cfg: dict) -> ModelParams:
    m = cfg["model"]
    family = None
    if m["velocity_family"] is not None:
        family = family_from_name(m["velocity_family"], alpha=m["alpha"], beta=m["beta"])
    try:
        return ModelParams(
            equation=m["equation"],
            nu=float(m["nu"]),
            gamma=float(m["gamma"]),
            delta=float(m["delta"]),
            epsilon=float(m["epsilon"]),
            velocity_family=family,
            linear_only=bool(m["linear_only"]),
        )
    except ValueError as exc:
        raise ConfigError(f"model: {exc}") from exc


def build_stepper(cfg: dict) -> StepperConfig:
    s = cfg["stepper"]
    try:
        return StepperConfig(
            t_end=float(s["t_end"]),
            dt=float(s["dt"]),
            scheme=s["scheme"],
            adaptive=bool(s["adaptive"]),
            cfl_safety=float(s["cfl_safety"]),
            snapshot_stride=int(s["snapshot_stride"]),
            max_steps=int(s["max_steps"]),
        )
    except ValueError as exc:
        raise ConfigError(f"stepper: {exc}") from exc


def build_initial(cfg: dict, grid: TorusGrid, seed_override=None):
    init = cfg["initial"]
    params = dict(init["params"])
    if seed_override is not None and init["kind"] == "random_trig":
        params["seed"] = int(seed_override)
    try:
        field = make_initial(grid, init["kind"], params)
    except ValueError as exc:
        raise ConfigError(f"initial: {exc}") from exc
    import numpy as np

    low = float(np.min(field.phys))
    if init["require_nonneg"] and low < -1e-13:
        raise ConfigError(
            f"initial: data must be nonnegative but reaches {low:.3e}; "
            "shift it up or enable nonneg_shift"
        )
    if init["m0_floor"] is not None and low < float(init["m0_floor"]) - 1e-13:
        raise ConfigError(
            f"initial: data must stay above m0_floor={init['m0_floor']} "
            f"but reaches {low:.3e}"
        )
    return field
