"""Run artifacts on disk.

Layout of an output directory:

  diagnostics.csv    one row per retained sample, fixed 20-column header
  snap_000000.f64    raw little-endian float64, C order, no header
  snap_000000.json   sidecar: time, sizes, dtype, byte order, layout
  metadata.json      config echo, timing, termination, package version
  checks.json        verdicts from the post-run check battery

CSV floats are written with repr() so that re-running the same configuration
reproduces the file byte for byte; no formatting rounding is involved.
"""

from __future__ import annotations

import json
import os

import numpy as np

from .diagnostics import CSV_COLUMNS, DiagnosticsRecord


class OutputError(OSError):
    """Raised when an artifact cannot be written."""


def _cell(value) -> str:
    if isinstance(value, float) and np.isnan(value):
        return "nan"
    return repr(value)


def write_csv(path: str, records: list[DiagnosticsRecord]) -> None:
    try:
        with open(path, "w", newline="") as fh:
            fh.write(",".join(CSV_COLUMNS) + "\n")
            for rec in records:
                fh.write(",".join(_cell(v) for v in rec.row()) + "\n")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc


def write_snapshot(directory: str, index: int, time: float, arr: np.ndarray) -> str:
    """Raw row-major little-endian float64 payload plus a JSON sidecar."""
    stem = os.path.join(directory, f"snap_{index:06d}")
    payload = np.ascontiguousarray(arr, dtype="<f8")
    try:
        with open(stem + ".f64", "wb") as fh:
            fh.write(payload.tobytes())
        sidecar = {
            "time": float(time),
            "sizes": [int(n) for n in arr.shape],
            "dtype": "float64",
            "byte_order": "little",
            "order": "C",
        }
        with open(stem + ".json", "w") as fh:
            json.dump(sidecar, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise OutputError(f"cannot write snapshot {stem}: {exc}") from exc
    return stem


def read_snapshot(stem: str) -> tuple[float, np.ndarray]:
    """Inverse of write_snapshot; stem is the path without extension."""
    with open(stem + ".json") as fh:
        sidecar = json.load(fh)
    raw = np.fromfile(stem + ".f64", dtype="<f8")
    arr = raw.reshape(tuple(sidecar["sizes"]))
    return float(sidecar["time"]), arr


def write_metadata(directory: str, cfg: dict, traj, elapsed: float, extra=None) -> None:
    from . import __version__

    doc = {
        "config": cfg,
        "version": __version__,
        "elapsed_seconds": float(elapsed),
        "termination": traj.termination,
        "step_count": int(traj.step_count),
        "dt_min": float(traj.dt_min),
        "dt_max": float(traj.dt_max),
        "samples": len(traj.times),
        "final_time": float(traj.times[-1]) if len(traj.times) else None,
        "blow_up_time": None if traj.blow_up_time is None else float(traj.blow_up_time),
    }
    if extra:
        doc.update(extra)
    path = os.path.join(directory, "metadata.json")
    try:
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc


def write_check_report(directory: str, results: list[dict]) -> None:
    path = os.path.join(directory, "checks.json")
    doc = {
        "passed": all(r["passed"] for r in results),
        "results": results,
    }
    try:
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc


def ensure_directory(path: str) -> str:
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as exc:
        raise OutputError(f"cannot create output directory {path}: {exc}") from exc
    return path
