"""Command line surface: run, sweep, verify, oracle.

Exit codes form the machine contract:

  0  run completed and every enabled check passed
  2  at least one enabled check failed
  3  the run (or a sweep child) terminated in blow-up
  4  configuration rejected, including initial-data precondition failures
  5  an artifact could not be written or read

`run` takes either --config FILE or --scenario NAME (the built-in library in
scenarios.py). Output directory precedence: --out flag, then the config's
outputs.directory, then the TORUSLAB_OUTDIR environment variable, then
./toruslab_out.
"""

from __future__ import annotations

import argparse
import copy
import itertools
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .config import (
    ConfigError,
    build_grid,
    build_initial,
    build_model,
    build_stepper,
    load_config,
    validate_config,
)
from .diagnostics import (
    balance_residuals,
    decay_envelope_check,
    extrema_monotonicity,
    l1_criterion_monitor,
    records_for,
)
from .grid import SpectralField, TorusGrid, forward_dft
from .initial import _random_trig, unit_uniform
from .kernel_oracle import derive_constant, kernel_apply
from .models import TestFunction, quartic_bump, weak_form_residual
from .operators import (
    LOG_SINE_MEAN_RESPONSE,
    frac_lap,
    hilbert,
    inv_frac_lap,
)
from .output import (
    OutputError,
    ensure_directory,
    read_snapshot,
    write_check_report,
    write_csv,
    write_metadata,
    write_snapshot,
)
from .scenarios import SCENARIOS, scenario_config
from .stepping import run as run_evolution

EXIT_OK = 0
EXIT_CHECK_FAIL = 2
EXIT_BLOW_UP = 3
EXIT_CONFIG = 4
EXIT_IO = 5

ENV_OUTDIR = "TORUSLAB_OUTDIR"
DEFAULT_OUTDIR = "toruslab_out"

TAIL_FRACTION_LIMIT = 1e-4


# ---------------------------------------------------------------------------
# checks


def standard_test_battery(grid: TorusGrid, t_end: float) -> list[TestFunction]:
    """Five smooth space shapes paired with a quartic time bump."""
    mesh = grid.meshgrid()
    if grid.n_dim == 1:
        x = mesh[0]
        shapes = [
            ("cos x", np.cos(x)),
            ("sin x", np.sin(x)),
            ("cos 2x", np.cos(2 * x)),
            ("sin 3x", np.sin(3 * x)),
            ("cos 5x", np.cos(5 * x)),
        ]
    elif grid.n_dim == 2:
        x1, x2 = mesh
        shapes = [
            ("cos x1", np.cos(x1)),
            ("sin x2", np.sin(x2)),
            ("cos(x1+x2)", np.cos(x1 + x2)),
            ("sin(2x1-x2)", np.sin(2 * x1 - x2)),
            ("cos 2x2", np.cos(2 * x2)),
        ]
    else:
        raise ValueError("test battery covers 1d and 2d grids")
    eta, eta_prime = quartic_bump(t_end)
    return [
        TestFunction(SpectralField.from_phys(grid, arr), eta, eta_prime, label)
        for label, arr in shapes
    ]


def _result(name, tol, passed, value, detail=""):
    return {
        "name": name,
        "tol": float(tol),
        "passed": bool(passed),
        "value": None if value is None else float(value),
        "detail": detail,
    }


def run_checks(cfg: dict, traj, records, params) -> list[dict]:
    """Evaluate every check named in the config against a finished run."""
    results = []
    balances = None
    for item in cfg["checks"]:
        name, tol = item["name"], item["tol"]
        if name in ("entropy", "l2", "hhalf", "lyap2"):
            if balances is None:
                balances = balance_residuals(traj, params)
            rep = balances[name]
            if not rep.applicable:
                results.append(_result(name, tol, False, None, rep.reason))
            else:
                results.append(
                    _result(
                        name, tol, rep.residual_rel <= tol, rep.residual_rel,
                        "relative residual of the balance identity",
                    )
                )
        elif name == "mass":
            drift = max(abs(r.mass - records[0].mass) for r in records)
            results.append(_result(name, tol, drift <= tol, drift, "max |mass(t) - mass(0)|"))
        elif name == "min_principle":
            defect = max(records[0].min - r.min for r in records)
            results.append(
                _result(name, tol, defect <= tol, defect, "max drop of min below min(t=0)")
            )
        elif name == "extrema":
            rep = extrema_monotonicity(records, slack=tol)
            worst = max(rep.worst_min_drop, rep.worst_max_rise)
            results.append(
                _result(
                    name, tol, rep.min_nondecreasing and rep.max_nonincreasing,
                    worst, "worst monotonicity defect net of slack",
                )
            )
        elif name == "positivity":
            vals = np.array([r.positivity for r in records])
            if np.all(np.isnan(vals)):
                results.append(
                    _result(name, tol, False, None, "positivity functional is one dimensional")
                )
            else:
                low = float(np.nanmin(vals))
                results.append(
                    _result(name, tol, low >= -tol, low, "lowest sample of the cubic functional")
                )
        elif name == "wiener":
            rep = l1_criterion_monitor(traj, params.nu, slack=tol)
            results.append(
                _result(
                    name, tol, rep.stays_below_nu and rep.nonincreasing,
                    rep.peak, "peak of the summed derivative coefficients vs nu",
                )
            )
        elif name == "envelope":
            rep = decay_envelope_check(traj, params)
            if not rep.applicable:
                results.append(_result(name, tol, False, None, rep.reason))
            else:
                results.append(
                    _result(
                        name, tol, rep.worst_violation <= tol, rep.worst_violation,
                        "worst excess of sup norm over the decay envelope",
                    )
                )
        elif name == "weak_form":
            try:
                tests = standard_test_battery(traj.grid, float(traj.times[-1]))
                residuals = weak_form_residual(traj, params, tests)
                worst = float(max(residuals))
                results.append(
                    _result(name, tol, worst <= tol, worst, "largest defect over 5 test functions")
                )
            except ValueError as exc:
                results.append(_result(name, tol, False, None, str(exc)))
        else:  # config validation makes this unreachable
            results.append(_result(name, tol, False, None, "unknown check"))
    return results


# ---------------------------------------------------------------------------
# run execution shared by cmd_run and sweep children


def _tail_fraction(field: SpectralField) -> float:
    """Energy fraction in the top quarter of the retained spectral band.

    Dealiasing zeroes everything above min(N)/3 each step, so under-resolution
    shows up as pile-up just below that cutoff, not beyond it.
    """
    grid = field.grid
    coeffs = forward_dft(grid, field.phys)
    kabs = grid.k_abs()
    total = float(np.sum(np.abs(coeffs[kabs > 0.0]) ** 2))
    if total == 0.0:
        return 0.0
    band_top = min(grid.sizes) / 3.0
    tail = float(np.sum(np.abs(coeffs[kabs > 0.75 * band_top]) ** 2))
    return tail / total


def execute_run(cfg: dict, out_dir: str, seed_override=None, quiet=True):
    """Build, evolve, write artifacts, run checks. Returns (exit_code, summary)."""
    grid = build_grid(cfg)
    params = build_model(cfg)
    stepper = build_stepper(cfg)
    theta0 = build_initial(cfg, grid, seed_override)

    started = time.perf_counter()
    traj = run_evolution(
        theta0,
        params,
        stepper,
        require_nonneg=cfg["initial"]["require_nonneg"],
        m0_floor=cfg["initial"]["m0_floor"],
    )
    elapsed = time.perf_counter() - started

    records = records_for(traj, params)
    checks = run_checks(cfg, traj, records, params)

    tail = _tail_fraction(traj.snapshots[-1])
    extra = {
        "tail_energy_fraction": tail,
        "resolution_loss": bool(tail > TAIL_FRACTION_LIMIT),
        "seed_override": seed_override,
    }

    ensure_directory(out_dir)
    formats = cfg["outputs"]["formats"]
    if "csv" in formats:
        write_csv(os.path.join(out_dir, "diagnostics.csv"), records)
    if "snapshots" in formats:
        for i, (t, snap) in enumerate(zip(traj.times, traj.snapshots)):
            write_snapshot(out_dir, i, float(t), snap.phys)
    if "metadata" in formats:
        write_metadata(out_dir, cfg, traj, elapsed, extra=extra)
    write_check_report(out_dir, checks)

    if not quiet:
        for res in checks:
            mark = "ok  " if res["passed"] else "FAIL"
            val = "-" if res["value"] is None else f"{res['value']:.3e}"
            print(f"  [{mark}] {res['name']:<14} value {val:>10}  tol {res['tol']:.1e}"
                  + (f"  ({res['detail']})" if not res["passed"] and res["detail"] else ""))
        if extra["resolution_loss"]:
            print(f"  note: spectral tail holds {tail:.2e} of the energy; "
                  "the grid no longer resolves this state")

    if traj.termination == "blow_up":
        code = EXIT_BLOW_UP
    elif any(not res["passed"] for res in checks):
        code = EXIT_CHECK_FAIL
    else:
        code = EXIT_OK

    final = records[-1]
    summary = {
        "exit_code": code,
        "termination": traj.termination,
        "final_time": float(traj.times[-1]),
        "samples": len(traj.times),
        "elapsed_seconds": elapsed,
        "checks_passed": all(res["passed"] for res in checks),
        "resolution_loss": extra["resolution_loss"],
        "final_mass": final.mass,
        "final_min": final.min,
        "final_max": final.max,
        "final_l2_phys": final.l2_phys,
    }
    return code, summary


def _resolve_outdir(cli_out, cfg) -> str:
    if cli_out:
        return cli_out
    if cfg["outputs"]["directory"]:
        return cfg["outputs"]["directory"]
    env = os.environ.get(ENV_OUTDIR)
    if env:
        return env
    return DEFAULT_OUTDIR


# ---------------------------------------------------------------------------
# subcommands


def cmd_run(args) -> int:
    try:
        if bool(args.config) == bool(args.scenario):
            raise ConfigError("pass exactly one of --config PATH or --scenario NAME")
        if args.config:
            cfg = load_config(args.config)
        else:
            try:
                cfg = validate_config(scenario_config(args.scenario))
            except KeyError as exc:
                raise ConfigError(str(exc.args[0])) from exc
        out_dir = _resolve_outdir(args.out, cfg)
        code, summary = execute_run(
            cfg, out_dir, seed_override=args.seed_override, quiet=args.quiet
        )
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OutputError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    if not args.quiet:
        print(
            f"run: {summary['termination']} at t={summary['final_time']:.6g}, "
            f"{summary['samples']} samples, exit {code}"
        )
    return code


def _set_by_path(doc: dict, path: str, value) -> None:
    keys = path.split(".")
    node = doc
    for key in keys[:-1]:
        if not isinstance(node, dict) or key not in node:
            raise ConfigError(f"sweep path {path!r} does not address the config")
        node = node[key]
    if not isinstance(node, dict):
        raise ConfigError(f"sweep path {path!r} does not address the config")
    node[keys[-1]] = value


def _sweep_child(packed):
    index, cfg, child_dir, seed_override = packed
    try:
        code, summary = execute_run(cfg, child_dir, seed_override=seed_override, quiet=True)
    except ConfigError as exc:
        return index, EXIT_CONFIG, {"error": str(exc)}
    except OutputError as exc:
        return index, EXIT_IO, {"error": str(exc)}
    except Exception as exc:  # a crashed child leaves partial artifacts
        return index, EXIT_IO, {"error": f"{type(exc).__name__}: {exc}"}
    return index, code, summary


def _pair_distance(dir_a: str, dir_b: str) -> float:
    """L2-in-time of the pointwise L2 distance between two stored runs."""
    meta_a = json.load(open(os.path.join(dir_a, "metadata.json")))
    n_a = meta_a["samples"]
    times, gaps = [], []
    for i in range(n_a):
        t_a, snap_a = read_snapshot(os.path.join(dir_a, f"snap_{i:06d}"))
        t_b, snap_b = read_snapshot(os.path.join(dir_b, f"snap_{i:06d}"))
        if abs(t_a - t_b) > 1e-12 or snap_a.shape != snap_b.shape:
            raise OutputError(
                "convergence table needs identical grids and sample times"
            )
        cell = (2.0 * np.pi / np.array(snap_a.shape)).prod()
        times.append(t_a)
        gaps.append(cell * float(np.sum((snap_a - snap_b) ** 2)))
    return float(np.sqrt(np.trapezoid(np.array(gaps), np.array(times))))


def cmd_sweep(args) -> int:
    try:
        cfg = load_config(args.config)
        if "sweep" not in cfg:
            raise ConfigError("sweep command needs a 'sweep' section in the config")
        axes = cfg["sweep"]["axes"]
        mode = cfg["sweep"]["mode"]
        paths = [ax["path"] for ax in axes]
        value_lists = [ax["values"] for ax in axes]
        if mode == "zip":
            if len({len(v) for v in value_lists}) != 1:
                raise ConfigError("zip mode needs equally long value lists")
            combos = list(zip(*value_lists))
        else:
            combos = list(itertools.product(*value_lists))

        base = {k: v for k, v in cfg.items() if k != "sweep"}
        out_dir = ensure_directory(_resolve_outdir(args.out, cfg))
        jobs = []
        for index, combo in enumerate(combos):
            child = copy.deepcopy(base)
            for path, value in zip(paths, combo):
                _set_by_path(child, path, value)
            child = validate_config(child)
            child_dir = os.path.join(out_dir, f"run_{index:03d}")
            jobs.append((index, child, child_dir, args.seed_override))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OutputError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO

    workers = args.workers or min(4, os.cpu_count() or 1)
    outcomes = {}
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for index, code, summary in pool.map(_sweep_child, jobs):
                outcomes[index] = (code, summary)
    else:
        for packed in jobs:
            index, code, summary = _sweep_child(packed)
            outcomes[index] = (code, summary)

    try:
        agg_path = os.path.join(out_dir, "aggregate.csv")
        with open(agg_path, "w", newline="") as fh:
            head = ["index"] + paths + [
                "exit_code", "termination", "checks_passed", "final_time",
                "final_mass", "final_min", "final_max", "final_l2_phys",
            ]
            fh.write(",".join(head) + "\n")
            for index, combo in enumerate(combos):
                code, summary = outcomes[index]
                if "error" in summary:
                    row = [repr(index)] + [repr(v) for v in combo] + [
                        repr(code), "error", "False", "", "", "", "", "",
                    ]
                else:
                    row = [repr(index)] + [repr(v) for v in combo] + [
                        repr(code),
                        summary["termination"],
                        repr(bool(summary["checks_passed"])),
                        repr(summary["final_time"]),
                        repr(summary["final_mass"]),
                        repr(summary["final_min"]),
                        repr(summary["final_max"]),
                        repr(summary["final_l2_phys"]),
                    ]
                fh.write(",".join(row) + "\n")

        distances = []
        lone_axis = len(paths) == 1 and paths[0].endswith("epsilon")
        clean = all(
            code in (EXIT_OK, EXIT_CHECK_FAIL) and "error" not in summary
            for code, summary in outcomes.values()
        )
        if lone_axis and len(combos) >= 2 and clean:
            conv_path = os.path.join(out_dir, "convergence.csv")
            with open(conv_path, "w", newline="") as fh:
                fh.write("epsilon,epsilon_next,distance\n")
                for i in range(len(combos) - 1):
                    d = _pair_distance(
                        os.path.join(out_dir, f"run_{i:03d}"),
                        os.path.join(out_dir, f"run_{i + 1:03d}"),
                    )
                    distances.append((combos[i][0], combos[i + 1][0], d))
                    fh.write(f"{combos[i][0]!r},{combos[i + 1][0]!r},{d!r}\n")
    except (OSError, OutputError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO

    if not args.quiet:
        for index, combo in enumerate(combos):
            code, summary = outcomes[index]
            state = summary.get("termination", "error")
            print(f"  run_{index:03d} {dict(zip(paths, combo))} -> {state}, exit {code}")
        for eps_a, eps_b, d in distances:
            print(f"  distance({eps_a} vs {eps_b}) = {d:.6e}")

    codes = [code for code, _ in outcomes.values()]
    if any(c == EXIT_CHECK_FAIL for c in codes):
        return EXIT_CHECK_FAIL
    if any(c == EXIT_BLOW_UP for c in codes):
        return EXIT_BLOW_UP
    for c in codes:
        if c != EXIT_OK:
            return c
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify


def _seeded_pair(grid: TorusGrid, seed: int):
    """Two independent band-limited fields with nonzero means."""
    k_band = max(2, min(grid.sizes) // 5)
    f = _random_trig(grid, k_band, 1.0, seed)
    g = _random_trig(grid, k_band, 1.0, seed + 10_000)
    shift_f = unit_uniform(seed, [2 * grid.npoints])[0] - 0.5
    shift_g = unit_uniform(seed + 10_000, [2 * grid.npoints])[0] - 0.5
    f = SpectralField.from_phys(grid, f.phys + shift_f)
    g = SpectralField.from_phys(grid, g.phys + shift_g)
    return f, g


def hilbert_identity_errors(grid: TorusGrid, seed: int) -> dict[str, float]:
    """Absolute defects of the four conjugate-operator identities."""
    f, g = _seeded_pair(grid, seed)
    vol = grid.cell_volume
    hf, hg = hilbert(f), hilbert(g)

    # applying twice flips sign and removes the mean
    e1 = float(np.max(np.abs(hilbert(hf).phys + f.phys - f.mean())))
    # skew adjoint in the L2 pairing
    e2 = float(abs(vol * np.sum(hf.phys * g.phys) + vol * np.sum(f.phys * hg.phys)))
    # conjugation of the derivative realizes |k|
    d1 = SpectralField.from_coeffs(
        grid, 1j * grid.wavevectors()[0] * f.coeffs
    )
    e3 = float(np.max(np.abs(hilbert(d1).phys - frac_lap(f, 1.0).phys)))
    # product rule for conjugates, with the mean-product completion
    lhs = hilbert(SpectralField.from_phys(grid, f.phys * hg.phys + g.phys * hf.phys))
    rhs = hf.phys * hg.phys - f.phys * g.phys + f.mean() * g.mean()
    e4 = float(np.max(np.abs(lhs.phys - rhs)))
    return {
        "double application flips sign, drops mean": e1,
        "skew adjoint pairing": e2,
        "derivative conjugation gives |k|": e3,
        "conjugate product rule": e4,
    }


def cmd_verify(args) -> int:
    tol = 1e-12
    ns = (32, 64, 256)
    seeds = range(25)
    table: dict[str, dict[int, float]] = {}
    for n in ns:
        grid = TorusGrid((n,))
        for seed in seeds:
            errs = hilbert_identity_errors(grid, seed)
            for label, err in errs.items():
                table.setdefault(label, {})[n] = max(
                    table.get(label, {}).get(n, 0.0), err
                )
    failed = False
    for label, per_n in table.items():
        worst = max(per_n.values())
        ok = worst <= tol
        failed = failed or not ok
        if not args.quiet:
            cols = "  ".join(f"N={n}: {per_n[n]:.2e}" for n in ns)
            print(f"  [{'ok  ' if ok else 'FAIL'}] {label:<42} {cols}")
    if not args.quiet:
        print(f"verify: {'all identities hold' if not failed else 'identity failure'} "
              f"(tolerance {tol:.0e}, {len(list(seeds))} seeds per size)")
    return EXIT_OK if not failed else EXIT_CHECK_FAIL


# ---------------------------------------------------------------------------
# oracle


_ORACLE_OPS = {"hilbert": "hilbert", "lambda_pow": "frac_lap", "lambda_inv": "inv_frac_lap"}


def _oracle_multiplier(op: str, field: SpectralField, gamma: float) -> SpectralField:
    if op == "hilbert":
        return hilbert(field)
    if op == "lambda_pow":
        return frac_lap(field, gamma)
    return inv_frac_lap(field)


def cmd_oracle(args) -> int:
    if args.op not in _ORACLE_OPS:
        print(f"config error: unknown op {args.op!r}", file=sys.stderr)
        return EXIT_CONFIG
    if args.dim not in (1, 2):
        print("config error: --dim must be 1 or 2", file=sys.stderr)
        return EXIT_CONFIG
    if args.dim == 2 and args.op != "lambda_pow":
        print(f"config error: {args.op} oracle is one dimensional", file=sys.stderr)
        return EXIT_CONFIG

    # lattice-image sums cost (2K+1)^dim per point, so 2d defaults much lower
    trunc = args.trunc if args.trunc is not None else (10_000 if args.dim == 1 else 64)

    sizes = (args.grid_n,) * args.dim
    grid = TorusGrid(sizes)
    mesh = grid.meshgrid()
    if args.dim == 1:
        x = mesh[0]
        fields = [
            ("cos x", np.cos(x)),
            ("sin 2x", np.sin(2 * x)),
            ("cos 3x", np.cos(3 * x)),
        ]
    else:
        x1, x2 = mesh
        fields = [
            ("cos x1", np.cos(x1)),
            ("cos(x1+x2)", np.cos(x1 + x2)),
            ("sin(2x1-x2)", np.sin(2 * x1 - x2)),
        ]
    seeded = _random_trig(grid, max(2, args.grid_n // 8), 0.5, 12345)
    fields.append(("seeded field", seeded.phys + 1.0))

    kernel_op = _ORACLE_OPS[args.op]
    if args.op != "lambda_pow":
        truncs = [int(trunc)]
    elif args.dim == 1:
        truncs = sorted({100, 1000, int(trunc)})
    else:
        truncs = sorted({8, 16, int(trunc)})

    if not args.quiet:
        print(f"oracle: {args.op}, gamma={args.gamma}, grid {sizes}, truncation {truncs}")
        print(f"  derived kernel constant c(gamma={args.gamma}, dim={args.dim}) = "
              f"{derive_constant(args.gamma, args.dim):.12f}")
        print(f"  zero-mode response of the inverse operator = "
              f"{LOG_SINE_MEAN_RESPONSE:.12f} (2 log 2)")

    for label, arr in fields:
        field = SpectralField.from_phys(grid, arr)
        want = _oracle_multiplier(args.op, field, args.gamma)
        scale = float(np.max(np.abs(want.phys))) or 1.0
        line = f"  {label:<14}"
        for k_img in truncs:
            got = kernel_apply(kernel_op, field, gamma=args.gamma, trunc=k_img)
            rel = float(np.max(np.abs(got.phys - want.phys))) / scale
            line += f"  K={k_img}: {rel:.3e}"
        if not args.quiet:
            print(line)
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="toruslab",
        description="pseudospectral laboratory for nonlocal transport on the torus",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one configuration and its checks")
    p_run.add_argument("--config", help="path to a JSON config document")
    p_run.add_argument(
        "--scenario", help=f"built-in scenario name ({', '.join(sorted(SCENARIOS))})"
    )
    p_run.add_argument("--out", help="output directory")
    p_run.add_argument("--seed-override", type=int, default=None)
    p_run.add_argument("--quiet", action="store_true")
    p_run.set_defaults(fn=cmd_run)

    p_sweep = sub.add_parser("sweep", help="run a parameter grid in parallel")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--out", help="output directory")
    p_sweep.add_argument("--workers", type=int, default=None)
    p_sweep.add_argument("--seed-override", type=int, default=None)
    p_sweep.add_argument("--quiet", action="store_true")
    p_sweep.set_defaults(fn=cmd_sweep)

    p_verify = sub.add_parser("verify", help="operator identity self-test")
    p_verify.add_argument("--quiet", action="store_true")
    p_verify.set_defaults(fn=cmd_verify)

    p_oracle = sub.add_parser("oracle", help="kernel quadrature vs multiplier table")
    p_oracle.add_argument("--op", default="lambda_pow",
                          choices=sorted(_ORACLE_OPS))
    p_oracle.add_argument("--gamma", type=float, default=1.0)
    p_oracle.add_argument("--trunc", type=int, default=None)
    p_oracle.add_argument("--grid-n", type=int, default=64)
    p_oracle.add_argument("--dim", type=int, default=1)
    p_oracle.add_argument("--quiet", action="store_true")
    p_oracle.set_defaults(fn=cmd_oracle)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
