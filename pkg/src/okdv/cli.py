"""Command-line interface.

Subcommands:

    run       execute one configured evolution, write CSV/JSON artifacts
    sweep     run the same config across a list of epsilon values
    verify    run a named property suite and print its JSON report
    table     print the basis multiplication table as CSV
    series    dump the charge-generating series terms for a configured field
    symmetry  evaluate equivariance residuals for configured transformations

Numeric series go to CSV, reports and metadata to JSON, figures to PNG files
next to the CSV output. Exit codes: 0 success, 1 verification failure,
2 configuration error, 3 blow-up.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from pathlib import Path

from . import __version__
from .config import ConfigError, RunConfig, META_SCHEMA, load_config
from .algebra import multiplication_table_csv
from .fields import save_field_csv
from .flows import BlowUpError, Trajectory, charge_names, evolve
from .symmetry import SymmetrySpec, equivariance_residual
from .transforms import charge_diagnostics, gardner_series
from .verify import run_suite

FORMAT = ".17g"


def _write_charges_csv(traj: Trajectory, path: Path) -> None:
    names = charge_names()
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(names)
        for t, row in zip(traj.charge_times, traj.charges):
            writer.writerow([format(t, FORMAT)] + [format(v, FORMAT) for v in row])


def _error_json(kind: str, message: str, out_dir: Path | None = None, **extra) -> None:
    payload = {"error": {"type": kind, "message": message, **extra}}
    print(json.dumps(payload))
    if out_dir is not None and out_dir.is_dir():
        (out_dir / "error.json").write_text(json.dumps(payload, indent=2) + "\n")


def _execute_run(cfg: RunConfig, out_dir: Path, quiet: bool) -> int:
    out_dir.mkdir(parents=True, exist_ok=True)
    spec = cfg.flow_spec()
    u0 = cfg.build_initial_condition()
    started = time.perf_counter()
    try:
        traj = evolve(spec, u0, snapshot_every=cfg.snapshot_every)
    except BlowUpError as exc:
        _error_json(
            "blowup", str(exc), out_dir, step=exc.step, t=exc.t, max_abs=exc.max_abs
        )
        return 3
    wall = time.perf_counter() - started

    for idx, (t, f) in enumerate(zip(traj.times, traj.fields)):
        save_field_csv(f, out_dir / f"snapshot_{idx:06d}.csv")
    _write_charges_csv(traj, out_dir / "charges.csv")

    meta = {
        "schema": META_SCHEMA,
        "package": "okdv",
        "version": __version__,
        "config": cfg.config_dict(),
        "n_steps": spec.n_steps,
        "snapshot_times": [float(t) for t in traj.times],
        "wall_time_s": round(wall, 6),
    }
    (out_dir / "meta.json").write_text(json.dumps(meta, indent=2) + "\n")

    if cfg.figures:
        from .plotting import save_charges_figure, save_profile_figure

        save_profile_figure(traj.final, out_dir / "final_state.png", title="final state")
        save_charges_figure(traj.charge_table(), charge_names(), out_dir / "charges.png")

    if not quiet:
        print(f"run complete: {spec.n_steps} steps, artifacts in {out_dir}")
    return 0


def _cmd_run(args) -> int:
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        _error_json("config", str(exc), field=exc.fieldname)
        return 2
    out_dir = Path(args.out) if args.out else Path(cfg.out_dir)
    return _execute_run(cfg, out_dir, args.quiet)


def _cmd_sweep(args) -> int:
    try:
        data = json.loads(Path(args.config).read_text())
    except json.JSONDecodeError as exc:
        _error_json("config", f"invalid JSON: {exc}")
        return 2
    sweep = data.pop("sweep", None)
    if not sweep or "epsilon" not in sweep:
        _error_json("config", "sweep.epsilon list is required", field="sweep.epsilon")
        return 2
    root = Path(args.out) if args.out else Path(data.get("outputs", {}).get("directory", "out"))
    worst = 0
    for eps in sweep["epsilon"]:
        run_data = json.loads(json.dumps(data))  # deep copy
        run_data.setdefault("flow", {})["epsilon"] = eps
        try:
            cfg = RunConfig.from_dict(run_data)
        except ConfigError as exc:
            _error_json("config", str(exc), field=exc.fieldname)
            return 2
        sub = root / f"eps_{eps:g}"
        code = _execute_run(cfg, sub, args.quiet)
        worst = max(worst, code)
    return worst


def _cmd_verify(args) -> int:
    report = run_suite(args.suite)
    text = json.dumps(report, indent=2)
    print(text)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"verify_{args.suite}.json").write_text(text + "\n")
    return 0 if report["passed"] else 1


def _cmd_table(args) -> int:
    text = multiplication_table_csv(args.level)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_series(args) -> int:
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        _error_json("config", str(exc), field=exc.fieldname)
        return 2
    u = cfg.build_initial_condition()
    series = gardner_series(u, args.terms)
    out_dir = Path(args.out) if args.out else Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for n, term in enumerate(series.terms):
        save_field_csv(term, out_dir / f"series_r{n}.csv")
    diag = charge_diagnostics(u, args.terms + 1)
    (out_dir / "charge_diagnostics.json").write_text(json.dumps(diag, indent=2) + "\n")
    if cfg.figures:
        from .plotting import save_series_figure

        save_series_figure(series.terms, out_dir / "series.png")
    if not args.quiet:
        print(f"series terms r0..r{args.terms} written to {out_dir}")
    return 0


def _cmd_symmetry(args) -> int:
    try:
        data = json.loads(Path(args.config).read_text())
    except json.JSONDecodeError as exc:
        _error_json("config", f"invalid JSON: {exc}")
        return 2
    specs = data.pop("specs", None)
    if not specs:
        _error_json("config", "specs list is required", field="specs")
        return 2
    try:
        cfg = RunConfig.from_dict(data)
    except ConfigError as exc:
        _error_json("config", str(exc), field=exc.fieldname)
        return 2
    flow = cfg.flow_spec()
    u0 = cfg.build_initial_condition()
    results = []
    for raw in specs:
        kind = raw.get("kind")
        try:
            if kind == "galileo":
                spec = SymmetrySpec(kind="galileo", c=float(raw.get("c", 0.0)))
            else:
                spec = SymmetrySpec(
                    kind="automorphism",
                    i=int(raw.get("i", 1)),
                    j=int(raw.get("j", 2)),
                    t=float(raw.get("t", 0.0)),
                )
            residual = equivariance_residual(
                spec, flow, u0, snapshot_every=cfg.snapshot_every
            )
            results.append({"spec": raw, "residual": residual})
        except ValueError as exc:
            results.append({"spec": raw, "error": str(exc)})
    report = {"flow": cfg.config_dict()["flow"], "results": results}
    text = json.dumps(report, indent=2)
    print(text)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "symmetry_report.json").write_text(text + "\n")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="okdv",
        description="Octonion-valued KdV laboratory: runs, sweeps, and verification",
    )
    parser.add_argument("--version", action="version", version=f"okdv {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="execute one configured evolution")
    p.add_argument("--config", required=True, help="path to run config JSON (or a meta.json)")
    p.add_argument("--out", help="output directory (overrides outputs.directory)")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("sweep", help="run the config for each sweep.epsilon value")
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="root output directory")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("verify", help="run a property suite and print its report")
    p.add_argument("suite", choices=["algebra", "structures", "transforms", "symmetry"])
    p.add_argument("--out", help="directory for the JSON report")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("table", help="print the basis multiplication table as CSV")
    p.add_argument("--level", type=int, default=3)
    p.add_argument("--out", help="write to a file instead of stdout")
    p.set_defaults(func=_cmd_table)

    p = sub.add_parser("series", help="dump charge-generating series terms")
    p.add_argument("--config", required=True)
    p.add_argument("--terms", type=int, default=6)
    p.add_argument("--out")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=_cmd_series)

    p = sub.add_parser("symmetry", help="equivariance residual report")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=_cmd_symmetry)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
