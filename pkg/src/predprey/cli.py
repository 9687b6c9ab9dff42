"""Command-line front end.

Commands:

    predprey simulate   --config cfg.json --out BASE [--format csv|json] [--plot]
    predprey analyze    --config cfg.json --out BASE [--plot]
    predprey field-grid --config cfg.json --out BASE [--bbox X0,Y0,X1,Y1] [--n N]
                        [--slice-z Z] [--plot]
    predprey plant      --config cfg.json --out BASE [--plot]
    predprey sweep      --config sweep.json --out DIR [--jobs N] [--plot]

One JSON config document is the single source of truth for a run; flat
flags override config fields. Outputs are deterministic: identical configs
produce byte-identical CSV and JSON. With ``--plot`` each command also
renders a PNG figure next to its data files.

Exit codes: 0 success, 2 config error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import sys
from pathlib import Path

from . import analysis, lyapunov, plant as plant_mod
from .config import (
    MODEL_NAMES,
    RunConfig,
    SCHEMA_VERSION,
    load_document,
    parse_config,
    params_to_dict,
)
from .errors import (
    ConfigError,
    DomainError,
    GuardViolation,
    NotCoexistence,
    PredPreyError,
    StepFailure,
)
from .integrators import integrate
from .models import (
    damped_pp_field,
    lv_field,
    oscillator_field,
    plant_field_z,
    virus_to_damped,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (GuardViolation, StepFailure, DomainError) as e:
        print(f"numeric failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except PredPreyError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERIC


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="predprey",
        description="Simulate and analyze the damped predator-prey model family.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="JSON config path, or - for stdin")
        p.add_argument("--out", default=None, help="output base path (no extension)")
        p.add_argument("--format", choices=("csv", "json"), default="csv",
                       help="data payload format (default csv)")
        p.add_argument("--seed", type=int, default=None,
                       help="seed for sampling utilities (unused by deterministic runs)")
        p.add_argument("--plot", action="store_true",
                       help="also render a PNG figure next to the outputs")

    p = sub.add_parser("simulate", help="integrate a model and write the trajectory")
    common(p)
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("analyze", help="equilibria, regime and peak-bound report")
    common(p)
    p.set_defaults(handler=cmd_analyze)

    p = sub.add_parser("field-grid", help="vector field samples on a grid")
    common(p)
    p.add_argument("--bbox", default=None, help="X0,Y0,X1,Y1 (overrides config)")
    p.add_argument("--n", type=int, default=None, help="grid points per side")
    p.add_argument("--slice-z", type=float, default=None,
                   help="fixed z for the 3D plant field")
    p.set_defaults(handler=cmd_field_grid)

    p = sub.add_parser("plant", help="plant growth run with stopping report")
    common(p)
    p.set_defaults(handler=cmd_plant)

    p = sub.add_parser("sweep", help="run a batch of independent configs")
    common(p)
    p.add_argument("--jobs", type=int, default=1, help="concurrent worker processes")
    p.set_defaults(handler=cmd_sweep)

    return parser


def _load(args) -> RunConfig:
    return parse_config(load_document(args.config))


def _out_base(args, cfg: RunConfig) -> Path:
    if args.out:
        return Path(args.out)
    return Path(cfg.name or args.command.replace("-", "_"))


def _2d_field(cfg: RunConfig):
    if cfg.model == "oscillator":
        return oscillator_field(cfg.params)
    if cfg.model == "lotka_volterra":
        return lv_field(cfg.params)
    if cfg.model == "damped_pp":
        return damped_pp_field(cfg.params)
    if cfg.model == "virus":
        return damped_pp_field(virus_to_damped(cfg.params))
    raise ConfigError(f"{cfg.model} is not a 2D model")


def _v_column(cfg: RunConfig):
    """Per-state scalar certifying the run: energy, first integral or V."""
    if cfg.model == "oscillator":
        return lambda s: analysis.oscillator_energy(cfg.params, s)
    if cfg.model == "lotka_volterra":
        return lambda s: analysis.lv_first_integral(cfg.params, s)
    p = cfg.params if cfg.model == "damped_pp" else virus_to_damped(cfg.params)
    spec = lyapunov.make_spec(p)
    return lambda s: lyapunov.value(spec, s)


def _write_csv(path: Path, header: list[str], rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_cell(v) for v in row) + "\n")


def _cell(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _write_json(path: Path, obj):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_simulate(args) -> int:
    cfg = _load(args)
    if cfg.init is None or cfg.t_end is None:
        raise ConfigError("simulate needs init and t_end")
    if cfg.model == "plant":
        return cmd_plant(args)
    base = _out_base(args, cfg)

    field = _2d_field(cfg)
    vfun = _v_column(cfg)
    traj = integrate(
        field, cfg.init, (cfg.t_start, cfg.t_end),
        config=cfg.integrator, sample_every=cfg.sample_every,
    )

    header = ["t", "x", "y", "V"]
    rows = [(t, s[0], s[1], vfun(s)) for t, s in zip(traj.times, traj.states)]
    summary = {
        "schema_version": SCHEMA_VERSION,
        "model": cfg.model,
        "params": params_to_dict(cfg.params),
        "init": list(cfg.init),
        "t_end": cfg.t_end,
        "final_time": traj.t_last,
        "final_state": list(traj.final_state),
        "terminated_by": traj.terminated_by,
    }
    if cfg.model in ("damped_pp", "virus"):
        p = cfg.params if cfg.model == "damped_pp" else virus_to_damped(cfg.params)
        spec = lyapunov.make_spec(p)
        mono = lyapunov.monotonicity_check(traj, spec, p)
        summary["lyapunov"] = {
            "regime": spec.regime,
            "monotone": mono.ok,
            "worst_increment": mono.worst_increment,
        }

    if args.format == "json":
        summary["trajectory"] = {"columns": header, "rows": [list(r) for r in rows]}
        _write_json(base.with_suffix(".json"), summary)
    else:
        _write_csv(base.with_suffix(".csv"), header, rows)
        _write_json(base.with_suffix(".json"), summary)
    if args.plot:
        from . import plotting

        plotting.plot_trajectory_2d(
            traj, base.with_suffix(".png"),
            v_values=[r[3] for r in rows], title=cfg.model,
        )
    return EXIT_OK


def cmd_analyze(args) -> int:
    cfg = _load(args)
    if cfg.model not in ("damped_pp", "virus"):
        raise ConfigError("analyze needs a damped_pp or virus model")
    base = _out_base(args, cfg)
    p = cfg.params if cfg.model == "damped_pp" else virus_to_damped(cfg.params)

    eq = analysis.equilibria(p)
    cls = analysis.classify(p)
    report = {
        "schema_version": SCHEMA_VERSION,
        "model": cfg.model,
        "params": params_to_dict(cfg.params),
        "equilibrium": {
            "boundary": list(eq.boundary),
            "interior": list(eq.interior),
            "a": eq.a,
            "interior_in_quadrant": eq.interior_in_quadrant,
        },
        "classification": {
            "R": cls.R,
            "regime": cls.regime,
            "attractor": list(cls.attractor),
        },
    }
    if cfg.model == "virus":
        report["derived"] = {"beta": p.beta}
    if cls.regime == analysis.COEXISTENCE:
        pb = lyapunov.peak_bound(p)
        report["peak_bound"] = {
            "y_bar": pb.y_bar,
            "C": pb.C,
            "tangency_point": list(pb.tangency_point),
            "equation_residual": pb.equation_residual,
            "limit_value": pb.limit_value,
        }

    _write_json(base.with_suffix(".json"), report)
    if args.plot:
        from . import plotting

        if "peak_bound" in report:
            report["peak_bound"]["_spec"] = lyapunov.make_spec(p)
        x_hi = 1.5 * max(p.delta / p.alpha, p.sigma / p.gamma)
        y_hi = 1.5 * max(
            report.get("peak_bound", {}).get("y_bar", 1.0), eq.interior[1], 1.0
        )
        plotting.plot_analysis(
            damped_pp_field(p), report, (1e-3, 0.0, x_hi, y_hi),
            base.with_suffix(".png"), title=f"{cfg.model}: {cls.regime}",
        )
        report.get("peak_bound", {}).pop("_spec", None)
    return EXIT_OK


def cmd_field_grid(args) -> int:
    cfg = _load(args)
    bbox = cfg.bbox
    if args.bbox:
        try:
            vals = [float(v) for v in args.bbox.split(",")]
        except ValueError as e:
            raise ConfigError(f"bad --bbox: {e}") from e
        if len(vals) != 4 or vals[2] <= vals[0] or vals[3] <= vals[1]:
            raise ConfigError("--bbox must be X0,Y0,X1,Y1 with X1>X0, Y1>Y0")
        bbox = tuple(vals)
    n = args.n if args.n is not None else cfg.n
    if bbox is None or n is None:
        raise ConfigError("field-grid needs bbox and n (flags or config)")
    if n < 2:
        raise ConfigError("n must be >= 2")
    base = _out_base(args, cfg)

    if cfg.model == "plant":
        slice_z = getattr(args, "slice_z", None)
        if slice_z is None:
            raise ConfigError("the plant field is 3D: pass --slice-z Z")
        if slice_z <= 0:
            raise ConfigError("--slice-z must be > 0")
        field3 = plant_field_z(cfg.params)

        def sample(x, y):
            dx, dy, _ = field3.eval((x, y, slice_z))
            return dx, dy
    else:
        field2 = _2d_field(cfg)

        def sample(x, y):
            return field2.eval((x, y))

    x0, y0, x1, y1 = bbox
    rows = []
    for i in range(n):
        y = y0 + (y1 - y0) * i / (n - 1)
        for j in range(n):
            x = x0 + (x1 - x0) * j / (n - 1)
            dx, dy = sample(x, y)
            rows.append((x, y, dx, dy))

    header = ["x", "y", "dx", "dy"]
    if args.format == "json":
        _write_json(base.with_suffix(".json"), {
            "schema_version": SCHEMA_VERSION,
            "model": cfg.model,
            "columns": header,
            "rows": [list(r) for r in rows],
        })
    else:
        _write_csv(base.with_suffix(".csv"), header, rows)
    if args.plot:
        from . import plotting

        plotting.plot_field_grid(rows, base.with_suffix(".png"), title=cfg.model)
    return EXIT_OK


def cmd_plant(args) -> int:
    cfg = _load(args)
    if cfg.model != "plant":
        raise ConfigError("plant command needs a plant model config")
    if cfg.init is None or cfg.t_end is None:
        raise ConfigError("plant needs init and t_end")
    base = _out_base(args, cfg)

    x0, y0, L0 = cfg.init
    if min(x0, y0, L0) <= 0:
        raise ConfigError("plant init must be positive (x0, y0, L0)")
    traj, report = plant_mod.simulate_plant(
        cfg.params, (x0, y0, L0), cfg.t_end,
        config=cfg.integrator, sample_every=cfg.sample_every,
    )

    cert = plant_mod.make_certificate(cfg.params)
    header = ["t", "x", "y", "z", "L", "Vm", "certificate"]
    rows = []
    for t, s in zip(traj.times, traj.states):
        rows.append((
            t, s[0], s[1], s[2], 1.0 / s[2],
            lyapunov.value(cert.spec, s),
            plant_mod.certificate_holds(cert, s),
        ))

    doc = {
        "schema_version": SCHEMA_VERSION,
        "model": "plant",
        "params": params_to_dict(cfg.params),
        "init": list(cfg.init),
        "t_end": cfg.t_end,
        "final_state": list(traj.final_state),
        "report": {
            "stopped": report.stopped,
            "t_star": report.t_star,
            "L_star": report.L_star,
            "t_certificate": report.t_certificate,
            "growth_spurts": [list(sp) for sp in report.growth_spurts],
        },
    }
    if args.format == "json":
        doc["trajectory"] = {"columns": header, "rows": [list(r) for r in rows]}
        _write_json(base.with_suffix(".json"), doc)
    else:
        _write_csv(base.with_suffix(".csv"), header, rows)
        _write_json(base.with_suffix(".json"), doc)
    if args.plot:
        from . import plotting

        plotting.plot_plant(
            traj, report, cfg.params.threshold.y_f, base.with_suffix(".png"),
            title="plant growth",
        )
    return EXIT_OK


def cmd_sweep(args) -> int:
    doc = load_document(args.config)
    unknown = set(doc) - {"schema_version", "runs", "name"}
    if unknown:
        raise ConfigError(f"unknown sweep keys: {sorted(unknown)}")
    if doc.get("schema_version", SCHEMA_VERSION) != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {doc.get('schema_version')!r}")
    runs = doc.get("runs")
    if not isinstance(runs, list) or not runs:
        raise ConfigError("sweep config needs a non-empty 'runs' list")

    out_dir = Path(args.out or "sweep_out")
    out_dir.mkdir(parents=True, exist_ok=True)

    items = []
    for i, run in enumerate(runs):
        if not isinstance(run, dict):
            raise ConfigError(f"runs[{i}] must be an object")
        run = dict(run)
        command = run.pop("command", "simulate")
        if command not in ("simulate", "analyze", "field-grid", "plant"):
            raise ConfigError(f"runs[{i}]: unsupported command {command!r}")
        name = run.get("name") or f"run{i:03d}"
        parse_config(run)  # validate everything up front, before any output
        items.append((command, run, str(out_dir / name), args.format, args.plot))

    if args.jobs and args.jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=args.jobs) as pool:
            codes = list(pool.map(_sweep_worker, items))
    else:
        codes = [_sweep_worker(item) for item in items]
    return max(codes) if codes else EXIT_OK


def _sweep_worker(item) -> int:
    """Run one sweep entry in an isolated argument namespace."""
    command, run_doc, out_base, fmt, plot = item
    import tempfile, os

    fd, path = tempfile.mkstemp(suffix=".json")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(run_doc, fh)
        argv = [command, "--config", path, "--out", out_base, "--format", fmt]
        if plot:
            argv.append("--plot")
        return main(argv)
    finally:
        os.unlink(path)


if __name__ == "__main__":
    sys.exit(main())
