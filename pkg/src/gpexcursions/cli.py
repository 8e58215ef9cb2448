"""Command-line entry point: ``gpexcursions <command> [options]``.

Every command reads an optional ``--config`` file, applies flag overrides
(any config key, written ``--total-time`` or ``--total_time``), writes CSV
and JSON under ``--out`` and exits with status 0 only if all requested
validations pass.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import os
import sys

import numpy as np

from . import experiments
from .config import RunConfig, load_config
from .errors import LevelCrossingError
from .gp import synthesize_path, write_path_csv
from .theory import write_theory_curve_csv

__all__ = ["main", "build_parser", "write_json"]

_RESERVED = {"seed", "out"}


def _json_default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def write_json(obj: dict, filename) -> None:
    """Deterministic JSON: sorted keys, fixed indent, trailing newline."""
    clean = {k: v for k, v in obj.items() if not k.startswith("_")}
    with open(filename, "w") as fh:
        json.dump(clean, fh, sort_keys=True, indent=2, default=_json_default)
        fh.write("\n")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key = value config file (sections optional)")
    p.add_argument("--seed", type=int, help="master seed (unsigned 64-bit)")
    p.add_argument("--out", help="output directory")
    g = p.add_argument_group("config overrides")
    for f in dataclasses.fields(RunConfig):
        if f.name in _RESERVED:
            continue
        g.add_argument(f"--{f.name.replace('_', '-')}", f"--{f.name}", dest=f.name,
                       metavar="VALUE", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gpexcursions",
        description="Simulate stationary Gaussian paths and check level-crossing laws.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synthesize", help="write one t,x CSV per replicate and ACF kind")
    p.add_argument("--kinds", default=None,
                   help="comma list of ACF kinds (default: the config's kind)")
    _add_common(p)

    p = sub.add_parser("validate-single", help="single-level law against simulation")
    p.add_argument("--which", required=True, choices=sorted(experiments.SINGLE_LEVEL))
    _add_common(p)

    p = sub.add_parser("validate-successive", help="two-level statistics against simulation")
    _add_common(p)

    p = sub.add_parser("window-prob", help="windowed successive-excursion probability")
    _add_common(p)
    return parser


def _config(args) -> RunConfig:
    overrides = {f.name: getattr(args, f.name, None) for f in dataclasses.fields(RunConfig)}
    cfg = load_config(args.config, overrides)
    os.makedirs(cfg.out, exist_ok=True)
    if not os.access(cfg.out, os.W_OK):
        raise OSError(f"output directory {cfg.out!r} is not writable")
    return cfg


def _print_checks(report: dict) -> None:
    for check in report["_objects"]:
        print(check.line())


def _write_grids(report: dict, prefix: str, out: str) -> None:
    laws = report.get("_laws", {})
    ks = [c for c in report["_objects"] if hasattr(c, "write_grid_csv")]
    for i, check in enumerate(ks):
        check.write_grid_csv(os.path.join(out, f"{prefix}_ecdf_{i}.csv"))
        law = laws.get(check.label)
        if law is not None and len(check.theory_grid):
            write_theory_curve_csv(law, check.theory_grid[:, 0],
                                   os.path.join(out, f"{prefix}_theory_{i}.csv"))


def cmd_synthesize(cfg: RunConfig, kinds=None) -> int:
    kinds = [k.strip() for k in (kinds or cfg.kind).split(",") if k.strip()]
    n = int(round(cfg.total_time / cfg.step)) + 1
    files = []
    for kind in kinds:
        model = cfg.replace(kind=kind).model()
        for r in range(cfg.replicates):
            path = synthesize_path(model, cfg.step, n, cfg.seed, r * experiments.STREAM_STRIDE)
            name = f"path_{kind}_r{r}.csv"
            write_path_csv(path, os.path.join(cfg.out, name))
            files.append({"file": name, "kind": kind, "model": path.model_id, "replicate": r,
                          "stream": [cfg.seed, r * experiments.STREAM_STRIDE],
                          "method": path.method, "clipped_mass": path.clipped_mass, "n": n})
            print(f"wrote {name} ({path.method}, n={n})")
    write_json({"schema_version": experiments.SCHEMA_VERSION, "command": "synthesize",
                "config": cfg.as_dict(), "master_seed": cfg.seed, "files": files},
               os.path.join(cfg.out, "manifest.json"))
    return 0


def cmd_validate_single(cfg: RunConfig, which: str) -> int:
    report = experiments.SINGLE_LEVEL[which](cfg)
    _print_checks(report)
    write_json(report, os.path.join(cfg.out, f"{which}_report.json"))
    _write_grids(report, which, cfg.out)
    return 0 if report["passed"] else 1


def cmd_validate_successive(cfg: RunConfig) -> int:
    report = experiments.run_successive(cfg)
    _print_checks(report)
    write_json(report, os.path.join(cfg.out, "successive_report.json"))
    _write_grids(report, "successive_t2", cfg.out)
    cols = ["gamma1", "gamma2", "closed_form", "simulation", "oracle", "oracle_se",
            "n_excursions"]
    with open(os.path.join(cfg.out, "successive_curve.csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for row in report["curve"]:
            w.writerow(["" if row[c] is None else repr(row[c]) for c in cols])
    return 0 if report["passed"] else 1


def cmd_window_prob(cfg: RunConfig) -> int:
    report = experiments.run_window_prob(cfg)
    out, d = report["outputs"], report["derived"]
    tau2s = "none" if d["tau2_star"] is None else f"{d['tau2_star']:.6g}"
    print(f"case {out['case']}: P = {out['window_probability']:.8g} "
          f"(oracle {report['oracle']['estimates']['window_probability']:.8g} "
          f"+/- {report['oracle']['std_errors']['window_probability']:.2g})")
    print(f"V = {d['V']:.6g}  tau1* = {d['tau1_star']:.6g}  tau2* = {tau2s}  "
          f"expected time in window = {out['expected_total_time']:.6g}")
    _print_checks(report)
    write_json(report, os.path.join(cfg.out, "window_prob.json"))
    return 0 if report["passed"] else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _config(args)
        if args.command == "synthesize":
            return cmd_synthesize(cfg, args.kinds)
        if args.command == "validate-single":
            return cmd_validate_single(cfg, args.which)
        if args.command == "validate-successive":
            return cmd_validate_successive(cfg)
        return cmd_window_prob(cfg)
    except (LevelCrossingError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
