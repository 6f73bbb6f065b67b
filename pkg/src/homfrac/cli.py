"""Command-line runner: ``homfrac eval|norm|verify|sweep|list-suites|validate-config``.

Exit codes: 0 pass, 2 validation error, 3 verification failure, 4 inconclusive.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

from . import __version__
from .config import ConfigError, ExperimentConfig, config_hash, load_config, with_overrides
from .funcspace import export_slice_csv, sample, save_grid_function
from .inequalities.checks import Workbench
from .inequalities.report import CSV_HEADER, FAIL, INCONCLUSIVE, PASS
from .inequalities.suites import SUITES, run_suite, suite_verdict
from .norms import NormSpec, evaluate_norm
from .operators import (
    OperatorParams,
    frac_integral_field,
    frac_maximal_field,
    hl_maximal_field,
    power_maximal_field,
    riesz_potential_field,
)

EXIT = {PASS: 0, FAIL: 3, INCONCLUSIVE: 4}
EXIT_VALIDATION = 2
OPERATORS = ("riesz", "frac_integral", "frac_maximal", "hl_maximal", "power_maximal")


def _error(kind, message, **extra):
    rec = {"error": kind, "message": str(message)}
    rec.update(extra)
    print(json.dumps(rec, sort_keys=True), file=sys.stderr)


def _config(args):
    cfg = load_config(args.config) if args.config else load_config()
    cfg = with_overrides(cfg, getattr(args, "seed", None), getattr(args, "resolution", None))
    cfg.validate()
    return cfg


def _out_dir(args, cfg):
    out = Path(args.out or cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write(path, text):
    path.write_text(text, newline="") if isinstance(text, str) else path.write_bytes(text)
    return path


def _dumps(obj):
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def workbench(cfg):
    box = cfg.make_box()
    return Workbench(cfg.resolution, cfg.dimension, cfg.box.half_width, cfg.seed,
                     cfg.operator.stride, cfg.make_family(box), cfg.family.radii_count,
                     cfg.operator_kw())


# ---------------------------------------------------------------- eval / norm


def run_eval(cfg, operator, out):
    """Write the operator field of the configured function plus centre slices."""
    box = cfg.make_box()
    f = sample(cfg.function.expression, box, **cfg.function.params)
    alpha = cfg.operator.alpha
    stride = cfg.operator.stride
    kw = cfg.operator_kw()
    if operator in ("riesz", "frac_integral", "frac_maximal") and alpha is None:
        raise ConfigError(f"operator {operator} needs operator.alpha")
    if operator == "riesz":
        F = riesz_potential_field(f, alpha, stride, **kw)
    elif operator == "frac_integral":
        F = frac_integral_field(f, OperatorParams(alpha, cfg.make_kernel(), **kw), stride)
    elif operator == "frac_maximal":
        F = frac_maximal_field(f, OperatorParams(alpha, cfg.make_kernel(), **kw), stride)
    elif operator == "hl_maximal":
        F = hl_maximal_field(f, stride, cfg.operator.radii_count)
    else:
        t = cfg.exponents.s if cfg.exponents.s and math.isfinite(cfg.exponents.s) else 2.0
        F = power_maximal_field(f, t, stride, cfg.operator.radii_count)
    stem = out / operator
    save_grid_function(F, stem)
    paths = [stem.with_suffix(".json"), stem.with_suffix(".bin")]
    for axis in range(F.n):
        paths.append(export_slice_csv(F, axis, out / f"{operator}_slice_x{axis}.csv"))
    return F, paths


def run_norm(cfg):
    box = cfg.make_box()
    f = sample(cfg.function.expression, box, **cfg.function.params)
    ns = cfg.norm
    needs_family = ns.kind in ("morrey", "weak_morrey", "morrey_llogl", "bmo")
    spec = NormSpec(ns.kind, ns.p, ns.kappa, cfg.make_family(box, 1) if needs_family else None,
                    cfg.make_ball())
    return f, evaluate_norm(f, spec)


# ---------------------------------------------------------------- verify / sweep


def run_verify(cfg, suites):
    """Run suites; returns ``(csv rows, summary dict, verdict)``."""
    wb = workbench(cfg)
    kernel = cfg.make_kernel() if cfg.kernel.name != "const" or cfg.kernel.params else None
    ov = cfg.exponent_overrides()
    rows, summary, verdicts = [], {}, []
    for name in suites:
        reports = run_suite(name, wb, ov, kernel)
        v = suite_verdict(reports)
        verdicts.append(v)
        for r in reports:
            rows.extend(r.rows())
        summary[name] = {"verdict": v, "reports": [r.to_dict() for r in reports]}
    overall = FAIL if FAIL in verdicts else (INCONCLUSIVE if INCONCLUSIVE in verdicts else PASS)
    return rows, summary, overall


def _provenance(cfg, suites):
    return {"config": cfg.to_dict(), "suites": list(suites), "version": __version__,
            "input_sha256": config_hash(cfg, {"suites": list(suites), "version": __version__})}


def _grid(cfg, spec):
    grid = dict(cfg.sweep)
    for item in spec or []:
        key, _, vals = item.partition("=")
        if key not in ("alpha", "p", "kappa", "s", "resolution") or not vals:
            raise ConfigError(f"bad --grid entry {item!r}; use name=v1,v2 with name in "
                              "alpha, p, kappa, s, resolution")
        conv = int if key == "resolution" else (lambda x: math.inf if x == "inf" else float(x))
        grid[key] = [conv(x) for x in vals.split(",")]
    return grid


def _point_config(cfg, point):
    op, ex = cfg.operator, cfg.exponents
    for k, v in point.items():
        if k == "resolution":
            cfg = replace(cfg, resolution=int(v))
        elif k == "alpha":
            op = replace(op, alpha=float(v))
        else:
            ex = replace(ex, **{k: float(v)})
    return replace(cfg, operator=op, exponents=ex)


def _sweep_point(args):
    cfg, suites, point = args
    try:
        cfg.validate()
        rows, summary, verdict = run_verify(cfg, suites)
        return point, rows, summary, verdict, None
    except (ConfigError, ValueError) as e:
        return point, [], {}, INCONCLUSIVE, str(e)


def run_sweep(cfg, suites, grid, jobs=1):
    keys = sorted(grid)
    points = [dict(zip(keys, vals)) for vals in itertools.product(*(grid[k] for k in keys))]
    tasks = [(_point_config(cfg, p), suites, p) for p in points]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as ex:
            results = list(ex.map(_sweep_point, tasks))
    else:
        results = [_sweep_point(t) for t in tasks]
    header = keys + CSV_HEADER
    rows, errors, verdicts, plots = [], [], [], {}
    for point, prow, summary, verdict, err in results:
        pv = [repr(point[k]) for k in keys]
        verdicts.append(verdict)
        if err:
            errors.append({"point": point, "error": err})
            rows.append(pv + [",".join(suites), "error", "", "", "", "", "", "", "", "", err])
            continue
        rows.extend(pv + r for r in prow)
        for name, s in summary.items():
            for rep in s["reports"]:
                for k in keys:
                    key = (name, rep["check_id"], rep["kernel"], k)
                    plots.setdefault(key, []).append((point[k], rep["fitted_constant"]))
    overall = FAIL if FAIL in verdicts else (INCONCLUSIVE if INCONCLUSIVE in verdicts else PASS)
    return header, rows, plots, errors, overall


# ---------------------------------------------------------------- argparse


def _parser():
    p = argparse.ArgumentParser(prog="homfrac", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"homfrac {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML experiment configuration")
    common.add_argument("--out", help="output directory (default: config 'output')")
    common.add_argument("--seed", type=int, help="zoo seed")
    common.add_argument("--resolution", type=int, help="cells per axis")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eval", parents=[common], help="evaluate an operator field")
    e.add_argument("--operator", choices=OPERATORS, default="riesz")
    sub.add_parser("norm", parents=[common], help="evaluate a norm of the configured function")
    v = sub.add_parser("verify", parents=[common], help="run verification suites")
    v.add_argument("suite", nargs="*", choices=[*SUITES, "all"], metavar="suite",
                   help=f"one or more of: {', '.join(SUITES)}, all")
    s = sub.add_parser("sweep", parents=[common], help="run suites over a parameter grid")
    s.add_argument("suite", nargs="*", choices=[*SUITES, "all"], metavar="suite")
    s.add_argument("--grid", action="append", metavar="NAME=V1,V2",
                   help="grid axis; repeatable; merged over the config 'sweep' section")
    sub.add_parser("list-suites", help="print the suite names")
    sub.add_parser("validate-config", parents=[common], help="check a configuration")
    return p


def _suites(args, cfg):
    names = list(args.suite) or list(cfg.suites)
    if not names:
        raise ConfigError("no suite given on the command line or in the config")
    return list(SUITES) if "all" in names else names


def main(argv=None):
    args = _parser().parse_args(argv)
    if args.command == "list-suites":
        for name in SUITES:
            print(name)
        return 0
    try:
        cfg = _config(args)
        if args.command == "validate-config":
            print(json.dumps({"valid": True, "input_sha256": config_hash(cfg)}, sort_keys=True))
            return 0
        out = _out_dir(args, cfg)
        if args.command == "eval":
            F, paths = run_eval(cfg, args.operator, out)
            for path in paths:
                print(path)
            return 0
        if args.command == "norm":
            f, value = run_norm(cfg)
            ns = cfg.norm
            text = _csv_text(["function", "kind", "p", "kappa", "value"],
                             [[f.label, ns.kind, repr(ns.p),
                               "" if ns.kappa is None else repr(ns.kappa), repr(value)]])
            _write(out / "norm.csv", text)
            sys.stdout.write(text)
            return 0
        suites = _suites(args, cfg)
        if args.command == "verify":
            rows, summary, verdict = run_verify(cfg, suites)
            stem = "_".join(suites) if len(suites) <= 3 else "all"
            _write(out / f"{stem}.csv", _csv_text(CSV_HEADER, rows))
            doc = {"provenance": _provenance(cfg, suites), "verdict": verdict, "suites": summary}
            _write(out / f"{stem}.json", _dumps(doc))
            for name, s in summary.items():
                print(f"{name}: {s['verdict']}")
            return EXIT[verdict]
        header, rows, plots, errors, verdict = run_sweep(cfg, suites, _grid(cfg, args.grid),
                                                         max(1, args.jobs))
        _write(out / "sweep.csv", _csv_text(header, rows))
        for (name, cid, kern, k), pts in sorted(plots.items()):
            text = _csv_text([k, "fitted_constant"],
                             [[repr(x), repr(y) if isinstance(y, float) else str(y)]
                              for x, y in sorted(pts, key=lambda t: t[0])])
            _write(out / f"plot_{name}_{cid}_{kern}_{k}.csv", text)
        doc = {"provenance": _provenance(cfg, suites), "verdict": verdict, "errors": errors,
               "grid": {k: v for k, v in _grid(cfg, args.grid).items()}}
        _write(out / "sweep.json", _dumps(_jsonable(doc)))
        print(f"sweep: {verdict} ({len(rows)} rows)")
        return EXIT[verdict]
    except ConfigError as e:
        _error("validation", e)
        return EXIT_VALIDATION
    except OSError as e:
        _error("io", e.strerror or e, path=getattr(e, "filename", None))
        return EXIT_VALIDATION


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


if __name__ == "__main__":
    sys.exit(main())
