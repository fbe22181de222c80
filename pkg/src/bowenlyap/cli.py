"""Batch runner: ``python -m bowenlyap <command> [--config cfg.json] [flags]``.

Exit codes: 0 success, 1 failed check inside ``reproduce``, 2 bad config,
3 empty Bowen sample.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from . import adapted, classical, invariant_sets, pointwise
from .errors import EmptyBowenSample, NotDifferentiable, NotHyperbolic
from .space import Chart, Point
from .systems import from_descriptor

COMMANDS = ("point-exponents", "set-exponents", "classify", "adapted-metric-check",
            "compare-classical", "reproduce")


class ConfigError(Exception):
    pass


PRESETS = {
    "thm2.5-toral": {
        "command": "point-exponents",
        "system": {"type": "toral", "matrix": [[2, 3], [3, 5]]},
        "metric": "adapted",
        "point": {"chart": "torus2", "coords": [0.3141592653589793, 0.2718281828459045]},
    },
    "thm2.7-hair-point": {
        "command": "point-exponents",
        "system": {"type": "torus_with_hair", "epsilon": 0.5},
        "point": {"chart": "hair", "coords": [0.0]},
    },
    "thm3.2-attractor-q": {
        "command": "classify",
        "system": {"type": "torus_with_hair", "epsilon": 0.5},
        "set": {"kind": "points", "points": [{"chart": "hair", "coords": [0.0]}]},
        "n_max": 8,
    },
    "thm3.2-repeller-torus": {
        "command": "classify",
        "system": {"type": "torus_with_hair", "epsilon": 0.5},
        "set": {"kind": "torus"},
        "n_max": 8,
    },
    "ns-fixed-points": {
        "command": "classify-pair",
        "system": {"type": "north_south", "mu": 2.0},
        "n_max": 8,
    },
    "rotation-control": {
        "command": "point-exponents",
        "system": {"type": "rotation"},
        "point": {"chart": "circle", "coords": [1.0]},
    },
}


# ----------------------------------------------------------------------
# config handling


def _parse_deltas(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"delta_list: cannot parse {text!r}")


def load_config(args) -> dict:
    cfg = {}
    if args.config:
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config: malformed JSON ({exc})")
        except OSError as exc:
            raise ConfigError(f"config: cannot read {args.config} ({exc})")
        if not isinstance(cfg, dict):
            raise ConfigError("config: top level must be a JSON object")
    flags = {
        "out": args.out, "csv": args.csv, "plot_dir": args.plot_dir, "seed": args.seed,
        "n_max": args.n_max, "candidates": args.candidates, "metric": args.metric,
        "delta_list": _parse_deltas(args.delta_list) if args.delta_list else None,
    }
    cfg.update({k: v for k, v in flags.items() if v is not None})
    return cfg


def _validated(cfg):
    out = dict(cfg)
    out.setdefault("delta_list", list(pointwise.DEFAULT_DELTAS))
    out.setdefault("n_max", pointwise.DEFAULT_N_MAX)
    out.setdefault("candidates", pointwise.DEFAULT_CANDIDATES)
    out.setdefault("seed", pointwise.DEFAULT_SEED)
    out.setdefault("metric", "ambient")
    dl = out["delta_list"]
    if (not isinstance(dl, list) or not dl or not all(isinstance(d, (int, float)) and d > 0 for d in dl)
            or any(b >= a for a, b in zip(dl, dl[1:]))):
        raise ConfigError("delta_list: must be a strictly decreasing list of positive numbers")
    if not isinstance(out["n_max"], int) or out["n_max"] < 4:
        raise ConfigError("n_max: must be an integer >= 4")
    if not isinstance(out["candidates"], int) or out["candidates"] < 64:
        raise ConfigError("candidates: must be an integer >= 64")
    if not isinstance(out["seed"], int):
        raise ConfigError("seed: must be an integer")
    if out["metric"] not in ("ambient", "adapted"):
        raise ConfigError("metric: must be 'ambient' or 'adapted'")
    return out


def _system(cfg):
    desc = cfg.get("system")
    if not isinstance(desc, dict):
        raise ConfigError("system: missing or not an object")
    try:
        return from_descriptor(desc, "eigen" if cfg["metric"] == "adapted" else None)
    except KeyError as exc:
        raise ConfigError(f"system.{exc.args[0]}")
    except (NotHyperbolic, ValueError, TypeError) as exc:
        raise ConfigError(f"system: {exc}")


def _point(cfg, system):
    obj = cfg.get("point")
    if not isinstance(obj, dict):
        raise ConfigError("point: missing or not an object")
    try:
        p = Point.from_json(obj)
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"point: {exc}")
    if not system.contains(p):
        raise ConfigError(f"point: chart {p.chart.value} does not belong to {system.name}")
    return p


def _set(cfg, system):
    obj = cfg.get("set")
    if not isinstance(obj, dict):
        raise ConfigError("set: missing or not an object")
    kind = obj.get("kind")
    try:
        if kind == "torus":
            return invariant_sets.InvariantSet.torus_in(system)
        if kind == "points":
            pts = [Point.from_json(p) for p in obj.get("points", [])]
            return invariant_sets.InvariantSet.finite(system, pts)
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"set: {exc}")
    raise ConfigError(f"set.kind: unknown set kind {kind!r}")


# ----------------------------------------------------------------------
# output


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n"


def _write(path, text):
    if path is None:
        sys.stdout.write(text)
        return
    d = os.path.dirname(path)
    if d:
        os.makedirs(d, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)


def _write_plots(plot_dir, series):
    if not plot_dir:
        return
    os.makedirs(plot_dir, exist_ok=True)
    for delta, rows in series:
        with open(os.path.join(plot_dir, f"delta_{delta!r}.dat"), "w") as fh:
            for n, v in rows:
                fh.write(f"{n} {v!r}\n")


def _emit_point_report(cfg, report):
    _write(cfg.get("out"), _dump(report.to_json()))
    if cfg.get("csv"):
        _write(cfg["csv"], report.csv_text())
    _write_plots(cfg.get("plot_dir"), [(run.delta, [(r.n, r.logA_over_n) for r in run.rows])
                                      for run in report.runs])


def _emit_set_report(cfg, report, payload=None):
    _write(cfg.get("out"), _dump(payload if payload is not None else report.to_json()))
    if cfg.get("csv"):
        _write(cfg["csv"], report.csv_text())
    _write_plots(cfg.get("plot_dir"), [(run.delta, [(r.n, math.log(r.A_hat) / r.n) for r in run.rows])
                                      for run in report.runs])


# ----------------------------------------------------------------------
# commands


def _run_point(cfg):
    system = _system(cfg)
    x = _point(cfg, system)
    return pointwise.point_exponents(system, x, cfg["delta_list"], cfg["n_max"], cfg["candidates"], cfg["seed"])


def _run_set(cfg):
    system = _system(cfg)
    K = _set(cfg, system)
    rep = invariant_sets.set_exponents(system, K, cfg["delta_list"], cfg["n_max"], cfg["candidates"], cfg["seed"])
    return system, K, rep


def cmd_point_exponents(cfg):
    _emit_point_report(cfg, _run_point(cfg))
    return 0


def cmd_set_exponents(cfg):
    _, _, rep = _run_set(cfg)
    _emit_set_report(cfg, rep)
    return 0


def cmd_classify(cfg):
    system, K, rep = _run_set(cfg)
    c = invariant_sets.classify(system, K, rep, cfg.get("margin", 0.1), seed=cfg["seed"])
    _emit_set_report(cfg, rep, c.to_json())
    return 0


def cmd_adapted_metric_check(cfg):
    system = _system(cfg)
    # the ambient toral metric is tested against the same k as the eigen metric
    k = cfg.get("k") or system.adapted_k or getattr(system, "rate", None)
    if k is None:
        raise ConfigError(f"k: required for {system.name}")
    n_pairs = cfg.get("n_pairs", 10000)
    if not isinstance(n_pairs, int) or n_pairs < 1:
        raise ConfigError("n_pairs: must be a positive integer")
    try:
        rep = adapted.verify_hyperbolic_inequality(system, n_pairs, cfg["seed"], k, cfg.get("epsilon0"))
    except ValueError as exc:
        raise ConfigError(f"k: {exc}")
    _write(cfg.get("out"), _dump(rep.to_json()))
    return 0


def cmd_compare_classical(cfg):
    report = _run_point(cfg)
    system = _system(cfg)
    try:
        chi = classical.jacobian_exponents(system, _point(cfg, system), cfg.get("n", 16), seed=cfg["seed"])
    except NotDifferentiable as exc:
        raise ConfigError(f"system: {exc}")
    cmp_ = classical.compare(report, chi, cfg.get("tol", 0.1))
    _write(cfg.get("out"), _dump({"classical": chi.to_json(), "comparison": cmp_.to_json(),
                                  "Lambda_plus": report.Lambda_plus, "lambda_plus": report.lambda_plus}))
    if cfg.get("csv"):
        _write(cfg["csv"], report.csv_text())
    return 0


LOG_LU = math.log((7 + 3 * math.sqrt(5)) / 2)


def _reproduce(name, cfg):
    preset = PRESETS[name]
    cmd = preset["command"]
    if cmd == "point-exponents":
        rep = _run_point(cfg)
        _emit_point_report(cfg, rep)
        vals = (rep.Lambda_plus, rep.lambda_plus, rep.Lambda_minus, rep.lambda_minus)
        if name == "thm2.5-toral":
            return rep.Lambda_plus >= LOG_LU - 0.02 and rep.lambda_plus <= -LOG_LU + 0.02
        if name == "thm2.7-hair-point":
            return rep.Lambda_plus < 0
        return all(abs(v) <= 1e-9 for v in vals)
    if cmd == "classify":
        system, K, rep = _run_set(cfg)
        c = invariant_sets.classify(system, K, rep, seed=cfg["seed"])
        _emit_set_report(cfg, rep, c.to_json())
        want = "Attractor" if name == "thm3.2-attractor-q" else "Repeller"
        return c.label.value == want and c.basin_fraction >= 0.99
    # north-south: both fixed points
    system = _system(cfg)
    out, ok = {}, True
    rows = []
    for tag, theta, want in (("pi", math.pi, "Attractor"), ("zero", 0.0, "Repeller")):
        K = invariant_sets.InvariantSet.finite(system, [Point(Chart.CIRCLE, (theta,))])
        rep = invariant_sets.set_exponents(system, K, cfg["delta_list"], cfg["n_max"], cfg["candidates"], cfg["seed"])
        c = invariant_sets.classify(system, K, rep, seed=cfg["seed"])
        out[tag] = c.to_json()
        if cfg.get("plot_dir"):
            _write_plots(os.path.join(cfg["plot_dir"], tag),
                         [(run.delta, [(r.n, math.log(r.A_hat) / r.n) for r in run.rows]) for run in rep.runs])
        rows.append(rep.csv_text() if not rows else rep.csv_text().split("\n", 1)[1])
        lam = rep.Lambda_plus if want == "Attractor" else rep.Lambda_minus
        ok &= c.label.value == want and c.basin_fraction >= 0.99 and abs(abs(lam) - math.log(2)) <= 0.02
    _write(cfg.get("out"), _dump(out))
    if cfg.get("csv"):
        _write(cfg["csv"], "".join(rows))
    return ok


def cmd_reproduce(cfg, name):
    if name not in PRESETS:
        raise ConfigError(f"preset: unknown preset {name!r} (choose from {', '.join(PRESETS)})")
    ok = _reproduce(name, cfg)
    sys.stderr.write(f"{name}: {'PASS' if ok else 'FAIL'}\n")
    return 0 if ok else 1


def build_parser():
    parser = argparse.ArgumentParser(prog="bowenlyap", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("preset", nargs="?", help="preset name for 'reproduce'")
    parser.add_argument("--config")
    parser.add_argument("--out")
    parser.add_argument("--csv")
    parser.add_argument("--plot-dir", dest="plot_dir")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--delta-list", dest="delta_list")
    parser.add_argument("--n-max", dest="n_max", type=int)
    parser.add_argument("--candidates", type=int)
    parser.add_argument("--metric", choices=("ambient", "adapted"))
    return parser


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        if args.command == "reproduce":
            if not args.preset:
                raise ConfigError("preset: 'reproduce' needs a preset name")
            base = {k: v for k, v in PRESETS.get(args.preset, {}).items() if k != "command"}
            base.update(cfg)
            return cmd_reproduce(_validated(base), args.preset)
        cfg = _validated(cfg)
        handler = {
            "point-exponents": cmd_point_exponents,
            "set-exponents": cmd_set_exponents,
            "classify": cmd_classify,
            "adapted-metric-check": cmd_adapted_metric_check,
            "compare-classical": cmd_compare_classical,
        }[args.command]
        return handler(cfg)
    except ConfigError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return 2
    except EmptyBowenSample as exc:
        sys.stderr.write(f"empty Bowen sample: {exc}\n")
        return 3


def main():
    sys.exit(run())
