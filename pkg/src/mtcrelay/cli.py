"""Command-line entry point: ``mtcrelay <subcommand> [options]``."""

from __future__ import annotations

import argparse
import math
import sys

import yaml

from . import analytic
from .config import ConfigError, parse_config
from .geometry import assign_nearest, write_snapshot_csv
from .lbra import Policy, regroup
from .montecarlo import DegenerateExperimentError, compare_policies, run_experiment, sample_snapshot, sweep
from .output import emit_csv, emit_plot

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DEGENERATE = 3


def build_parser():
    parser = argparse.ArgumentParser(prog="mtcrelay", description=__doc__)
    sub = parser.add_subparsers(dest="mode", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML configuration file")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config entry, e.g. deployment.window=500 (repeatable)")
    common.add_argument("--policy", choices=["npra", "lbra"])
    common.add_argument("--trials", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--workers", type=int)
    common.add_argument("--axis", choices=["lambda_d", "lambda_g"])
    common.add_argument("--values", help="comma-separated sweep values")
    common.add_argument("--out", help="output file")
    common.add_argument("--plot", help="SVG chart path")
    common.add_argument("--log-y", action="store_true", default=None)
    common.add_argument("--metric", choices=["capacity", "outage"])

    sub.add_parser("simulate", parents=[common], help="Monte Carlo estimate at one point")
    sub.add_parser("analytic", parents=[common], help="closed-form pipeline at a point or over --values")
    sub.add_parser("sweep", parents=[common], help="Monte Carlo sweep, both policies")
    sub.add_parser("compare", parents=[common], help="LBRA vs NPRA in dB, simulated and analytic")
    p = sub.add_parser("dump", parents=[common], help="write one trial's snapshot as kind,x,y CSV")
    p.add_argument("--trial", type=int, default=0)
    p = sub.add_parser("explain", parents=[common], help="write one trial's LBRA transfer plan as CSV")
    p.add_argument("--trial", type=int, default=0)
    return parser


def _overrides(args):
    out = list(args.set)
    flag_map = {
        "policy": "simulation.policy", "trials": "simulation.trials", "seed": "deployment.seed",
        "workers": "simulation.workers", "axis": "sweep.axis", "out": "output.csv",
        "plot": "output.plot", "log_y": "output.log_y", "metric": "output.metric",
    }
    for attr, key in flag_map.items():
        v = getattr(args, attr, None)
        if v is not None:
            out.append(f"{key}={v}")
    if args.values is not None:
        out.append(f"sweep.values=[{args.values}]")
    return out


def _print_rows(rows, out=None):
    out = out or sys.stdout
    out.write(f"{'policy':>6} {'axis':>9} {'value':>11} {'epsilon':>10} {'ci95':>9} {'capacity':>11}\n")
    for r in rows:
        out.write(f"{r.policy:>6} {r.axis:>9} {r.value:>11.4g} {r.epsilon_hat:>10.5f} "
                  f"{r.epsilon_ci:>9.5f} {r.capacity_hat:>11.4e}\n")


def _metric(cfg, default):
    m = cfg.raw["output"]["metric"]
    return default if m == "auto" else m


def _write(cfg, rows, default_metric="capacity"):
    o = cfg.raw["output"]
    if o["csv"]:
        emit_csv(rows, o["csv"], cfg.experiment_yaml())
    if o["plot"]:
        emit_plot(rows, o["plot"], metric=_metric(cfg, default_metric), log_y=bool(o["log_y"]))


def _analytic_point(cfg):
    d = cfg.deployment
    return analytic.AnalyticPoint(
        radio=cfg.radio, plan=cfg.plan, lambda_d=d.lambda_d, lambda_g=d.lambda_g,
        window=d.window, samples=cfg.samples, seed=d.base_seed,
    )


def cmd_simulate(cfg):
    row = run_experiment(cfg.experiment(), workers=cfg.workers)
    _print_rows([row])
    _write(cfg, [row])


def cmd_sweep(cfg):
    if not cfg.values:
        raise ConfigError("sweep.values: empty; pass --values")
    rows = sweep(cfg.axis, cfg.values, cfg.experiment(), workers=cfg.workers)
    _print_rows(rows)
    _write(cfg, rows)


def cmd_analytic(cfg):
    point = _analytic_point(cfg)
    if cfg.values:
        rows = analytic.analytic_sweep(cfg.axis, cfg.values, point)
    else:
        rows = analytic.analytic_sweep("lambda_d", [point.lambda_d], point)
    _print_rows(rows)
    _write(cfg, rows)


def _db(x):
    return 10.0 * math.log10(x) if x > 0 and math.isfinite(x) else float("nan")


def compare_report(cfg):
    """Simulated (paired) and analytic LBRA-vs-NPRA comparison as a dict."""
    cmp_ = compare_policies(cfg.experiment(), workers=cfg.workers)
    point = _analytic_point(cfg)
    an = {p: analytic.outage(point, p) for p in (Policy.NPRA, Policy.LBRA)}
    n, l = cmp_.npra, cmp_.lbra
    return {
        "convention": "gain_db = 10*log10(C_LBRA/C_NPRA); outage_gain_db = 10*log10(eps_NPRA/eps_LBRA)",
        "simulation": {
            "npra": {"epsilon": n.epsilon_hat, "epsilon_ci": n.epsilon_ci, "capacity": n.capacity_hat},
            "lbra": {"epsilon": l.epsilon_hat, "epsilon_ci": l.epsilon_ci, "capacity": l.capacity_hat},
            "capacity_ratio": l.capacity_hat / n.capacity_hat,
            "capacity_gain_db": _db(l.capacity_hat / n.capacity_hat),
            "outage_ratio": n.epsilon_hat / l.epsilon_hat if l.epsilon_hat > 0 else float("nan"),
            "outage_gain_db": _db(n.epsilon_hat / l.epsilon_hat) if l.epsilon_hat > 0 else float("nan"),
            "paired_outage_diff": cmp_.outage_diff,
            "paired_outage_diff_ci95": cmp_.outage_diff_ci,
            "verdict": cmp_.verdict,
        },
        "analytic": {
            "npra": {"epsilon": an[Policy.NPRA].epsilon, "capacity": an[Policy.NPRA].capacity},
            "lbra": {"epsilon": an[Policy.LBRA].epsilon, "capacity": an[Policy.LBRA].capacity},
            "capacity_gain_db": _db(an[Policy.LBRA].capacity / an[Policy.NPRA].capacity),
            "outage_gain_db": _db(an[Policy.NPRA].epsilon / an[Policy.LBRA].epsilon)
            if an[Policy.LBRA].epsilon > 0 else float("nan"),
        },
        "config": yaml.safe_load(cfg.experiment_yaml()),
    }


def cmd_compare(cfg):
    rep = compare_report(cfg)
    s, a = rep["simulation"], rep["analytic"]
    print(rep["convention"])
    print(f"simulation: C_npra={s['npra']['capacity']:.4e} C_lbra={s['lbra']['capacity']:.4e} "
          f"gain={s['capacity_gain_db']:+.3f} dB  outage gain={s['outage_gain_db']:+.3f} dB  "
          f"paired d_eps={s['paired_outage_diff']:+.4f}+-{s['paired_outage_diff_ci95']:.4f} -> {s['verdict']}")
    print(f"analytic:   C_npra={a['npra']['capacity']:.4e} C_lbra={a['lbra']['capacity']:.4e} "
          f"gain={a['capacity_gain_db']:+.3f} dB  outage gain={a['outage_gain_db']:+.3f} dB")
    out = cfg.raw["output"]["csv"]
    if out:
        with open(out, "w") as fh:
            yaml.safe_dump(rep, fh, sort_keys=True)


def cmd_dump(cfg, trial):
    snap, _ = sample_snapshot(cfg.deployment, trial)
    write_snapshot_csv(snap, cfg.raw["output"]["csv"] or sys.stdout)


def cmd_explain(cfg, trial):
    snap, _ = sample_snapshot(cfg.deployment, trial)
    grouping = assign_nearest(snap, cfg.experiment().resolution)
    _, plan = regroup(grouping, snap, Policy.LBRA)
    plan.to_csv(cfg.raw["output"]["csv"] or sys.stdout)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = parse_config(args.config, _overrides(args), mode=args.mode)
        if args.mode == "simulate":
            cmd_simulate(cfg)
        elif args.mode == "sweep":
            cmd_sweep(cfg)
        elif args.mode == "analytic":
            cmd_analytic(cfg)
        elif args.mode == "compare":
            cmd_compare(cfg)
        elif args.mode == "dump":
            cmd_dump(cfg, args.trial)
        elif args.mode == "explain":
            cmd_explain(cfg, args.trial)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DegenerateExperimentError as exc:
        print(f"degenerate experiment: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except BrokenPipeError:
        # downstream reader (e.g. head) closed early
        sys.stderr.close()
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
