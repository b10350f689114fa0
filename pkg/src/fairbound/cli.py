"""Command-line front end.

Every command writes its outputs plus a ``manifest.json`` holding the fully
resolved configuration; ``fairbound replay <manifest>`` reruns it. Exit codes:
0 success, 1 bound violation found (``simulate`` with assertions on),
2 usage or data error.
"""

from __future__ import annotations

import argparse
import copy
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import bounds as bnd
from . import config as cfgmod
from .dataset import load_csv
from .errors import DegenerateSlice, FairboundError, InvalidParams
from .groupstats import (
    GroupStats,
    ShiftMetrics,
    feature_distance_profile,
    group_stats,
    overall_stats,
    shift_metrics,
)
from .learner import FunctionClass, LinearModel, erm_fairness, erm_supervised, member_pooled_losses
from .metrics import LOSS_KINDS, auc, brier
from .report import md_table, safe_name, write_csv, write_json
from . import verify

log = logging.getLogger("fairbound")

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2

_PARAM_FLAGS = {"M": "M", "L": "L", "B": "B", "dvc": "d_vc", "delta": "delta", "eps": "epsilon",
                "k": "k", "m": "m", "n": "n", "min_r": "min_r", "approx_eps": "approx_eps"}


class Outputs:
    """Single writer for one run's output directory."""

    def __init__(self, out_dir, fmt: str):
        self.dir = Path(out_dir)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.fmt = fmt
        self.written: list[str] = []

    def json(self, name, obj):
        if self.fmt in ("json", "both") or name == "manifest.json":
            write_json(self.dir / name, obj)
            self.written.append(name)

    def markdown(self, name, text):
        if self.fmt in ("markdown", "both"):
            (self.dir / name).write_text(text.rstrip() + "\n", encoding="utf-8")
            self.written.append(name)

    def csv(self, name, header, rows):
        write_csv(self.dir / name, header, rows)
        self.written.append(name)


def _manifest(command: str, resolved: dict) -> dict:
    return {"tool": "fairbound", "version": __version__, "command": command, **resolved}


def _fmt(v, digits=4):
    return "n/a" if v is None else f"{v:.{digits}f}"


# -- stats -------------------------------------------------------------------

def cmd_stats(resolved: dict, out: Outputs) -> int:
    ds = load_csv(resolved["input"])
    overall = overall_stats(ds)
    per = {g: group_stats(ds, g) for g in ds.groups}
    doc = {"input": resolved["input"], "n": ds.n, "k": ds.k, "dim": ds.dim, "groups": list(ds.groups),
           "overall": verify._stats_dict(overall), "per_group": {g: verify._stats_dict(s) for g, s in per.items()}}
    lines = [f"# Group statistics for `{resolved['input']}`", "",
             f"{ds.n} records, {ds.k} groups, feature dimension {ds.dim}.", ""]
    has_scores = ds.scores is not None and not np.isnan(ds.scores).any()
    if has_scores:
        def _auc(g):
            try:
                return auc(ds, g)
            except DegenerateSlice:
                return None
        doc["auc"] = {g: _auc(g) for g in ds.groups}
        doc["auc_overall"] = _auc(None)
        doc["brier"] = {g: brier(ds, g) for g in ds.groups}
        doc["brier_overall"] = brier(ds)
        lines += ["## Classification quality", "",
                  md_table(["group", "n", "positive rate", "AUC", "Brier"],
                           [[g, per[g].n, per[g].r, doc["auc"][g], doc["brier"][g]] for g in ds.groups]
                           + [["(all)", overall.n, overall.r, doc["auc_overall"], doc["brier_overall"]]]), ""]
    if ds.dim >= 1:
        prof = feature_distance_profile(ds)
        doc["feature_distance"] = {"groups": {g: list(v) for g, v in prof.groups.items()},
                                   "overall": list(prof.overall)}
        doc["shift"] = {g: verify._shift_dict(shift_metrics(s, overall)) for g, s in per.items()}
        files = {}
        for g, d in prof.distances.items():
            name = f"dist_{safe_name(g)}.csv"
            out.csv(name, ["distance"], [[float(v)] for v in d])
            files[g] = name
        doc["histogram_files"] = files
        lines += ["## Distance to the overall feature centroid", "",
                  md_table(["group", "mean", "std", "mean shift", "sigma diff (W2)", "sqrt Frobenius"],
                           [[g, prof.groups[g][0], prof.groups[g][1], doc["shift"][g]["mean_shift"],
                             doc["shift"][g]["sigma_diff"], doc["shift"][g]["cov_shift_frob"]]
                            for g in prof.groups]
                           + [["(all)", prof.overall[0], prof.overall[1], 0.0, 0.0, 0.0]]), ""]
    else:
        lines += ["No feature columns: feature-distance sections omitted.", ""]
    out.json("groupstats.json", doc)
    out.markdown("summary.md", "\n".join(lines))
    return EXIT_OK


# -- bounds ------------------------------------------------------------------

def _pair(text: str, flag: str) -> tuple[str, list[float]]:
    if "=" not in text:
        raise InvalidParams(flag, f"expected NAME=v1,v2,..., got {text!r}")
    name, vals = text.split("=", 1)
    try:
        return name.strip(), [float(v) for v in vals.split(",")]
    except ValueError:
        raise InvalidParams(flag, f"cannot parse numbers in {text!r}") from None


def resolve_shifts(inputs: dict) -> dict[str, ShiftMetrics]:
    shifts: dict[str, ShiftMetrics] = {}
    overall = inputs.get("overall_moments")
    for text in inputs.get("group_moments", []):
        name, vals = _pair(text, "group-moments")
        if overall is None:
            raise InvalidParams("overall-moments", "required with --group-moments")
        if len(vals) != 2 or len(overall) != 2:
            raise InvalidParams("group-moments", "1-D moments are MEAN,STD")
        shifts[name] = shift_metrics(GroupStats.from_moments(vals[0], vals[1]),
                                     GroupStats.from_moments(overall[0], overall[1]))
    for text in inputs.get("shift", []):
        name, vals = _pair(text, "shift")
        if len(vals) != 3 or min(vals) < 0:
            raise InvalidParams("shift", "expected NAME=MEAN_SHIFT,COV_SHIFT_FROB,SIGMA_DIFF (all >= 0)")
        shifts[name] = ShiftMetrics(vals[0], vals[1], vals[0] + vals[2], vals[2])
    return shifts


def cmd_bounds(resolved: dict, out: Outputs) -> int:
    p = cfgmod.build_params(resolved)
    inputs = resolved["inputs"]
    shifts = resolve_shifts(inputs)
    reports = {}
    reports["hoeffding_fairness_bound"] = bnd.hoeffding_fairness_bound(p, inputs["base_gap"]).to_dict()
    reports["generalization_bound"] = bnd.generalization_bound(p, inputs["emp_gap"]).to_dict()
    reports["convergence_bound"] = bnd.convergence_bound(p).to_dict()
    reports["sample_complexity"] = bnd.sample_complexity(p)
    reports["finite_class_learning_bound"] = bnd.finite_class_learning_bound(
        p.m, inputs["class_size"], p.k, p.delta)
    if inputs.get("prevalence"):
        pi, pj = inputs["prevalence"]
        reports["generalization_bound_prevalence_adjusted"] = bnd.prevalence_adjusted(
            bnd.generalization_bound(p, inputs["emp_gap"]), pi, pj, p.M).to_dict()
    per_group = {}
    for g, sh in shifts.items():
        entry = {"shift": verify._shift_dict(sh)}
        for mode in bnd.COV_MODES:
            entry[f"group_risk_bound[{mode}]"] = bnd.group_risk_bound(p, sh, mode).to_dict()
            entry[f"tradeoff_bound[{mode}]"] = bnd.tradeoff_bound(p, sh, mode).to_dict()
            entry[f"group_expected_loss_bound[{mode}]"] = bnd.group_expected_loss_bound(
                inputs["overall_loss"], p, sh, mode).to_dict()
        entry["shift_increment[w2_trace]"] = sh.mean_shift + sh.sigma_diff
        entry["shift_increment[frobenius]"] = sh.mean_shift + sh.cov_shift_frob
        per_group[g] = entry
    reports["per_group"] = per_group
    doc = {"inputs": inputs, "params": p.to_dict(), "cov_mode": resolved["cov_mode"], "bounds": reports}
    out.json("bounds.json", doc)
    mode = resolved["cov_mode"]
    rows = [[k, v["value"]] for k, v in reports.items() if isinstance(v, dict) and "value" in v]
    lines = ["# Bound report", "", md_table(["bound", "value"], rows, 6), "",
             f"Sample complexity for epsilon={p.epsilon}: {reports['sample_complexity']} records.", "",
             f"Finite-class learning bound (|F|={inputs['class_size']}): "
             f"{reports['finite_class_learning_bound']:.6f}", ""]
    if per_group:
        lines += [f"## Per-group bounds (cov_mode = {mode})", "",
                  md_table(["group", "mean shift", "cov term", "increment", "group risk", "trade-off",
                            "expected loss"],
                           [[g, e["shift"]["mean_shift"], ShiftMetrics(**e["shift"]).cov_term(mode),
                             e[f"shift_increment[{mode}]"], e[f"group_risk_bound[{mode}]"]["value"],
                             e[f"tradeoff_bound[{mode}]"]["value"],
                             e[f"group_expected_loss_bound[{mode}]"]["value"]] for g, e in per_group.items()], 4)]
    out.markdown("summary.md", "\n".join(lines))
    return EXIT_OK


# -- audit -------------------------------------------------------------------

def cmd_audit(resolved: dict, out: Outputs) -> int:
    ds = load_csv(resolved["input"])
    model = LinearModel.load(resolved["model"]) if resolved.get("model") else None
    p = cfgmod.build_params(resolved)
    bundle = verify.audit_pipeline(ds, model, p, resolved["loss"])
    bundle["input"] = resolved["input"]
    if ds.dim >= 1:
        prof = feature_distance_profile(ds)
        for g, d in prof.distances.items():
            out.csv(f"dist_{safe_name(g)}.csv", ["distance"], [[float(v)] for v in d])
    out.json("audit.json", bundle)
    lines = [f"# Fairness audit of `{resolved['input']}`", "",
             f"{bundle['n']} records, {bundle['k']} groups, loss `{bundle['loss']}`, "
             f"overall loss {bundle['overall_loss']:.4f}.", ""]
    for note in bundle["notices"]:
        lines.append(f"> Notice: {note}")
    if bundle["notices"]:
        lines.append("")
    rows = []
    for g in bundle["groups"]:
        lp = bundle.get("loss_profile", {}).get("per_group_loss", {})
        rows.append([g, bundle["group_stats"][g]["n"], bundle["auc"][g], bundle["brier"][g], lp.get(g)])
    lines += [md_table(["group", "n", "AUC", "Brier", "loss"], rows), ""]
    if "loss_profile" in bundle:
        lp = bundle["loss_profile"]
        lines += [f"Fairness gap {lp['gap']:.4f} between {lp['argmax_pair'][0]!r} and {lp['argmax_pair'][1]!r}.", ""]
    per = bundle["bounds"].get("per_group", {})
    if per:
        mode = resolved["cov_mode"]
        lines += [f"## Expected-loss bounds (cov_mode = {mode})", "",
                  md_table(["group", "mean shift", "sigma diff", "bound"],
                           [[g, bundle["shift"][g]["mean_shift"], bundle["shift"][g]["sigma_diff"],
                             e[f"group_expected_loss_bound[{mode}]"]["value"]] for g, e in per.items()])]
    out.markdown("summary.md", "\n".join(lines))
    return EXIT_OK


# -- erm ---------------------------------------------------------------------

def cmd_erm(resolved: dict, out: Outputs) -> int:
    exp = resolved["experiment"]
    loss = resolved["loss"]
    if resolved.get("input"):
        ds = load_csv(resolved["input"])
        base = LinearModel.load(resolved["model"]) if resolved.get("model") else None
    else:
        specs = cfgmod.build_specs(resolved)
        if not specs:
            raise InvalidParams("input", "erm needs --input or a config with [specs]")
        ds = verify.generate(specs, int(exp.get("n", 1000)), resolved["seed"])
        base = cfgmod.build_model(exp, ds.dim)
    fc = cfgmod.build_class(exp, base)
    fair = erm_fairness(ds, fc, loss)
    sup_idx, sup_loss = erm_supervised(ds, fc, loss)
    pooled = member_pooled_losses(ds, fc, loss)
    table = []
    for i, f in enumerate(fc.members):
        table.append({"index": i, "member": f.describe(), "threshold": getattr(f, "threshold", None),
                      "group_losses": dict(zip(ds.groups, fair.group_losses[i].tolist())),
                      "gap": float(fair.table[i]), "pooled_loss": float(pooled[i])})
    lhs = float(pooled[fair.chosen] - pooled[sup_idx])
    doc = {"n": ds.n, "groups": list(ds.groups), "loss": loss, "class_size": fc.size,
           "fairness_choice": {"index": fair.chosen, "emp_gap": fair.emp_gap,
                               "pooled_loss": float(pooled[fair.chosen])},
           "supervised_choice": {"index": sup_idx, "pooled_loss": sup_loss,
                                 "emp_gap": float(fair.table[sup_idx])},
           "error_bound_comparison": {"pooled_loss_difference": lhs, "supervised_gap": float(fair.table[sup_idx]),
                                      "holds": lhs <= float(fair.table[sup_idx])},
           "table": table}
    out.json("erm.json", doc)
    out.csv("erm_table.csv", ["index", "threshold", "gap", "pooled_loss"] + [f"loss_{g}" for g in ds.groups],
            [[r["index"], r["threshold"] if r["threshold"] is not None else "", r["gap"], r["pooled_loss"]]
             + [float(v) for v in fair.group_losses[r["index"]]] for r in table])
    lines = ["# Empirical fairness-risk minimisation", "",
             f"{ds.n} records, {ds.k} groups, {fc.size} members, loss `{loss}`.", "",
             f"Fairness choice: member {fair.chosen} ({fc.members[fair.chosen].describe()}), "
             f"empirical gap {fair.emp_gap:.4f}.",
             f"Supervised choice: member {sup_idx}, pooled loss {sup_loss:.4f}.", "",
             "## Exhaustive table", "",
             md_table(["index", "member", "gap", "pooled loss"] + list(ds.groups),
                      [[r["index"], r["member"], r["gap"], r["pooled_loss"]] + list(fair.group_losses[r["index"]])
                       for r in table])]
    out.markdown("summary.md", "\n".join(lines))
    return EXIT_OK


# -- simulate ----------------------------------------------------------------

def cmd_simulate(resolved: dict, out: Outputs) -> int:
    exp = resolved["experiment"]
    specs = cfgmod.build_specs(resolved)
    if not specs:
        raise InvalidParams("config", "simulate needs a [specs] section")
    model = cfgmod.build_model(exp, specs[0].dim)
    loss = resolved["loss"]
    seed = resolved["seed"]
    trials = int(exp.get("trials", 500))
    p = cfgmod.build_params(resolved, {"k": len(specs)})
    doc = {"params": p.to_dict(), "loss": loss, "seed": seed, "trials": trials, "checks": {}}
    lines = ["# Monte Carlo bound checks", ""]
    violated = False
    for check in exp.get("checks", ["hoeffding", "group_loss"]):
        if check == "hoeffding":
            res = verify.check_hoeffding(specs, model, p, trials, seed, loss, int(exp.get("n_oracle", 1_000_000)))
            allowance = p.delta + 3 * math.sqrt(p.delta * (1 - p.delta) / trials)
            fail = res.violation_rate > allowance
        elif check == "group_loss":
            res = verify.check_group_loss_bound(specs, model, p, resolved["cov_mode"], trials, seed, loss,
                                                int(exp.get("n_mc", 20_000)))
            allowance = 0.0
            fail = res.violation_rate > 0
        else:
            raise InvalidParams("checks", f"unknown check {check!r}")
        violated |= fail
        doc["checks"][check] = {"violation_rate": res.violation_rate, "violations": res.violations,
                                "allowed_rate": allowance, "oracle": res.oracle}
        out.csv(f"simulate_{check}.csv", ["trial", "quantity", "bound", "violated"],
                [[o.trial, float(o.quantity), float(o.bound), int(o.violated)] for o in res.outcomes])
        lines.append(f"- `{check}`: violation rate {res.violation_rate:.4f} "
                     f"({res.violations}/{trials}), allowed {allowance:.4f}: {'FAIL' if fail else 'ok'}")
    out.json("simulate.json", doc)
    out.markdown("summary.md", "\n".join(lines))
    if violated and exp.get("assert", False):
        return EXIT_VIOLATION
    return EXIT_OK


# -- converge ----------------------------------------------------------------

def cmd_converge(resolved: dict, out: Outputs) -> int:
    exp = resolved["experiment"]
    specs = cfgmod.build_specs(resolved)
    model = cfgmod.build_model(exp, specs[0].dim)
    fc = cfgmod.build_class(exp, model)
    res = verify.convergence_study(specs, fc, resolved["loss"], exp["m_values"], int(exp["trials"]),
                                   resolved["seed"], int(exp.get("n_oracle", 1_000_000)),
                                   int(exp.get("n_boot", 1000)))
    doc = {"slope": res.slope, "slope_ci95": list(res.slope_ci), "theoretical_slope": -0.5,
           "m_values": res.m_values, "mean_excess": res.mean_excess, "se_excess": res.se_excess,
           "points": [list(pt) for pt in res.points], "best_index": res.best_index,
           "oracle_risk": res.oracle_risk, "class_size": fc.size, "trials": int(exp["trials"])}
    out.json("converge.json", doc)
    out.csv("convergence_points.csv", ["ln_m", "ln_excess"], [list(pt) for pt in res.points])
    out.csv("convergence_trials.csv", ["m", "trial", "chosen", "excess"],
            [[m, t, c, e] for m, cs, es in zip(res.m_values, res.chosen, res.excess)
             for t, (c, e) in enumerate(zip(cs, es))])
    lines = ["# Convergence of the empirical fairness-risk minimiser", "",
             f"Fitted slope of ln(mean excess) on ln(m): **{res.slope:.4f}** "
             f"(95% bootstrap CI {res.slope_ci[0]:.4f} to {res.slope_ci[1]:.4f}; theory -0.5).", "",
             md_table(["m", "mean excess", "std error"],
                      [[m, e, s] for m, e, s in zip(res.m_values, res.mean_excess, res.se_excess)], 6)]
    out.markdown("summary.md", "\n".join(lines))
    return EXIT_OK


COMMANDS = {"stats": cmd_stats, "bounds": cmd_bounds, "audit": cmd_audit, "erm": cmd_erm,
            "simulate": cmd_simulate, "converge": cmd_converge}


# -- argument handling -------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fairbound", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"fairbound {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--input", help="CSV with group,label[,score][,f0..] columns")
        p.add_argument("--config", help="experiment config file (see fairbound.config)")
        p.add_argument("--model", help="model file: d / weights / bias")
        p.add_argument("--out", default="fairbound-out", help="output directory")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--format", choices=("json", "markdown", "both"), default="both")
        p.add_argument("--cov-mode", choices=("frobenius", "w2", "w2_trace"), default="w2_trace")
        p.add_argument("--loss", choices=LOSS_KINDS, default=None)
        for flag, name in _PARAM_FLAGS.items():
            kind = int if name in ("d_vc", "k", "m", "n") else float
            p.add_argument(f"--{flag.replace('_', '-')}", dest=f"param_{name}", type=kind, default=None)
        p.add_argument("-v", "--verbose", action="store_true")
        return p

    common(sub.add_parser("stats", help="per-group statistics and histogram data"))
    b = common(sub.add_parser("bounds", help="evaluate every closed-form bound"))
    b.add_argument("--overall-moments", help="MEAN,STD of the overall 1-D distribution")
    b.add_argument("--group-moments", action="append", default=[], help="NAME=MEAN,STD (repeatable)")
    b.add_argument("--shift", action="append", default=[],
                   help="NAME=MEAN_SHIFT,COV_SHIFT_FROB,SIGMA_DIFF (repeatable)")
    b.add_argument("--overall-loss", type=float, default=0.0)
    b.add_argument("--emp-gap", type=float, default=0.0)
    b.add_argument("--base-gap", type=float, default=0.0)
    b.add_argument("--class-size", type=int, default=64)
    b.add_argument("--prevalence", help="P_I,P_J for the prevalence-adjusted bound")
    common(sub.add_parser("audit", help="full audit bundle for a CSV"))
    e = common(sub.add_parser("erm", help="empirical fairness-risk minimisation over thresholds"))
    e.add_argument("--thresholds", help="comma list or linspace(a, b, n)")
    common(sub.add_parser("simulate", help="Monte Carlo checks of the Hoeffding and group-loss bounds"))
    common(sub.add_parser("converge", help="excess-risk convergence study"))
    r = sub.add_parser("replay", help="rerun a command from its manifest.json")
    r.add_argument("manifest")
    r.add_argument("--out", default=None)
    return ap


def resolve(args) -> dict:
    """Merge config file, defaults and flags into the resolved config."""
    cmd = args.command
    if args.config:
        cfg = cfgmod.parse_config(args.config)
    elif cmd == "converge":
        cfg = copy.deepcopy(cfgmod.DEFAULT_CONVERGE)
    elif cmd == "simulate":
        cfg = copy.deepcopy(cfgmod.DEFAULT_SIMULATE)
    else:
        cfg = {"specs": [], "params": {}, "experiment": {}}
    exp = cfg["experiment"]
    params = dict(cfg["params"])
    for name in _PARAM_FLAGS.values():
        v = getattr(args, f"param_{name}")
        if v is not None:
            params[name] = v
    if cmd in ("stats", "audit") and not args.input:
        raise InvalidParams("input", f"`{cmd}` requires --input")
    if getattr(args, "thresholds", None):
        exp["thresholds"] = args.thresholds
    default_loss = {"erm": "zero_one", "converge": "zero_one"}.get(cmd, "squared")
    resolved = {
        "input": args.input,
        "model": args.model,
        "seed": args.seed if args.seed is not None else int(exp.get("seed", 0)),
        "cov_mode": "w2_trace" if args.cov_mode == "w2" else args.cov_mode,
        "loss": args.loss or exp.get("loss", default_loss),
        "specs": cfg["specs"],
        "params": params,
        "experiment": exp,
    }
    if cmd == "bounds":
        prevalence = None
        if args.prevalence:
            try:
                prevalence = [float(v) for v in args.prevalence.split(",")]
            except ValueError:
                raise InvalidParams("prevalence", "expected P_I,P_J") from None
            if len(prevalence) != 2:
                raise InvalidParams("prevalence", "expected P_I,P_J")
        overall = None
        if args.overall_moments:
            try:
                overall = [float(v) for v in args.overall_moments.split(",")]
            except ValueError:
                raise InvalidParams("overall-moments", "expected MEAN,STD") from None
        resolved["inputs"] = {"overall_moments": overall, "group_moments": list(args.group_moments),
                              "shift": list(args.shift), "overall_loss": args.overall_loss,
                              "emp_gap": args.emp_gap, "base_gap": args.base_gap,
                              "class_size": args.class_size, "prevalence": prevalence}
    # validate parameters early so usage errors surface before any work
    cfgmod.build_params(resolved)
    return resolved


def execute(command: str, resolved: dict, out_dir, fmt: str) -> int:
    out = Outputs(out_dir, fmt)
    code = COMMANDS[command](resolved, out)
    out.json("manifest.json", _manifest(command, {**resolved, "format": fmt}))
    return code


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "replay":
            with open(args.manifest, encoding="utf-8") as fh:
                man = json.load(fh)
            if man.get("tool") != "fairbound" or man.get("command") not in COMMANDS:
                raise InvalidParams("manifest", "not a fairbound manifest")
            resolved = {k: v for k, v in man.items() if k not in ("tool", "version", "command", "format")}
            out_dir = args.out or Path(args.manifest).parent
            return execute(man["command"], resolved, out_dir, man.get("format", "both"))
        resolved = resolve(args)
        return execute(args.command, resolved, args.out, args.format)
    except FairboundError as exc:
        print(f"fairbound {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError) as exc:
        print(f"fairbound {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
