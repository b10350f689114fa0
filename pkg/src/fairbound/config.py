"""Experiment configuration files.

Grammar (INI syntax, parsed with :mod:`configparser`; ``#`` and ``;`` start
comments only at the beginning of a line)::

    [specs]
    groups = a, b            # group names, in order
    a.mu = 0                 # mean vector, comma separated
    a.sigma = 1              # covariance matrix: comma-separated row
                             #   entries, rows separated by '|'
                             #   (in 1-D this is the variance)
    a.weight = 0.5           # mixing proportion; weights must sum to 1
    a.label_w = 2            # logistic label rule P(y=1|x) = sigmoid(w.x + b)
    a.label_b = 0
    b.rate = 0.3             # ...or a fixed positive rate instead

    [params]                 # any BoundParams field: M L B d_vc delta
    delta = 0.05             #   epsilon m n k min_r approx_eps

    [experiment]
    seed = 7
    trials = 40
    loss = zero_one          # squared | zero_one | log_clipped
    m_values = 100, 1000, 10000, 100000
    n_oracle = 1000000
    n_mc = 20000
    n = 1000                 # records drawn by `erm` for synthetic data
    thresholds = linspace(-3, 4, 64)    # or an explicit comma list
    threshold_scale = logit  # logit: thresholds are on the w.x+b scale
    model_w = 1              # scoring model used by simulate/converge/erm
    model_b = 0
    checks = hoeffding, group_loss
    cov_mode = w2_trace
    assert = false           # simulate exits 1 when a bound is violated

Parsing yields a plain, JSON-ready dict (the *resolved* config) that is also
what ``manifest.json`` stores, so a manifest can be replayed directly.
"""

from __future__ import annotations

import configparser
import math
import re

import numpy as np

from .bounds import BoundParams
from .errors import InvalidParams
from .learner import FunctionClass, LinearModel, sigmoid
from .verify import FixedRate, GaussianGroupSpec, LogisticRule

_INT_PARAMS = {"d_vc", "m", "n", "k"}
_INT_EXPERIMENT = {"seed", "trials", "n_oracle", "n_mc", "n", "n_boot"}
_LINSPACE = re.compile(r"^linspace\(\s*([^,]+),\s*([^,]+),\s*(\d+)\s*\)$")

DEFAULT_CONVERGE = {
    "specs": [
        {"group": "a", "mu": [0.0], "sigma": [[1.0]], "weight": 0.5, "label_w": [2.0], "label_b": 0.0},
        {"group": "b", "mu": [1.0], "sigma": [[2.25]], "weight": 0.5, "label_w": [1.0], "label_b": -1.0},
    ],
    "params": {},
    "experiment": {
        "seed": 7, "trials": 40, "loss": "zero_one", "m_values": [100, 1000, 10000, 100000],
        "n_oracle": 1_000_000, "thresholds": "linspace(-3, 4, 64)", "threshold_scale": "logit",
        "model_w": [1.0], "model_b": 0.0, "n_boot": 1000,
    },
}

DEFAULT_SIMULATE = {
    "specs": [
        {"group": "a", "mu": [0.0], "sigma": [[1.0]], "weight": 0.5, "label_w": [2.0], "label_b": 0.0},
        {"group": "b", "mu": [1.0], "sigma": [[1.5]], "weight": 0.5, "label_w": [2.0], "label_b": 0.0},
    ],
    "params": {"B": 2.0, "n": 500, "delta": 0.05},
    "experiment": {"seed": 0, "trials": 500, "loss": "squared", "n_oracle": 1_000_000, "n_mc": 20_000,
                   "model_w": [1.0], "model_b": 0.0, "checks": ["hoeffding", "group_loss"],
                   "cov_mode": "w2_trace", "assert": False},
}


def _floats(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def _matrix(text: str) -> list[list[float]]:
    return [_floats(row) for row in text.split("|")]


def _strip_comment(v: str) -> str:
    return v.split("#", 1)[0].strip()


def parse_config(path) -> dict:
    """Read a config file into the resolved-config dict."""
    cp = configparser.ConfigParser(interpolation=None, comment_prefixes=("#", ";"),
                                   inline_comment_prefixes=None)
    cp.optionxform = str
    with open(path, encoding="utf-8") as fh:
        cp.read_file(fh)
    unknown = set(cp.sections()) - {"specs", "params", "experiment"}
    if unknown:
        raise InvalidParams("config", f"unknown sections {sorted(unknown)}")
    out: dict = {"specs": [], "params": {}, "experiment": {}}
    if cp.has_section("specs"):
        sec = {k: _strip_comment(v) for k, v in cp["specs"].items()}
        names = [g.strip() for g in sec.get("groups", "").split(",") if g.strip()]
        if not names:
            raise InvalidParams("specs.groups", "list the group names")
        for g in names:
            try:
                spec = {"group": g, "mu": _floats(sec[f"{g}.mu"]), "sigma": _matrix(sec[f"{g}.sigma"]),
                        "weight": float(sec[f"{g}.weight"])}
            except KeyError as exc:
                raise InvalidParams(f"specs.{exc.args[0]}", "missing key") from None
            if f"{g}.rate" in sec:
                spec["rate"] = float(sec[f"{g}.rate"])
            else:
                spec["label_w"] = _floats(sec.get(f"{g}.label_w", ",".join("0" * len(spec["mu"]))))
                spec["label_b"] = float(sec.get(f"{g}.label_b", "0"))
            out["specs"].append(spec)
    if cp.has_section("params"):
        valid = set(BoundParams.field_names())
        for k, v in cp["params"].items():
            v = _strip_comment(v)
            if k not in valid:
                raise InvalidParams(k, "unknown parameter")
            try:
                out["params"][k] = int(v) if k in _INT_PARAMS else float(v)
            except ValueError:
                raise InvalidParams(k, f"cannot parse {v!r}") from None
    if cp.has_section("experiment"):
        for k, v in cp["experiment"].items():
            v = _strip_comment(v)
            if k in _INT_EXPERIMENT:
                out["experiment"][k] = int(v)
            elif k == "m_values":
                out["experiment"][k] = [int(float(t)) for t in v.split(",") if t.strip()]
            elif k in ("model_w",):
                out["experiment"][k] = _floats(v)
            elif k in ("model_b",):
                out["experiment"][k] = float(v)
            elif k == "checks":
                out["experiment"][k] = [t.strip() for t in v.split(",") if t.strip()]
            elif k == "assert":
                out["experiment"][k] = v.lower() in ("1", "true", "yes", "on")
            else:
                out["experiment"][k] = v
    return out


def build_specs(cfg: dict) -> list[GaussianGroupSpec]:
    specs = []
    for s in cfg.get("specs", []):
        if "rate" in s:
            rule = FixedRate(float(s["rate"]))
        else:
            rule = LogisticRule(tuple(float(v) for v in s["label_w"]), float(s.get("label_b", 0.0)))
        specs.append(GaussianGroupSpec(s["group"], np.array(s["mu"], dtype=float),
                                       np.array(s["sigma"], dtype=float), float(s["weight"]), rule))
    return specs


def build_model(exp: dict, dim: int) -> LinearModel:
    w = exp.get("model_w")
    if w is None:
        w = [1.0] + [0.0] * (dim - 1)
    if len(w) != dim:
        raise InvalidParams("model_w", f"expected {dim} weights, got {len(w)}")
    return LinearModel(np.array(w, dtype=float), float(exp.get("model_b", 0.0)))


def threshold_values(exp: dict) -> np.ndarray:
    raw = exp.get("thresholds", "0.25, 0.5, 0.75")
    if isinstance(raw, (list, tuple)):
        vals = np.array(raw, dtype=float)
    else:
        m = _LINSPACE.match(raw.strip())
        if m:
            vals = np.linspace(float(m.group(1)), float(m.group(2)), int(m.group(3)))
        else:
            vals = np.array(_floats(raw))
    if exp.get("threshold_scale", "prob") == "logit":
        vals = sigmoid(vals)
    if not len(vals):
        raise InvalidParams("thresholds", "empty threshold list")
    return vals


def build_class(exp: dict, base: LinearModel | None) -> FunctionClass:
    return FunctionClass.thresholds(threshold_values(exp), base)


def build_params(cfg: dict, overrides: dict | None = None) -> BoundParams:
    merged = {**cfg.get("params", {}), **{k: v for k, v in (overrides or {}).items() if v is not None}}
    for k in list(merged):
        if k in _INT_PARAMS and isinstance(merged[k], float):
            if not merged[k].is_integer():
                raise InvalidParams(k, f"must be an integer, got {merged[k]!r}")
            merged[k] = int(merged[k])
        elif k not in _INT_PARAMS and isinstance(merged[k], int):
            merged[k] = float(merged[k])
        if isinstance(merged[k], float) and not math.isfinite(merged[k]):
            raise InvalidParams(k, "must be finite")
    return BoundParams(**merged)
