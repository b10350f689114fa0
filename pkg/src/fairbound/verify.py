"""Synthetic Gaussian groups, Monte Carlo oracles and bound-checking harnesses.

Randomness is organised as a tree of independent streams keyed by
``(seed, *path)`` through :class:`numpy.random.SeedSequence` spawn keys, so a
trial's draws depend only on its key and never on which worker ran it or in
what order. The worker count comes from ``FAIRBOUND_THREADS``.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import bounds as bnd
from .bounds import BoundParams
from .dataset import GroupedDataset
from .errors import (
    BadWeights,
    DegenerateExcess,
    DegenerateSlice,
    FewerThanTwoGroups,
    InvalidParams,
    NonPSD,
)
from .groupstats import (
    GroupStats,
    feature_distance_profile,
    group_stats,
    overall_stats,
    shift_metrics,
)
from .learner import FunctionClass, LinearModel, member_group_losses, gaps_from_losses
from .metrics import LOSS_SUP, auc, brier, decomposition_bound, loss_profile, loss_values

# stream tags under the master seed
_COUNTS, _GROUP, _ORACLE, _TRIAL, _BOOT = range(5)


def rng_for(seed: int, *key: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=tuple(key))))


def worker_count() -> int:
    raw = os.environ.get("FAIRBOUND_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


def run_trials(fn: Callable[[int], object], trials: int) -> list:
    """Evaluate ``fn(t)`` for every trial index; results are in index order."""
    workers = min(worker_count(), trials)
    if workers <= 1:
        return [fn(t) for t in range(trials)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(trials)))


def fsum_mean(values) -> float:
    values = list(values)
    return math.fsum(values) / len(values)


@dataclass(frozen=True)
class LogisticRule:
    """P(y = 1 | x) = sigmoid(w . x + b)."""

    w: tuple
    b: float = 0.0

    def prob(self, X: np.ndarray) -> np.ndarray:
        from .learner import sigmoid

        return sigmoid(X @ np.asarray(self.w, dtype=float) + self.b)


@dataclass(frozen=True)
class FixedRate:
    r: float

    def prob(self, X: np.ndarray) -> np.ndarray:
        return np.full(len(X), float(self.r))


@dataclass(frozen=True)
class GaussianGroupSpec:
    group: str
    mu: np.ndarray
    sigma: np.ndarray
    weight: float
    pos_rule: object = field(default_factory=lambda: FixedRate(0.5))

    def __post_init__(self):
        mu = np.atleast_1d(np.asarray(self.mu, dtype=float))
        sigma = np.asarray(self.sigma, dtype=float)
        if sigma.ndim == 0:
            sigma = sigma.reshape(1, 1)
        if sigma.shape != (len(mu), len(mu)):
            raise NonPSD(f"group {self.group!r}: covariance shape {sigma.shape} does not match mean length {len(mu)}")
        if not np.allclose(sigma, sigma.T, atol=1e-12):
            raise NonPSD(f"group {self.group!r}: covariance is not symmetric")
        vals, vecs = np.linalg.eigh(sigma)
        if vals.min() < -1e-9 * max(1.0, abs(vals).max()):
            raise NonPSD(f"group {self.group!r}: smallest eigenvalue {vals.min():.3e}")
        if isinstance(self.pos_rule, LogisticRule) and len(self.pos_rule.w) != len(mu):
            raise InvalidParams("pos_rule", f"logistic weight length must be {len(mu)}")
        if isinstance(self.pos_rule, FixedRate) and not 0.0 <= self.pos_rule.r <= 1.0:
            raise InvalidParams("pos_rule", f"rate must lie in [0, 1], got {self.pos_rule.r}")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "_factor", vecs * np.sqrt(np.clip(vals, 0.0, None)))

    @property
    def dim(self) -> int:
        return len(self.mu)

    def draw(self, count: int, rng: np.random.Generator):
        """``count`` features ``mu + F z`` with ``F F^T = sigma``, and labels."""
        z = rng.standard_normal((count, self.dim))
        X = self.mu + z @ self._factor.T
        y = (rng.random(count) < self.pos_rule.prob(X)).astype(np.int8)
        return X, y

    def stats(self) -> GroupStats:
        return GroupStats.from_moments(self.mu, self.sigma)


def _check_specs(specs: Sequence[GaussianGroupSpec]):
    if not specs:
        raise BadWeights("no group specs given")
    w = np.array([s.weight for s in specs], dtype=float)
    if np.any(~np.isfinite(w)) or np.any(w <= 0) or abs(w.sum() - 1.0) > 1e-9:
        raise BadWeights(f"weights must be positive and sum to 1, got {w.tolist()}")
    if len({s.dim for s in specs}) != 1:
        raise InvalidParams("specs", "all groups must share one feature dimension")
    if len({s.group for s in specs}) != len(specs):
        raise InvalidParams("specs", "group names must be distinct")


def generate(specs: Sequence[GaussianGroupSpec], n: int, seed: int, stream: tuple = ()) -> GroupedDataset:
    """Draw ``n`` records: multinomial group counts, then each group's block.

    Records are laid out group by group in spec order. ``stream`` extends
    the RNG key so harnesses can carve out independent sub-streams.
    """
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise InvalidParams("n", f"must be an integer >= 1, got {n!r}")
    _check_specs(specs)
    counts = rng_for(seed, *stream, _COUNTS).multinomial(n, [s.weight for s in specs])
    xs, ys, codes = [], [], []
    for i, (spec, c) in enumerate(zip(specs, counts)):
        X, y = spec.draw(int(c), rng_for(seed, *stream, _GROUP, i))
        xs.append(X)
        ys.append(y)
        codes.append(np.full(int(c), i, dtype=np.int64))
    return GroupedDataset(tuple(s.group for s in specs), np.concatenate(codes),
                          np.concatenate(ys), np.concatenate(xs), None)


def mixture_moments(specs: Sequence[GaussianGroupSpec]) -> GroupStats:
    """Mean and covariance of the weighted mixture of all groups."""
    w = np.array([s.weight for s in specs])
    mu = sum(wi * s.mu for wi, s in zip(w, specs))
    second = sum(wi * (s.sigma + np.outer(s.mu, s.mu)) for wi, s in zip(w, specs))
    sigma = second - np.outer(mu, mu)
    return GroupStats.from_moments(mu, (sigma + sigma.T) / 2)


def _loss_sample(spec, model: LinearModel, loss, n, rng) -> np.ndarray:
    X, y = spec.draw(n, rng)
    return loss_values(model.predict_proba(X), y, loss)


def _mean_se(values: np.ndarray) -> tuple[float, float]:
    mean = math.fsum(values) / len(values)
    return mean, float(np.std(values) / math.sqrt(len(values)))


def mc_expected_loss(spec: GaussianGroupSpec, model: LinearModel, loss: str, n_mc: int,
                     seed: int, stream: tuple = ()) -> tuple[float, float]:
    """Fresh-sample Monte Carlo mean of the loss, with its standard error."""
    if n_mc < 1000:
        raise InvalidParams("n_mc", f"must be >= 1000, got {n_mc}")
    return _mean_se(_loss_sample(spec, model, loss, n_mc, rng_for(seed, *stream)))


def certified_lipschitz(specs: Sequence[GaussianGroupSpec], model: LinearModel, loss: str) -> float:
    """Upper bound on the Lipschitz constant of x -> E[loss | x].

    The bound is only meaningful when every group shares one label rule;
    otherwise, and for the discontinuous zero-one loss, it is infinite.
    """
    rules = {s.pos_rule for s in specs}
    if len(rules) != 1 or loss == "zero_one":
        return math.inf
    rule = rules.pop()
    a = float(np.linalg.norm(rule.w)) / 4.0 if isinstance(rule, LogisticRule) else 0.0
    w = float(np.linalg.norm(model.weights))
    if loss == "squared":
        # d/dx [p(1-s)^2 + (1-p)s^2] = p'(1-2s) + 2 s'(s-p); |p'| <= a, |s'| <= w/4
        return a + w / 2.0
    if loss == "log_clipped":
        return a * LOSS_SUP["log_clipped"] + w
    raise ValueError(f"unknown loss kind {loss!r}")


@dataclass(frozen=True)
class TrialOutcome:
    trial: int
    quantity: float
    bound: float
    violated: bool


@dataclass(frozen=True)
class CheckResult:
    violation_rate: float
    outcomes: list
    oracle: dict = field(default_factory=dict)

    @property
    def violations(self) -> int:
        return sum(o.violated for o in self.outcomes)


def check_hoeffding(specs, model: LinearModel, params: BoundParams, trials: int, seed: int,
                    loss: str = "squared", n_oracle: int = 1_000_000) -> CheckResult:
    """Per trial draw ``params.n`` records per group and compare each group's
    empirical loss with its oracle value against M sqrt(ln(2k/delta) / (2 n)).

    A trial counts as violated if any group exceeds its deviation bound.
    """
    if trials < 100:
        raise InvalidParams("trials", f"must be >= 100, got {trials}")
    _check_specs(specs)
    if params.k != len(specs):
        raise InvalidParams("k", f"params.k={params.k} but {len(specs)} groups were given")
    if params.M < LOSS_SUP[loss]:
        raise InvalidParams("M", f"M={params.M} is below the {loss} loss range [0, {LOSS_SUP[loss]:.6g}]")
    oracle = [mc_expected_loss(s, model, loss, n_oracle, seed, (_ORACLE, i))[0]
              for i, s in enumerate(specs)]
    radius = bnd.hoeffding_term(params.M, params.k, params.delta, params.n, 1.0)

    def one(t: int) -> TrialOutcome:
        dev = max(abs(math.fsum(_loss_sample(s, model, loss, params.n, rng_for(seed, _TRIAL, t, i))) / params.n
                      - oracle[i]) for i, s in enumerate(specs))
        return TrialOutcome(t, dev, radius, dev > radius)

    out = run_trials(one, trials)
    return CheckResult(sum(o.violated for o in out) / trials, out,
                       {"group_loss": dict(zip((s.group for s in specs), oracle)), "radius": radius})


def check_group_loss_bound(specs, model: LinearModel, params: BoundParams, cov_mode: str = "w2_trace",
                           trials: int = 500, seed: int = 0, loss: str = "squared",
                           n_mc: int = 20_000) -> CheckResult:
    """Monte Carlo check of E_i[loss] <= E[loss] + B (mean shift + cov term).

    Shift terms come from the true spec parameters against the mixture's
    moments. Each trial re-estimates both expectations with fresh samples.
    """
    if cov_mode not in bnd.COV_MODES:
        raise InvalidParams("cov_mode", f"expected one of {bnd.COV_MODES}")
    if trials < 1:
        raise InvalidParams("trials", f"must be >= 1, got {trials}")
    _check_specs(specs)
    overall = mixture_moments(specs)
    slack = [params.B * shift_metrics(s.stats(), overall).mean_shift
             + params.B * shift_metrics(s.stats(), overall).cov_term(cov_mode) for s in specs]

    def one(t: int) -> TrialOutcome:
        pooled = generate(specs, n_mc, seed, (_TRIAL, t, len(specs)))
        e_all = math.fsum(loss_values(model.predict_proba(pooled.features), pooled.labels, loss)) / n_mc
        worst = None
        for i, s in enumerate(specs):
            e_i = math.fsum(_loss_sample(s, model, loss, n_mc, rng_for(seed, _TRIAL, t, i))) / n_mc
            cand = (e_i - e_all - slack[i], e_i - e_all, slack[i])
            if worst is None or cand[0] > worst[0]:
                worst = cand
        return TrialOutcome(t, worst[1], worst[2], worst[1] > worst[2])

    out = run_trials(one, trials)
    return CheckResult(sum(o.violated for o in out) / trials, out,
                       {"slack": dict(zip((s.group for s in specs), slack)),
                        "certified_B": certified_lipschitz(specs, model, loss)})


@dataclass(frozen=True)
class ConvergenceResult:
    slope: float
    points: list
    m_values: list
    mean_excess: list
    se_excess: list
    slope_ci: tuple
    excess: list
    best_index: int
    oracle_risk: list
    chosen: list


def _slope(log_m, log_e) -> float:
    return float(np.polyfit(log_m, log_e, 1)[0])


def convergence_study(specs, fc: FunctionClass, loss: str, m_values: Sequence[int], trials: int,
                      seed: int, n_oracle: int = 1_000_000, n_boot: int = 1000) -> ConvergenceResult:
    """Fit the decay rate of the excess fairness risk of the empirical minimizer.

    The "true" risk of every member is evaluated once on a fixed oracle
    sample; the oracle-best member plays the role of the class optimum.
    """
    m_values = [int(m) for m in m_values]
    if len(set(m_values)) < 4:
        raise InvalidParams("m_values", "need at least 4 distinct sample sizes")
    if min(m_values) < 1 or max(m_values) / min(m_values) < 100:
        raise InvalidParams("m_values", "sample sizes must span at least two decades")
    if trials < 20:
        raise InvalidParams("trials", f"must be >= 20 per sample size, got {trials}")
    if len(specs) < 2:
        raise FewerThanTwoGroups("convergence study needs at least 2 groups")
    if fc.size < 2:
        raise DegenerateExcess("class has a single member; the excess risk is identically 0")
    oracle_ds = generate(specs, n_oracle, seed, (_ORACLE,))
    risk = gaps_from_losses(member_group_losses(oracle_ds, fc, loss))
    best = int(np.argmin(risk))
    del oracle_ds

    excess, chosen = [], []
    for mi, m in enumerate(m_values):
        def one(t: int, m=m, mi=mi):
            ds = generate(specs, m, seed, (_TRIAL, mi, t))
            if np.any(ds.group_sizes() == 0):
                # drop groups that drew no records; with one group left every gap is 0
                ds = ds.subset(np.ones(ds.n, dtype=bool))
            if ds.k < 2:
                c = 0
            else:
                c = int(np.argmin(gaps_from_losses(member_group_losses(ds, fc, loss))))
            return c, float(risk[c] - risk[best])

        res = run_trials(one, trials)
        chosen.append([c for c, _ in res])
        excess.append([e for _, e in res])

    mean = [fsum_mean(e) for e in excess]
    se = [float(np.std(e) / math.sqrt(len(e))) for e in excess]
    if all(v == 0.0 for v in mean):
        raise DegenerateExcess("every trial picked the oracle-best member; no rate to fit")
    zero = [m for m, v in zip(m_values, mean) if v == 0.0]
    if zero:
        raise DegenerateExcess(f"mean excess is exactly 0 at m={zero}; log-log fit undefined")
    log_m = np.log(np.array(m_values, dtype=float))
    log_e = np.log(np.array(mean))
    slope = _slope(log_m, log_e)

    rng = rng_for(seed, _BOOT)
    boots = []
    arr = [np.array(e) for e in excess]
    for _ in range(n_boot):
        means = [a[rng.integers(0, len(a), len(a))].mean() for a in arr]
        if min(means) > 0:
            boots.append(_slope(log_m, np.log(means)))
    ci = (float(np.percentile(boots, 2.5)), float(np.percentile(boots, 97.5))) if boots else (math.nan, math.nan)
    return ConvergenceResult(slope, [(float(a), float(b)) for a, b in zip(log_m, log_e)], m_values,
                             mean, se, ci, excess, best, [float(r) for r in risk], chosen)


def _stats_dict(st: GroupStats) -> dict:
    return {"n": st.n, "r": st.r, "mu": st.mu.tolist(), "sigma": st.sigma.tolist(),
            "dist_mean": st.dist_mean, "dist_std": st.dist_std, "degenerate": st.degenerate}


def _shift_dict(sh) -> dict:
    return {"mean_shift": sh.mean_shift, "cov_shift_frob": sh.cov_shift_frob,
            "w2": sh.w2, "sigma_diff": sh.sigma_diff}


def audit_pipeline(ds: GroupedDataset, model: LinearModel | None, params: BoundParams,
                   loss: str = "squared") -> dict:
    """Group statistics, metrics and every applicable bound for one dataset.

    Scores come from ``model`` when given, else from the dataset. Sample-size
    parameters (m, n, k, min_r) are taken from the data; the rest from
    ``params``.
    """
    if model is not None:
        if ds.dim != model.dim:
            raise InvalidParams("model", f"model has {model.dim} weights, data has {ds.dim} features")
        ds = ds.with_scores(model.predict_proba(ds.features))
    scores = ds.require_scores()
    notices: list[str] = []
    sizes = ds.group_sizes()
    bundle: dict = {"n": ds.n, "k": ds.k, "dim": ds.dim, "groups": list(ds.groups),
                    "loss": loss, "notices": notices}

    overall = overall_stats(ds)
    per = {g: group_stats(ds, g) for g in ds.groups}
    bundle["group_stats"] = {g: _stats_dict(st) for g, st in per.items()}
    bundle["overall_stats"] = _stats_dict(overall)

    def _auc(g):
        try:
            return auc(ds, g)
        except DegenerateSlice:
            notices.append(f"AUC undefined for {'all records' if g is None else repr(g)}: single-class slice")
            return None

    bundle["auc"] = {g: _auc(g) for g in ds.groups}
    bundle["auc_overall"] = _auc(None)
    bundle["brier"] = {g: brier(ds, g) for g in ds.groups}
    bundle["brier_overall"] = brier(ds)

    lv = loss_values(scores, ds.labels, loss)
    overall_loss = math.fsum(lv) / ds.n
    bundle["overall_loss"] = overall_loss

    p = params.with_(m=ds.n, n=ds.n, k=max(ds.k, 2), min_r=float(sizes.min()) / ds.n)
    bundle["resolved_params"] = p.to_dict()
    reports: dict = {}
    bundle["bounds"] = reports

    if ds.k >= 2:
        prof = loss_profile(ds, loss)
        bundle["loss_profile"] = {
            "per_group_loss": prof.per_group_loss, "per_group_pos_loss": prof.per_group_pos_loss,
            "per_group_neg_loss": prof.per_group_neg_loss, "per_group_rate": prof.per_group_rate,
            "overall_loss": prof.overall_loss, "gap": prof.gap, "argmax_pair": list(prof.argmax_pair),
        }
        decomp = []
        for a in range(ds.k):
            for b in range(a + 1, ds.k):
                gi, gj = ds.groups[a], ds.groups[b]
                try:
                    lhs, rhs = decomposition_bound(prof, gi, gj, params.M)
                    decomp.append({"pair": [gi, gj], "lhs": lhs, "rhs": rhs})
                except Exception as exc:  # missing conditional or M too small: report, don't abort
                    decomp.append({"pair": [gi, gj], "skipped": str(exc)})
        bundle["decomposition"] = decomp
        reports["hoeffding_fairness_bound"] = bnd.hoeffding_fairness_bound(p, prof.gap).to_dict()
        if p.m >= p.d_vc:
            gen = bnd.generalization_bound(p, prof.gap)
            reports["generalization_bound"] = gen.to_dict()
            rates = prof.per_group_rate
            hi = max(rates, key=rates.get)
            lo = min(rates, key=rates.get)
            reports["generalization_bound_prevalence_adjusted"] = bnd.prevalence_adjusted(
                gen, rates[hi], rates[lo], params.M).to_dict()
        reports["sample_complexity"] = bnd.sample_complexity(p)
    else:
        notices.append("single group: fairness sections (loss profile, gap, fairness bounds) omitted")

    if p.m >= p.d_vc:
        reports["convergence_bound"] = bnd.convergence_bound(p).to_dict()
    else:
        notices.append(f"m={p.m} < d_vc={p.d_vc}: VC-based bounds omitted")

    if ds.dim >= 1:
        prof_d = feature_distance_profile(ds)
        bundle["feature_distance"] = {"groups": {g: list(v) for g, v in prof_d.groups.items()},
                                      "overall": list(prof_d.overall)}
        shifts = {g: shift_metrics(st, overall) for g, st in per.items()}
        bundle["shift"] = {g: _shift_dict(sh) for g, sh in shifts.items()}
        per_group: dict = {}
        for g, sh in shifts.items():
            entry = {}
            for mode in bnd.COV_MODES:
                if p.m >= p.d_vc:
                    entry[f"group_risk_bound[{mode}]"] = bnd.group_risk_bound(p, sh, mode).to_dict()
                    entry[f"tradeoff_bound[{mode}]"] = bnd.tradeoff_bound(p, sh, mode).to_dict()
                entry[f"group_expected_loss_bound[{mode}]"] = bnd.group_expected_loss_bound(
                    overall_loss, p, sh, mode).to_dict()
            entry["feature_distance_bound"] = bnd.feature_distance_bound(
                overall_loss, p.B, sh.mean_shift, float(np.trace(per[g].sigma)),
                float(np.trace(overall.sigma))).to_dict()
            per_group[g] = entry
        reports["per_group"] = per_group
    else:
        notices.append("no feature columns: feature-distance and shift sections omitted")
    return bundle
