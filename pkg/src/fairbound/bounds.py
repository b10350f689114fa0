"""Closed-form fairness and group-risk bounds with component breakdowns.

All logarithms are natural. Every additive bound returns a
:class:`BoundReport` whose value is the (compensated) sum of its components.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields, replace

from .errors import InvalidParams, OutOfRange, SampleTooSmall
from .groupstats import ShiftMetrics
from .metrics import prevalence_penalty

COV_MODES = ("frobenius", "w2_trace")


@dataclass(frozen=True)
class BoundParams:
    M: float = 1.0
    L: float = 1.0
    B: float = 1.0
    d_vc: int = 1
    delta: float = 0.05
    epsilon: float = 0.1
    m: int = 1000
    n: int = 1000
    k: int = 2
    min_r: float = 0.5
    approx_eps: float = 0.0

    def __post_init__(self):
        self.validate()

    def validate(self):
        for name in ("M", "L", "B", "epsilon"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise InvalidParams(name, f"must be a finite positive number, got {v!r}")
        for name, lo in (("d_vc", 1), ("m", 1), ("n", 1), ("k", 2)):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int) or v < lo:
                raise InvalidParams(name, f"must be an integer >= {lo}, got {v!r}")
        if not (isinstance(self.delta, (int, float)) and 0.0 < self.delta < 1.0):
            raise InvalidParams("delta", f"must lie strictly inside (0, 1), got {self.delta!r}")
        if not (isinstance(self.min_r, (int, float)) and 0.0 < self.min_r <= 1.0):
            raise InvalidParams("min_r", f"must lie in (0, 1], got {self.min_r!r}")
        if not (isinstance(self.approx_eps, (int, float)) and math.isfinite(self.approx_eps)
                and self.approx_eps >= 0):
            raise InvalidParams("approx_eps", f"must be >= 0, got {self.approx_eps!r}")

    def with_(self, **changes) -> "BoundParams":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def field_names(cls) -> list[str]:
        return [f.name for f in fields(cls)]


@dataclass(frozen=True)
class BoundReport:
    name: str
    value: float
    components: dict
    assumptions: list
    flags: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"name": self.name, "value": self.value, "components": dict(self.components),
                "assumptions": list(self.assumptions), "flags": dict(self.flags)}


def _report(name, components, assumptions, flags=None) -> BoundReport:
    return BoundReport(name, math.fsum(components.values()), dict(components),
                       list(assumptions), dict(flags or {}))


def _nonneg(name, v):
    if not (isinstance(v, (int, float)) and math.isfinite(v) and v >= 0):
        raise InvalidParams(name, f"must be a finite number >= 0, got {v!r}")


def _need_m(p: BoundParams):
    if p.m < p.d_vc:
        raise SampleTooSmall(p.m, p.d_vc)


def hoeffding_term(M, k, delta, n, min_r) -> float:
    return M * math.sqrt(math.log(2 * k / delta) / (2 * n * min_r))


def hoeffding_fairness_bound(p: BoundParams, base_gap: float = 0.0) -> BoundReport:
    """Fairness gap of an estimate vs. the optimal gap, via Hoeffding."""
    _nonneg("base_gap", base_gap)
    return _report("hoeffding_fairness_bound", {
        "base_gap": float(base_gap),
        "hoeffding": hoeffding_term(p.M, p.k, p.delta, p.n, p.min_r),
        "approximation": 2.0 * p.L * p.approx_eps,
    }, ["bounded-loss", "lipschitz"])


def generalization_complexity(M, d_vc, m, k, delta) -> float:
    return M * math.sqrt(8.0 * (d_vc * math.log(2 * math.e * m / d_vc)
                                + math.log(4 * k * k / delta)) / m)


def generalization_bound(p: BoundParams, emp_gap: float = 0.0) -> BoundReport:
    _nonneg("emp_gap", emp_gap)
    _need_m(p)
    return _report("generalization_bound", {
        "emp_gap": float(emp_gap),
        "complexity": generalization_complexity(p.M, p.d_vc, p.m, p.k, p.delta),
    }, ["bounded-loss", "finite-vc"])


def convergence_term(L, M, d_vc, m, delta) -> float:
    return (2.0 * L * M / math.sqrt(m)) * (
        math.sqrt(2.0 * d_vc * math.log(math.e * m / d_vc)) + math.sqrt(2.0 * math.log(4.0 / delta)))


def convergence_bound(p: BoundParams) -> BoundReport:
    """Excess fairness risk of the empirical minimizer, O(1/sqrt(m))."""
    _need_m(p)
    return _report("convergence_bound", {
        "convergence": convergence_term(p.L, p.M, p.d_vc, p.m, p.delta),
    }, ["bounded-loss", "lipschitz", "finite-vc"])


def _shift_components(scale, shift: ShiftMetrics, cov_mode):
    if cov_mode not in COV_MODES:
        raise InvalidParams("cov_mode", f"expected one of {COV_MODES}, got {cov_mode!r}")
    return {"mean_shift": scale * shift.mean_shift,
            f"cov_shift_{cov_mode}": scale * shift.cov_term(cov_mode)}


def group_risk_bound(p: BoundParams, shift: ShiftMetrics, cov_mode: str = "w2_trace") -> BoundReport:
    _need_m(p)
    comps = {"convergence": convergence_term(p.L, p.M, p.d_vc, p.m, p.delta)}
    comps.update(_shift_components(p.L, shift, cov_mode))
    return _report("group_risk_bound", comps,
                   ["bounded-loss", "lipschitz", "finite-vc", "gaussian-groups"], {"cov_mode": cov_mode})


def tradeoff_bound(p: BoundParams, shift: ShiftMetrics, cov_mode: str = "w2_trace") -> BoundReport:
    _need_m(p)
    lm = 4.0 * p.L * p.M / math.sqrt(p.m)
    comps = {"complexity": lm * math.sqrt(2.0 * p.d_vc * math.log(math.e * p.m / p.d_vc)
                                          + 2.0 * math.log(4.0 / p.delta))}
    comps.update(_shift_components(p.L, shift, cov_mode))
    return _report("tradeoff_bound", comps,
                   ["bounded-loss", "lipschitz", "finite-vc", "gaussian-groups"], {"cov_mode": cov_mode})


def group_expected_loss_bound(overall_loss: float, p: BoundParams, shift: ShiftMetrics,
                              cov_mode: str = "w2_trace") -> BoundReport:
    _nonneg("overall_loss", overall_loss)
    comps = {"overall_loss": float(overall_loss)}
    comps.update(_shift_components(p.B, shift, cov_mode))
    return _report("group_expected_loss_bound", comps, ["bounded-loss", "gaussian-groups"],
                   {"cov_mode": cov_mode})


def feature_distance_bound(overall_loss: float, B: float, centroid_dist: float,
                           e_d2_group: float, e_d2_overall: float) -> BoundReport:
    """Group loss bound from centroid distance and scatter difference.

    A negative scatter difference would put an imaginary number under the
    root; it is clamped to 0 and ``flags['clamped']`` is set.
    """
    for name, v in (("overall_loss", overall_loss), ("centroid_dist", centroid_dist),
                    ("e_d2_group", e_d2_group), ("e_d2_overall", e_d2_overall)):
        _nonneg(name, v)
    if not (math.isfinite(B) and B > 0):
        raise InvalidParams("B", f"must be a finite positive number, got {B!r}")
    diff = e_d2_group - e_d2_overall
    return _report("feature_distance_bound", {
        "overall_loss": float(overall_loss),
        "centroid": B * centroid_dist,
        "scatter": B * math.sqrt(max(0.0, diff)),
    }, ["bounded-loss", "gaussian-groups"], {"clamped": diff < 0})


def sample_complexity(p: BoundParams) -> int:
    """Sample size that makes empirical-gap minimisation epsilon-optimal."""
    M, k, eps = p.M, p.k, p.epsilon
    lead = 8.0 * M * M * k * k / (eps * eps)
    return math.ceil(lead * (p.d_vc * math.log(16.0 * M * k / eps) + math.log(4 * k * k / p.delta)))


def finite_class_learning_bound(m: int, class_size: int, k: int, delta: float) -> float:
    if isinstance(m, bool) or not isinstance(m, int) or m < 1:
        raise InvalidParams("m", f"must be an integer >= 1, got {m!r}")
    if isinstance(class_size, bool) or not isinstance(class_size, int) or class_size < 1:
        raise InvalidParams("class_size", f"must be an integer >= 1, got {class_size!r}")
    if isinstance(k, bool) or not isinstance(k, int) or k < 2:
        raise InvalidParams("k", f"must be an integer >= 2, got {k!r}")
    if not 0.0 < delta < 1.0:
        raise InvalidParams("delta", f"must lie strictly inside (0, 1), got {delta!r}")
    return (math.log(class_size) + math.log(k * k / delta)) / m


def prevalence_adjusted(report: BoundReport, p_i: float, p_j: float, M: float) -> BoundReport:
    """Add the M|p_i - p_j| base-rate term to any report.

    Applying it twice adds the term twice; avoiding that is up to the caller.
    """
    pen = prevalence_penalty(p_i, p_j, M)
    comps = dict(report.components)
    key, i = "prevalence_penalty", 2
    while key in comps:
        key = f"prevalence_penalty_{i}"
        i += 1
    comps[key] = pen
    return _report(report.name, comps, report.assumptions, report.flags)


__all__ = [
    "BoundParams", "BoundReport", "COV_MODES", "OutOfRange",
    "hoeffding_fairness_bound", "generalization_bound", "convergence_bound",
    "group_risk_bound", "tradeoff_bound", "group_expected_loss_bound",
    "feature_distance_bound", "sample_complexity", "finite_class_learning_bound",
    "prevalence_adjusted", "hoeffding_term", "generalization_complexity", "convergence_term",
]
