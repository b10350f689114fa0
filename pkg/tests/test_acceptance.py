"""Acceptance suite: one test per criterion, each at its stated tolerance and
runtime budget. Every test logs a pass/fail line that is repeated in the
pytest terminal summary under "acceptance criteria".
"""

import itertools
import math
import time
from fractions import Fraction

import mpmath as mp
import numpy as np
import pytest

from fairbound import cli
from fairbound.bounds import BoundParams, convergence_bound, generalization_bound, hoeffding_fairness_bound
from fairbound.dataset import GroupedDataset
from fairbound.groupstats import GroupStats, shift_metrics
from fairbound.learner import (
    FunctionClass,
    LinearModel,
    erm_fairness,
    erm_supervised,
    logistic_objective,
    member_pooled_losses,
    sigmoid,
)
from fairbound.metrics import LossProfile, auc_scores, decomposition_bound
from fairbound.verify import (
    FixedRate,
    GaussianGroupSpec,
    LogisticRule,
    certified_lipschitz,
    check_group_loss_bound,
    check_hoeffding,
    convergence_study,
)


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.t0


def test_criterion_01_discussion_shift_arithmetic(acceptance_log):
    with Timer() as t:
        overall = GroupStats.from_moments(5.92, 2.46)
        asian = shift_metrics(GroupStats.from_moments(6.26, 2.53), overall)
        black = shift_metrics(GroupStats.from_moments(6.45, 2.65), overall)
    errs = [abs(asian.mean_shift - 0.34), abs(asian.sigma_diff - 0.07),
            abs(black.mean_shift - 0.53), abs(black.sigma_diff - 0.19)]
    ok = max(errs) <= 0.005 and t.seconds < 1
    acceptance_log(1, "shift arithmetic", ok,
                   f"Asian ({asian.mean_shift:.4f}, {asian.sigma_diff:.4f}), "
                   f"Black ({black.mean_shift:.4f}, {black.sigma_diff:.4f}), max err {max(errs):.2e}, {t.seconds:.3f}s")
    assert ok


def test_criterion_02_decomposition_fuzz(acceptance_log):
    rng = np.random.default_rng(2)
    violations = 0
    with Timer() as t:
        for _ in range(10_000):
            M = float(rng.uniform(0.01, 10))
            p = rng.uniform(0, 1, 2)
            pos, neg = rng.uniform(0, M, 2), rng.uniform(0, M, 2)
            prof = LossProfile({"i": p[0] * pos[0] + (1 - p[0]) * neg[0], "j": p[1] * pos[1] + (1 - p[1]) * neg[1]},
                               {"i": pos[0], "j": pos[1]}, {"i": neg[0], "j": neg[1]}, {"i": p[0], "j": p[1]},
                               0.0, 0.0, ("i", "j"), "squared", M)
            lhs, rhs = decomposition_bound(prof, "i", "j", M)
            violations += lhs > rhs
    ok = violations == 0 and t.seconds < 5
    acceptance_log(2, "decomposition lhs <= rhs", ok, f"{violations} violations in 10000, {t.seconds:.2f}s")
    assert ok


def _shifted_pair():
    rule = LogisticRule((2.0,), 0.0)
    return [GaussianGroupSpec("a", [0.0], [[1.0]], 0.5, rule), GaussianGroupSpec("b", [1.0], [[1.5]], 0.5, rule)]


@pytest.mark.slow
def test_criterion_03_hoeffding_guarantee(acceptance_log):
    params = BoundParams(k=2, delta=0.05, n=500)
    with Timer() as t:
        res = check_hoeffding(_shifted_pair(), LinearModel(np.array([1.0]), 0.0), params, trials=2000, seed=0)
    limit = 0.05 + 3 * math.sqrt(0.05 * 0.95 / 2000)
    ok = res.violation_rate <= limit and t.seconds < 120
    acceptance_log(3, "Hoeffding violation rate", ok,
                   f"rate {res.violation_rate:.4f} <= {limit:.4f}, {t.seconds:.1f}s")
    assert ok


def _lipschitz_fixtures():
    """Five fixtures where every group shares one label rule, so B can be certified."""
    r1 = LogisticRule((2.0,), 0.0)
    r2 = LogisticRule((1.0, -0.5), 0.2)
    return [
        ("1-D shifted", [GaussianGroupSpec("a", [0.0], [[1.0]], 0.5, r1),
                         GaussianGroupSpec("b", [1.0], [[1.5]], 0.5, r1)], LinearModel(np.array([1.0]), 0.0)),
        ("1-D three groups", [GaussianGroupSpec("a", [-1.0], [[0.5]], 0.3, r1),
                              GaussianGroupSpec("b", [0.5], [[1.0]], 0.3, r1),
                              GaussianGroupSpec("c", [2.0], [[3.0]], 0.4, r1)], LinearModel(np.array([0.7]), -0.3)),
        ("2-D rotated covariances", [GaussianGroupSpec("a", [0.0, 0.0], [[1.0, 0.6], [0.6, 1.0]], 0.6, r2),
                                     GaussianGroupSpec("b", [1.0, -1.0], [[2.0, -0.5], [-0.5, 0.8]], 0.4, r2)],
         LinearModel(np.array([1.5, -1.0]), 0.1)),
        ("fixed shared rate", [GaussianGroupSpec("a", [0.0], [[1.0]], 0.5, FixedRate(0.3)),
                               GaussianGroupSpec("b", [2.0], [[0.25]], 0.5, FixedRate(0.3))],
         LinearModel(np.array([1.2]), -0.5)),
        ("2-D unequal weights", [GaussianGroupSpec("a", [0.0, 1.0], [[0.5, 0.0], [0.0, 2.0]], 0.8, r2),
                                 GaussianGroupSpec("b", [-1.5, 0.0], [[1.0, 0.3], [0.3, 0.4]], 0.2, r2)],
         LinearModel(np.array([-0.8, 0.6]), 0.0)),
    ]


@pytest.mark.slow
def test_criterion_04_group_loss_bound_certified_B(acceptance_log):
    details, total_viol = [], 0
    with Timer() as t:
        for i, (name, specs, model) in enumerate(_lipschitz_fixtures()):
            B = certified_lipschitz(specs, model, "squared")
            res = check_group_loss_bound(specs, model, BoundParams(B=B), "w2_trace", trials=500, seed=40 + i)
            total_viol += res.violations
            details.append(f"{name} B={B:.3f}: {res.violations}/500")
    ok = total_viol == 0 and t.seconds < 120
    acceptance_log(4, "group loss bound, certified B", ok, "; ".join(details) + f", {t.seconds:.1f}s")
    assert ok


CONV_SPECS = [GaussianGroupSpec("a", [0.0], [[1.0]], 0.5, LogisticRule((2.0,), 0.0)),
              GaussianGroupSpec("b", [1.0], [[2.25]], 0.5, LogisticRule((1.0,), -1.0))]


@pytest.fixture(scope="module")
def convergence_run():
    fc = FunctionClass.thresholds(sigmoid(np.linspace(-3, 4, 64)), LinearModel(np.array([1.0]), 0.0))
    with Timer() as t:
        res = convergence_study(CONV_SPECS, fc, "zero_one", [100, 1000, 10_000, 100_000], trials=40, seed=7)
    return res, t.seconds


@pytest.mark.slow
def test_criterion_05_convergence_rate(acceptance_log, convergence_run):
    res, seconds = convergence_run
    ok = -0.65 <= res.slope <= -0.35 and seconds < 600
    acceptance_log(5, "convergence slope", ok,
                   f"slope {res.slope:.4f} (CI {res.slope_ci[0]:.3f}, {res.slope_ci[1]:.3f}) "
                   f"in [-0.65, -0.35], 64 members, 40 trials/m, {seconds:.1f}s")
    assert ok


def test_criterion_06_generalization_monotonicity(acceptance_log):
    rng = np.random.default_rng(6)
    bad = {"m": 0, "d_vc": 0, "k": 0, "M": 0}
    with Timer() as t:
        for axis in bad:
            for _ in range(500):
                p = BoundParams(M=float(rng.uniform(0.1, 10)), d_vc=int(rng.integers(1, 50)),
                                m=int(rng.integers(100, 10**6)), k=int(rng.integers(2, 20)),
                                delta=float(rng.uniform(0.001, 0.5)))
                cur = getattr(p, axis)
                q = p.with_(**{axis: cur * float(rng.uniform(1.001, 3)) if axis == "M"
                               else cur + int(rng.integers(1, cur + 1))})
                a, b = generalization_bound(p).value, generalization_bound(q).value
                bad[axis] += (b >= a) if axis == "m" else (b <= a)
    ok = sum(bad.values()) == 0 and t.seconds < 1
    acceptance_log(6, "generalization bound monotonicity", ok, f"counterexamples {bad}, {t.seconds:.3f}s")
    assert ok


def test_criterion_07_spot_values(acceptance_log):
    mp.mp.dps = 50
    with Timer() as t:
        h = hoeffding_fairness_bound(BoundParams(M=1.0, k=2, delta=0.05, n=1000, min_r=0.5)).components["hoeffding"]
        p = BoundParams(M=1.0, L=1.0, d_vc=3, m=10_000, k=2, delta=0.05)
        g = generalization_bound(p).components["complexity"]
        c = convergence_bound(p).value
    d = mp.mpf("0.05")
    oracle_h = mp.sqrt(mp.log(4 / d) / (2 * 1000 * mp.mpf("0.5")))
    oracle_g = mp.sqrt(8 * (3 * mp.log(2 * mp.e * 10_000 / 3) + mp.log(16 / d)) / 10_000)
    oracle_c = 2 / mp.sqrt(10_000) * (mp.sqrt(6 * mp.log(mp.e * 10_000 / 3)) + mp.sqrt(2 * mp.log(4 / d)))
    errs = [abs(h - float(oracle_h)), abs(g - float(oracle_g)), abs(c - float(oracle_c)),
            abs(h - 0.06620), abs(g - 0.1678), abs(c - 0.2071)]
    ok = max(errs) < 1e-3 and t.seconds < 1
    acceptance_log(7, "closed-form spot values", ok,
                   f"hoeffding {h:.5f}, complexity {g:.4f}, convergence {c:.4f}, max err {max(errs):.1e}")
    assert ok


def _pair_auc(s, y):
    pos = [v for v, l in zip(s, y) if l == 1]
    neg = [v for v, l in zip(s, y) if l == 0]
    credit = sum(Fraction(1) if p > q else Fraction(1, 2) if p == q else Fraction(0) for p in pos for q in neg)
    return float(credit / (len(pos) * len(neg)))


def test_criterion_08_auc_oracle(acceptance_log):
    rng = np.random.default_rng(8)
    mismatches = 0
    with Timer() as t:
        for i in range(1000):
            n = int(rng.integers(2, 51))
            y = rng.integers(0, 2, n)
            y[0], y[1] = 0, 1
            # half the slices draw from a coarse grid so ties are common
            s = rng.integers(0, 5, n) / 4 if i % 2 else rng.uniform(0, 1, n)
            mismatches += auc_scores(s, y) != _pair_auc(s, y)
    ok = mismatches == 0 and t.seconds < 5
    acceptance_log(8, "AUC equals pair enumeration", ok, f"{mismatches} mismatches in 1000, {t.seconds:.2f}s")
    assert ok


def _erm_instance(rng):
    """Random scored dataset and threshold class; every group non-empty."""
    n = int(rng.integers(10, 81))
    k = int(rng.integers(2, 5))
    groups = [f"g{i}" for i in range(k)] + [f"g{int(g)}" for g in rng.integers(0, k, n - k)]
    labels = rng.integers(0, 2, n)
    scores = rng.uniform(0, 1, n)
    ths = rng.uniform(0, 1, int(rng.integers(2, 11)))
    return GroupedDataset.from_arrays(groups, labels, None, scores), ths


def test_criterion_09_erm_and_error_comparison(acceptance_log):
    rng = np.random.default_rng(9)
    scan_mismatch, comparison_fail, worst = 0, 0, 0.0
    with Timer() as t:
        for _ in range(200):
            ds, ths = _erm_instance(rng)
            fc = FunctionClass.thresholds(ths)
            res = erm_fairness(ds, fc)
            groups = [ds.groups[c] for c in ds.codes]
            gaps = []
            for th in ths:
                per = {}
                for s, y, g in zip(ds.scores, ds.labels, groups):
                    per.setdefault(g, []).append(float((s >= th) != y))
                means = [math.fsum(v) / len(v) for v in per.values()]
                gaps.append(max(abs(a - b) for a, b in itertools.combinations(means, 2)))
            scan_mismatch += res.chosen != gaps.index(min(gaps)) or res.emp_gap != min(gaps)
            sup, _ = erm_supervised(ds, fc)
            pooled = member_pooled_losses(ds, fc)
            excess = pooled[res.chosen] - pooled[sup] - res.table[sup]
            if excess > 0:
                comparison_fail += 1
                worst = max(worst, float(excess))
    ok = scan_mismatch == 0 and comparison_fail == 0 and t.seconds < 30
    acceptance_log(9, "ERM exhaustive scan and error-bound comparison", ok,
                   f"scan mismatches {scan_mismatch}/200, comparison failures {comparison_fail}/200 "
                   f"(largest excess {worst:.4f}), {t.seconds:.2f}s")
    assert scan_mismatch == 0
    assert comparison_fail == 0
    assert t.seconds < 30


@pytest.mark.slow
def test_criterion_10_converge_determinism(acceptance_log, tmp_path, monkeypatch):
    outputs = []
    with Timer() as t:
        for threads in ("1", "4"):
            monkeypatch.setenv("FAIRBOUND_THREADS", threads)
            out = tmp_path / f"threads{threads}"
            assert cli.main(["converge", "--seed", "7", "--out", str(out)]) == 0
            outputs.append((out / "converge.json").read_bytes())
    same = outputs[0] == outputs[1]
    # budget: twice criterion 5's ten-minute allowance
    ok = same and t.seconds < 1200
    acceptance_log(10, "converge byte-identical across FAIRBOUND_THREADS", ok,
                   f"identical={same}, both runs {t.seconds:.1f}s")
    assert ok


def test_criterion_11_gradient_check(acceptance_log):
    rng = np.random.default_rng(11)
    X = rng.normal(size=(50, 4))
    y = rng.integers(0, 2, 50).astype(float)
    worst, h = 0.0, 1e-6
    with Timer() as t:
        for _ in range(20):
            theta = rng.normal(size=5)
            _, g = logistic_objective(theta, X, y, 0.0)
            fd = np.array([(logistic_objective(theta + h * e, X, y, 0.0)[0]
                            - logistic_objective(theta - h * e, X, y, 0.0)[0]) / (2 * h) for e in np.eye(5)])
            worst = max(worst, float(np.linalg.norm(g - fd) / np.linalg.norm(fd)))
    ok = worst < 1e-6 and t.seconds < 1
    acceptance_log(11, "logistic gradient vs finite differences", ok,
                   f"max relative error {worst:.2e}, {t.seconds:.3f}s")
    assert ok
