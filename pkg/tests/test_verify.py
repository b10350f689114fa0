import math

import numpy as np
import pytest

from fairbound.bounds import BoundParams
from fairbound.dataset import GroupedDataset
from fairbound.errors import BadWeights, DegenerateExcess, InvalidParams, NonPSD
from fairbound.groupstats import group_stats
from fairbound.learner import FunctionClass, LinearModel, sigmoid
from fairbound.verify import (
    FixedRate,
    GaussianGroupSpec,
    LogisticRule,
    audit_pipeline,
    certified_lipschitz,
    check_group_loss_bound,
    check_hoeffding,
    convergence_study,
    generate,
    mc_expected_loss,
    mixture_moments,
)

ONE_D = LinearModel(np.array([1.0]), 0.0)


def two_groups(shift=1.0, var_b=1.5, rule=LogisticRule((2.0,), 0.0)):
    return [GaussianGroupSpec("a", [0.0], [[1.0]], 0.5, rule),
            GaussianGroupSpec("b", [shift], [[var_b]], 0.5, rule)]


def test_generate_mean_large_n():
    spec = [GaussianGroupSpec("g", np.zeros(2), np.eye(2), 1.0)]
    ds = generate(spec, 10**6, seed=3)
    np.testing.assert_allclose(group_stats(ds, "g").mu, 0.0, atol=0.01)


def test_generate_binomial_counts():
    ds = generate(two_groups(), 10**4, seed=5)
    for c in ds.group_sizes():
        assert abs(c - 5000) <= 3 * math.sqrt(10**4 / 4)


def test_fixed_rate_one_gives_all_positive():
    ds = generate([GaussianGroupSpec("g", [0.0], [[1.0]], 1.0, FixedRate(1.0))], 500, seed=0)
    assert np.all(ds.labels == 1)


def test_generate_is_reproducible_across_workers(monkeypatch):
    monkeypatch.setenv("FAIRBOUND_THREADS", "1")
    a = generate(two_groups(), 2000, seed=11)
    monkeypatch.setenv("FAIRBOUND_THREADS", "4")
    b = generate(two_groups(), 2000, seed=11)
    np.testing.assert_array_equal(a.features, b.features)
    np.testing.assert_array_equal(a.labels, b.labels)
    c = generate(two_groups(), 2000, seed=12)
    assert not np.array_equal(a.features, c.features)


def test_spec_validation():
    with pytest.raises(NonPSD):
        GaussianGroupSpec("g", [0.0, 0.0], [[1.0, 2.0], [2.0, 1.0]], 1.0)
    with pytest.raises(BadWeights):
        generate([GaussianGroupSpec("g", [0.0], [[1.0]], 0.7)], 10, seed=0)
    with pytest.raises(InvalidParams):
        generate(two_groups(), 0, seed=0)


def test_mixture_moments_match_sample():
    specs = two_groups(shift=2.0, var_b=3.0)
    mix = mixture_moments(specs)
    assert mix.mu[0] == pytest.approx(1.0)
    assert mix.sigma[0, 0] == pytest.approx(0.5 * 1 + 0.5 * 3 + 0.25 * 4)


def test_mc_loss_constant_half_prediction():
    spec = GaussianGroupSpec("g", [0.0], [[1.0]], 1.0, FixedRate(0.5))
    mean, se = mc_expected_loss(spec, LinearModel(np.zeros(1), 0.0), "squared", 20000, seed=1)
    assert mean == pytest.approx(0.25)
    assert se < 1e-12


def test_mc_loss_forced_perfect_score():
    spec = GaussianGroupSpec("g", [0.0], [[1.0]], 1.0, FixedRate(1.0))
    mean, _ = mc_expected_loss(spec, LinearModel(np.zeros(1), 1000.0), "squared", 5000, seed=1)
    assert mean == 0.0


def test_mc_loss_seed_stability():
    spec = two_groups()[1]
    a, sa = mc_expected_loss(spec, ONE_D, "squared", 50000, seed=1)
    b, sb = mc_expected_loss(spec, ONE_D, "squared", 50000, seed=2)
    assert abs(a - b) <= 6 * math.hypot(sa, sb)
    with pytest.raises(InvalidParams):
        mc_expected_loss(spec, ONE_D, "squared", 999, seed=1)


def test_hoeffding_rate_within_guarantee():
    p = BoundParams(k=2, delta=0.05, n=500)
    res = check_hoeffding(two_groups(), ONE_D, p, trials=400, seed=0, n_oracle=200_000)
    assert res.violation_rate <= 0.05 + 3 * math.sqrt(0.05 * 0.95 / 400)
    assert len(res.outcomes) == 400


def test_hoeffding_larger_n_does_not_raise_rate():
    # a loose delta makes violations frequent enough to compare
    p = BoundParams(k=2, delta=0.999, n=50)
    small = check_hoeffding(two_groups(), ONE_D, p, trials=200, seed=4, n_oracle=200_000)
    large = check_hoeffding(two_groups(), ONE_D, p.with_(n=5000), trials=200, seed=4, n_oracle=200_000)
    assert large.violation_rate <= small.violation_rate + 3 * math.sqrt(0.25 / 200)


def test_hoeffding_rejects_small_M():
    with pytest.raises(InvalidParams) as exc:
        check_hoeffding(two_groups(), ONE_D, BoundParams(M=0.5, k=2), trials=100, seed=0, n_oracle=1000)
    assert exc.value.field == "M"
    with pytest.raises(InvalidParams):
        check_hoeffding(two_groups(), ONE_D, BoundParams(k=3), trials=100, seed=0, n_oracle=1000)


def test_certified_lipschitz():
    assert certified_lipschitz(two_groups(), ONE_D, "squared") == pytest.approx(2.0 / 4 + 0.5)
    assert certified_lipschitz(two_groups(), ONE_D, "zero_one") == math.inf
    mixed = [two_groups()[0], GaussianGroupSpec("b", [1.0], [[1.0]], 0.5, FixedRate(0.3))]
    assert certified_lipschitz(mixed, ONE_D, "squared") == math.inf


def test_group_loss_bound_certified_B():
    specs = two_groups()
    B = certified_lipschitz(specs, ONE_D, "squared")
    res = check_group_loss_bound(specs, ONE_D, BoundParams(B=B), "w2_trace", trials=100, seed=1, n_mc=5000)
    assert res.violation_rate == 0.0


def test_group_loss_bound_identical_groups():
    rule = LogisticRule((2.0,), 0.0)
    specs = [GaussianGroupSpec("a", [0.5], [[1.0]], 0.5, rule), GaussianGroupSpec("b", [0.5], [[1.0]], 0.5, rule)]
    res = check_group_loss_bound(specs, ONE_D, BoundParams(B=1.0), trials=100, seed=2, n_mc=5000)
    assert all(o.bound == pytest.approx(0.0, abs=1e-12) for o in res.outcomes)
    q = np.array([o.quantity for o in res.outcomes])
    # equality up to Monte Carlo noise: the excess is centred on zero
    assert abs(q.mean()) <= 4 * q.std() / math.sqrt(len(q)) + 1e-3


def test_group_loss_bound_undersized_B():
    res = check_group_loss_bound(two_groups(shift=2.0), ONE_D, BoundParams(B=0.001), trials=30, seed=3, n_mc=5000)
    assert res.violation_rate > 0
    assert res.violations == sum(o.violated for o in res.outcomes)


CONV_SPECS = [GaussianGroupSpec("a", [0.0], [[1.0]], 0.5, LogisticRule((2.0,), 0.0)),
              GaussianGroupSpec("b", [1.0], [[2.25]], 0.5, LogisticRule((1.0,), -1.0))]
CONV_CLASS = FunctionClass.thresholds(sigmoid(np.linspace(-3, 4, 64)), ONE_D)


def test_convergence_single_member_raises():
    with pytest.raises(DegenerateExcess):
        convergence_study(CONV_SPECS, FunctionClass.thresholds([0.5], ONE_D), "zero_one",
                          [100, 1000, 10000, 100000], trials=20, seed=0, n_oracle=10000)


def test_convergence_input_validation():
    with pytest.raises(InvalidParams):
        convergence_study(CONV_SPECS, CONV_CLASS, "zero_one", [100, 200, 300, 400], 20, 0, n_oracle=10000)
    with pytest.raises(InvalidParams):
        convergence_study(CONV_SPECS, CONV_CLASS, "zero_one", [100, 1000, 10**4, 10**5], 10, 0, n_oracle=10000)


@pytest.fixture(scope="module")
def small_studies():
    m = [100, 300, 1000, 10000]
    a = convergence_study(CONV_SPECS, CONV_CLASS, "zero_one", m, trials=20, seed=3, n_oracle=200_000, n_boot=300)
    b = convergence_study(CONV_SPECS, CONV_CLASS, "zero_one", m, trials=80, seed=3, n_oracle=200_000, n_boot=300)
    return a, b


def test_convergence_ci_shrinks_with_trials(small_studies):
    a, b = small_studies
    assert (b.slope_ci[1] - b.slope_ci[0]) < (a.slope_ci[1] - a.slope_ci[0])


def test_convergence_means_nonincreasing(small_studies):
    _, b = small_studies
    for i in range(len(b.m_values) - 1):
        assert b.mean_excess[i + 1] <= b.mean_excess[i] + 2 * math.hypot(b.se_excess[i], b.se_excess[i + 1])
    assert b.slope < 0
    assert all(e >= 0 for row in b.excess for e in row)


def test_audit_largest_shift_has_largest_bound():
    rule = LogisticRule((1.0, 0.0), 0.0)
    specs = [GaussianGroupSpec("g1", [0.0, 0.0], np.eye(2), 0.4, rule),
             GaussianGroupSpec("g2", [0.3, 0.0], np.eye(2) * 1.1, 0.3, rule),
             GaussianGroupSpec("g3", [2.0, 1.0], np.eye(2) * 2.0, 0.3, rule)]
    ds = generate(specs, 6000, seed=8)
    out = audit_pipeline(ds, LinearModel(np.array([1.0, 0.0]), 0.0), BoundParams())
    w2 = {g: out["shift"][g]["w2"] for g in ds.groups}
    val = {g: out["bounds"]["per_group"][g]["group_expected_loss_bound[w2_trace]"]["value"] for g in ds.groups}
    assert max(w2, key=w2.get) == max(val, key=val.get) == "g3"


def test_audit_single_group_notice():
    ds = GroupedDataset.from_arrays(["a"] * 4, [0, 1, 0, 1], [[0.0], [1.0], [2.0], [3.0]], [0.2, 0.7, 0.4, 0.9])
    out = audit_pipeline(ds, None, BoundParams())
    assert "loss_profile" not in out
    assert any("single group" in n for n in out["notices"])


def test_audit_identical_groups():
    X = [[0.0], [1.0], [2.0], [3.0]]
    ds = GroupedDataset.from_arrays(["a"] * 4 + ["b"] * 4, [0, 1, 0, 1] * 2, X + X, [0.2, 0.7, 0.4, 0.9] * 2)
    out = audit_pipeline(ds, None, BoundParams())
    assert out["loss_profile"]["gap"] == 0.0
    for g in ("a", "b"):
        assert out["shift"][g]["mean_shift"] == 0.0
        assert out["shift"][g]["w2"] == pytest.approx(0.0, abs=1e-12)
