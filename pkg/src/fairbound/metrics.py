"""Empirical losses, fairness gaps and classification-quality metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import ALL, GroupedDataset
from .errors import (
    BadM,
    DegenerateSlice,
    EmptySlice,
    FewerThanTwoGroups,
    MissingConditional,
    OutOfRange,
)

LOSS_KINDS = ("squared", "zero_one", "log_clipped")
LOG_CLIP = 1e-6

# supremum of each loss over scores in [0, 1]
LOSS_SUP = {"squared": 1.0, "zero_one": 1.0, "log_clipped": -math.log(LOG_CLIP)}


def loss_values(scores, labels, kind: str = "squared") -> np.ndarray:
    """Per-record loss of score predictions against binary labels.

    ``zero_one`` predicts the positive class when ``score >= 0.5``.
    """
    s = np.asarray(scores, dtype=float)
    y = np.asarray(labels, dtype=float)
    if kind == "squared":
        return (s - y) ** 2
    if kind == "zero_one":
        return ((s >= 0.5) != (y > 0.5)).astype(float)
    if kind == "log_clipped":
        p = np.clip(s, LOG_CLIP, 1.0 - LOG_CLIP)
        return -np.log(np.where(y > 0.5, p, 1.0 - p))
    raise ValueError(f"unknown loss kind {kind!r}; expected one of {LOSS_KINDS}")


def group_means(values: np.ndarray, codes: np.ndarray, k: int) -> np.ndarray:
    sums = np.bincount(codes, weights=values, minlength=k)
    counts = np.bincount(codes, minlength=k)
    with np.errstate(invalid="ignore", divide="ignore"):
        return sums / counts


def max_gap(losses) -> tuple[float, tuple[int, int]]:
    """Largest pairwise absolute difference and the (low, high) index pair.

    Ties resolve to the first minimum and first maximum by position.
    """
    losses = np.asarray(losses, dtype=float)
    lo, hi = int(np.argmin(losses)), int(np.argmax(losses))
    return float(losses[hi] - losses[lo]), (lo, hi)


@dataclass(frozen=True)
class LossProfile:
    per_group_loss: dict
    per_group_pos_loss: dict
    per_group_neg_loss: dict
    per_group_rate: dict
    overall_loss: float
    gap: float
    argmax_pair: tuple
    loss_kind: str = "squared"
    max_loss: float = 0.0


def loss_profile(ds: GroupedDataset, loss: str = "squared") -> LossProfile:
    """Group-wise mean loss, its label-conditional parts and the fairness gap.

    An empty conditional slice is reported as None rather than 0.
    """
    if ds.k < 2:
        raise FewerThanTwoGroups(f"need at least 2 groups, got {ds.k}")
    scores = ds.require_scores()
    lv = loss_values(scores, ds.labels, loss)
    per, pos, neg, rate = {}, {}, {}, {}
    for i, g in enumerate(ds.groups):
        m = ds.codes == i
        if not m.any():
            continue
        y = ds.labels[m]
        v = lv[m]
        per[g] = math.fsum(v) / len(v)
        rate[g] = float(y.sum()) / len(y)
        pv, nv = v[y == 1], v[y == 0]
        pos[g] = math.fsum(pv) / len(pv) if len(pv) else None
        neg[g] = math.fsum(nv) / len(nv) if len(nv) else None
    names = list(per)
    gap, (lo, hi) = max_gap([per[g] for g in names])
    return LossProfile(per, pos, neg, rate, math.fsum(lv) / len(lv), gap,
                       (names[lo], names[hi]), loss, float(lv.max()))


def decomposition_rhs(p_i, p_j, pos_i, pos_j, neg_i, neg_j, M) -> float:
    return (max(p_i, p_j) * abs(pos_i - pos_j)
            + 2.0 * M * abs(p_i - p_j)
            + min(1.0 - p_i, 1.0 - p_j) * abs(neg_i - neg_j))


def decomposition_bound(profile: LossProfile, i, j, M: float) -> tuple[float, float]:
    """(|E_i - E_j|, positive/negative decomposition upper bound) for one pair."""
    for g in (i, j):
        if profile.per_group_pos_loss.get(g) is None:
            raise MissingConditional(g, "+")
        if profile.per_group_neg_loss.get(g) is None:
            raise MissingConditional(g, "-")
    if M < profile.max_loss:
        raise BadM(f"M={M} is below the observed maximum loss {profile.max_loss}")
    p_i, p_j = profile.per_group_rate[i], profile.per_group_rate[j]
    e_i = p_i * profile.per_group_pos_loss[i] + (1 - p_i) * profile.per_group_neg_loss[i]
    e_j = p_j * profile.per_group_pos_loss[j] + (1 - p_j) * profile.per_group_neg_loss[j]
    rhs = decomposition_rhs(p_i, p_j, profile.per_group_pos_loss[i], profile.per_group_pos_loss[j],
                            profile.per_group_neg_loss[i], profile.per_group_neg_loss[j], M)
    return abs(e_i - e_j), rhs


def auc_scores(scores, labels) -> float:
    """Mann-Whitney AUC with half credit for ties, in O(n log n).

    Pair counts are accumulated as exact integers so the result equals the
    brute-force pair count divided once by ``n_pos * n_neg``.
    """
    s = np.asarray(scores, dtype=float)
    y = np.asarray(labels).astype(bool)
    n_pos = int(y.sum())
    n_neg = len(y) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DegenerateSlice(f"slice has {n_pos} positives and {n_neg} negatives")
    order = np.argsort(s, kind="stable")
    s, y = s[order], y[order]
    starts = np.flatnonzero(np.r_[True, s[1:] != s[:-1]])
    pos_blk = np.add.reduceat(y.astype(np.int64), starts)
    size_blk = np.diff(np.r_[starts, len(s)])
    neg_blk = size_blk - pos_blk
    neg_below = np.cumsum(neg_blk) - neg_blk
    twice_u = 2 * int(np.dot(pos_blk, neg_below)) + int(np.dot(pos_blk, neg_blk))
    return twice_u / (2 * n_pos * n_neg)


def auc(ds: GroupedDataset, group=ALL) -> float:
    m = ds.mask(group)
    return auc_scores(ds.require_scores()[m], ds.labels[m])


def brier_scores(scores, labels) -> float:
    s = np.asarray(scores, dtype=float)
    if len(s) == 0:
        raise EmptySlice("brier score of an empty slice")
    return math.fsum((s - np.asarray(labels, dtype=float)) ** 2) / len(s)


def brier(ds: GroupedDataset, group=ALL) -> float:
    if ds.n == 0:
        raise EmptySlice("brier score of an empty dataset")
    m = ds.mask(group)
    return brier_scores(ds.require_scores()[m], ds.labels[m])


def prevalence_penalty(p_i: float, p_j: float, M: float) -> float:
    if not (0.0 <= p_i <= 1.0 and 0.0 <= p_j <= 1.0):
        raise OutOfRange(f"prevalences must lie in [0, 1], got {p_i}, {p_j}")
    if not M > 0:
        raise OutOfRange(f"M must be positive, got {M}")
    return M * abs(p_i - p_j)
