"""Per-group distribution statistics and distribution-shift measures.

Covariances use the population divisor ``n``: the bounds treat group
statistics as the parameters of each group's distribution, not as unbiased
estimates. Multiply by ``n / (n - 1)`` for the sample convention.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import ALL, GroupedDataset
from .errors import DimensionMismatch, EmptyGroup, NoFeatures, NonPSDCovariance

PSD_TOL = 1e-9


@dataclass(frozen=True)
class GroupStats:
    n: int
    r: float
    mu: np.ndarray
    sigma: np.ndarray
    dist_mean: float = 0.0
    dist_std: float = 0.0
    degenerate: bool = False

    @classmethod
    def from_moments(cls, mu, sigma, n=1, r=0.0) -> "GroupStats":
        """Stats carrying only distribution parameters (e.g. published summaries).

        A scalar ``sigma`` is read as a 1-D standard deviation, not a variance.
        """
        mu = np.atleast_1d(np.asarray(mu, dtype=float))
        sigma = np.asarray(sigma, dtype=float)
        if sigma.ndim == 0:
            sigma = np.array([[float(sigma) ** 2]])
        return cls(n=n, r=r, mu=mu, sigma=sigma)

    @property
    def dim(self) -> int:
        return len(self.mu)


@dataclass(frozen=True)
class ShiftMetrics:
    mean_shift: float
    cov_shift_frob: float
    w2: float
    sigma_diff: float

    @classmethod
    def zero(cls) -> "ShiftMetrics":
        return cls(0.0, 0.0, 0.0, 0.0)

    def cov_term(self, cov_mode: str) -> float:
        if cov_mode == "frobenius":
            return self.cov_shift_frob
        if cov_mode in ("w2_trace", "w2"):
            return self.sigma_diff
        raise ValueError(f"unknown cov_mode {cov_mode!r}")


def _moments(x: np.ndarray):
    mu = x.mean(axis=0)
    c = x - mu
    sigma = c.T @ c / len(x)
    return mu, (sigma + sigma.T) / 2


def _stats(ds: GroupedDataset, mask: np.ndarray, label) -> GroupStats:
    n = int(mask.sum())
    if n == 0:
        raise EmptyGroup(label)
    x = ds.features[mask]
    r = float(ds.labels[mask].sum()) / n
    if ds.dim == 0:
        return GroupStats(n, r, np.zeros(0), np.zeros((0, 0)), degenerate=n < 2)
    mu, sigma = _moments(x)
    if n < 2:
        sigma = np.zeros_like(sigma)
    centroid = ds.features.mean(axis=0)
    d = np.linalg.norm(x - centroid, axis=1)
    return GroupStats(n, r, mu, sigma, float(d.mean()), float(d.std()), degenerate=n < 2)


def group_stats(ds: GroupedDataset, group) -> GroupStats:
    """Stats for one group; distances are measured to the overall centroid."""
    return _stats(ds, ds.mask(group), group)


def overall_stats(ds: GroupedDataset) -> GroupStats:
    return _stats(ds, ds.mask(ALL), "<all>")


def psd_sqrt(a: np.ndarray) -> np.ndarray:
    """Symmetric PSD square root by eigendecomposition.

    Eigenvalues in ``[-PSD_TOL, 0)`` are clipped to zero; anything more
    negative raises :class:`NonPSDCovariance`.
    """
    a = (a + a.T) / 2
    vals, vecs = np.linalg.eigh(a)
    scale = max(1.0, float(np.abs(vals).max(initial=0.0)))
    if vals.size and vals.min() < -PSD_TOL * scale:
        raise NonPSDCovariance(f"smallest eigenvalue {vals.min():.3e}")
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ vecs.T


def bures_term(s1: np.ndarray, s2: np.ndarray) -> float:
    """sqrt(tr(S1 + S2 - 2 (S1^1/2 S2 S1^1/2)^1/2)), the covariance part of W2.

    Evaluated as min over orthogonal U of |S1^1/2 - S2^1/2 U|_F (orthogonal
    Procrustes), which equals the trace form but avoids the cancellation that
    leaves ~1e-8 noise after the square root when S1 and S2 coincide.
    """
    r1, r2 = psd_sqrt(s1), psd_sqrt(s2)
    w, _, vt = np.linalg.svd(r2.T @ r1)
    return float(np.linalg.norm(r1 - r2 @ (w @ vt), "fro"))


def shift_metrics(g: GroupStats, overall: GroupStats) -> ShiftMetrics:
    if g.dim != overall.dim:
        raise DimensionMismatch(f"dimensions {g.dim} and {overall.dim}")
    if g.dim == 0:
        return ShiftMetrics.zero()
    mean_shift = float(np.linalg.norm(g.mu - overall.mu))
    frob = float(np.sqrt(np.linalg.norm(g.sigma - overall.sigma, "fro")))
    if g.dim == 1:
        # closed form; avoids eigen round-off in the common 1-D case
        s1, s2 = g.sigma[0, 0], overall.sigma[0, 0]
        if min(s1, s2) < -PSD_TOL:
            raise NonPSDCovariance(f"negative variance {min(s1, s2):.3e}")
        sd = abs(np.sqrt(max(s1, 0.0)) - np.sqrt(max(s2, 0.0)))
    else:
        sd = bures_term(g.sigma, overall.sigma)
    return ShiftMetrics(mean_shift, frob, mean_shift + sd, float(sd))


@dataclass(frozen=True)
class DistanceProfile:
    groups: dict
    overall: tuple
    distances: dict


def feature_distance_profile(ds: GroupedDataset) -> DistanceProfile:
    """Euclidean distance of every record to the overall centroid.

    ``groups`` maps group to (mean, std) with population std, ``overall`` is
    the pooled pair, and ``distances`` holds the raw per-record distances per
    group for histogram export.
    """
    if ds.dim == 0:
        raise NoFeatures("feature distance profile needs dim >= 1")
    centroid = ds.features.mean(axis=0)
    d = np.linalg.norm(ds.features - centroid, axis=1)
    groups, raw = {}, {}
    for i, g in enumerate(ds.groups):
        dg = d[ds.codes == i]
        if len(dg):
            groups[g] = (float(dg.mean()), float(dg.std()))
            raw[g] = dg
    return DistanceProfile(groups, (float(d.mean()), float(d.std())), raw)
