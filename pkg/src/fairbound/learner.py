"""A small logistic scorer and empirical minimisation over finite classes."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dataset import GroupedDataset
from .errors import EmptyClass, EmptyGroup, FewerThanTwoGroups, NoFeatures, NonConvergent, SingleClass
from .metrics import group_means, loss_values, max_gap


def sigmoid(z):
    z = np.asarray(z, dtype=float)
    return np.exp(-np.logaddexp(0.0, -z))


@dataclass(frozen=True)
class LinearModel:
    weights: np.ndarray
    bias: float
    train_loss: float | None = field(default=None, compare=False)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        if not (np.all(np.isfinite(w)) and math.isfinite(self.bias)):
            raise ValueError("model parameters must be finite")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "bias", float(self.bias))

    @property
    def dim(self) -> int:
        return len(self.weights)

    def decision(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        return X @ self.weights + self.bias if self.dim else np.full(len(X), self.bias)

    def predict_proba(self, X) -> np.ndarray:
        return sigmoid(self.decision(X))

    def dumps(self) -> str:
        w = " ".join(format(v, ".17g") for v in self.weights)
        return f"{self.dim}\n{w}\n{format(self.bias, '.17g')}\n"

    @classmethod
    def loads(cls, text: str) -> "LinearModel":
        lines = text.split("\n")
        if len(lines) < 3:
            raise ValueError("model text needs three lines: d, weights, bias")
        d = int(lines[0])
        w = [float(t) for t in lines[1].split()]
        if len(w) != d:
            raise ValueError(f"model declares d={d} but lists {len(w)} weights")
        return cls(np.array(w), float(lines[2]))

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps())

    @classmethod
    def load(cls, path) -> "LinearModel":
        with open(path, encoding="utf-8") as fh:
            return cls.loads(fh.read())


@dataclass(frozen=True)
class LogisticConfig:
    lr: float = 0.5
    epochs: int = 500
    l2: float = 0.0
    seed: int = 0


def logistic_objective(theta: np.ndarray, X: np.ndarray, y: np.ndarray, l2: float = 0.0):
    """Mean log-loss plus ``l2/2 * |w|^2`` and its gradient.

    ``theta`` stacks the weights followed by the bias.
    """
    w, b = theta[:-1], theta[-1]
    z = X @ w + b
    loss = float(np.mean(np.logaddexp(0.0, z) - y * z)) + 0.5 * l2 * float(w @ w)
    resid = sigmoid(z) - y
    grad = np.empty_like(theta)
    grad[:-1] = X.T @ resid / len(y) + l2 * w
    grad[-1] = resid.mean()
    return loss, grad


def train_logistic(ds: GroupedDataset, config: LogisticConfig = LogisticConfig()) -> LinearModel:
    """Full-batch gradient descent from w = 0, b = logit(base rate).

    Raises :class:`NonConvergent` once the objective has risen for 10
    consecutive epochs. ``config.seed`` is accepted for interface stability;
    full-batch descent from a fixed start uses no randomness.
    """
    if ds.dim == 0:
        raise NoFeatures("logistic training needs at least one feature")
    y = ds.labels.astype(float)
    r = y.mean() if len(y) else 0.0
    if r in (0.0, 1.0):
        raise SingleClass("both label classes are required")
    X = ds.features
    theta = np.zeros(ds.dim + 1)
    theta[-1] = math.log(r / (1 - r))
    prev, rises = math.inf, 0
    loss = prev
    for _ in range(config.epochs):
        loss, grad = logistic_objective(theta, X, y, config.l2)
        rises = rises + 1 if loss > prev else 0
        if rises >= 10:
            raise NonConvergent(f"objective rose for 10 consecutive epochs (lr={config.lr})")
        prev = loss
        theta = theta - config.lr * grad
    loss, _ = logistic_objective(theta, X, y, config.l2)
    return LinearModel(theta[:-1].copy(), float(theta[-1]), train_loss=loss)


@dataclass(frozen=True)
class ThresholdPredictor:
    """Hard 0/1 prediction ``score >= threshold``.

    Scores come from ``base`` applied to the features, or from the dataset's
    own score column when ``base`` is None.
    """

    threshold: float
    base: LinearModel | None = None

    def predict(self, ds: GroupedDataset) -> np.ndarray:
        s = ds.require_scores() if self.base is None else self.base.predict_proba(ds.features)
        return (s >= self.threshold).astype(float)

    def describe(self) -> str:
        return f"score >= {self.threshold:.6g}"


@dataclass(frozen=True)
class LinearPredictor:
    model: LinearModel

    def predict(self, ds: GroupedDataset) -> np.ndarray:
        return self.model.predict_proba(ds.features)

    def describe(self) -> str:
        w = ", ".join(f"{v:.4g}" for v in self.model.weights)
        return f"sigmoid([{w}] . x + {self.model.bias:.4g})"


@dataclass(frozen=True)
class FunctionClass:
    kind: str
    members: tuple

    @property
    def size(self) -> int:
        return len(self.members)

    def __len__(self):
        return self.size

    def predictions(self, ds: GroupedDataset):
        """Yield each member's predictions on ``ds`` in member order."""
        cache: dict = {}
        for f in self.members:
            if isinstance(f, ThresholdPredictor):
                key = id(f.base)
                if key not in cache:
                    cache[key] = ds.require_scores() if f.base is None else f.base.predict_proba(ds.features)
                yield (cache[key] >= f.threshold).astype(float)
            else:
                yield f.predict(ds)

    @classmethod
    def thresholds(cls, values, base: LinearModel | None = None) -> "FunctionClass":
        return cls("threshold", tuple(ThresholdPredictor(float(t), base) for t in values))

    @classmethod
    def linear_grid(cls, weight_values, bias_values, dim: int) -> "FunctionClass":
        """Every weight vector in ``weight_values ** dim`` crossed with every bias.

        Enumeration order is lexicographic in (weights, bias).
        """
        import itertools

        members = []
        for w in itertools.product(weight_values, repeat=dim):
            for b in bias_values:
                members.append(LinearPredictor(LinearModel(np.array(w, dtype=float), float(b))))
        return cls("linear-grid", tuple(members))


def member_group_losses(ds: GroupedDataset, fc: FunctionClass, loss: str = "zero_one") -> np.ndarray:
    """Matrix of empirical losses, one row per member and one column per group."""
    if fc.size == 0:
        raise EmptyClass("function class has no members")
    sizes = ds.group_sizes()
    if np.any(sizes == 0):
        raise EmptyGroup(ds.groups[int(np.argmin(sizes))])
    out = np.empty((fc.size, ds.k))
    for i, pred in enumerate(fc.predictions(ds)):
        out[i] = group_means(loss_values(pred, ds.labels, loss), ds.codes, ds.k)
    return out


def member_pooled_losses(ds: GroupedDataset, fc: FunctionClass, loss: str = "zero_one") -> np.ndarray:
    if fc.size == 0:
        raise EmptyClass("function class has no members")
    if ds.n == 0:
        raise EmptyGroup("<all>")
    return np.array([math.fsum(loss_values(pred, ds.labels, loss)) / ds.n
                     for pred in fc.predictions(ds)])


@dataclass(frozen=True)
class ErmResult:
    chosen: int
    emp_gap: float
    table: np.ndarray
    group_losses: np.ndarray


def gaps_from_losses(group_losses: np.ndarray) -> np.ndarray:
    return np.array([max_gap(row)[0] for row in group_losses])


def erm_fairness(ds: GroupedDataset, fc: FunctionClass, loss: str = "zero_one") -> ErmResult:
    """Member with the smallest empirical fairness gap; ties go to the lowest index."""
    if ds.k < 2:
        raise FewerThanTwoGroups(f"need at least 2 groups, got {ds.k}")
    gl = member_group_losses(ds, fc, loss)
    gaps = gaps_from_losses(gl)
    chosen = int(np.argmin(gaps))
    return ErmResult(chosen, float(gaps[chosen]), gaps, gl)


def erm_supervised(ds: GroupedDataset, fc: FunctionClass, loss: str = "zero_one") -> tuple[int, float]:
    """Member with the smallest pooled empirical loss; same tie rule."""
    pooled = member_pooled_losses(ds, fc, loss)
    chosen = int(np.argmin(pooled))
    return chosen, float(pooled[chosen])
