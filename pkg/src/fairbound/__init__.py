"""Fairness-gap bounds, empirical fairness-risk minimisation and Monte Carlo checks."""

__version__ = "0.1.0"

from .bounds import BoundParams, BoundReport
from .dataset import ALL, GroupedDataset, Record, load_csv, partition
from .groupstats import GroupStats, ShiftMetrics, group_stats, overall_stats, shift_metrics
from .learner import FunctionClass, LinearModel, erm_fairness, erm_supervised, train_logistic
from .metrics import LossProfile, auc, brier, loss_profile

__all__ = [
    "ALL", "BoundParams", "BoundReport", "FunctionClass", "GroupStats", "GroupedDataset",
    "LinearModel", "LossProfile", "Record", "ShiftMetrics", "auc", "brier", "erm_fairness",
    "erm_supervised", "group_stats", "load_csv", "loss_profile", "overall_stats",
    "partition", "shift_metrics", "train_logistic",
]
