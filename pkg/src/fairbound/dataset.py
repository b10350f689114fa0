"""Grouped, labeled records and their CSV ingestion.

A :class:`GroupedDataset` stores its records column-wise in numpy arrays so
that the Monte Carlo harnesses can push millions of rows through the same
code path as a hand-written fixture. Individual :class:`Record` objects are
materialised on demand.
"""

from __future__ import annotations

import csv
import logging
import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    BadLabel,
    BadScore,
    EmptyFile,
    EmptyGroup,
    MissingColumn,
    MissingScore,
    NonFiniteValue,
    RaggedRow,
    UnknownGroup,
)

log = logging.getLogger(__name__)

ALL = None
"""Sentinel selecting every record in slice-based metrics."""

_FEATURE_RE = re.compile(r"^f(\d+)$")


@dataclass(frozen=True)
class Record:
    group: str
    label: int
    features: tuple = ()
    score: float | None = None


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class GroupedDataset:
    """Column-wise grouped dataset.

    ``codes[r]`` indexes into ``groups`` for record ``r``. ``scores`` is None
    when the dataset carries no score column at all; individual missing scores
    are stored as NaN.
    """

    groups: tuple
    codes: np.ndarray
    labels: np.ndarray
    features: np.ndarray
    scores: np.ndarray | None = None
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = len(self.codes)
        if self.labels.shape != (n,) or self.features.shape[0] != n:
            raise ValueError("column lengths disagree")
        if self.scores is not None and self.scores.shape != (n,):
            raise ValueError("score column length disagrees")
        for a in (self.codes, self.labels, self.features, self.scores):
            if a is not None:
                _frozen(a)
        object.__setattr__(self, "_index", {g: i for i, g in enumerate(self.groups)})

    @classmethod
    def from_arrays(cls, groups: Sequence, labels, features=None, scores=None) -> "GroupedDataset":
        """Build a dataset from a per-record group sequence.

        Group order is first appearance, matching :func:`load_csv`.
        """
        group_list = [str(g) for g in groups]
        order: dict[str, int] = {}
        for g in group_list:
            order.setdefault(g, len(order))
        codes = np.fromiter((order[g] for g in group_list), dtype=np.int64, count=len(group_list))
        labels = np.asarray(labels, dtype=np.int8).reshape(-1)
        if np.any((labels != 0) & (labels != 1)):
            bad = int(np.flatnonzero((labels != 0) & (labels != 1))[0])
            raise BadLabel(bad + 1, str(labels[bad]))
        n = len(codes)
        if features is None:
            feats = np.zeros((n, 0))
        else:
            feats = np.asarray(features, dtype=float)
            feats = feats.reshape(n, feats.shape[-1] if feats.ndim == 2 else (feats.size // n if n else 0))
        sc = None if scores is None else np.asarray(scores, dtype=float).reshape(-1).copy()
        return cls(tuple(order), codes, labels.copy(), feats.copy(), sc)

    @classmethod
    def from_records(cls, records: Iterable[Record]) -> "GroupedDataset":
        records = list(records)
        dims = {len(r.features) for r in records}
        if len(dims) > 1:
            raise ValueError(f"mixed feature dimensions {sorted(dims)}")
        d = dims.pop() if dims else 0
        feats = np.array([r.features for r in records], dtype=float).reshape(len(records), d)
        scores = None
        if any(r.score is not None for r in records):
            scores = np.array([np.nan if r.score is None else r.score for r in records])
        return cls.from_arrays([r.group for r in records], [r.label for r in records], feats, scores)

    @property
    def n(self) -> int:
        return len(self.codes)

    def __len__(self):
        return self.n

    @property
    def dim(self) -> int:
        return self.features.shape[1]

    @property
    def k(self) -> int:
        return len(self.groups)

    @property
    def records(self) -> list[Record]:
        out = []
        for r in range(self.n):
            s = None
            if self.scores is not None and not math.isnan(self.scores[r]):
                s = float(self.scores[r])
            out.append(Record(self.groups[self.codes[r]], int(self.labels[r]),
                              tuple(float(v) for v in self.features[r]), s))
        return out

    def group_code(self, group) -> int:
        try:
            return self._index[group]
        except KeyError:
            raise UnknownGroup(group) from None

    def mask(self, group=ALL) -> np.ndarray:
        if group is ALL:
            return np.ones(self.n, dtype=bool)
        m = self.codes == self.group_code(group)
        if not m.any():
            raise EmptyGroup(group)
        return m

    def group_sizes(self) -> np.ndarray:
        return np.bincount(self.codes, minlength=self.k)

    def require_scores(self) -> np.ndarray:
        if self.scores is None:
            raise MissingScore(1 if self.n else 0)
        missing = np.isnan(self.scores)
        if missing.any():
            raise MissingScore(int(np.flatnonzero(missing)[0]) + 1)
        return self.scores

    def with_scores(self, scores) -> "GroupedDataset":
        scores = np.asarray(scores, dtype=float).reshape(-1).copy()
        return GroupedDataset(self.groups, self.codes, self.labels, self.features, scores)

    def subset(self, mask) -> "GroupedDataset":
        """Records selected by ``mask``, keeping only groups still present."""
        mask = np.asarray(mask)
        codes = self.codes[mask]
        present = [c for c in range(self.k) if np.any(codes == c)]
        seen = sorted(present, key=lambda c: int(np.argmax(codes == c)))
        remap = np.full(self.k, -1, dtype=np.int64)
        remap[seen] = np.arange(len(seen))
        return GroupedDataset(
            tuple(self.groups[c] for c in seen),
            remap[codes],
            self.labels[mask].copy(),
            self.features[mask].copy(),
            None if self.scores is None else self.scores[mask].copy(),
        )


def partition(ds: GroupedDataset) -> dict[str, list[Record]]:
    """Split records by group, preserving order within each part."""
    parts: dict[str, list[Record]] = {g: [] for g in ds.groups}
    for rec in ds.records:
        parts[rec.group].append(rec)
    return {g: recs for g, recs in parts.items() if recs}


def partition_indices(ds: GroupedDataset) -> dict[str, np.ndarray]:
    """Like :func:`partition` but returns original record indices."""
    return {g: np.flatnonzero(ds.codes == i) for i, g in enumerate(ds.groups) if np.any(ds.codes == i)}


DEFAULT_SCHEMA = {"group": "group", "label": "label", "score": "score"}


def load_csv(path, schema: Mapping | None = None) -> GroupedDataset:
    """Read a grouped dataset from a header-bearing CSV file.

    ``schema`` maps the roles ``group``, ``label``, ``score`` and ``features``
    to column names. Without an explicit ``features`` entry every ``f<i>``
    column is taken, ordered by ``i``. Row numbers in errors count data rows
    from 1 (the header is row 0).
    """
    schema = {**DEFAULT_SCHEMA, **(schema or {})}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyFile(str(path)) from None
        header = [h.strip() for h in header]
        if not any(header):
            raise EmptyFile(str(path))
        col = {name: i for i, name in enumerate(header)}
        for role in ("group", "label"):
            if schema[role] not in col:
                raise MissingColumn(schema[role])
        score_col = col.get(schema["score"]) if schema.get("score") else None
        if "features" in schema and schema["features"] is not None:
            feat_names = list(schema["features"])
            for name in feat_names:
                if name not in col:
                    raise MissingColumn(name)
        else:
            numbered = sorted((int(m.group(1)), h) for h in header if (m := _FEATURE_RE.match(h)))
            for expect, (idx, h) in enumerate(numbered):
                if idx != expect:
                    raise MissingColumn(f"f{expect}")
            feat_names = [h for _, h in numbered]
        feat_cols = [col[h] for h in feat_names]
        used = {schema["group"], schema["label"], *feat_names}
        if score_col is not None:
            used.add(schema["score"])
        extra = [h for h in header if h not in used]
        if extra:
            log.warning("ignoring unrecognized columns: %s", ", ".join(extra))

        gi, li = col[schema["group"]], col[schema["label"]]
        groups, labels, feats, scores = [], [], [], []
        for row_no, row in enumerate(reader, start=1):
            if not row:
                continue
            if len(row) != len(header):
                raise RaggedRow(row_no)
            groups.append(row[gi])
            lab = row[li].strip()
            if lab not in ("0", "1"):
                raise BadLabel(row_no, lab)
            labels.append(int(lab))
            vec = []
            for c, name in zip(feat_cols, feat_names):
                vec.append(_finite(row[c], row_no, name))
            feats.append(vec)
            if score_col is not None:
                raw = row[score_col].strip()
                if raw == "":
                    scores.append(math.nan)
                else:
                    s = _finite(raw, row_no, schema["score"])
                    if not 0.0 <= s <= 1.0:
                        raise BadScore(row_no, raw)
                    scores.append(s)
    n = len(groups)
    return GroupedDataset.from_arrays(
        groups,
        np.array(labels, dtype=np.int8),
        np.array(feats, dtype=float).reshape(n, len(feat_cols)),
        np.array(scores, dtype=float) if score_col is not None else None,
    )


def _finite(raw: str, row: int, column: str) -> float:
    try:
        v = float(raw)
    except ValueError:
        raise NonFiniteValue(row, column) from None
    if not math.isfinite(v):
        raise NonFiniteValue(row, column)
    return v


def fmt17(x: float) -> str:
    return format(float(x), ".17g")


def write_csv(ds: GroupedDataset, path) -> None:
    """Write ``ds`` back out with 17 significant digits (bit-exact round trip)."""
    header = ["group", "label"]
    if ds.scores is not None:
        header.append("score")
    header += [f"f{i}" for i in range(ds.dim)]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in range(ds.n):
            row = [ds.groups[ds.codes[r]], str(int(ds.labels[r]))]
            if ds.scores is not None:
                s = ds.scores[r]
                row.append("" if math.isnan(s) else fmt17(s))
            row += [fmt17(v) for v in ds.features[r]]
            w.writerow(row)
