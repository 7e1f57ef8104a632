"""Loading, interaction construction and validation of the analysis table."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import FrozenSet, Iterable, Optional, Sequence, Tuple

import numpy as np

from .exceptions import ColumnNotFound, DataFileError, InvalidInput, TooFewRows
from .linalg import as_matrix, center_columns, make_context

MISSING_TOKENS = frozenset({"", "na", "nan"})
INTERACTION_SEP = "×"


@dataclass(frozen=True, eq=False)
class Dataset:
    """Centered, validated response, explanatory variable and covariates.

    ``s_raw`` keeps the covariates as they were before centering, which is
    what interaction products are built from.
    """

    y: np.ndarray
    x: np.ndarray
    s: np.ndarray
    labels: Tuple[str, ...]
    s_raw: np.ndarray = field(repr=False)
    y_label: str = "y"
    x_label: str = "x"
    provenance: dict = field(default_factory=dict, compare=False)

    @property
    def n(self) -> int:
        return self.y.shape[0]

    @property
    def p(self) -> int:
        return self.s.shape[1]

    @classmethod
    def from_arrays(cls, y, x, s=None, labels: Optional[Sequence[str]] = None,
                    y_label: str = "y", x_label: str = "x", provenance: Optional[dict] = None) -> "Dataset":
        y = np.asarray(y, dtype=float).ravel()
        x = np.asarray(x, dtype=float).ravel()
        n = y.shape[0]
        if x.shape[0] != n:
            raise InvalidInput(f"x has {x.shape[0]} rows, y has {n}")
        s_raw = np.empty((n, 0)) if s is None else as_matrix(s, n).copy()
        if labels is None:
            labels = [f"s{i + 1}" for i in range(s_raw.shape[1])]
        labels = tuple(str(lab) for lab in labels)
        if len(labels) != s_raw.shape[1]:
            raise InvalidInput(f"{len(labels)} labels for {s_raw.shape[1]} covariate columns")
        if n == 0:
            raise TooFewRows("no rows")
        if not (np.all(np.isfinite(y)) and np.all(np.isfinite(x)) and np.all(np.isfinite(s_raw))):
            raise InvalidInput("non-finite values in data")
        ds = cls(
            y=center_columns(y),
            x=center_columns(x),
            s=center_columns(s_raw) if s_raw.shape[1] else s_raw.copy(),
            labels=labels,
            s_raw=s_raw,
            y_label=y_label,
            x_label=x_label,
            provenance=dict(provenance or {}),
        )
        ds.validate()
        for arr in (ds.y, ds.x, ds.s, ds.s_raw):
            arr.flags.writeable = False
        return ds

    def validate(self) -> None:
        """Raise unless there are enough rows and ``[x | s | y]`` has full column rank."""
        if self.n <= self.p + 1:
            raise TooFewRows(f"{self.n} rows cannot support {self.p} covariates (need more than {self.p + 1})")
        joint = np.column_stack([self.x, self.s, self.y])
        make_context(joint, labels=[self.x_label, *self.labels, self.y_label])

    def label_subset(self, subset: Iterable[int]) -> list:
        return [self.labels[i] for i in subset]


@dataclass(frozen=True)
class InteractionSpec:
    base_labels: Tuple[str, ...] = ()
    excluded_pairs: FrozenSet[FrozenSet[str]] = frozenset()

    def __init__(self, base_labels: Sequence[str] = (), excluded_pairs: Iterable[Sequence[str]] = ()):
        base = tuple(base_labels)
        pairs = frozenset(frozenset(pair) for pair in excluded_pairs)
        for pair in pairs:
            unknown = [lab for lab in pair if lab not in base]
            if unknown or len(pair) != 2:
                raise InvalidInput(f"excluded pair {sorted(pair)} must name two distinct base labels")
        object.__setattr__(self, "base_labels", base)
        object.__setattr__(self, "excluded_pairs", pairs)

    def pairs(self):
        for a, b in combinations(self.base_labels, 2):
            if frozenset((a, b)) not in self.excluded_pairs:
                yield a, b


def build_interactions(d: Dataset, spec: InteractionSpec) -> Dataset:
    """Append products of pairs of base covariates, taken before centering.

    Products are labelled ``"A×B"`` and centered along with everything else.
    """
    if not spec.base_labels:
        return d
    index = {lab: i for i, lab in enumerate(d.labels)}
    for lab in spec.base_labels:
        if lab not in index:
            raise ColumnNotFound(lab)
    new_cols, new_labels = [], []
    for a, b in spec.pairs():
        new_cols.append(d.s_raw[:, index[a]] * d.s_raw[:, index[b]])
        new_labels.append(f"{a}{INTERACTION_SEP}{b}")
    if not new_cols:
        return d
    s_raw = np.column_stack([d.s_raw, *new_cols])
    prov = dict(d.provenance)
    prov["interactions"] = new_labels
    return Dataset.from_arrays(d.y, d.x, s_raw, d.labels + tuple(new_labels),
                               y_label=d.y_label, x_label=d.x_label, provenance=prov)


def _parse(token: str) -> float:
    token = token.strip()
    if token.lower() in MISSING_TOKENS:
        return math.nan
    try:
        return float(token)
    except ValueError:
        return math.nan


def load_csv(path, y_col: str, x_col: str, cov_cols: Optional[Sequence[str]] = None) -> Dataset:
    """Read a comma-separated file with a header row into a :class:`Dataset`.

    ``cov_cols=None`` takes every column other than ``y_col`` and ``x_col``.
    Rows with a missing or non-numeric entry in any selected column are dropped.
    """
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None:
                raise InvalidInput(f"{path}: empty file")
            header = [h.strip() for h in header]
            rows = list(reader)
    except OSError as exc:
        raise DataFileError(f"cannot read {path}: {exc}") from exc

    if cov_cols is None:
        cov_cols = [h for h in header if h not in (y_col, x_col)]
    selected = [y_col, x_col, *cov_cols]
    pos = {}
    for col in selected:
        if col not in header:
            raise ColumnNotFound(col)
        pos.setdefault(col, header.index(col))
    idx = [pos[c] for c in selected]

    values = np.full((len(rows), len(idx)), np.nan)
    for r, row in enumerate(rows):
        if len(row) != len(header):
            continue
        values[r] = [_parse(row[i]) for i in idx]
    keep = np.all(np.isfinite(values), axis=1)
    values = values[keep]
    provenance = {
        "source": str(path),
        "y": y_col,
        "x": x_col,
        "covariates": list(cov_cols),
        "rows_read": len(rows),
        "rows_dropped": int((~keep).sum()),
    }
    if values.shape[0] <= len(cov_cols) + 1:
        raise TooFewRows(f"{values.shape[0]} complete rows left for {len(cov_cols)} covariates")
    return Dataset.from_arrays(values[:, 0], values[:, 1], values[:, 2:], cov_cols,
                               y_label=y_col, x_label=x_col, provenance=provenance)


def write_csv(d: Dataset, path) -> None:
    """Write the centered table back out; reloading it reproduces every value exactly."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow([d.y_label, d.x_label, *d.labels])
        for row in np.column_stack([d.y, d.x, d.s]):
            w.writerow([repr(float(v)) for v in row])
