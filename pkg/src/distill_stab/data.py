"""Benchmark dataset loading, preprocessing and the typed feature schema."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from importlib import resources

import numpy as np

__all__ = [
    "FeatureSchema",
    "Dataset",
    "ParseError",
    "SchemaError",
    "DiscretizationError",
    "load_csv",
    "schema_from_json",
    "preprocess_mammographic",
    "quantile_discretize",
    "load_mammographic",
    "load_breast_cancer",
    "MAMMOGRAPHIC_RAW_SCHEMA",
    "BREAST_CANCER_FEATURES",
]


class ParseError(ValueError):
    pass


class SchemaError(ValueError):
    pass


class DiscretizationError(ValueError):
    pass


@dataclass(frozen=True)
class FeatureSchema:
    """Ordered feature columns with per-column kind.

    Kinds: "continuous", "binary", or "onehot:<group-id>" for members of a
    one-hot encoded group (exactly one member is 1 in any row).
    """

    columns: tuple[tuple[str, str], ...]

    @property
    def names(self) -> list[str]:
        return [n for n, _ in self.columns]

    @property
    def kinds(self) -> list[str]:
        return [k for _, k in self.columns]

    def index(self, name: str) -> int:
        for i, (n, _) in enumerate(self.columns):
            if n == name:
                return i
        raise SchemaError(f"unknown column {name!r}")

    def continuous_indices(self) -> list[int]:
        return [i for i, (_, k) in enumerate(self.columns) if k == "continuous"]

    def binary_indices(self) -> list[int]:
        """Binary columns that are not part of a one-hot group."""
        return [i for i, (_, k) in enumerate(self.columns) if k == "binary"]

    def onehot_groups(self) -> dict[str, list[int]]:
        groups: dict[str, list[int]] = {}
        for i, (_, k) in enumerate(self.columns):
            if k.startswith("onehot:"):
                groups.setdefault(k.split(":", 1)[1], []).append(i)
        for gid, members in groups.items():
            if len(members) < 2:
                raise SchemaError(f"one-hot group {gid!r} has fewer than 2 members")
        return groups

    def validate_rows(self, X: np.ndarray) -> None:
        for i in self.binary_indices():
            col = X[:, i]
            if not np.isin(col, (0.0, 1.0)).all():
                name = self.columns[i][0]
                raise SchemaError(f"binary column {name!r} has values outside {{0,1}}")
        for gid, members in self.onehot_groups().items():
            sub = X[:, members]
            if not np.isin(sub, (0.0, 1.0)).all() or not np.all(sub.sum(axis=1) == 1.0):
                raise SchemaError(f"one-hot group {gid!r} violates exactly-one-hot")


@dataclass(frozen=True)
class Dataset:
    """Feature matrix, binary labels and the schema describing the columns."""

    X: np.ndarray
    y: np.ndarray
    schema: FeatureSchema

    def __post_init__(self):
        if self.X.shape[0] != self.y.shape[0]:
            raise ValueError("X and y row counts differ")
        if self.X.ndim != 2 or self.X.shape[1] != len(self.schema.columns):
            raise SchemaError(
                f"X has {self.X.shape[1] if self.X.ndim == 2 else '?'} columns, "
                f"schema expects {len(self.schema.columns)}"
            )
        if not np.isin(self.y, (0, 1)).all():
            raise ValueError("labels must be binary 0/1")

    @property
    def n_rows(self) -> int:
        return self.X.shape[0]


def schema_from_json(path) -> FeatureSchema:
    """Read a schema config: JSON list of [name, kind] pairs."""
    with open(path) as f:
        spec = json.load(f)
    return FeatureSchema(columns=tuple((str(n), str(k)) for n, k in spec))


_MISSING = {"", "?", "na", "nan", "NA", "NaN"}


def load_csv(path, label_column: str, schema: FeatureSchema) -> Dataset:
    """Load a comma-delimited file with header; rows with missing values drop."""
    with open(path, newline="") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        if label_column not in header:
            raise SchemaError(f"label column {label_column!r} not in header")
        for name, _ in schema.columns:
            if name not in header:
                raise SchemaError(f"schema column {name!r} not in header")
        col_pos = [header.index(name) for name, _ in schema.columns]
        label_pos = header.index(label_column)

        rows: list[list[float]] = []
        labels: list[int] = []
        for lineno, raw in enumerate(reader, start=2):
            if not raw:
                continue
            if len(raw) != len(header):
                raise ParseError(f"{path}:{lineno}: expected {len(header)} fields, got {len(raw)}")
            cells = [c.strip() for c in raw]
            if any(cells[p] in _MISSING for p in col_pos + [label_pos]):
                continue
            try:
                rows.append([float(cells[p]) for p in col_pos])
                labels.append(int(float(cells[label_pos])))
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from None
    if not rows:
        raise ParseError(f"{path}: no complete data rows")
    X = np.asarray(rows, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int64)
    return Dataset(X=X, y=y, schema=schema)


MAMMOGRAPHIC_RAW_SCHEMA = FeatureSchema(
    columns=(
        ("BI-RADS", "continuous"),
        ("Age", "continuous"),
        ("Shape", "continuous"),
        ("Margin", "continuous"),
        ("Density", "continuous"),
    )
)

_SHAPE_NAMES = ["RoundShape", "OvalShape", "LobularShape", "IrregularShape"]
_MARGIN_NAMES = [
    "CircumscribedMargin",
    "MicrolobulatedMargin",
    "ObscuredMargin",
    "IllDefinedMargin",
    "SpiculatedMargin",
]
# Age interval columns; Age<30 sits after the other three so that the
# widely used feature numbering (9: 30<Age<45, 10: 45<=Age<60, 11: Age>=60)
# lines up with Shape at 0-3 and Margin at 4-8.
_AGE_NAMES = ["30<Age<45", "45<=Age<60", "Age>=60", "Age<30"]


def preprocess_mammographic(raw: Dataset) -> Dataset:
    """One-hot encode nominal features, binarize density, bucket age.

    Output feature order (0-based indices): Shape one-hot 0-3, Margin
    one-hot 4-8, Age intervals 9-12 (9: 30<Age<45, 10: 45<=Age<60,
    11: Age>=60, 12: Age<30), HighDensity 13, BI-RADS one-hot 14+.
    """
    for name in ("BI-RADS", "Age", "Shape", "Margin", "Density"):
        raw.schema.index(name)

    birads = raw.X[:, raw.schema.index("BI-RADS")]
    age = raw.X[:, raw.schema.index("Age")]
    shape = raw.X[:, raw.schema.index("Shape")].astype(int)
    margin = raw.X[:, raw.schema.index("Margin")].astype(int)
    density = raw.X[:, raw.schema.index("Density")]

    n = raw.n_rows
    cols: list[np.ndarray] = []
    names: list[tuple[str, str]] = []

    for v, name in enumerate(_SHAPE_NAMES, start=1):
        cols.append((shape == v).astype(float))
        names.append((name, "onehot:shape"))
    for v, name in enumerate(_MARGIN_NAMES, start=1):
        cols.append((margin == v).astype(float))
        names.append((name, "onehot:margin"))

    age_bins = [
        (age > 30) & (age < 45),
        (age >= 45) & (age < 60),
        age >= 60,
        age <= 30,
    ]
    # ages of exactly 30 fall in the youngest bucket (cutoffs 30/45/60)
    age_bins[3] = ~(age_bins[0] | age_bins[1] | age_bins[2])
    for mask, name in zip(age_bins, _AGE_NAMES):
        cols.append(mask.astype(float))
        names.append((name, "onehot:age"))

    cols.append((density > 2).astype(float))
    names.append(("HighDensity", "binary"))

    birads_levels = sorted(set(birads.astype(int)))
    # a single observed level cannot form a one-hot group
    birads_kind = "onehot:birads" if len(birads_levels) > 1 else "binary"
    for v in birads_levels:
        cols.append((birads.astype(int) == v).astype(float))
        names.append((f"BI-RADS={v}", birads_kind))

    schema = FeatureSchema(columns=tuple(names))
    X = np.column_stack(cols)
    schema.validate_rows(X)
    return Dataset(X=X, y=raw.y.copy(), schema=schema)


def quantile_discretize(data: Dataset, columns: list[str], bins: int) -> Dataset:
    """Replace continuous columns by one-hot quantile-bin indicators.

    Produces bins - 1 indicator columns per feature (the first bin's
    indicator is dropped), named "<col> 1" .. "<col> <bins-1>".
    """
    if bins < 2:
        raise DiscretizationError(f"bins must be >= 2, got {bins}")
    col_set = set(columns)
    for name in columns:
        i = data.schema.index(name)
        if data.schema.columns[i][1] != "continuous":
            raise SchemaError(f"column {name!r} is not continuous")

    out_cols: list[np.ndarray] = []
    out_names: list[tuple[str, str]] = []
    for i, (name, kind) in enumerate(data.schema.columns):
        col = data.X[:, i]
        if name not in col_set:
            out_cols.append(col)
            out_names.append((name, kind))
            continue
        edges = np.quantile(col, [k / bins for k in range(1, bins)])
        if np.unique(edges).size < bins - 1 or col.min() == col.max():
            raise DiscretizationError(f"column {name!r} has non-distinct quantile edges")
        idx = np.searchsorted(edges, col, side="left")
        for b in range(1, bins):
            out_cols.append((idx == b).astype(float))
            out_names.append((f"{name} {b}", "binary"))
    schema = FeatureSchema(columns=tuple(out_names))
    return Dataset(X=np.column_stack(out_cols), y=data.y.copy(), schema=schema)


def _vendored(name: str):
    return resources.files("distill_stab.datasets").joinpath(name)


def load_mammographic(preprocess: bool = True) -> Dataset:
    """Vendored Mammographic Mass table (961 rows before missing-value drop)."""
    with resources.as_file(_vendored("mammographic.csv")) as p:
        raw = load_csv(p, label_column="Severity", schema=MAMMOGRAPHIC_RAW_SCHEMA)
    return preprocess_mammographic(raw) if preprocess else raw


BREAST_CANCER_FEATURES = None  # resolved lazily from the CSV header


def load_breast_cancer() -> Dataset:
    """Vendored WDBC table: 569 rows, 30 continuous features."""
    with resources.as_file(_vendored("wdbc.csv")) as p:
        with open(p, newline="") as f:
            header = next(csv.reader(f))
        feature_names = [h for h in header if h != "malignant"]
        schema = FeatureSchema(columns=tuple((n, "continuous") for n in feature_names))
        return load_csv(p, label_column="malignant", schema=schema)
