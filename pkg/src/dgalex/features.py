"""Lexical features of domain names and min-max normalization.

Every domain is reduced to eight numbers: its length, how many distinct
letters/digits it uses, and the letter/digit densities. Counting of unique
and ratio features is restricted to ASCII ``a-z`` and ``0-9``; any other
character (hyphens, punycode dashes, stray punctuation) contributes to the
length only.
"""

from __future__ import annotations

import csv
import string
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Sequence

import numpy as np

from .corpus import DomainCorpus
from .errors import DataError, FeatureMismatchError

# Canonical feature order used in files, reports, and matrices.
FEATURE_NAMES = (
    "len",
    "uniq_chars",
    "uniq_letters",
    "uniq_numbers",
    "ratio_letters",
    "ratio_numbers",
    "ratio_uniq_letters",
    "ratio_uniq_numbers",
)
LABEL_COLUMN = "class"

_LETTERS = frozenset(string.ascii_lowercase)
_DIGITS = frozenset(string.digits)


@dataclass(frozen=True)
class FeatureVector:
    length: int
    uniq_chars: int
    uniq_letters: int
    uniq_numbers: int
    ratio_letters: float
    ratio_numbers: float
    ratio_uniq_letters: float
    ratio_uniq_numbers: float

    def as_tuple(self) -> tuple[float, ...]:
        """Values in canonical `FEATURE_NAMES` order."""
        return (
            self.length,
            self.uniq_chars,
            self.uniq_letters,
            self.uniq_numbers,
            self.ratio_letters,
            self.ratio_numbers,
            self.ratio_uniq_letters,
            self.ratio_uniq_numbers,
        )

    def as_array(self) -> np.ndarray:
        return np.array(self.as_tuple(), dtype=np.float64)


def extract_features(domain: str) -> FeatureVector:
    """Compute the eight lexical features for one domain label.

    The input is trimmed and lowercased; an empty result raises ValueError.
    """
    name = domain.strip().lower()
    if not name:
        raise ValueError("empty domain")
    length = len(name)
    n_letters = 0
    n_digits = 0
    letters: set[str] = set()
    digits: set[str] = set()
    for ch in name:
        if ch in _LETTERS:
            n_letters += 1
            letters.add(ch)
        elif ch in _DIGITS:
            n_digits += 1
            digits.add(ch)
    uniq_letters = len(letters)
    uniq_numbers = len(digits)
    uniq_chars = uniq_letters + uniq_numbers
    return FeatureVector(
        length=length,
        uniq_chars=uniq_chars,
        uniq_letters=uniq_letters,
        uniq_numbers=uniq_numbers,
        ratio_letters=n_letters / length,
        ratio_numbers=n_digits / length,
        ratio_uniq_letters=uniq_letters / uniq_chars if uniq_chars else 0.0,
        ratio_uniq_numbers=uniq_numbers / uniq_chars if uniq_chars else 0.0,
    )


@dataclass(frozen=True)
class FeatureMatrix:
    """A feature table: one row per domain, one column per feature name.

    Arrays are marked read-only after construction so matrices can be shared
    across threads freely.
    """

    feature_names: tuple[str, ...]
    X: np.ndarray  # (n_rows, n_features) float64
    y: np.ndarray  # (n_rows,) int64 labels in {0, 1}

    def __post_init__(self) -> None:
        X = np.ascontiguousarray(self.X, dtype=np.float64)
        y = np.ascontiguousarray(self.y, dtype=np.int64)
        if X.ndim != 2 or X.shape[1] != len(self.feature_names):
            raise ValueError(f"X shape {X.shape} does not match {len(self.feature_names)} features")
        if y.shape != (X.shape[0],):
            raise ValueError(f"y shape {y.shape} does not match {X.shape[0]} rows")
        if X.shape[0] == 0:
            raise ValueError("feature matrix must be nonempty")
        X.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    def __len__(self) -> int:
        return self.X.shape[0]

    def column(self, name: str) -> np.ndarray:
        try:
            return self.X[:, self.feature_names.index(name)]
        except ValueError:
            raise FeatureMismatchError(
                f"feature '{name}' not in matrix (has {', '.join(self.feature_names)})"
            ) from None

    def select(self, names: Sequence[str]) -> "FeatureMatrix":
        """Column subset in the given order; labels are carried through."""
        missing = [n for n in names if n not in self.feature_names]
        if missing:
            raise FeatureMismatchError(
                f"features {missing} not in matrix (has {', '.join(self.feature_names)})"
            )
        cols = [self.feature_names.index(n) for n in names]
        return FeatureMatrix(feature_names=tuple(names), X=self.X[:, cols], y=self.y)


def featurize_corpus(corpus: DomainCorpus) -> FeatureMatrix:
    """Extract features for every record, preserving order and labels."""
    if len(corpus) == 0:
        raise DataError(f"{corpus.provenance}: empty corpus, nothing to featurize")
    rows = np.empty((len(corpus), len(FEATURE_NAMES)), dtype=np.float64)
    labels = np.empty(len(corpus), dtype=np.int64)
    for i, rec in enumerate(corpus.records):
        try:
            rows[i] = extract_features(rec.domain).as_tuple()
        except ValueError as exc:
            raise DataError(f"{corpus.provenance}: row {i}: {exc}") from exc
        labels[i] = rec.label
    return FeatureMatrix(feature_names=FEATURE_NAMES, X=rows, y=labels)


@dataclass(frozen=True)
class NormalizationParams:
    """Per-feature (min, max) observed on a fitting matrix."""

    mins: np.ndarray
    maxs: np.ndarray

    def __post_init__(self) -> None:
        mins = np.ascontiguousarray(self.mins, dtype=np.float64)
        maxs = np.ascontiguousarray(self.maxs, dtype=np.float64)
        if mins.shape != maxs.shape or mins.ndim != 1:
            raise ValueError("mins/maxs must be 1-D arrays of equal length")
        if np.any(mins > maxs):
            raise ValueError("min > max in normalization params")
        mins.flags.writeable = False
        maxs.flags.writeable = False
        object.__setattr__(self, "mins", mins)
        object.__setattr__(self, "maxs", maxs)


def fit_normalization(matrix: FeatureMatrix) -> NormalizationParams:
    return NormalizationParams(mins=matrix.X.min(axis=0), maxs=matrix.X.max(axis=0))


def apply_normalization(params: NormalizationParams, values: np.ndarray) -> np.ndarray:
    """Scale rows to [0,1] with (x - min) / (max - min), clamped.

    A constant feature (max == min) maps to 0. Accepts a single vector or a
    2-D block of rows.
    """
    x = np.asarray(values, dtype=np.float64)
    span = params.maxs - params.mins
    safe_span = np.where(span > 0, span, 1.0)
    scaled = (x - params.mins) / safe_span
    scaled = np.where(span > 0, scaled, 0.0)
    return np.clip(scaled, 0.0, 1.0)


def write_features_csv(matrix: FeatureMatrix, dest: str | Path | IO[str]) -> None:
    """Write the canonical features CSV: 8 feature columns plus `class`.

    Integer-valued cells are written as integers so files are byte-stable.
    """
    if tuple(matrix.feature_names) != FEATURE_NAMES:
        raise ValueError("features CSV requires the full canonical feature set")
    own = not hasattr(dest, "write")
    fh = open(dest, "w", encoding="utf-8", newline="") if own else dest
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(list(FEATURE_NAMES) + [LABEL_COLUMN])
        for row, label in zip(matrix.X, matrix.y):
            cells = [repr(int(v)) if float(v).is_integer() else repr(float(v)) for v in row]
            writer.writerow(cells + [int(label)])
    finally:
        if own:
            fh.close()


def read_features_csv(source: str | Path | IO[str]) -> FeatureMatrix:
    """Read a features CSV produced by `write_features_csv`."""
    own = not hasattr(source, "read")
    name = str(source) if own else getattr(source, "name", "<stream>")
    fh = open(source, encoding="utf-8", newline="") if own else source
    try:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{name}: empty file") from None
        expected = list(FEATURE_NAMES) + [LABEL_COLUMN]
        if header != expected:
            raise DataError(f"{name}: bad header {header}, expected {expected}")
        rows: list[list[float]] = []
        labels: list[int] = []
        for cells in reader:
            if not cells:
                continue
            if len(cells) != len(expected):
                raise DataError(f"{name}: line {reader.line_num}: expected {len(expected)} cells")
            try:
                rows.append([float(c) for c in cells[:-1]])
                labels.append(int(cells[-1]))
            except ValueError as exc:
                raise DataError(f"{name}: line {reader.line_num}: {exc}") from exc
        if not rows:
            raise DataError(f"{name}: no data rows")
        return FeatureMatrix(feature_names=FEATURE_NAMES,
                             X=np.array(rows, dtype=np.float64),
                             y=np.array(labels, dtype=np.int64))
    finally:
        if own:
            fh.close()
