"""Feature ranking and fusion.

Three independent rankers score all features: point-biserial correlation
with the class, mutual information against the class (in bits, after
discretization), and the training accuracy of a one-feature rule. Each
ranking is cut into a top tier at its largest relative score gap; features
appearing in enough top tiers form the selected subset.
"""

from __future__ import annotations

import itertools
import math
from bisect import bisect_left
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import DataError, NoConsensusError
from .features import FeatureMatrix

METHODS = ("correlation", "info_gain", "one_r")

_EXHAUSTIVE_LIMIT = 20  # 2^20 subsets is the most the exhaustive search will try


class Correlation(NamedTuple):
    r: float
    degenerate: bool  # True when either column is constant (r defined as 0)


def _pearson(x: np.ndarray, y: np.ndarray) -> Correlation:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    sx = float(x.std())
    sy = float(y.std())
    if sx == 0.0 or sy == 0.0:
        return Correlation(0.0, True)
    r = float(((x - x.mean()) * (y - y.mean())).mean() / (sx * sy))
    return Correlation(min(1.0, max(-1.0, r)), False)


def pearson_class_correlation(matrix: FeatureMatrix, feature: str) -> Correlation:
    """Pearson r between a feature column and the 0/1 labels (point-biserial).

    A constant column yields r = 0 with the degenerate flag set.
    """
    if len(matrix) < 2:
        raise ValueError("correlation needs at least 2 rows")
    return _pearson(matrix.column(feature), matrix.y)


@dataclass(frozen=True)
class CfsMerit:
    """Subset quality: high class correlation, low mutual redundancy."""

    subset: tuple[str, ...]
    merit: float
    k: int
    avg_rcf: float
    avg_rff: float


def merit_from_correlations(k: int, avg_rcf: float, avg_rff: float) -> float:
    """k*rcf / sqrt(k + k(k-1)*rff) — the subset merit for averaged |r| values."""
    if k < 1:
        raise ValueError("subset size must be >= 1")
    return (k * avg_rcf) / math.sqrt(k + k * (k - 1) * avg_rff)


def cfs_merit(matrix: FeatureMatrix, subset: Sequence[str]) -> CfsMerit:
    """Merit of a feature subset from absolute Pearson correlations."""
    names = tuple(subset)
    if not names:
        raise ValueError("empty feature subset")
    k = len(names)
    rcf = [abs(pearson_class_correlation(matrix, f).r) for f in names]
    avg_rcf = sum(rcf) / k
    if k == 1:
        avg_rff = 0.0
    else:
        pair_r = [
            abs(_pearson(matrix.column(a), matrix.column(b)).r)
            for a, b in itertools.combinations(names, 2)
        ]
        avg_rff = sum(pair_r) / len(pair_r)
    return CfsMerit(subset=names, merit=merit_from_correlations(k, avg_rcf, avg_rff),
                    k=k, avg_rcf=avg_rcf, avg_rff=avg_rff)


@dataclass(frozen=True)
class CfsSearchResult:
    best: CfsMerit
    correlations: dict[str, float]  # |r| with the class, per feature
    degenerate: frozenset[str]      # constant feature columns


def cfs_search(matrix: FeatureMatrix) -> CfsSearchResult:
    """Evaluate every nonempty feature subset and return the best by merit.

    Ties go to the lexicographically smaller subset. Correlations are
    computed once and reused, so the 2^n - 1 evaluations stay cheap.
    """
    names = matrix.feature_names
    if len(names) > _EXHAUSTIVE_LIMIT:
        raise ValueError(f"exhaustive search is limited to {_EXHAUSTIVE_LIMIT} features")
    class_r: dict[str, float] = {}
    degenerate = set()
    for f in names:
        r, is_degenerate = pearson_class_correlation(matrix, f)
        class_r[f] = abs(r)
        if is_degenerate:
            degenerate.add(f)
    pair_r = {
        frozenset((a, b)): abs(_pearson(matrix.column(a), matrix.column(b)).r)
        for a, b in itertools.combinations(names, 2)
    }

    best: CfsMerit | None = None
    best_key: tuple[str, ...] | None = None
    for k in range(1, len(names) + 1):
        for combo in itertools.combinations(names, k):
            avg_rcf = sum(class_r[f] for f in combo) / k
            if k == 1:
                avg_rff = 0.0
            else:
                pairs = list(itertools.combinations(combo, 2))
                avg_rff = sum(pair_r[frozenset(p)] for p in pairs) / len(pairs)
            merit = merit_from_correlations(k, avg_rcf, avg_rff)
            key = tuple(sorted(combo))
            if best is None or merit > best.merit or (merit == best.merit and key < best_key):
                best = CfsMerit(subset=combo, merit=merit, k=k, avg_rcf=avg_rcf, avg_rff=avg_rff)
                best_key = key
    assert best is not None
    return CfsSearchResult(best=best, correlations=class_r, degenerate=frozenset(degenerate))


@dataclass(frozen=True)
class DiscretizationSpec:
    """Per-feature binning: integer-valued columns keep their values, ratio
    columns get equal-frequency bins with learned cut points."""

    bin_count: int
    strategies: tuple[str, ...]            # "identity" | "equal_frequency"
    cuts: tuple[tuple[float, ...], ...]    # strictly increasing; empty for identity

    @classmethod
    def fit(cls, matrix: FeatureMatrix, bin_count: int = 10) -> "DiscretizationSpec":
        if bin_count < 2:
            raise ValueError("bin_count must be >= 2")
        strategies: list[str] = []
        cuts: list[tuple[float, ...]] = []
        for j in range(len(matrix.feature_names)):
            col = matrix.X[:, j]
            if np.all(col == np.floor(col)):
                strategies.append("identity")
                cuts.append(())
            else:
                qs = np.quantile(col, [i / bin_count for i in range(1, bin_count)])
                cuts.append(tuple(np.unique(qs).tolist()))
                strategies.append("equal_frequency")
        return cls(bin_count=bin_count, strategies=tuple(strategies), cuts=tuple(cuts))

    def codes(self, feature_idx: int, values: np.ndarray) -> np.ndarray:
        """Map raw values to integer bin codes; total over all reals."""
        values = np.asarray(values, dtype=np.float64)
        if self.strategies[feature_idx] == "identity":
            return values.astype(np.int64)
        return np.searchsorted(np.array(self.cuts[feature_idx]), values, side="right").astype(np.int64)


def discretize(matrix: FeatureMatrix, spec: DiscretizationSpec) -> FeatureMatrix:
    """Integer-coded view of the matrix under a fitted spec."""
    coded = np.column_stack(
        [spec.codes(j, matrix.X[:, j]) for j in range(len(matrix.feature_names))]
    )
    return FeatureMatrix(feature_names=matrix.feature_names, X=coded.astype(np.float64), y=matrix.y)


def information_gain(matrix: FeatureMatrix, feature: str) -> float:
    """Mutual information (bits) between a discrete feature column and the class.

    Uses empirical joint probabilities; zero-probability terms contribute 0.
    """
    y = matrix.y
    if len(np.unique(y)) < 2:
        raise DataError("information gain needs both classes present")
    values = matrix.column(feature)
    _, codes = np.unique(values, return_inverse=True)
    n = len(y)
    n_vals = int(codes.max()) + 1
    joint = np.bincount(codes * 2 + y, minlength=n_vals * 2).reshape(n_vals, 2) / n
    pf = joint.sum(axis=1)
    pc = joint.sum(axis=0)
    mask = joint > 0
    ig = float(np.sum(joint[mask] * np.log2(joint[mask] / np.outer(pf, pc)[mask])))
    return max(0.0, ig)


@dataclass(frozen=True)
class OneRule:
    """A one-feature classifier: ordered value intervals, one class each.

    ``boundaries`` are inclusive upper edges; a value x belongs to the first
    interval whose boundary is >= x, or to the last interval. ``accuracy`` is
    the resubstitution accuracy on the training rows, as a percent.
    """

    feature: str
    boundaries: tuple[float, ...]
    classes: tuple[int, ...]
    accuracy: float

    def predict_value(self, x: float) -> int:
        return self.classes[bisect_left(self.boundaries, x)]

    def predict(self, values: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(np.array(self.boundaries), np.asarray(values, dtype=np.float64),
                              side="left")
        return np.array(self.classes, dtype=np.int64)[idx]


def one_r(matrix: FeatureMatrix, feature: str, min_bucket: int = 6,
          bin_count: int = 10) -> OneRule:
    """Fit the single best rule for one feature.

    Rows are grouped by feature value (ratio features first pass through
    equal-frequency binning), undersized groups are merged into their right
    neighbor until every bucket holds at least ``min_bucket`` rows, each
    bucket takes its majority class (ties toward class 0), and adjacent
    same-class buckets collapse.
    """
    if min_bucket < 1:
        raise ValueError("min_bucket must be >= 1")
    values = matrix.column(feature)
    y = matrix.y
    feature_idx = matrix.feature_names.index(feature)
    spec = DiscretizationSpec.fit(matrix, bin_count)
    codes = spec.codes(feature_idx, values)

    order = np.argsort(codes, kind="stable")
    uniq_codes, starts = np.unique(codes[order], return_index=True)
    bounds = list(starts) + [len(codes)]
    # per distinct code: class counts and the raw-value range it covers
    groups = []
    for g in range(len(uniq_codes)):
        rows = order[bounds[g]:bounds[g + 1]]
        vals = values[rows]
        pos = int(y[rows].sum())
        groups.append([len(rows) - pos, pos, float(vals.min()), float(vals.max())])

    # merge undersized buckets into the next one; a small trailing bucket
    # folds back into its predecessor
    merged: list[list[float]] = []
    acc = None
    for g in groups:
        if acc is None:
            acc = list(g)
        else:
            acc = [acc[0] + g[0], acc[1] + g[1], acc[2], g[3]]
        if acc[0] + acc[1] >= min_bucket:
            merged.append(acc)
            acc = None
    if acc is not None:
        if merged:
            last = merged.pop()
            merged.append([last[0] + acc[0], last[1] + acc[1], last[2], acc[3]])
        else:
            merged.append(acc)

    correct = sum(max(neg, pos) for neg, pos, _, _ in merged)
    bucket_classes = [1 if pos > neg else 0 for neg, pos, _, _ in merged]

    # collapse adjacent buckets that predict the same class
    final: list[tuple[int, float, float]] = []  # (class, lo, hi)
    for cls, (neg, pos, lo, hi) in zip(bucket_classes, merged):
        if final and final[-1][0] == cls:
            final[-1] = (cls, final[-1][1], hi)
        else:
            final.append((cls, lo, hi))
    boundaries = tuple(
        (final[i][2] + final[i + 1][1]) / 2.0 for i in range(len(final) - 1)
    )
    return OneRule(
        feature=feature,
        boundaries=boundaries,
        classes=tuple(cls for cls, _, _ in final),
        accuracy=100.0 * correct / len(y),
    )


@dataclass(frozen=True)
class FeatureRanking:
    """One method's scores over all features, sorted, with a top-tier cut."""

    method: str
    scores: dict[str, float]
    order: tuple[str, ...]
    top_tier: tuple[str, ...]


def _largest_gap_cut(ordered_scores: Sequence[float]) -> int:
    """Index i such that the tier is ordered[:i+1]; the cut sits before the
    largest relative drop (score_i - score_{i+1}) / score_i."""
    best_i = 0
    best_gap = -1.0
    for i in range(len(ordered_scores) - 1):
        s = ordered_scores[i]
        gap = (s - ordered_scores[i + 1]) / s if s > 0 else 0.0
        if gap > best_gap:
            best_gap = gap
            best_i = i
    return best_i


def rank_features(matrix: FeatureMatrix, method: str, *, bin_count: int = 10,
                  min_bucket: int = 6) -> FeatureRanking:
    """Score every feature with one method and cut the descending ranking at
    the largest relative gap. Ties in score break lexicographically."""
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}, expected one of {METHODS}")
    names = matrix.feature_names
    if method == "correlation":
        scores = {f: abs(pearson_class_correlation(matrix, f).r) for f in names}
    elif method == "info_gain":
        disc = discretize(matrix, DiscretizationSpec.fit(matrix, bin_count))
        scores = {f: information_gain(disc, f) for f in names}
    else:
        scores = {f: one_r(matrix, f, min_bucket, bin_count).accuracy for f in names}
    order = tuple(sorted(names, key=lambda f: (-scores[f], f)))
    cut = _largest_gap_cut([scores[f] for f in order])
    return FeatureRanking(method=method, scores=scores, order=order,
                          top_tier=order[: cut + 1])


@dataclass(frozen=True)
class SelectedFeatureSet:
    """Fusion outcome: the features whose top-tier votes met the threshold."""

    features: tuple[str, ...]
    votes: dict[str, int]
    policy: str


def ensemble_select(rankings: Iterable[FeatureRanking], threshold: int = 2) -> SelectedFeatureSet:
    """Select the features present in at least ``threshold`` top tiers.

    Expects exactly one ranking per method. An empty consensus raises
    NoConsensusError (retry with a lower threshold).
    """
    rankings = list(rankings)
    methods = [r.method for r in rankings]
    if sorted(methods) != sorted(METHODS):
        raise ValueError(f"need exactly one ranking per method {METHODS}, got {methods}")
    canonical = rankings[0].order
    votes = {
        f: sum(f in r.top_tier for r in rankings)
        for f in sorted(rankings[0].scores)
    }
    selected = tuple(f for f in sorted(canonical) if votes[f] >= threshold)
    # keep the matrix's column order for stable manifests
    selected = tuple(f for f in rankings[0].scores if f in selected)
    if not selected:
        raise NoConsensusError(
            f"no feature reached {threshold} of {len(rankings)} top-tier votes; "
            "retry with a lower threshold"
        )
    return SelectedFeatureSet(
        features=selected,
        votes=votes,
        policy=f"top-tier vote >= {threshold} of {len(rankings)}",
    )
