"""Binary decision tree with numeric thresholds, split by gain ratio.

Candidate thresholds are midpoints between consecutive distinct sorted
values of a column. Growth stops on purity, the min-leaf floor, the depth
cap, or when no candidate has positive information gain. All loops are
iterative so deep trees cannot hit the recursion limit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np

_EPS = 1e-12


@dataclass
class TreeNode:
    """Internal node (feature column, threshold, children) or leaf (label, purity)."""

    feature: Optional[int] = None
    threshold: Optional[float] = None
    left: Optional["TreeNode"] = None
    right: Optional["TreeNode"] = None
    label: Optional[int] = None
    purity: Optional[float] = None

    @property
    def is_leaf(self) -> bool:
        return self.label is not None


def _entropy_counts(pos: np.ndarray, total: np.ndarray) -> np.ndarray:
    """Binary entropy in bits from positive counts; 0*log(0) terms are 0."""
    pos = np.asarray(pos, dtype=np.float64)
    total = np.asarray(total, dtype=np.float64)
    p = np.divide(pos, total, out=np.zeros_like(pos), where=total > 0)
    q = 1.0 - p
    h = np.zeros_like(p)
    mask = p > 0
    h[mask] -= p[mask] * np.log2(p[mask])
    mask = q > 0
    h[mask] -= q[mask] * np.log2(q[mask])
    return h


@dataclass(frozen=True)
class Split:
    feature: int
    threshold: float
    gain: float
    gain_ratio: float


def best_split(X: np.ndarray, y: np.ndarray, min_leaf: int) -> Split | None:
    """Highest-gain-ratio (feature, threshold) pair leaving both children
    with >= min_leaf rows, or None. Ties keep the first candidate found
    scanning features in order and thresholds ascending."""
    n = len(y)
    pos_total = int(y.sum())
    parent_h = float(_entropy_counts(np.array([pos_total]), np.array([n]))[0])
    best: Split | None = None
    for j in range(X.shape[1]):
        col = X[:, j]
        order = np.argsort(col, kind="stable")
        cs = col[order]
        ys = y[order]
        change = np.flatnonzero(cs[:-1] != cs[1:])  # split after sorted position i
        if change.size == 0:
            continue
        left_n = change + 1
        ok = (left_n >= min_leaf) & (n - left_n >= min_leaf)
        if not ok.any():
            continue
        change = change[ok]
        left_n = left_n[ok]
        right_n = n - left_n
        left_pos = np.cumsum(ys)[change]
        right_pos = pos_total - left_pos
        wl = left_n / n
        wr = right_n / n
        gains = parent_h - wl * _entropy_counts(left_pos, left_n) - wr * _entropy_counts(
            right_pos, right_n
        )
        split_info = -(wl * np.log2(wl) + wr * np.log2(wr))
        ratios = np.where(gains > _EPS, gains / split_info, -1.0)
        i = int(np.argmax(ratios))
        if ratios[i] <= 0:
            continue
        if best is None or ratios[i] > best.gain_ratio:
            thr = float((cs[change[i]] + cs[change[i] + 1]) / 2.0)
            best = Split(feature=j, threshold=thr, gain=float(gains[i]),
                         gain_ratio=float(ratios[i]))
    return best


def _leaf(y: np.ndarray) -> TreeNode:
    pos = int(y.sum())
    neg = len(y) - pos
    label = 1 if pos > neg else 0  # tie goes to class 0
    return TreeNode(label=label, purity=max(pos, neg) / len(y))


def train_tree(X: np.ndarray, y: np.ndarray, *, min_leaf: int = 5,
               max_depth: int | None = None) -> TreeNode:
    """Grow a tree on (X, y); y must be 0/1. A single-class y gives one leaf."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.ndim != 2 or len(X) != len(y):
        raise ValueError("X must be (n, d) with matching y")
    if len(y) == 0:
        raise ValueError("empty training set")
    if min_leaf < 1:
        raise ValueError("min_leaf must be >= 1")

    root = TreeNode()
    stack: list[tuple[TreeNode, np.ndarray, int]] = [(root, np.arange(len(y)), 0)]
    while stack:
        node, idx, depth = stack.pop()
        yy = y[idx]
        pos = int(yy.sum())
        pure = pos == 0 or pos == len(yy)
        if pure or len(yy) < min_leaf or (max_depth is not None and depth >= max_depth):
            leaf = _leaf(yy)
            node.label, node.purity = leaf.label, leaf.purity
            continue
        split = best_split(X[idx], yy, min_leaf)
        if split is None:
            leaf = _leaf(yy)
            node.label, node.purity = leaf.label, leaf.purity
            continue
        node.feature = split.feature
        node.threshold = split.threshold
        node.left = TreeNode()
        node.right = TreeNode()
        goes_left = X[idx, split.feature] <= split.threshold
        stack.append((node.left, idx[goes_left], depth + 1))
        stack.append((node.right, idx[~goes_left], depth + 1))
    return root


def predict_tree(root: TreeNode, x: np.ndarray) -> int:
    node = root
    while not node.is_leaf:
        node = node.left if x[node.feature] <= node.threshold else node.right
    return int(node.label)


def predict_tree_matrix(root: TreeNode, X: np.ndarray) -> np.ndarray:
    """Vectorized prediction: row indices are routed level by level."""
    X = np.asarray(X, dtype=np.float64)
    out = np.empty(len(X), dtype=np.int64)
    stack: list[tuple[TreeNode, np.ndarray]] = [(root, np.arange(len(X)))]
    while stack:
        node, idx = stack.pop()
        if idx.size == 0:
            continue
        if node.is_leaf:
            out[idx] = node.label
            continue
        goes_left = X[idx, node.feature] <= node.threshold
        stack.append((node.left, idx[goes_left]))
        stack.append((node.right, idx[~goes_left]))
    return out


def iter_nodes(root: TreeNode) -> Iterator[TreeNode]:
    """All nodes, parents before children."""
    stack = [root]
    while stack:
        node = stack.pop()
        yield node
        if not node.is_leaf:
            stack.append(node.right)
            stack.append(node.left)


def tree_depth(root: TreeNode) -> int:
    depth = 0
    stack = [(root, 0)]
    while stack:
        node, d = stack.pop()
        depth = max(depth, d)
        if not node.is_leaf:
            stack.append((node.left, d + 1))
            stack.append((node.right, d + 1))
    return depth
