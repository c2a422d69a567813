"""CART decision tree with exact greedy Gini splits.

Candidate thresholds sit at midpoints of consecutive distinct sorted
feature values; ties on impurity decrease break to the lowest feature
index, then the lowest threshold. Growth stops on purity,
min_samples_split, or when no split yields positive gain.
"""

from dataclasses import dataclass

import numpy as np

from .. import _kernels
from ..errors import EmptyNode, ShapeMismatch


def gini(counts):
    """1 - sum((c/total)^2) over class counts."""
    counts = np.asarray(counts, dtype=np.float64)
    total = counts.sum()
    if total <= 0:
        raise EmptyNode("gini of an empty node is undefined")
    p = counts / total
    return float(1.0 - np.sum(p ** 2))


@dataclass
class TreeNode:
    # Leaf fields
    class_counts: np.ndarray = None
    predicted_index: int = None
    # Split fields
    feature_index: int = None
    threshold: float = None
    left: "TreeNode" = None
    right: "TreeNode" = None
    # Bookkeeping for feature importance
    n_samples: int = 0
    impurity_decrease: float = 0.0

    @property
    def is_leaf(self):
        return self.feature_index is None


def _check_xy(X, y):
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise ShapeMismatch(f"X {X.shape} vs y {y.shape}")
    if X.shape[0] < 1:
        raise ShapeMismatch("need at least one row")
    return X, y


def _grow(X, y, n_classes, depth, max_depth, min_samples_split, rng,
          feature_subsample):
    counts = np.bincount(y, minlength=n_classes)
    node = TreeNode(class_counts=counts,
                    predicted_index=int(np.argmax(counts)),
                    n_samples=len(y))
    pure = np.max(counts) == len(y)
    if pure or len(y) < min_samples_split or \
            (max_depth is not None and depth >= max_depth):
        return node

    d = X.shape[1]
    if feature_subsample is not None and feature_subsample < d:
        candidates = np.sort(rng.choice(d, size=feature_subsample,
                                        replace=False))
    else:
        candidates = np.arange(d)

    best = (-1.0, None, None)  # (gain, feature, threshold)
    for j in candidates:
        thr, gain = _kernels.best_gini_split(X[:, j], y, n_classes)
        if gain > best[0] + 1e-15:
            best = (gain, int(j), float(thr))
    gain, feature, threshold = best
    if feature is None or gain <= 0.0:
        return node

    mask = X[:, feature] <= threshold
    node.feature_index = feature
    node.threshold = threshold
    node.impurity_decrease = gain
    node.left = _grow(X[mask], y[mask], n_classes, depth + 1, max_depth,
                      min_samples_split, rng, feature_subsample)
    node.right = _grow(X[~mask], y[~mask], n_classes, depth + 1, max_depth,
                       min_samples_split, rng, feature_subsample)
    return node


def train_decision_tree(X, y, n_classes=None, max_depth=None,
                        min_samples_split=2, seed=42, feature_subsample=None,
                        rng=None):
    """Grow a CART tree. feature_subsample (per-split random subset size)
    is only used by the forest; plain trees consider every feature."""
    X, y = _check_xy(X, y)
    if n_classes is None:
        n_classes = int(y.max()) + 1
    if rng is None:
        rng = np.random.default_rng(seed)
    return _grow(X, y, n_classes, 0, max_depth, min_samples_split, rng,
                 feature_subsample)


def predict_tree(node, X):
    X = np.asarray(X, dtype=np.float64)
    out = np.empty(X.shape[0], dtype=np.int64)
    _predict_into(node, X, np.arange(X.shape[0]), out)
    return out


def _predict_into(node, X, idx, out):
    if node.is_leaf:
        out[idx] = node.predicted_index
        return
    mask = X[idx, node.feature_index] <= node.threshold
    _predict_into(node.left, X, idx[mask], out)
    _predict_into(node.right, X, idx[~mask], out)


def tree_importances(node, d):
    """Unnormalized importance per feature: sum over splits of
    (node fraction * impurity decrease)."""
    imp = np.zeros(d)
    total = node.n_samples

    def walk(n):
        if n.is_leaf:
            return
        imp[n.feature_index] += (n.n_samples / total) * n.impurity_decrease
        walk(n.left)
        walk(n.right)

    walk(node)
    return imp
