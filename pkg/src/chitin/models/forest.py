"""Random forest: bagged CART trees with per-split feature subsets.

Tree t draws its bootstrap and feature subsets from a stream seeded by
(base_seed, t), so results are independent of training order or thread
count. Prediction is a majority vote, ties to the lowest class index.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import tree as tree_mod
from ..errors import ShapeMismatch, UntrainedModel


@dataclass
class ForestModel:
    trees: list = field(default_factory=list)
    n_estimators: int = 100
    base_seed: int = 42
    n_classes: int = 0
    n_features: int = 0


def train_random_forest(X, y, n_estimators=100, base_seed=42, n_classes=None,
                        max_depth=None, bootstrap=True):
    """bootstrap=False is a test hook collapsing the ensemble to plain
    CART trees on the full data."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.shape[0] != y.shape[0]:
        raise ShapeMismatch(f"X {X.shape} vs y {y.shape}")
    if n_classes is None:
        n_classes = int(y.max()) + 1
    n, d = X.shape
    subsample = math.ceil(math.sqrt(d))
    trees = []
    for t in range(n_estimators):
        rng = np.random.default_rng([base_seed, t])
        if bootstrap:
            idx = rng.integers(0, n, size=n)
        else:
            idx = np.arange(n)
        trees.append(tree_mod.train_decision_tree(
            X[idx], y[idx], n_classes=n_classes, max_depth=max_depth,
            feature_subsample=subsample, rng=rng,
        ))
    return ForestModel(trees=trees, n_estimators=n_estimators,
                       base_seed=base_seed, n_classes=n_classes,
                       n_features=d)


def predict_forest(model, X):
    X = np.asarray(X, dtype=np.float64)
    votes = np.zeros((X.shape[0], model.n_classes), dtype=np.int64)
    for t in model.trees:
        pred = tree_mod.predict_tree(t, X)
        votes[np.arange(X.shape[0]), pred] += 1
    return np.argmax(votes, axis=1)  # ties -> lowest class index


def feature_importance(model, d=None):
    """Mean per-tree Gini importance, normalized to sum 1."""
    if not model.trees:
        raise UntrainedModel("forest has no trees")
    d = d or model.n_features
    imp = np.zeros(d)
    for t in model.trees:
        imp += tree_mod.tree_importances(t, d)
    imp /= len(model.trees)
    total = imp.sum()
    if total > 0:
        imp = imp / total
    return imp
