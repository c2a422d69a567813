"""Gradient-boosted trees with a second-order softmax objective.

One regression tree per class per round, fitted to softmax gradients
and hessians. Leaf weight = -G/(H + lambda); split gain is the standard
regularized score difference. Exact greedy splits, deterministic.
"""

from dataclasses import dataclass, field

import numpy as np

from .. import _kernels
from ..errors import ShapeMismatch


@dataclass
class RegNode:
    weight: float = 0.0
    feature_index: int = None
    threshold: float = None
    left: "RegNode" = None
    right: "RegNode" = None

    @property
    def is_leaf(self):
        return self.feature_index is None


@dataclass
class GbtModel:
    ensembles: list = field(default_factory=list)  # [round][class] -> RegNode
    n_classes: int = 0
    learning_rate: float = 0.3
    rounds: int = 100
    max_depth: int = 6
    l2_lambda: float = 1.0


def _grow_reg(X, g, h, lam, depth, max_depth):
    node = RegNode(weight=-g.sum() / (h.sum() + lam))
    if depth >= max_depth or X.shape[0] < 2:
        return node
    best = (0.0, None, None)
    for j in range(X.shape[1]):
        thr, gain = _kernels.best_grad_split(X[:, j], g, h, lam)
        if np.isfinite(gain) and gain > best[0] + 1e-15:
            best = (gain, int(j), float(thr))
    gain, feature, threshold = best
    if feature is None:
        return node
    mask = X[:, feature] <= threshold
    node.feature_index = feature
    node.threshold = threshold
    node.left = _grow_reg(X[mask], g[mask], h[mask], lam, depth + 1, max_depth)
    node.right = _grow_reg(X[~mask], g[~mask], h[~mask], lam, depth + 1,
                           max_depth)
    return node


def _predict_reg(node, X):
    out = np.empty(X.shape[0])
    stack = [(node, np.arange(X.shape[0]))]
    while stack:
        n, idx = stack.pop()
        if n.is_leaf:
            out[idx] = n.weight
            continue
        mask = X[idx, n.feature_index] <= n.threshold
        stack.append((n.left, idx[mask]))
        stack.append((n.right, idx[~mask]))
    return out


def _softmax(scores):
    z = scores - scores.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def train_gbt(X, y, rounds=100, learning_rate=0.3, max_depth=6, l2_lambda=1.0,
              n_classes=None):
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.shape[0] != y.shape[0]:
        raise ShapeMismatch(f"X {X.shape} vs y {y.shape}")
    if n_classes is None:
        n_classes = int(y.max()) + 1
    if n_classes < 2:
        raise ShapeMismatch("softmax boosting needs >= 2 classes")
    n = X.shape[0]
    onehot = np.zeros((n, n_classes))
    onehot[np.arange(n), y] = 1.0
    scores = np.zeros((n, n_classes))
    ensembles = []
    for _ in range(rounds):
        p = _softmax(scores)
        grad = p - onehot
        hess = p * (1.0 - p)
        round_trees = []
        for c in range(n_classes):
            t = _grow_reg(X, grad[:, c], hess[:, c], l2_lambda, 0, max_depth)
            round_trees.append(t)
            scores[:, c] += learning_rate * _predict_reg(t, X)
        ensembles.append(round_trees)
    return GbtModel(ensembles=ensembles, n_classes=n_classes,
                    learning_rate=learning_rate, rounds=rounds,
                    max_depth=max_depth, l2_lambda=l2_lambda)


def gbt_scores(model, X):
    X = np.asarray(X, dtype=np.float64)
    scores = np.zeros((X.shape[0], model.n_classes))
    for round_trees in model.ensembles:
        for c, t in enumerate(round_trees):
            scores[:, c] += model.learning_rate * _predict_reg(t, X)
    return scores


def predict_gbt_proba(model, X):
    return _softmax(gbt_scores(model, X))


def predict_gbt(model, X):
    return np.argmax(predict_gbt_proba(model, X), axis=1)
