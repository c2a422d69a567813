"""K-nearest neighbors with Euclidean distance.

Distance ties break to the lower training-row index; vote ties break to
the smaller summed distance among tied classes, then the lower class
index.
"""

from dataclasses import dataclass

import numpy as np

from .. import _kernels
from ..errors import ShapeMismatch


@dataclass
class KnnModel:
    X_train: np.ndarray
    y_train: np.ndarray
    k: int = 5
    n_classes: int = 0


def train_knn(X, y, k=5, n_classes=None):
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.shape[0] != y.shape[0]:
        raise ShapeMismatch(f"X {X.shape} vs y {y.shape}")
    if not 1 <= k <= X.shape[0]:
        raise ValueError(f"need 1 <= k <= n_train, got k={k}, n={X.shape[0]}")
    if n_classes is None:
        n_classes = int(y.max()) + 1
    return KnnModel(X_train=X, y_train=y, k=k, n_classes=n_classes)


def predict_knn(model, X):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.X_train.shape[1]:
        raise ShapeMismatch(
            f"query width {X.shape} vs train {model.X_train.shape}"
        )
    dists = _kernels.pairwise_sq_dists(X, model.X_train)
    out = np.empty(X.shape[0], dtype=np.int64)
    for i in range(X.shape[0]):
        order = np.argsort(dists[i], kind="stable")[:model.k]
        votes = np.bincount(model.y_train[order], minlength=model.n_classes)
        top = votes.max()
        tied = np.nonzero(votes == top)[0]
        if len(tied) == 1:
            out[i] = tied[0]
        else:
            sums = np.array([
                dists[i][order][model.y_train[order] == c].sum()
                for c in tied
            ])
            out[i] = tied[np.argmin(sums)]  # then lowest class index
    return out
