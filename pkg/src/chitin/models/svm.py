"""RBF-kernel SVM trained with simplified SMO, one-vs-rest multiclass.

Dual coefficients stay inside [0, C] by construction; sum(alpha_i y_i)
is preserved at 0 by the pairwise updates. Hitting the sweep cap flags
the machine as non-converged but still returns it.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from .. import _kernels
from ..errors import ShapeMismatch


@dataclass
class BinarySvm:
    support_vectors: np.ndarray
    dual_coef: np.ndarray  # alpha_i * y_i for support vectors
    bias: float
    converged: bool = True


@dataclass
class SvmModel:
    machines: list = field(default_factory=list)  # one per class
    gamma: float = 0.0
    C: float = 1.0
    n_classes: int = 0
    converged: bool = True


def rbf_kernel(a, b, gamma):
    return np.exp(-gamma * _kernels.pairwise_sq_dists(a, b))


def _smo_binary(K, y, C, tol, max_passes, rng):
    """Simplified SMO on a precomputed kernel matrix; y in {-1, +1}."""
    n = len(y)
    alpha = np.zeros(n)
    b = 0.0
    for _ in range(max_passes):
        changed = 0
        for i in range(n):
            e_i = float((alpha * y) @ K[:, i] + b - y[i])
            if (y[i] * e_i < -tol and alpha[i] < C) or \
                    (y[i] * e_i > tol and alpha[i] > 0):
                j = int(rng.integers(0, n - 1))
                if j >= i:
                    j += 1
                e_j = float((alpha * y) @ K[:, j] + b - y[j])
                a_i_old, a_j_old = alpha[i], alpha[j]
                if y[i] != y[j]:
                    lo = max(0.0, a_j_old - a_i_old)
                    hi = min(C, C + a_j_old - a_i_old)
                else:
                    lo = max(0.0, a_i_old + a_j_old - C)
                    hi = min(C, a_i_old + a_j_old)
                if lo >= hi:
                    continue
                eta = 2.0 * K[i, j] - K[i, i] - K[j, j]
                if eta >= 0:
                    continue
                a_j = a_j_old - y[j] * (e_i - e_j) / eta
                a_j = min(hi, max(lo, a_j))
                if abs(a_j - a_j_old) < 1e-5:
                    continue
                a_i = a_i_old + y[i] * y[j] * (a_j_old - a_j)
                alpha[i], alpha[j] = a_i, a_j
                b1 = b - e_i - y[i] * (a_i - a_i_old) * K[i, i] \
                    - y[j] * (a_j - a_j_old) * K[i, j]
                b2 = b - e_j - y[i] * (a_i - a_i_old) * K[i, j] \
                    - y[j] * (a_j - a_j_old) * K[j, j]
                if 0 < a_i < C:
                    b = b1
                elif 0 < a_j < C:
                    b = b2
                else:
                    b = 0.5 * (b1 + b2)
                changed += 1
        if changed == 0:
            return alpha, b, True
    return alpha, b, False


def train_svm_rbf(X, y, C=1.0, gamma="scale", tol=1e-3, max_passes=200,
                  seed=42, n_classes=None):
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.shape[0] != y.shape[0]:
        raise ShapeMismatch(f"X {X.shape} vs y {y.shape}")
    if n_classes is None:
        n_classes = int(y.max()) + 1
    if n_classes < 2:
        raise ShapeMismatch("one-vs-rest needs >= 2 classes")
    if gamma == "scale":
        var = X.var()
        gamma = 1.0 / (X.shape[1] * var) if var > 0 else 1.0
    K = rbf_kernel(X, X, gamma)
    machines = []
    all_converged = True
    for c in range(n_classes):
        y_bin = np.where(y == c, 1.0, -1.0)
        rng = np.random.default_rng([seed, c])
        alpha, b, converged = _smo_binary(K, y_bin, C, tol, max_passes, rng)
        if not converged:
            all_converged = False
            warnings.warn(f"SVM machine for class {c} hit the sweep cap")
        sv = alpha > 1e-12
        machines.append(BinarySvm(
            support_vectors=X[sv].copy(),
            dual_coef=(alpha * y_bin)[sv],
            bias=b,
            converged=converged,
        ))
    return SvmModel(machines=machines, gamma=gamma, C=C,
                    n_classes=n_classes, converged=all_converged)


def svm_decision(model, X):
    X = np.asarray(X, dtype=np.float64)
    if model.machines and X.shape[1] != \
            model.machines[0].support_vectors.shape[1]:
        raise ShapeMismatch("query width does not match support vectors")
    scores = np.zeros((X.shape[0], model.n_classes))
    for c, m in enumerate(model.machines):
        if len(m.support_vectors):
            k = rbf_kernel(X, m.support_vectors, model.gamma)
            scores[:, c] = k @ m.dual_coef + m.bias
        else:
            scores[:, c] = m.bias
    return scores


def predict_svm(model, X):
    return np.argmax(svm_decision(model, X), axis=1)
