"""Pure-numpy reference implementations of the hot kernels.

Used when the compiled extension is unavailable (or disabled with
CHITIN_NO_EXT=1). Same contracts as chitin._kernels._core.
"""

import numpy as np


def best_gini_split(values, labels, n_classes):
    """Exact greedy Gini split scan over one feature column.

    Candidate thresholds are midpoints of consecutive distinct sorted
    values. Returns (threshold, gain) where gain is the decrease in
    weighted Gini impurity, or (nan, -1.0) when no valid split exists.
    Ties on gain resolve to the lowest threshold.
    """
    n = values.shape[0]
    order = np.argsort(values, kind="stable")
    sv = values[order]
    sl = labels[order]

    onehot = np.zeros((n, n_classes))
    onehot[np.arange(n), sl] = 1.0
    left = np.cumsum(onehot, axis=0)          # counts with split after row i
    total = left[-1]

    boundary = sv[:-1] < sv[1:]               # distinct consecutive values
    if not np.any(boundary):
        return np.nan, -1.0

    idx = np.nonzero(boundary)[0]
    nl = (idx + 1).astype(float)
    nr = n - nl
    cl = left[idx]
    cr = total[None, :] - cl

    gini_parent = 1.0 - np.sum((total / n) ** 2)
    gini_l = 1.0 - np.sum((cl / nl[:, None]) ** 2, axis=1)
    gini_r = 1.0 - np.sum((cr / nr[:, None]) ** 2, axis=1)
    gains = gini_parent - (nl / n) * gini_l - (nr / n) * gini_r

    best = int(np.argmax(gains))              # first max → lowest threshold
    i = idx[best]
    return 0.5 * (sv[i] + sv[i + 1]), float(gains[best])


def best_grad_split(values, grad, hess, lam):
    """Second-order split scan: maximize the standard gradient/hessian
    split score with L2 regularization lam. Returns (threshold, gain)
    or (nan, -inf) when no boundary exists.
    """
    n = values.shape[0]
    order = np.argsort(values, kind="stable")
    sv = values[order]
    gl = np.cumsum(grad[order])
    hl = np.cumsum(hess[order])
    g_tot, h_tot = gl[-1], hl[-1]

    boundary = sv[:-1] < sv[1:]
    if not np.any(boundary):
        return np.nan, -np.inf

    idx = np.nonzero(boundary)[0]
    g_left, h_left = gl[idx], hl[idx]
    g_right, h_right = g_tot - g_left, h_tot - h_left
    gains = 0.5 * (
        g_left ** 2 / (h_left + lam)
        + g_right ** 2 / (h_right + lam)
        - g_tot ** 2 / (h_tot + lam)
    )
    best = int(np.argmax(gains))
    i = idx[best]
    return 0.5 * (sv[i] + sv[i + 1]), float(gains[best])


def pairwise_sq_dists(a, b):
    """Squared Euclidean distances between rows of a and rows of b."""
    d = (
        np.sum(a ** 2, axis=1)[:, None]
        + np.sum(b ** 2, axis=1)[None, :]
        - 2.0 * (a @ b.T)
    )
    return np.maximum(d, 0.0)
