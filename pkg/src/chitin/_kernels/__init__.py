"""Hot-loop kernels with a compiled core and a pure-numpy fallback.

The compiled extension is preferred when importable; set CHITIN_NO_EXT=1
to force the numpy reference path. `BACKEND` reports which one is live.
"""

import os

import numpy as np

from . import py_ref

if os.environ.get("CHITIN_NO_EXT") == "1":
    _impl = py_ref
    BACKEND = "python"
else:
    try:
        from . import _core as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = py_ref
        BACKEND = "python"


def best_gini_split(values, labels, n_classes, impl=None):
    impl = impl or _impl
    return impl.best_gini_split(
        np.ascontiguousarray(values, dtype=np.float64),
        np.ascontiguousarray(labels, dtype=np.int64),
        int(n_classes),
    )


def best_grad_split(values, grad, hess, lam, impl=None):
    impl = impl or _impl
    return impl.best_grad_split(
        np.ascontiguousarray(values, dtype=np.float64),
        np.ascontiguousarray(grad, dtype=np.float64),
        np.ascontiguousarray(hess, dtype=np.float64),
        float(lam),
    )


def pairwise_sq_dists(a, b, impl=None):
    impl = impl or _impl
    return impl.pairwise_sq_dists(
        np.ascontiguousarray(a, dtype=np.float64),
        np.ascontiguousarray(b, dtype=np.float64),
    )


__all__ = ["BACKEND", "best_gini_split", "best_grad_split",
           "pairwise_sq_dists", "py_ref"]
