# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: split scans for the tree learners and pairwise
squared distances for KNN / RBF kernels. Contracts match py_ref."""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def best_gini_split(cnp.float64_t[::1] values, cnp.int64_t[::1] labels, int n_classes):
    cdef Py_ssize_t n = values.shape[0]
    cdef cnp.ndarray order = np.argsort(np.asarray(values), kind="stable")
    cdef cnp.float64_t[::1] sv = np.asarray(values)[order]
    cdef cnp.int64_t[::1] sl = np.asarray(labels)[order]

    cdef cnp.float64_t[::1] left = np.zeros(n_classes)
    cdef cnp.float64_t[::1] total = np.zeros(n_classes)
    cdef Py_ssize_t i, c
    for i in range(n):
        total[sl[i]] += 1.0

    cdef double sq_tot = 0.0
    for c in range(n_classes):
        sq_tot += (total[c] / n) * (total[c] / n)
    cdef double gini_parent = 1.0 - sq_tot

    cdef double best_gain = -1.0
    cdef double best_thr = float("nan")
    cdef double nl, nr, sq_l, sq_r, gain
    for i in range(n - 1):
        left[sl[i]] += 1.0
        if sv[i] >= sv[i + 1]:
            continue
        nl = i + 1.0
        nr = n - nl
        sq_l = 0.0
        sq_r = 0.0
        for c in range(n_classes):
            sq_l += (left[c] / nl) * (left[c] / nl)
            sq_r += ((total[c] - left[c]) / nr) * ((total[c] - left[c]) / nr)
        gain = gini_parent - (nl / n) * (1.0 - sq_l) - (nr / n) * (1.0 - sq_r)
        if gain > best_gain:
            best_gain = gain
            best_thr = 0.5 * (sv[i] + sv[i + 1])
    if best_gain < 0.0:
        return float("nan"), -1.0
    return best_thr, best_gain


def best_grad_split(cnp.float64_t[::1] values, cnp.float64_t[::1] grad,
                    cnp.float64_t[::1] hess, double lam):
    cdef Py_ssize_t n = values.shape[0]
    cdef cnp.ndarray order = np.argsort(np.asarray(values), kind="stable")
    cdef cnp.float64_t[::1] sv = np.asarray(values)[order]
    cdef cnp.float64_t[::1] sg = np.asarray(grad)[order]
    cdef cnp.float64_t[::1] sh = np.asarray(hess)[order]

    cdef double g_tot = 0.0, h_tot = 0.0
    cdef Py_ssize_t i
    for i in range(n):
        g_tot += sg[i]
        h_tot += sh[i]

    cdef double best_gain = -float("inf")
    cdef double best_thr = float("nan")
    cdef double gl = 0.0, hl = 0.0, gain
    for i in range(n - 1):
        gl += sg[i]
        hl += sh[i]
        if sv[i] >= sv[i + 1]:
            continue
        gain = 0.5 * (
            gl * gl / (hl + lam)
            + (g_tot - gl) * (g_tot - gl) / (h_tot - hl + lam)
            - g_tot * g_tot / (h_tot + lam)
        )
        if gain > best_gain:
            best_gain = gain
            best_thr = 0.5 * (sv[i] + sv[i + 1])
    return best_thr, best_gain


def pairwise_sq_dists(cnp.float64_t[:, ::1] a, cnp.float64_t[:, ::1] b):
    cdef Py_ssize_t m = a.shape[0], n = b.shape[0], d = a.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((m, n))
    cdef Py_ssize_t i, j, k
    cdef double acc, diff
    for i in range(m):
        for j in range(n):
            acc = 0.0
            for k in range(d):
                diff = a[i, k] - b[j, k]
                acc += diff * diff
            out[i, j] = acc
    return out
