import math

import numpy as np
import pytest

from chitin._kernels import (BACKEND, best_gini_split, best_grad_split,
                             pairwise_sq_dists, py_ref)

from oracles import brute_force_best_split

try:
    from chitin._kernels import _core
    HAVE_EXT = True
except ImportError:
    HAVE_EXT = False

needs_ext = pytest.mark.skipif(not HAVE_EXT,
                               reason="compiled extension unavailable")


def test_backend_reported():
    assert BACKEND in ("cython", "python")


class TestPythonReference:
    def test_gini_split_matches_brute_force(self, rng):
        for _ in range(20):
            n = int(rng.integers(2, 40))
            values = rng.normal(size=n)
            labels = rng.integers(0, 3, size=n)
            threshold, gain = best_gini_split(values, labels, 3,
                                              impl=py_ref)
            exp_gain, feat, exp_thr = brute_force_best_split(
                values.reshape(-1, 1), labels, 3)
            if feat is None:
                assert gain <= 1e-15 or math.isnan(threshold)
            else:
                assert gain == pytest.approx(exp_gain)
                assert threshold == pytest.approx(exp_thr)

    def test_gini_split_no_boundary(self):
        threshold, gain = best_gini_split(np.ones(4),
                                          np.array([0, 1, 0, 1]), 2,
                                          impl=py_ref)
        assert math.isnan(threshold)
        assert gain == -1.0

    def test_gini_split_tie_lowest_threshold(self):
        # symmetric pattern: splits at 0.5 and 2.5 have equal gain
        values = np.array([0.0, 1.0, 2.0, 3.0])
        labels = np.array([0, 1, 1, 0])
        threshold, _ = best_gini_split(values, labels, 2, impl=py_ref)
        assert threshold == 0.5

    def test_grad_split_positive_example(self):
        values = np.array([0.0, 1.0, 2.0, 3.0])
        grad = np.array([-1.0, -1.0, 1.0, 1.0])
        hess = np.full(4, 0.25)
        threshold, gain = best_grad_split(values, grad, hess, 1.0,
                                          impl=py_ref)
        assert threshold == 1.5
        # closed form: 0.5 * (4/1.5 + 4/1.5 - 0/2)
        assert gain == pytest.approx(0.5 * (4 / 1.5 + 4 / 1.5))

    def test_grad_split_brute_force(self, rng):
        for _ in range(10):
            n = int(rng.integers(2, 30))
            values = rng.normal(size=n)
            grad = rng.normal(size=n)
            hess = rng.uniform(0.01, 1.0, size=n)
            lam = 1.0
            threshold, gain = best_grad_split(values, grad, hess, lam,
                                              impl=py_ref)
            G, H = grad.sum(), hess.sum()
            parent = G * G / (H + lam)
            order = np.argsort(values, kind="stable")
            sv, sg, sh = values[order], grad[order], hess[order]
            best = (-np.inf, None)
            for i in range(n - 1):
                if sv[i] >= sv[i + 1]:
                    continue
                GL, HL = sg[: i + 1].sum(), sh[: i + 1].sum()
                GR, HR = G - GL, H - HL
                g = 0.5 * (GL * GL / (HL + lam) + GR * GR / (HR + lam)
                           - parent)
                if g > best[0] + 1e-15:
                    best = (g, 0.5 * (sv[i] + sv[i + 1]))
            if best[1] is None:
                assert math.isnan(threshold)
            else:
                assert gain == pytest.approx(best[0])
                assert threshold == pytest.approx(best[1])

    def test_pairwise_dists_nonnegative_and_exact(self, rng):
        a = rng.normal(size=(15, 4))
        b = rng.normal(size=(9, 4))
        D = pairwise_sq_dists(a, b, impl=py_ref)
        assert D.shape == (15, 9)
        assert np.all(D >= 0)
        loops = np.array([[np.sum((x - y) ** 2) for y in b] for x in a])
        np.testing.assert_allclose(D, loops, atol=1e-10)


@needs_ext
class TestBackendEquivalence:
    def test_gini_split(self, rng):
        for _ in range(30):
            n = int(rng.integers(2, 60))
            values = rng.choice([-1.0, 0.0, 0.5, 2.0, 3.5], size=n)
            labels = rng.integers(0, 4, size=n)
            ref_thr, ref_gain = best_gini_split(values, labels, 4,
                                                impl=py_ref)
            ext_thr, ext_gain = best_gini_split(values, labels, 4,
                                                impl=_core)
            assert ext_gain == pytest.approx(ref_gain, abs=1e-12)
            if math.isnan(ref_thr):
                assert math.isnan(ext_thr)
            else:
                assert ext_thr == pytest.approx(ref_thr, abs=1e-12)

    def test_grad_split(self, rng):
        for _ in range(30):
            n = int(rng.integers(2, 60))
            values = rng.normal(size=n)
            grad = rng.normal(size=n)
            hess = rng.uniform(0.01, 1.0, size=n)
            ref_thr, ref_gain = best_grad_split(values, grad, hess, 1.0,
                                                impl=py_ref)
            ext_thr, ext_gain = best_grad_split(values, grad, hess, 1.0,
                                                impl=_core)
            if math.isnan(ref_thr):
                assert math.isnan(ext_thr)
            else:
                assert ext_gain == pytest.approx(ref_gain, rel=1e-9,
                                                 abs=1e-12)
                assert ext_thr == pytest.approx(ref_thr, abs=1e-12)

    def test_pairwise_dists(self, rng):
        a = rng.normal(size=(20, 6))
        b = rng.normal(size=(13, 6))
        ref = pairwise_sq_dists(a, b, impl=py_ref)
        ext = pairwise_sq_dists(a, b, impl=_core)
        np.testing.assert_allclose(ext, ref, atol=1e-10)
