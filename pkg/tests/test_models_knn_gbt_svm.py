import numpy as np
import pytest

from chitin.errors import ShapeMismatch
from chitin.models import (predict_gbt, predict_gbt_proba, predict_knn,
                           predict_svm, svm_decision, train_gbt, train_knn,
                           train_svm_rbf)
from chitin.models.gbt import gbt_scores

from oracles import NaiveGbtOracle, knn_oracle, svm_dual_qp


def two_blobs(rng, n_per=20, d=2, sep=4.0):
    X = np.vstack([rng.normal(-sep / 2, 0.5, size=(n_per, d)),
                   rng.normal(sep / 2, 0.5, size=(n_per, d))])
    y = np.repeat([0, 1], n_per)
    return X, y


class TestKnn:
    def test_k1_self_query(self, rng):
        X = rng.normal(size=(20, 3))
        y = rng.integers(0, 4, size=20)
        model = train_knn(X, y, k=1)
        np.testing.assert_array_equal(predict_knn(model, X), y)

    @pytest.mark.parametrize("k", [1, 3, 5])
    def test_matches_exhaustive_oracle(self, rng, k):
        X = rng.uniform(-1, 1, size=(100, 2))
        y = rng.integers(0, 3, size=100)
        model = train_knn(X, y, k=k)
        queries = rng.uniform(-1, 1, size=(40, 2))
        pred = predict_knn(model, queries)
        expected = [knn_oracle(X, y, q, k, 3) for q in queries]
        np.testing.assert_array_equal(pred, expected)

    def test_default_k_is_five(self, rng):
        X = rng.normal(size=(30, 2))
        y = rng.integers(0, 2, size=30)
        model = train_knn(X, y)
        assert model.k == 5

    def test_label_permutation_equivariance(self, rng):
        X = rng.normal(size=(50, 3))
        y = rng.integers(0, 3, size=50)
        perm = np.array([1, 2, 0])
        queries = rng.normal(size=(20, 3))
        p1 = predict_knn(train_knn(X, y, k=3), queries)
        p2 = predict_knn(train_knn(X, perm[y], k=3), queries)
        np.testing.assert_array_equal(perm[p1], p2)

    def test_k_bounds(self, rng):
        X = rng.normal(size=(4, 2))
        y = np.zeros(4, dtype=int)
        with pytest.raises(ValueError):
            train_knn(X, y, k=5)

    def test_query_width_mismatch(self, rng):
        model = train_knn(rng.normal(size=(10, 3)),
                          rng.integers(0, 2, size=10), k=1)
        with pytest.raises(ShapeMismatch):
            predict_knn(model, rng.normal(size=(2, 4)))

    def test_single_class(self, rng):
        X = rng.normal(size=(10, 2))
        model = train_knn(X, np.ones(10, dtype=int), k=3, n_classes=2)
        np.testing.assert_array_equal(
            predict_knn(model, rng.normal(size=(5, 2))), 1)


class TestGbt:
    def test_probabilities_sum_to_one(self, rng):
        X = rng.normal(size=(30, 3))
        y = rng.integers(0, 3, size=30)
        model = train_gbt(X, y, rounds=5)
        p = predict_gbt_proba(model, rng.normal(size=(12, 3)))
        np.testing.assert_allclose(p.sum(axis=1), 1.0, atol=1e-9)

    def test_zero_rounds_uniform(self, rng):
        X = rng.normal(size=(10, 2))
        y = rng.integers(0, 2, size=10)
        model = train_gbt(X, y, rounds=0)
        p = predict_gbt_proba(model, X)
        np.testing.assert_allclose(p, 0.5)
        np.testing.assert_array_equal(predict_gbt(model, X), 0)

    def test_separable_reaches_perfect_accuracy(self, rng):
        X, y = two_blobs(rng)
        model = train_gbt(X, y, rounds=20)
        assert (predict_gbt(model, X) == y).mean() == 1.0

    def test_agrees_with_naive_reference(self, rng):
        X, y = two_blobs(rng, n_per=12)
        model = train_gbt(X, y, rounds=5)
        oracle_pred = NaiveGbtOracle(rounds=5).fit_predict(X, y, 2)
        np.testing.assert_array_equal(predict_gbt(model, X), oracle_pred)
        assert (oracle_pred == y).all()

    def test_training_loss_non_increasing(self, rng):
        X = rng.normal(size=(40, 3))
        y = rng.integers(0, 3, size=40)
        losses = []
        for rounds in range(0, 16, 3):
            model = train_gbt(X, y, rounds=rounds)
            p = predict_gbt_proba(model, X)
            losses.append(-np.mean(np.log(p[np.arange(len(y)), y] + 1e-15)))
        assert all(b <= a + 1e-12 for a, b in zip(losses, losses[1:]))

    def test_single_class_rejected(self, rng):
        with pytest.raises(ShapeMismatch):
            train_gbt(rng.normal(size=(5, 2)), np.zeros(5, dtype=int))

    def test_deterministic(self, rng):
        X = rng.normal(size=(25, 3))
        y = rng.integers(0, 2, size=25)
        s1 = gbt_scores(train_gbt(X, y, rounds=8), X)
        s2 = gbt_scores(train_gbt(X, y, rounds=8), X)
        np.testing.assert_array_equal(s1, s2)


class TestSvm:
    def test_gamma_scale_formula(self):
        rng = np.random.default_rng(0)
        X = rng.normal(size=(200, 80))
        X = (X - X.mean(axis=0)) / X.std(axis=0)
        y = rng.integers(0, 2, size=200)
        model = train_svm_rbf(X, y, max_passes=1)
        assert model.gamma == pytest.approx(1.0 / (80 * X.var()))
        assert model.gamma == pytest.approx(0.0125, rel=1e-12)

    def test_kernel_diagonal_is_one(self, rng):
        from chitin.models.svm import rbf_kernel
        X = rng.normal(size=(5, 3))
        K = rbf_kernel(X, X, gamma=0.7)
        np.testing.assert_allclose(np.diag(K), 1.0, atol=1e-12)

    def test_two_blobs_perfect_training_accuracy(self, rng):
        X, y = two_blobs(rng)
        model = train_svm_rbf(X, y)
        assert model.converged
        assert (predict_svm(model, X) == y).mean() == 1.0

    def test_dual_box_constraints(self, rng):
        X, y = two_blobs(rng, n_per=15)
        C = 1.0
        model = train_svm_rbf(X, y, C=C)
        for m in model.machines:
            alphas = np.abs(m.dual_coef)
            assert np.all(alphas >= -1e-12)
            assert np.all(alphas <= C + 1e-12)

    def test_matches_qp_oracle_decisions(self, rng):
        X, y = two_blobs(rng, n_per=15)
        y_signed = np.where(y == 1, 1.0, -1.0)
        model = train_svm_rbf(X, y)
        _, _, decision = svm_dual_qp(X, y_signed, C=1.0, gamma=model.gamma)
        oracle_pred = (decision(X) > 0).astype(int)
        np.testing.assert_array_equal(oracle_pred, y)
        np.testing.assert_array_equal(predict_svm(model, X), y)

    def test_multiclass_blobs(self, rng):
        centers = np.array([[0, 6], [-5, -3], [5, -3]])
        X = np.vstack([rng.normal(c, 0.6, size=(15, 2)) for c in centers])
        y = np.repeat([0, 1, 2], 15)
        model = train_svm_rbf(X, y)
        assert (predict_svm(model, X) == y).mean() >= 0.95
        assert svm_decision(model, X).shape == (45, 3)

    def test_deterministic(self, rng):
        X, y = two_blobs(rng)
        m1 = train_svm_rbf(X, y, seed=9)
        m2 = train_svm_rbf(X, y, seed=9)
        np.testing.assert_array_equal(svm_decision(m1, X), svm_decision(m2, X))
