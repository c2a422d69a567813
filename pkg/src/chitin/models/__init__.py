from .labels import LabelEncoding, encode_labels
from .tree import TreeNode, gini, predict_tree, train_decision_tree
from .forest import (ForestModel, feature_importance, predict_forest,
                     train_random_forest)
from .knn import KnnModel, predict_knn, train_knn
from .gbt import GbtModel, predict_gbt, predict_gbt_proba, train_gbt
from .svm import SvmModel, predict_svm, svm_decision, train_svm_rbf
from .persist import (FAMILIES, ModelArtifact, load_model, predict_with,
                      save_model)


__all__ = [
    "LabelEncoding", "encode_labels", "TreeNode", "gini", "predict_tree",
    "train_decision_tree", "ForestModel", "feature_importance",
    "predict_forest", "train_random_forest", "KnnModel", "predict_knn",
    "train_knn", "GbtModel", "predict_gbt", "predict_gbt_proba",
    "train_gbt", "SvmModel", "predict_svm", "svm_decision",
    "train_svm_rbf", "FAMILIES", "ModelArtifact", "load_model",
    "predict_with", "save_model", "train_family",
]


def train_family(family, X, y, n_classes, seed=42):
    """Train one of the five families with its default parameters."""
    if family == "decision_tree":
        return train_decision_tree(X, y, n_classes=n_classes, seed=seed)
    if family == "random_forest":
        return train_random_forest(X, y, n_classes=n_classes, base_seed=seed)
    if family == "knn":
        k = min(5, X.shape[0])
        return train_knn(X, y, k=k, n_classes=n_classes)
    if family == "gbt":
        return train_gbt(X, y, n_classes=n_classes)
    if family == "svm_rbf":
        return train_svm_rbf(X, y, n_classes=n_classes, seed=seed)
    raise ValueError(f"unknown model family {family}")
