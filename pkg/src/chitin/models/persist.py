"""JSON persistence for trained models.

Layout: {schema_version, family, label_encoding, standardizer,
mfcc_config, payload}. Floats rely on repr round-tripping, so loaded
models predict bit-identically.
"""

import json
import os
from dataclasses import dataclass

import numpy as np

from . import forest as forest_mod
from . import gbt as gbt_mod
from . import knn as knn_mod
from . import svm as svm_mod
from .labels import LabelEncoding
from .tree import TreeNode
from ..errors import SchemaViolation, VersionMismatch
from ..features import MfccConfig, Standardizer

MODEL_SCHEMA_VERSION = 1

FAMILIES = ("decision_tree", "random_forest", "knn", "gbt", "svm_rbf")


@dataclass
class ModelArtifact:
    family: str
    payload: object
    label_encoding: LabelEncoding
    standardizer: Standardizer = None
    mfcc_config: MfccConfig = None
    schema_version: int = MODEL_SCHEMA_VERSION

    def predict(self, X):
        X = np.asarray(X, dtype=np.float64)
        if self.standardizer is not None:
            X = self.standardizer.transform(X)
        return predict_with(self.family, self.payload, X)

    def predict_labels(self, X):
        return self.label_encoding.decode(self.predict(X))


def predict_with(family, payload, X):
    if family == "decision_tree":
        from .tree import predict_tree
        return predict_tree(payload, X)
    if family == "random_forest":
        return forest_mod.predict_forest(payload, X)
    if family == "knn":
        return knn_mod.predict_knn(payload, X)
    if family == "gbt":
        return gbt_mod.predict_gbt(payload, X)
    if family == "svm_rbf":
        return svm_mod.predict_svm(payload, X)
    raise SchemaViolation(f"unknown model family {family}")


def _tree_to_doc(node):
    if node.is_leaf:
        return {"counts": node.class_counts.tolist(),
                "pred": node.predicted_index,
                "n": node.n_samples}
    return {"feature": node.feature_index, "threshold": node.threshold,
            "n": node.n_samples, "gain": node.impurity_decrease,
            "left": _tree_to_doc(node.left), "right": _tree_to_doc(node.right)}


def _tree_from_doc(doc):
    if "counts" in doc:
        return TreeNode(class_counts=np.array(doc["counts"], dtype=np.int64),
                        predicted_index=doc["pred"], n_samples=doc["n"])
    return TreeNode(feature_index=doc["feature"], threshold=doc["threshold"],
                    n_samples=doc["n"], impurity_decrease=doc["gain"],
                    left=_tree_from_doc(doc["left"]),
                    right=_tree_from_doc(doc["right"]))


def _reg_to_doc(node):
    if node.is_leaf:
        return {"w": node.weight}
    return {"feature": node.feature_index, "threshold": node.threshold,
            "left": _reg_to_doc(node.left), "right": _reg_to_doc(node.right)}


def _reg_from_doc(doc):
    if "w" in doc:
        return gbt_mod.RegNode(weight=doc["w"])
    return gbt_mod.RegNode(feature_index=doc["feature"],
                           threshold=doc["threshold"],
                           left=_reg_from_doc(doc["left"]),
                           right=_reg_from_doc(doc["right"]))


def _payload_to_doc(family, p):
    if family == "decision_tree":
        return {"tree": _tree_to_doc(p)}
    if family == "random_forest":
        return {"trees": [_tree_to_doc(t) for t in p.trees],
                "n_estimators": p.n_estimators, "base_seed": p.base_seed,
                "n_classes": p.n_classes, "n_features": p.n_features}
    if family == "knn":
        return {"X": p.X_train.tolist(), "y": p.y_train.tolist(),
                "k": p.k, "n_classes": p.n_classes}
    if family == "gbt":
        return {"ensembles": [[_reg_to_doc(t) for t in r]
                              for r in p.ensembles],
                "n_classes": p.n_classes, "learning_rate": p.learning_rate,
                "rounds": p.rounds, "max_depth": p.max_depth,
                "l2_lambda": p.l2_lambda}
    if family == "svm_rbf":
        return {"machines": [{"sv": m.support_vectors.tolist(),
                              "coef": m.dual_coef.tolist(),
                              "bias": m.bias, "converged": m.converged}
                             for m in p.machines],
                "gamma": p.gamma, "C": p.C, "n_classes": p.n_classes,
                "converged": p.converged,
                "n_features": int(p.machines[0].support_vectors.shape[1])
                if p.machines else 0}
    raise SchemaViolation(f"unknown model family {family}")


def _payload_from_doc(family, doc):
    if family == "decision_tree":
        return _tree_from_doc(doc["tree"])
    if family == "random_forest":
        return forest_mod.ForestModel(
            trees=[_tree_from_doc(t) for t in doc["trees"]],
            n_estimators=doc["n_estimators"], base_seed=doc["base_seed"],
            n_classes=doc["n_classes"], n_features=doc["n_features"])
    if family == "knn":
        return knn_mod.KnnModel(
            X_train=np.array(doc["X"], dtype=np.float64),
            y_train=np.array(doc["y"], dtype=np.int64),
            k=doc["k"], n_classes=doc["n_classes"])
    if family == "gbt":
        return gbt_mod.GbtModel(
            ensembles=[[_reg_from_doc(t) for t in r]
                       for r in doc["ensembles"]],
            n_classes=doc["n_classes"], learning_rate=doc["learning_rate"],
            rounds=doc["rounds"], max_depth=doc["max_depth"],
            l2_lambda=doc["l2_lambda"])
    if family == "svm_rbf":
        width = doc.get("n_features", 0)
        return svm_mod.SvmModel(
            machines=[svm_mod.BinarySvm(
                support_vectors=np.array(m["sv"], dtype=np.float64)
                .reshape(-1, width),
                dual_coef=np.array(m["coef"], dtype=np.float64),
                bias=m["bias"], converged=m["converged"])
                for m in doc["machines"]],
            gamma=doc["gamma"], C=doc["C"], n_classes=doc["n_classes"],
            converged=doc["converged"])
    raise SchemaViolation(f"unknown model family {family}")


def save_model(artifact, path):
    doc = {
        "schema_version": artifact.schema_version,
        "family": artifact.family,
        "label_encoding": list(artifact.label_encoding.names),
        "standardizer": None if artifact.standardizer is None else {
            "mean": artifact.standardizer.mean.tolist(),
            "std": artifact.standardizer.std.tolist(),
        },
        "mfcc_config": None if artifact.mfcc_config is None else {
            "n_mfcc": artifact.mfcc_config.n_mfcc,
            "n_fft": artifact.mfcc_config.n_fft,
            "hop": artifact.mfcc_config.hop,
            "n_mels": artifact.mfcc_config.n_mels,
            "fmin": artifact.mfcc_config.fmin,
            "fmax": artifact.mfcc_config.fmax,
            "stats": list(artifact.mfcc_config.stats),
        },
        "payload": _payload_to_doc(artifact.family, artifact.payload),
    }
    tmp = f"{path}.tmp"
    with open(tmp, "w") as f:
        json.dump(doc, f)
    os.replace(tmp, path)


def load_model(path):
    with open(path) as f:
        doc = json.load(f)
    try:
        if doc["schema_version"] != MODEL_SCHEMA_VERSION:
            raise VersionMismatch(
                f"unknown model schema_version {doc['schema_version']}"
            )
        family = doc["family"]
        standardizer = None
        if doc["standardizer"] is not None:
            standardizer = Standardizer(
                mean=np.array(doc["standardizer"]["mean"]),
                std=np.array(doc["standardizer"]["std"]),
            )
        cfg = None
        if doc["mfcc_config"] is not None:
            c = doc["mfcc_config"]
            cfg = MfccConfig(n_mfcc=c["n_mfcc"], n_fft=c["n_fft"],
                             hop=c["hop"], n_mels=c["n_mels"],
                             fmin=c["fmin"], fmax=c["fmax"],
                             stats=tuple(c["stats"]))
        return ModelArtifact(
            family=family,
            payload=_payload_from_doc(family, doc["payload"]),
            label_encoding=LabelEncoding(names=tuple(doc["label_encoding"])),
            standardizer=standardizer,
            mfcc_config=cfg,
            schema_version=doc["schema_version"],
        )
    except KeyError as e:
        raise SchemaViolation(f"{path}: malformed model file ({e})") from e
