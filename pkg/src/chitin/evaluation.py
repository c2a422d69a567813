"""Split protocols, classification metrics, model comparison across
leave-one-clip-out conditions, forest feature importance, and the
deterministic 2D PCA embedding used for inspection plots.
"""

from dataclasses import dataclass, field

import numpy as np

from . import models as models_mod
from .errors import (DegenerateData, DegenerateSplit, LengthMismatch,
                     TooFewClips, UntrainedModel)
from .features import fit_standardizer
from .models import encode_labels


# --- split protocols ---

@dataclass(frozen=True)
class RandomSplit:
    train_idx: tuple
    test_idx: tuple
    test_fraction: float
    seed: int


@dataclass(frozen=True)
class Condition:
    condition_id: int
    test_clip_id: int
    train_clip_ids: tuple


@dataclass(frozen=True)
class LeaveOneClipOut:
    conditions: tuple


def random_split(n_rows, test_fraction=0.2, seed=42):
    """Unstratified seeded shuffle; test size = round(n * fraction),
    clamped so neither side is empty."""
    if not 0 < test_fraction < 1:
        raise ValueError("test_fraction must be in (0, 1)")
    if n_rows < 2:
        raise DegenerateSplit("need at least two rows to split")
    n_test = int(round(n_rows * test_fraction))
    n_test = min(max(n_test, 1), n_rows - 1)
    order = np.random.default_rng(seed).permutation(n_rows)
    return RandomSplit(train_idx=tuple(int(i) for i in order[n_test:]),
                       test_idx=tuple(int(i) for i in order[:n_test]),
                       test_fraction=test_fraction, seed=seed)


def build_locv_plan(clip_ids):
    """Condition 1 tests the last clip, then clips 1..n-1 in order, so
    5 clips yield test order (5, 1, 2, 3, 4)."""
    clip_ids = sorted(set(clip_ids))
    if len(clip_ids) < 2:
        raise TooFewClips("leave-one-clip-out needs >= 2 clips")
    order = [clip_ids[-1]] + clip_ids[:-1]
    conditions = tuple(
        Condition(condition_id=i + 1, test_clip_id=test,
                  train_clip_ids=tuple(c for c in clip_ids if c != test))
        for i, test in enumerate(order)
    )
    return LeaveOneClipOut(conditions=conditions)


# --- metrics ---

@dataclass(frozen=True)
class EvaluationReport:
    confusion_matrix: np.ndarray  # rows = true, cols = predicted
    class_names: tuple
    precision: np.ndarray
    recall: np.ndarray
    f1: np.ndarray
    support: np.ndarray
    accuracy: float
    zero_denominator_classes: tuple = ()

    @property
    def macro_precision(self):
        return float(self.precision.mean())

    @property
    def macro_recall(self):
        return float(self.recall.mean())

    @property
    def macro_f1(self):
        return float(self.f1.mean())

    def weighted(self, values):
        total = self.support.sum()
        return float((values * self.support).sum() / total)

    def to_text(self):
        """Aligned plain-text classification report."""
        width = max(12, max(len(n) for n in self.class_names))
        lines = [f"{'':>{width}}  precision  recall  f1-score  support"]
        for i, name in enumerate(self.class_names):
            lines.append(
                f"{name:>{width}}  {self.precision[i]:>9.2f}  "
                f"{self.recall[i]:>6.2f}  {self.f1[i]:>8.2f}  "
                f"{int(self.support[i]):>7d}"
            )
        total = int(self.support.sum())
        lines.append("")
        lines.append(f"{'accuracy':>{width}}  {'':>9}  {'':>6}  "
                     f"{self.accuracy:>8.2f}  {total:>7d}")
        lines.append(f"{'macro avg':>{width}}  {self.macro_precision:>9.2f}  "
                     f"{self.macro_recall:>6.2f}  {self.macro_f1:>8.2f}  "
                     f"{total:>7d}")
        lines.append(f"{'weighted avg':>{width}}  "
                     f"{self.weighted(self.precision):>9.2f}  "
                     f"{self.weighted(self.recall):>6.2f}  "
                     f"{self.weighted(self.f1):>8.2f}  {total:>7d}")
        return "\n".join(lines)

    def to_dict(self):
        return {
            "accuracy": self.accuracy,
            "confusion_matrix": self.confusion_matrix.tolist(),
            "classes": {
                name: {"precision": float(self.precision[i]),
                       "recall": float(self.recall[i]),
                       "f1": float(self.f1[i]),
                       "support": int(self.support[i])}
                for i, name in enumerate(self.class_names)
            },
            "macro": {"precision": self.macro_precision,
                      "recall": self.macro_recall, "f1": self.macro_f1},
            "weighted": {"precision": self.weighted(self.precision),
                         "recall": self.weighted(self.recall),
                         "f1": self.weighted(self.f1)},
            "zero_denominator_classes": list(self.zero_denominator_classes),
        }


def evaluate(predictions, truths, encoding):
    """Confusion matrix and per-class precision/recall/F1.

    Zero-denominator metrics are reported as 0 and the class flagged.
    """
    predictions = np.asarray(predictions, dtype=np.int64)
    truths = np.asarray(truths, dtype=np.int64)
    if predictions.shape != truths.shape or predictions.size < 1:
        raise LengthMismatch(
            f"{predictions.shape} predictions vs {truths.shape} truths"
        )
    k = encoding.n_classes
    cm = np.zeros((k, k), dtype=np.int64)
    np.add.at(cm, (truths, predictions), 1)
    tp = np.diag(cm).astype(float)
    fp = cm.sum(axis=0) - tp
    fn = cm.sum(axis=1) - tp
    flagged = []
    with np.errstate(divide="ignore", invalid="ignore"):
        precision = np.where(tp + fp > 0, tp / (tp + fp), 0.0)
        recall = np.where(tp + fn > 0, tp / (tp + fn), 0.0)
        f1 = np.where(precision + recall > 0,
                      2 * precision * recall / (precision + recall), 0.0)
    for i in range(k):
        if tp[i] + fp[i] == 0 or tp[i] + fn[i] == 0:
            flagged.append(encoding.names[i])
    return EvaluationReport(
        confusion_matrix=cm,
        class_names=encoding.names,
        precision=precision, recall=recall, f1=f1,
        support=cm.sum(axis=1),
        accuracy=float(np.trace(cm) / cm.sum()),
        zero_denominator_classes=tuple(flagged),
    )


# --- condition x model comparison ---

@dataclass
class ComparisonCell:
    family: str
    condition_id: int
    test_clip_id: int
    accuracy: float = None
    report: EvaluationReport = None
    error: str = None


@dataclass
class ComparisonTable:
    cells: list = field(default_factory=list)

    def families(self):
        seen = []
        for c in self.cells:
            if c.family not in seen:
                seen.append(c.family)
        return seen

    def accuracies(self, family):
        return [c.accuracy for c in sorted(
            (c for c in self.cells if c.family == family and c.error is None),
            key=lambda c: c.condition_id)]

    def average(self, family):
        acc = self.accuracies(family)
        return sum(acc) / len(acc) if acc else None

    def to_csv(self):
        lines = ["model,condition,test_clip,accuracy"]
        for c in sorted(self.cells, key=lambda c: (c.family, c.condition_id)):
            value = "error" if c.error is not None else repr(c.accuracy)
            lines.append(f"{c.family},{c.condition_id},{c.test_clip_id},"
                         f"{value}")
        for family in sorted(self.families()):
            avg = self.average(family)
            lines.append(f"{family},average,,"
                         f"{repr(avg) if avg is not None else 'error'}")
        return "\n".join(lines) + "\n"


def compare_on_features(features, families, plan, seed=42,
                        train_pool="both"):
    """Fit/evaluate every (family, condition) cell on a FeatureMatrix.

    Standardization is fitted on each condition's training rows only.
    Test rows are the original (non-augmented) instances of the test
    clip; train_pool selects original/augmented/both for training rows.
    """
    encoding = encode_labels(features.labels)
    y = encoding.encode(features.labels)
    groups = np.array(features.groups)
    augmented = np.array(features.augmented, dtype=bool)
    table = ComparisonTable()
    for cond in plan.conditions:
        train_mask = groups != cond.test_clip_id
        if train_pool == "original":
            train_mask &= ~augmented
        elif train_pool == "augmented":
            train_mask &= augmented
        test_mask = (groups == cond.test_clip_id) & ~augmented
        X_train_raw, y_train = features.X[train_mask], y[train_mask]
        X_test_raw, y_test = features.X[test_mask], y[test_mask]
        std = fit_standardizer(X_train_raw)
        X_train = std.transform(X_train_raw)
        X_test = std.transform(X_test_raw)
        for family in families:
            cell = ComparisonCell(family=family,
                                  condition_id=cond.condition_id,
                                  test_clip_id=cond.test_clip_id)
            try:
                model = models_mod.train_family(
                    family, X_train, y_train, encoding.n_classes, seed=seed)
                pred = models_mod.predict_with(family, model, X_test)
                cell.report = evaluate(pred, y_test, encoding)
                cell.accuracy = cell.report.accuracy
            except Exception as e:  # record, keep the sweep alive
                cell.error = f"{type(e).__name__}: {e}"
            table.cells.append(cell)
    return table


def run_comparison(manifest, root, families, plan, cfg, seed=42,
                   train_pool="both"):
    """Manifest-level comparison: load instances, extract features, then
    evaluate every cell."""
    from .dataset import load_instances
    from .features import build_feature_matrix
    instances = load_instances(manifest, root)
    features = build_feature_matrix(instances, cfg)
    return compare_on_features(features, families, plan, seed=seed,
                               train_pool=train_pool)


# --- feature importance ---

@dataclass(frozen=True)
class ImportanceReport:
    importances: np.ndarray          # normalized, original feature order
    order: np.ndarray                # indices sorted descending
    cumulative_topk: dict            # k -> cumulative sum

    def to_csv(self, column_names=None):
        lines = ["rank,feature_index,feature_name,importance"]
        for rank, j in enumerate(self.order, start=1):
            name = column_names[j] if column_names else f"f{j}"
            lines.append(f"{rank},{j},{name},"
                         f"{repr(float(self.importances[j]))}")
        for k, v in self.cumulative_topk.items():
            lines.append(f"cumulative_top_{k},,,{repr(v)}")
        return "\n".join(lines) + "\n"


def feature_importance(forest, d=None, topk=(10, 20, 30, 40)):
    """Normalized forest importances, descending order, cumulative top-k."""
    if not getattr(forest, "trees", None):
        raise UntrainedModel("forest has no trees")
    imp = models_mod.feature_importance(forest, d)
    order = np.argsort(-imp, kind="stable")
    sorted_imp = imp[order]
    cumulative = {k: float(np.sum(sorted_imp[:k]))
                  for k in topk if k <= len(imp)}
    return ImportanceReport(importances=imp, order=order,
                            cumulative_topk=cumulative)


# --- 2D PCA embedding ---

def embed_2d(X):
    """Project centered rows onto the top-2 principal directions.

    Sign convention: each component's largest-magnitude entry is
    positive, making the embedding deterministic.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.shape[0] < 2 or X.shape[1] < 2:
        raise DegenerateData("need >= 2 rows and >= 2 columns")
    centered = X - X.mean(axis=0)
    cov = centered.T @ centered / X.shape[0]
    eigvals, eigvecs = np.linalg.eigh(cov)
    if np.max(eigvals) <= 1e-15:
        raise DegenerateData("zero variance everywhere")
    components = eigvecs[:, np.argsort(-eigvals)[:2]]
    for j in range(2):
        peak = np.argmax(np.abs(components[:, j]))
        if components[peak, j] < 0:
            components[:, j] = -components[:, j]
    return centered @ components
