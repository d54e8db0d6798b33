"""Exhaustive KNN classification and the macro evaluation metrics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .errors import ConfigurationError
from .validation import as_float_matrix, as_label_vector, readonly


def knn_predict(train_X, train_y, test_X, k_neighbors: int = 5, n_classes: int | None = None):
    """Majority vote over the k nearest training rows by Euclidean distance.

    Neighbour selection is deterministic: equal distances resolve toward
    the smaller training index. Vote ties resolve to the class with the
    smaller cumulative neighbour distance, then to the smaller class id.

    Returns (predictions, vote_fractions) where vote_fractions[i, c] is
    the share of the k neighbours of test row i with class c.
    """
    train_X = as_float_matrix(train_X, name="train_X")
    test_X = as_float_matrix(test_X, name="test_X")
    train_y = as_label_vector(train_y, n=train_X.shape[0], name="train_y")
    n_train = train_X.shape[0]
    if n_train == 0:
        raise ConfigurationError("empty training set")
    if train_y.min() < 0:
        raise ConfigurationError("negative class id in train_y")
    if train_X.shape[1] != test_X.shape[1]:
        raise ConfigurationError("train and test feature widths differ")
    if not (1 <= k_neighbors <= n_train):
        raise ConfigurationError(f"k_neighbors must lie in [1, {n_train}], got {k_neighbors}")
    if n_classes is None:
        n_classes = int(train_y.max()) + 1
    if train_y.max() >= n_classes:
        raise ConfigurationError("train labels exceed n_classes")

    D = cdist(test_X, train_X, metric="euclidean")
    preds = np.empty(test_X.shape[0], dtype=np.int64)
    scores = np.zeros((test_X.shape[0], n_classes), dtype=np.float64)
    for i in range(test_X.shape[0]):
        order = np.argsort(D[i], kind="stable")[:k_neighbors]
        counts = np.zeros(n_classes, dtype=np.int64)
        cumdist = np.zeros(n_classes, dtype=np.float64)
        for j in order:  # accumulate in rank order so ties replay identically
            c = train_y[j]
            counts[c] += 1
            cumdist[c] += D[i, j]
        top = counts.max()
        tied = np.flatnonzero(counts == top)
        if tied.size == 1:
            preds[i] = tied[0]
        else:
            best = tied[0]
            for c in tied[1:]:
                if cumdist[c] < cumdist[best]:
                    best = c
            preds[i] = best
        scores[i] = counts / float(k_neighbors)
    return preds, scores


def confusion_matrix(y_true, y_pred, n_classes: int) -> np.ndarray:
    """Counts with true classes on rows and predicted classes on columns."""
    y_true = as_label_vector(y_true, name="y_true")
    y_pred = as_label_vector(y_pred, n=y_true.shape[0], name="y_pred")
    if y_true.size and (y_true.max() >= n_classes or y_pred.max() >= n_classes):
        raise ConfigurationError("labels exceed n_classes")
    if y_true.size and (y_true.min() < 0 or y_pred.min() < 0):
        raise ConfigurationError("negative class id")
    C = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(C, (y_true, y_pred), 1)
    return C


@dataclass(frozen=True)
class MacroMetrics:
    """Accuracy plus macro-averaged recall, precision, and F1.

    Per-class ratios with a zero denominator contribute 0 and are listed
    in `flags`. Macro F1 is the harmonic mean of macro precision and
    macro recall, not the mean of per-class F1 values.
    """

    acc: float
    macro_rec: float
    macro_pre: float
    macro_f1: float
    flags: tuple[str, ...] = ()

    def as_dict(self) -> dict:
        return {
            "acc": self.acc,
            "macro_rec": self.macro_rec,
            "macro_pre": self.macro_pre,
            "macro_f1": self.macro_f1,
        }


def macro_metrics(confusion) -> MacroMetrics:
    C = np.asarray(confusion, dtype=np.int64)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise ConfigurationError(f"confusion matrix must be square, got {C.shape}")
    if np.any(C < 0):
        raise ConfigurationError("confusion matrix counts must be nonnegative")
    total = int(C.sum())
    if total == 0:
        raise ConfigurationError("confusion matrix is empty")
    c = C.shape[0]
    diag = np.diagonal(C).astype(np.float64)
    row = C.sum(axis=1).astype(np.float64)
    col = C.sum(axis=0).astype(np.float64)
    flags = []
    recalls = np.zeros(c)
    precisions = np.zeros(c)
    for j in range(c):
        if row[j] > 0:
            recalls[j] = diag[j] / row[j]
        else:
            flags.append(f"recall[{j}] undefined (no true samples); set to 0")
        if col[j] > 0:
            precisions[j] = diag[j] / col[j]
        else:
            flags.append(f"precision[{j}] undefined (never predicted); set to 0")
    macro_rec = float(recalls.mean())
    macro_pre = float(precisions.mean())
    if macro_rec + macro_pre > 0:
        macro_f1 = 2.0 * macro_pre * macro_rec / (macro_pre + macro_rec)
    else:
        macro_f1 = 0.0
        flags.append("macro_f1 undefined (zero precision and recall); set to 0")
    return MacroMetrics(
        acc=float(diag.sum() / total),
        macro_rec=macro_rec,
        macro_pre=macro_pre,
        macro_f1=macro_f1,
        flags=tuple(flags),
    )


def _binary_rank_auc(score: np.ndarray, positive: np.ndarray) -> float:
    """Mann-Whitney AUC with midranks for tied scores."""
    order = np.argsort(score, kind="stable")
    s = score[order]
    ranks = np.empty(s.shape[0], dtype=np.float64)
    i = 0
    while i < s.shape[0]:
        j = i
        while j < s.shape[0] and s[j] == s[i]:
            j += 1
        ranks[i:j] = (i + j + 1) / 2.0  # average of 1-based ranks i+1..j
        i = j
    pos = positive[order]
    n_pos = int(pos.sum())
    n_neg = pos.shape[0] - n_pos
    rank_sum = float(ranks[pos].sum())
    return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def macro_auc(scores, y_true, mode: str = "hard", y_pred=None) -> tuple[float, tuple[str, ...]]:
    """One-vs-rest AUC averaged over classes.

    mode="score" ranks the per-class vote fractions; mode="hard" scores
    the discrete predictions instead, which reduces each class to its
    balanced accuracy (mean of true- and false-positive-free rates).
    Classes absent from y_true are flagged and contribute 0; a truth
    vector with a single class yields 0 with a flag.
    """
    if mode not in ("score", "hard"):
        raise ConfigurationError(f"unknown AUC mode {mode!r}")
    S = as_float_matrix(scores, name="scores")
    y_true = as_label_vector(y_true, n=S.shape[0], name="y_true")
    c = S.shape[1]
    flags = []
    if np.unique(y_true).size < 2:
        return 0.0, ("macro_auc undefined for single-class truth; set to 0",)
    if y_pred is None:
        y_pred = np.argmax(S, axis=1)
    else:
        y_pred = as_label_vector(y_pred, n=S.shape[0], name="y_pred")
    values = np.zeros(c)
    for j in range(c):
        positive = y_true == j
        n_pos = int(positive.sum())
        if n_pos == 0 or n_pos == y_true.shape[0]:
            flags.append(f"auc[{j}] undefined (one-sided truth); set to 0")
            continue
        if mode == "score":
            values[j] = _binary_rank_auc(S[:, j], positive)
        else:
            pred_pos = y_pred == j
            tpr = float((pred_pos & positive).sum()) / n_pos
            fpr = float((pred_pos & ~positive).sum()) / (y_true.shape[0] - n_pos)
            values[j] = (tpr + (1.0 - fpr)) / 2.0
    return float(values.mean()), tuple(flags)


@dataclass(frozen=True)
class RSScores:
    """Per-sample residue (R) and similarity (S) diagnostics of an embedding.

    For sample m with true class l: the raw residue is the summed
    distance to all samples outside l, normalized by the class maximum;
    S averages 1 - d/d_max over the members of l (self included), with
    d_max the largest pairwise distance in the embedding.
    """

    r: np.ndarray
    s: np.ndarray
    y_true: np.ndarray
    y_pred: np.ndarray

    def __post_init__(self):
        for name in ("r", "s"):
            object.__setattr__(self, name, readonly(np.asarray(getattr(self, name), dtype=np.float64)))
        for name in ("y_true", "y_pred"):
            object.__setattr__(self, name, readonly(np.asarray(getattr(self, name), dtype=np.int64)))


def rs_scores(projected, y_true, y_pred) -> RSScores:
    X = as_float_matrix(projected, name="projected")
    y_true = as_label_vector(y_true, n=X.shape[0], name="y_true")
    y_pred = as_label_vector(y_pred, n=X.shape[0], name="y_pred")
    n = X.shape[0]
    D = cdist(X, X, metric="euclidean")
    d_max = float(D.max()) if n else 0.0
    r = np.zeros(n)
    s = np.ones(n)
    for cls in np.unique(y_true):
        members = np.flatnonzero(y_true == cls)
        others = np.flatnonzero(y_true != cls)
        raw = D[np.ix_(members, others)].sum(axis=1) if others.size else np.zeros(members.size)
        r_max = float(raw.max()) if raw.size else 0.0
        r[members] = raw / r_max if r_max > 0 else 0.0
        if d_max > 0:
            s[members] = (1.0 - D[np.ix_(members, members)] / d_max).mean(axis=1)
        # d_max == 0 or singleton class: S stays at the self-similarity value 1
    return RSScores(r=r, s=s, y_true=y_true, y_pred=y_pred)
