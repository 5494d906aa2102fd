"""Evaluation: confusion matrices, success/failure rates, ROC, alarms.

The alarm taxonomy binarizes predictions into attack (any nonzero class)
versus normal: an alarm on a genuine attack is a true positive even when
the predicted attack type is wrong.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateClassError
from .mlp import Network, forward, loss_mse
from .preprocessing import one_hot_matrix
from .validation import check_consistent_length, check_labels

TRUE_POSITIVE = "true_positive"
FALSE_POSITIVE = "false_positive"
FALSE_NEGATIVE = "false_negative"
TRUE_NEGATIVE = "true_negative"


def confusion(preds, labels, k: int) -> np.ndarray:
    """K x K count matrix, rows = actual class, columns = predicted."""
    preds = check_labels(preds, k, name="preds")
    labels = check_labels(labels, k, name="labels")
    check_consistent_length(preds, labels)
    cm = np.zeros((k, k), dtype=np.int64)
    np.add.at(cm, (labels, preds), 1)
    return cm


def accuracy(cm: np.ndarray):
    """(success_rate, failure_rate) = (trace/total, 1 - trace/total)."""
    cm = np.asarray(cm)
    total = int(cm.sum())
    if total == 0:
        raise ValueError("confusion matrix is empty")
    success = float(np.trace(cm)) / total
    return success, 1.0 - success


@dataclass(frozen=True)
class RocCurve:
    """Threshold sweep points (fpr, tpr, threshold) and the trapezoid AUC."""

    points: tuple
    auc: float


def roc(scores, positives) -> RocCurve:
    """ROC over descending distinct score thresholds.

    Samples with equal scores change state together, giving the standard
    staircase with diagonal segments through tied blocks. The curve starts
    at (0, 0) with an above-max sentinel threshold and ends at (1, 1).
    """
    scores = np.asarray(scores, dtype=np.float64)
    positives = np.asarray(positives, dtype=bool)
    check_consistent_length(scores, positives)
    n_pos = int(positives.sum())
    n_neg = len(positives) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DegenerateClassError(
            f"need both classes, got {n_pos} positives / {n_neg} negatives"
        )
    order = np.argsort(-scores, kind="stable")
    s, p = scores[order], positives[order]
    points = [(0.0, 0.0, float("inf"))]
    tp = fp = 0
    auc = 0.0
    i = 0
    n = len(s)
    while i < n:
        j = i
        while j < n and s[j] == s[i]:
            j += 1
        tp_prev, fp_prev = tp, fp
        tp += int(p[i:j].sum())
        fp += (j - i) - int(p[i:j].sum())
        tpr, fpr = tp / n_pos, fp / n_neg
        auc += (fpr - fp_prev / n_neg) * (tpr + tp_prev / n_pos) / 2.0
        points.append((fpr, tpr, float(s[i])))
        i = j
    return RocCurve(points=tuple(points), auc=auc)


def auc_pair_count(scores, positives) -> float:
    """Mann-Whitney pair-counting AUC: the brute-force oracle for roc()."""
    scores = np.asarray(scores, dtype=np.float64)
    positives = np.asarray(positives, dtype=bool)
    pos = scores[positives]
    neg = scores[~positives]
    if len(pos) == 0 or len(neg) == 0:
        raise DegenerateClassError("need both classes")
    wins = ties = 0
    for sp in pos:
        wins += int(np.sum(sp > neg))
        ties += int(np.sum(sp == neg))
    return (wins + 0.5 * ties) / (len(pos) * len(neg))


def alarm_outcome(predicted: int, actual: int) -> str:
    """Four-way alarm outcome after binarizing to attack (class != 0)."""
    pred_attack = predicted != 0
    act_attack = actual != 0
    if pred_attack and act_attack:
        return TRUE_POSITIVE
    if pred_attack:
        return FALSE_POSITIVE
    if act_attack:
        return FALSE_NEGATIVE
    return TRUE_NEGATIVE


@dataclass(frozen=True)
class AlarmTally:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0

    @property
    def total(self):
        return self.tp + self.fp + self.fn + self.tn


def alarm_tally(preds, labels) -> AlarmTally:
    preds = np.asarray(preds)
    labels = np.asarray(labels)
    check_consistent_length(preds, labels)
    pa = preds != 0
    aa = labels != 0
    return AlarmTally(
        tp=int(np.sum(pa & aa)),
        fp=int(np.sum(pa & ~aa)),
        fn=int(np.sum(~pa & aa)),
        tn=int(np.sum(~pa & ~aa)),
    )


@dataclass(frozen=True)
class EvaluationReport:
    """Everything measured on one partition."""

    confusion: np.ndarray
    success_rate: float
    failure_rate: float
    mse: float
    alarms: AlarmTally
    class_roc: dict  # class id -> RocCurve, absent-class entries None
    attack_roc: RocCurve | None


def evaluate(net: Network, partition, k: int) -> EvaluationReport:
    """Evaluate a network on one already-scaled partition.

    Per-class ROC uses the softmax output of that class as the score,
    one-vs-rest; classes without both positives and negatives in the
    partition get None. The attack ROC scores 1 - P(normal) against
    actual attack presence.
    """
    X = np.asarray(partition.X, dtype=np.float64)
    y = check_labels(partition.y, k, name="partition.y")
    probs = forward(net, X)
    preds = np.argmax(probs, axis=1).astype(np.int64)
    cm = confusion(preds, y, k)
    success, failure = accuracy(cm)
    mse = loss_mse(probs, one_hot_matrix(y, k))
    class_roc = {}
    for c in range(k):
        positives = y == c
        if 0 < positives.sum() < len(y):
            class_roc[c] = roc(probs[:, c], positives)
        else:
            class_roc[c] = None
    attack_pos = y != 0
    if 0 < attack_pos.sum() < len(y):
        attack_roc = roc(1.0 - probs[:, 0], attack_pos)
    else:
        attack_roc = None
    return EvaluationReport(
        confusion=cm,
        success_rate=success,
        failure_rate=failure,
        mse=mse,
        alarms=alarm_tally(preds, y),
        class_roc=class_roc,
        attack_roc=attack_roc,
    )
