"""Clustering quality against ground truth.

All four scores are invariant to relabelling either partition. ACC and
macro-F1 share one optimal one-to-one matching of predicted clusters onto
true classes, found with the Hungarian method on the contingency table.
"""
from typing import Dict

import numpy as np
from scipy.optimize import linear_sum_assignment
from sklearn.metrics import adjusted_rand_score, f1_score, normalized_mutual_info_score
from sklearn.metrics.cluster import contingency_matrix

from app.exceptions import LengthMismatch

METRICS = ('acc', 'nmi', 'ari', 'f1')


def _pair(truth, pred):
    truth = np.asarray(truth).reshape(-1)
    pred = np.asarray(pred).reshape(-1)
    if truth.shape[0] != pred.shape[0]:
        raise LengthMismatch('%d true labels but %d predictions' % (truth.shape[0], pred.shape[0]))
    if truth.shape[0] == 0:
        raise LengthMismatch('Cannot score an empty labelling')
    return truth, pred


def _matched(truth, pred):
    """Integer-coded truth, and pred rewritten to the matched truth codes (-1 when unmatched)."""
    true_classes, truth_codes = np.unique(truth, return_inverse=True)
    _, pred_codes = np.unique(pred, return_inverse=True)
    table = contingency_matrix(truth_codes, pred_codes)
    rows, cols = linear_sum_assignment(table, maximize=True)
    mapping = np.full(table.shape[1], -1, dtype=np.int64)
    mapping[cols] = rows
    return truth_codes, mapping[pred_codes], len(true_classes)


def best_matching(truth, pred) -> Dict[object, object]:
    """Predicted label -> true label maximising the number of agreeing nodes."""
    truth, pred = _pair(truth, pred)
    true_classes, truth_codes = np.unique(truth, return_inverse=True)
    pred_classes, pred_codes = np.unique(pred, return_inverse=True)
    rows, cols = linear_sum_assignment(contingency_matrix(truth_codes, pred_codes), maximize=True)
    return {pred_classes[c].item(): true_classes[r].item() for r, c in zip(rows, cols)}


def accuracy(truth, pred) -> float:
    truth_codes, mapped, _ = _matched(*_pair(truth, pred))
    return float(np.mean(mapped == truth_codes))


def nmi(truth, pred) -> float:
    truth, pred = _pair(truth, pred)
    return float(normalized_mutual_info_score(truth, pred, average_method='arithmetic'))


def ari(truth, pred) -> float:
    truth, pred = _pair(truth, pred)
    return float(adjusted_rand_score(truth, pred))


def macro_f1(truth, pred) -> float:
    """Unweighted mean per-class F1 after the accuracy matching; unmatched clusters count as wrong."""
    truth_codes, mapped, num_classes = _matched(*_pair(truth, pred))
    return float(f1_score(truth_codes, mapped, labels=np.arange(num_classes), average='macro', zero_division=0))


def score_clustering(truth, pred) -> Dict[str, float]:
    return {
        'acc': accuracy(truth, pred),
        'nmi': nmi(truth, pred),
        'ari': ari(truth, pred),
        'f1': macro_f1(truth, pred),
    }
