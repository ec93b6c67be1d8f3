"""Evaluation metrics: ROC AUC, mean absolute error, Pearson correlation.

AUC is the Mann-Whitney statistic — over all (positive, negative) pairs,
a correctly ranked pair counts 1 and a tie 0.5 — computed here with
midranks so it stays O(n log n) while agreeing exactly with brute-force
pair enumeration.
"""
from __future__ import annotations

import numpy as np


class MetricError(Exception):
    pass


class SingleClass(MetricError):
    pass


class LengthMismatch(MetricError):
    pass


class ZeroVariance(MetricError):
    pass


def _midranks(values: np.ndarray) -> np.ndarray:
    """1-based ranks with ties sharing their average rank."""
    order = np.argsort(values, kind="mergesort")
    ranks = np.empty(len(values))
    sorted_vals = values[order]
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2 + 1
        i = j + 1
    return ranks


def auc(scores, labels) -> float:
    """Probability that a random positive outscores a random negative."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if len(scores) != len(labels):
        raise LengthMismatch(f"{len(scores)} scores vs {len(labels)} labels")
    pos = labels == 1
    neg = ~pos
    n_pos = int(pos.sum())
    n_neg = int(neg.sum())
    if n_pos == 0 or n_neg == 0:
        raise SingleClass("need both classes to compute AUC")
    ranks = _midranks(scores)
    rank_sum = ranks[pos].sum()
    return float((rank_sum - n_pos * (n_pos + 1) / 2) / (n_pos * n_neg))


def mae_pearson(preds, targets) -> tuple[float, float]:
    """(mean absolute error, sample Pearson correlation)."""
    preds = np.asarray(preds, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    if len(preds) != len(targets):
        raise LengthMismatch(f"{len(preds)} preds vs {len(targets)} targets")
    if len(preds) < 2:
        raise LengthMismatch("need at least 2 points")
    mae = float(np.mean(np.abs(preds - targets)))

    dp = preds - preds.mean()
    dt = targets - targets.mean()
    denom = np.sqrt((dp ** 2).sum() * (dt ** 2).sum())
    if denom == 0.0:
        raise ZeroVariance("constant predictions or targets")
    r = float((dp * dt).sum() / denom)
    return mae, r
