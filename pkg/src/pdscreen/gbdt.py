"""Gradient-boosted regression trees, trained with exact greedy splits.

One engine serves both heads of the pipeline: a logistic-objective
classifier for the speech model and a squared-error regressor for the
motor severity model. Trees are grown depth-wise on the negative
gradients of the current predictions; candidate thresholds are the
midpoints between consecutive distinct feature values, scored by
sum-of-squared-error reduction. Training is deterministic: no row or
column sampling, ties broken by feature index then threshold.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import FeatureVector
from .dataset import Dataset, DegenerateLabels, EmptyDataset, SchemaMismatch, TaskType

OBJECTIVE_LOGISTIC = "logistic"
OBJECTIVE_SQUARED_ERROR = "squared_error"


@dataclass(frozen=True)
class GbdtParams:
    n_trees: int = 200
    max_depth: int = 4
    learning_rate: float = 0.1
    min_leaf: int = 1
    reg_lambda: float = 1.0


@dataclass
class GbdtModel:
    """A trained boosted-tree model.

    Trees are nested dicts: ``{"feature": i, "threshold": x, "left": ...,
    "right": ...}`` for splits, ``{"value": v}`` for leaves, with the
    learning rate already folded into the leaf values.
    """

    objective: str
    base_score: float
    trees: list[dict]
    learning_rate: float
    schema_id: str
    feature_names: tuple[str, ...]
    params: GbdtParams = field(default_factory=GbdtParams)


def sigmoid(z):
    return 1.0 / (1.0 + np.exp(-np.asarray(z, dtype=np.float64)))


def _best_split(x_col: np.ndarray, grad: np.ndarray, min_leaf: int):
    """Best (gain, threshold) for one feature over the rows in this node.

    Gain is the SSE reduction of the residual targets; with G_l, G_r the
    left/right target sums this is G_l^2/n_l + G_r^2/n_r - G^2/n.
    """
    order = np.argsort(x_col, kind="mergesort")
    xs = x_col[order]
    gs = grad[order]
    n = len(xs)

    prefix = np.cumsum(gs)
    total = prefix[-1]
    # split after position i (1-based count i+1 on the left); only between
    # distinct values, honoring the min_leaf floor on both sides
    counts = np.arange(1, n)
    left_sum = prefix[:-1]
    valid = (xs[1:] != xs[:-1]) & (counts >= min_leaf) & (n - counts >= min_leaf)
    if not np.any(valid):
        return None
    gains = np.full(n - 1, -np.inf)
    right_sum = total - left_sum
    gains[valid] = (
        left_sum[valid] ** 2 / counts[valid]
        + right_sum[valid] ** 2 / (n - counts[valid])
        - total ** 2 / n
    )
    best = int(np.argmax(gains))
    if not np.isfinite(gains[best]) or gains[best] <= 1e-12:
        return None
    threshold = 0.5 * (xs[best] + xs[best + 1])
    return float(gains[best]), threshold


def _build_tree(
    x: np.ndarray,
    targets: np.ndarray,
    rows: np.ndarray,
    depth: int,
    params: GbdtParams,
    leaf_assign: list,
) -> dict:
    node_targets = targets[rows]
    if depth >= params.max_depth or len(rows) < 2 * params.min_leaf:
        leaf_assign.append((rows, node_targets))
        return {}

    best = None
    for f in range(x.shape[1]):
        found = _best_split(x[rows, f], node_targets, params.min_leaf)
        if found is None:
            continue
        gain, threshold = found
        if best is None or gain > best[0] + 1e-15:
            best = (gain, f, threshold)

    if best is None:
        leaf_assign.append((rows, node_targets))
        return {}

    _, f, threshold = best
    mask = x[rows, f] < threshold
    left = _build_tree(x, targets, rows[mask], depth + 1, params, leaf_assign)
    right = _build_tree(x, targets, rows[~mask], depth + 1, params, leaf_assign)
    return {"feature": int(f), "threshold": float(threshold), "left": left, "right": right}


def _finalize_leaves(tree: dict, leaf_assign: list, grads: np.ndarray, params: GbdtParams):
    """Fill leaf values (-sum(grad)/(count+lambda), lr applied) and return the
    per-row prediction delta of this tree."""
    delta = np.zeros(len(grads))
    leaf_iter = iter(leaf_assign)

    def fill(node: dict) -> dict:
        if node:
            node["left"] = fill(node["left"])
            node["right"] = fill(node["right"])
            return node
        rows, _ = next(leaf_iter)
        value = -grads[rows].sum() / (len(rows) + params.reg_lambda)
        value *= params.learning_rate
        delta[rows] = value
        return {"value": float(value)}

    return fill(tree), delta


def train_gbdt(data: Dataset, params: GbdtParams = GbdtParams(), seed: int = 0) -> GbdtModel:
    """Fit a boosted-tree model to ``data`` (objective chosen by its task).

    ``seed`` is accepted for interface stability; with sampling disabled
    (the default and only mode) training is already deterministic.
    """
    if len(data.x) == 0:
        raise EmptyDataset("no rows")

    y = data.y.astype(np.float64)
    if data.task == TaskType.BINARY_CLASS:
        objective = OBJECTIVE_LOGISTIC
        p_mean = y.mean()
        if p_mean <= 0.0 or p_mean >= 1.0:
            raise DegenerateLabels("logistic objective needs both classes")
        base = math.log(p_mean / (1.0 - p_mean))
    else:
        objective = OBJECTIVE_SQUARED_ERROR
        base = float(y.mean())

    x = np.ascontiguousarray(data.x, dtype=np.float64)
    margins = np.full(len(y), base)
    trees: list[dict] = []
    all_rows = np.arange(len(y))

    for _ in range(params.n_trees):
        if objective == OBJECTIVE_LOGISTIC:
            grads = sigmoid(margins) - y
        else:
            grads = margins - y
        leaf_assign: list = []
        skeleton = _build_tree(x, -grads, all_rows, 0, params, leaf_assign)
        tree, delta = _finalize_leaves(skeleton, leaf_assign, grads, params)
        trees.append(tree)
        margins += delta

    return GbdtModel(
        objective=objective,
        base_score=base,
        trees=trees,
        learning_rate=params.learning_rate,
        schema_id=data.schema_id,
        feature_names=data.feature_names,
        params=params,
    )


def _walk(tree: dict, row: np.ndarray) -> float:
    node = tree
    while "value" not in node:
        if row[node["feature"]] < node["threshold"]:
            node = node["left"]
        else:
            node = node["right"]
    return node["value"]


def predict_margin(model: GbdtModel, row: np.ndarray) -> float:
    return model.base_score + sum(_walk(t, row) for t in model.trees)


def predict_gbdt(model: GbdtModel, fv: FeatureVector) -> float:
    """Model output for one feature vector: a probability for the logistic
    objective, the raw accumulated value for squared error."""
    if fv.schema_id != model.schema_id:
        raise SchemaMismatch(f"vector is {fv.schema_id!r}, model wants {model.schema_id!r}")
    if len(fv.values) != len(model.feature_names):
        raise SchemaMismatch(
            f"vector has {len(fv.values)} values, model wants {len(model.feature_names)}"
        )
    margin = predict_margin(model, np.asarray(fv.values, dtype=np.float64))
    if model.objective == OBJECTIVE_LOGISTIC:
        return float(sigmoid(margin))
    return float(margin)


def predict_gbdt_batch(model: GbdtModel, x: np.ndarray) -> np.ndarray:
    """Vector of predictions for a feature matrix (rows must match the
    model's schema order)."""
    if x.shape[1] != len(model.feature_names):
        raise SchemaMismatch(
            f"matrix has {x.shape[1]} columns, model wants {len(model.feature_names)}"
        )
    margins = np.array([predict_margin(model, row) for row in x])
    if model.objective == OBJECTIVE_LOGISTIC:
        return sigmoid(margins)
    return margins
