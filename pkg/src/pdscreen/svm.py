"""Support vector machines trained by sequential minimal optimization.

The face model is an ensemble: one RBF-kernel SVM per expression task
(trained on that task's feature columns) plus one over all features,
combined by averaging the per-member sigmoid of the decision value.

SMO follows Platt's scheme: pick a KKT-violating multiplier, pair it with
the one maximizing the error gap (random fallback), solve the two-variable
subproblem analytically, clip to the box, repeat until every violation is
below tolerance or the iteration cap is reached.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import FeatureVector
from .dataset import Dataset, DegenerateLabels, SchemaMismatch, TaskType
from .gbdt import sigmoid

DEFAULT_C = 1.0
DEFAULT_KKT_TOL = 1e-3
DEFAULT_MAX_PASSES = 10_000


@dataclass
class SvmMember:
    """One trained binary SVM over a feature-index subset."""

    feature_indices: tuple[int, ...]
    support_vectors: np.ndarray   # (n_sv, len(feature_indices))
    dual_coefs: np.ndarray        # alpha_i * y_i, y in {-1, +1}
    bias: float
    gamma: float
    c: float
    converged: bool = True

    def decision(self, x_sub: np.ndarray) -> float:
        diff = self.support_vectors - x_sub[None, :]
        kernel = np.exp(-self.gamma * np.sum(diff * diff, axis=1))
        return float(self.dual_coefs @ kernel + self.bias)


@dataclass
class SvmEnsemble:
    schema_id: str
    feature_names: tuple[str, ...]
    members: list[SvmMember] = field(default_factory=list)


def rbf_kernel_matrix(x: np.ndarray, gamma: float) -> np.ndarray:
    sq = np.sum(x * x, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (x @ x.T)
    return np.exp(-gamma * np.maximum(d2, 0.0))


class _SmoState:
    def __init__(self, k: np.ndarray, y: np.ndarray, c: float, tol: float, rng):
        self.k = k
        self.y = y
        self.c = c
        self.tol = tol
        self.rng = rng
        self.n = len(y)
        self.alpha = np.zeros(self.n)
        self.b = 0.0
        # decision values start at 0 everywhere, so error = -y
        self.errors = -y.astype(np.float64)

    def _update_pair(self, i: int, j: int) -> bool:
        if i == j:
            return False
        alpha, y, k, c = self.alpha, self.y, self.k, self.c
        ai_old, aj_old = alpha[i], alpha[j]
        if y[i] != y[j]:
            lo = max(0.0, aj_old - ai_old)
            hi = min(c, c + aj_old - ai_old)
        else:
            lo = max(0.0, ai_old + aj_old - c)
            hi = min(c, ai_old + aj_old)
        if hi - lo < 1e-12:
            return False
        eta = k[i, i] + k[j, j] - 2.0 * k[i, j]
        if eta <= 1e-12:
            return False
        aj_new = aj_old + y[j] * (self.errors[i] - self.errors[j]) / eta
        aj_new = min(hi, max(lo, aj_new))
        if abs(aj_new - aj_old) < 1e-12 * (aj_new + aj_old + 1e-12):
            return False
        ai_new = ai_old + y[i] * y[j] * (aj_old - aj_new)

        b_old = self.b
        b1 = self.b - self.errors[i] - y[i] * (ai_new - ai_old) * k[i, i] \
            - y[j] * (aj_new - aj_old) * k[i, j]
        b2 = self.b - self.errors[j] - y[i] * (ai_new - ai_old) * k[i, j] \
            - y[j] * (aj_new - aj_old) * k[j, j]
        if 0.0 < ai_new < c:
            self.b = b1
        elif 0.0 < aj_new < c:
            self.b = b2
        else:
            self.b = 0.5 * (b1 + b2)

        alpha[i], alpha[j] = ai_new, aj_new
        self.errors += (
            y[i] * (ai_new - ai_old) * k[:, i]
            + y[j] * (aj_new - aj_old) * k[:, j]
            + (self.b - b_old)
        )
        return True

    def _violation(self, i: int) -> float:
        r = self.errors[i] * self.y[i]
        if self.alpha[i] < self.c and r < -self.tol:
            return -r
        if self.alpha[i] > 0.0 and r > self.tol:
            return r
        return 0.0

    def _examine(self, i: int) -> bool:
        if self._violation(i) == 0.0:
            return False
        # second-choice heuristic: maximize |E_i - E_j|
        j = int(np.argmax(np.abs(self.errors - self.errors[i])))
        if self._update_pair(i, j):
            return True
        order = self.rng.permutation(self.n)
        for j in order:
            if self._update_pair(i, int(j)):
                return True
        return False

    def max_violation(self) -> float:
        return max(self._violation(i) for i in range(self.n))


def train_svm_smo(
    x: np.ndarray,
    y01: np.ndarray,
    c: float = DEFAULT_C,
    gamma: float | None = None,
    tol: float = DEFAULT_KKT_TOL,
    max_passes: int = DEFAULT_MAX_PASSES,
    seed: int = 0,
    feature_indices: tuple[int, ...] | None = None,
) -> SvmMember:
    """Train one RBF SVM on labels in {0, 1}.

    Stops when every KKT violation is below ``tol``; if the pass cap is hit
    first the member is still returned with ``converged=False``.
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    classes = set(np.unique(y01))
    if not classes == {0.0, 1.0} and not classes == {0, 1}:
        raise DegenerateLabels(f"need labels {{0,1}} with both present, got {classes}")
    y = np.where(np.asarray(y01) == 1, 1.0, -1.0)
    if gamma is None:
        gamma = 1.0 / x.shape[1]
    rng = np.random.default_rng(seed)

    k = rbf_kernel_matrix(x, gamma)
    state = _SmoState(k, y, c, tol, rng)

    examine_all = True
    passes = 0
    converged = False
    while passes < max_passes:
        passes += 1
        changed = 0
        if examine_all:
            indices = range(state.n)
        else:
            indices = [i for i in range(state.n) if 0.0 < state.alpha[i] < c]
        for i in indices:
            if state._examine(i):
                changed += 1
        if examine_all:
            if changed == 0 and state.max_violation() <= tol:
                converged = True
                break
            examine_all = changed == 0
        elif changed == 0:
            examine_all = True

    sv = state.alpha > 1e-10
    if not np.any(sv):
        # degenerate but legal: keep one vector so the decision is defined
        sv[0] = True
    return SvmMember(
        feature_indices=feature_indices or tuple(range(x.shape[1])),
        support_vectors=x[sv],
        dual_coefs=state.alpha[sv] * y[sv],
        bias=float(state.b),
        gamma=float(gamma),
        c=float(c),
        converged=converged,
    )


def _task_feature_subsets(feature_names: tuple[str, ...]) -> list[tuple[int, ...]]:
    """One index subset per task-name prefix, plus the full set."""
    prefixes = []
    for name in feature_names:
        prefix = name.rsplit("_", 1)[0] if name.endswith("_present") else None
        if prefix and prefix not in prefixes:
            prefixes.append(prefix)
    subsets = []
    for prefix in prefixes:
        idx = tuple(
            i for i, name in enumerate(feature_names) if name.startswith(prefix + "_")
        )
        if idx:
            subsets.append(idx)
    subsets.append(tuple(range(len(feature_names))))
    return subsets


def train_svm_ensemble(
    data: Dataset,
    c: float = DEFAULT_C,
    gamma: float | None = None,
    tol: float = DEFAULT_KKT_TOL,
    max_passes: int = DEFAULT_MAX_PASSES,
    seed: int = 0,
) -> SvmEnsemble:
    """Train the per-task-subset + all-features SVM ensemble."""
    if data.task != TaskType.BINARY_CLASS:
        raise DegenerateLabels("SVM ensemble is a binary classifier")
    ensemble = SvmEnsemble(schema_id=data.schema_id, feature_names=data.feature_names)
    for n, subset in enumerate(_task_feature_subsets(data.feature_names)):
        member = train_svm_smo(
            data.x[:, subset],
            data.y,
            c=c,
            gamma=gamma if gamma is not None else 1.0 / len(subset),
            tol=tol,
            max_passes=max_passes,
            seed=seed + n,
            feature_indices=subset,
        )
        ensemble.members.append(member)
    return ensemble


def predict_svm_ensemble(ens: SvmEnsemble, fv: FeatureVector) -> float:
    """Mean of the members' sigmoid decision values; always in (0, 1)."""
    if fv.schema_id != ens.schema_id:
        raise SchemaMismatch(f"vector is {fv.schema_id!r}, model wants {ens.schema_id!r}")
    if len(fv.values) != len(ens.feature_names):
        raise SchemaMismatch(
            f"vector has {len(fv.values)} values, model wants {len(ens.feature_names)}"
        )
    row = np.asarray(fv.values, dtype=np.float64)
    probs = [sigmoid(m.decision(row[list(m.feature_indices)])) for m in ens.members]
    return float(np.mean(probs))
