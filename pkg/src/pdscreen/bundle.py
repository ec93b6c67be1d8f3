"""Versioned JSON serialization of the trained model set.

A bundle holds the three modality models plus the aggregator weights.
Floats survive the round trip bit-exactly (JSON shortest-repr), so a
loaded bundle predicts identically to the one saved.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .gbdt import GbdtModel, GbdtParams
from .screening import AggregatorWeights
from .svm import SvmEnsemble, SvmMember

FORMAT_VERSION = "pdscreen.bundle.v1"


class BundleError(Exception):
    pass


class UnknownVersion(BundleError):
    pass


class CorruptModel(BundleError):
    pass


@dataclass
class ModelBundle:
    speech_model: GbdtModel | None = None
    face_model: SvmEnsemble | None = None
    motor_model: GbdtModel | None = None
    weights: AggregatorWeights | None = None

    def aggregator(self) -> AggregatorWeights:
        return self.weights if self.weights is not None else AggregatorWeights()


def _check_tree(node: dict, n_features: int, depth: int, max_depth: int):
    if "value" in node:
        if not isinstance(node["value"], (int, float)):
            raise CorruptModel("leaf value is not a number")
        return
    try:
        feature = node["feature"]
        threshold = node["threshold"]
    except (KeyError, TypeError) as exc:
        raise CorruptModel(f"malformed tree node: {exc}") from exc
    if not isinstance(feature, int) or not 0 <= feature < n_features:
        raise CorruptModel(f"feature index {feature} out of range")
    if not isinstance(threshold, (int, float)):
        raise CorruptModel("threshold is not a number")
    if depth >= max_depth:
        raise CorruptModel("tree deeper than the configured maximum")
    _check_tree(node["left"], n_features, depth + 1, max_depth)
    _check_tree(node["right"], n_features, depth + 1, max_depth)


def _gbdt_to_dict(model: GbdtModel) -> dict:
    return {
        "objective": model.objective,
        "base_score": model.base_score,
        "learning_rate": model.learning_rate,
        "schema_id": model.schema_id,
        "feature_names": list(model.feature_names),
        "trees": model.trees,
        "params": {
            "n_trees": model.params.n_trees,
            "max_depth": model.params.max_depth,
            "learning_rate": model.params.learning_rate,
            "min_leaf": model.params.min_leaf,
            "reg_lambda": model.params.reg_lambda,
        },
    }


def _gbdt_from_dict(d: dict) -> GbdtModel:
    try:
        params = GbdtParams(**d["params"])
        model = GbdtModel(
            objective=d["objective"],
            base_score=float(d["base_score"]),
            trees=d["trees"],
            learning_rate=float(d["learning_rate"]),
            schema_id=d["schema_id"],
            feature_names=tuple(d["feature_names"]),
            params=params,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptModel(f"malformed GBDT model: {exc}") from exc
    for tree in model.trees:
        _check_tree(tree, len(model.feature_names), 0, params.max_depth)
    return model


def _svm_to_dict(ens: SvmEnsemble) -> dict:
    return {
        "schema_id": ens.schema_id,
        "feature_names": list(ens.feature_names),
        "members": [
            {
                "feature_indices": list(m.feature_indices),
                "support_vectors": m.support_vectors.tolist(),
                "dual_coefs": m.dual_coefs.tolist(),
                "bias": m.bias,
                "gamma": m.gamma,
                "c": m.c,
                "converged": m.converged,
            }
            for m in ens.members
        ],
    }


def _svm_from_dict(d: dict) -> SvmEnsemble:
    try:
        ens = SvmEnsemble(
            schema_id=d["schema_id"], feature_names=tuple(d["feature_names"])
        )
        for md in d["members"]:
            member = SvmMember(
                feature_indices=tuple(md["feature_indices"]),
                support_vectors=np.array(md["support_vectors"], dtype=np.float64),
                dual_coefs=np.array(md["dual_coefs"], dtype=np.float64),
                bias=float(md["bias"]),
                gamma=float(md["gamma"]),
                c=float(md["c"]),
                converged=bool(md.get("converged", True)),
            )
            if len(member.support_vectors) < 1:
                raise CorruptModel("SVM member has no support vectors")
            if member.support_vectors.ndim != 2 or len(member.dual_coefs) != len(
                member.support_vectors
            ):
                raise CorruptModel("SVM member shapes disagree")
            if np.any(np.abs(member.dual_coefs) > member.c + 1e-9):
                raise CorruptModel("dual coefficients exceed the box constraint")
            if any(
                not 0 <= i < len(ens.feature_names) for i in member.feature_indices
            ):
                raise CorruptModel("SVM member feature index out of range")
            ens.members.append(member)
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptModel(f"malformed SVM ensemble: {exc}") from exc
    return ens


def bundle_to_dict(bundle: ModelBundle) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "speech_model": None
        if bundle.speech_model is None
        else _gbdt_to_dict(bundle.speech_model),
        "face_model": None
        if bundle.face_model is None
        else _svm_to_dict(bundle.face_model),
        "motor_model": None
        if bundle.motor_model is None
        else _gbdt_to_dict(bundle.motor_model),
        "aggregator": bundle.aggregator().as_dict(),
    }


def bundle_from_dict(d: dict) -> ModelBundle:
    if not isinstance(d, dict) or "format_version" not in d:
        raise CorruptModel("not a model bundle")
    if d["format_version"] != FORMAT_VERSION:
        raise UnknownVersion(f"unsupported bundle version {d['format_version']!r}")
    try:
        weights = AggregatorWeights.from_dict(d["aggregator"])
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptModel(f"malformed aggregator weights: {exc}") from exc
    return ModelBundle(
        speech_model=None
        if d.get("speech_model") is None
        else _gbdt_from_dict(d["speech_model"]),
        face_model=None
        if d.get("face_model") is None
        else _svm_from_dict(d["face_model"]),
        motor_model=None
        if d.get("motor_model") is None
        else _gbdt_from_dict(d["motor_model"]),
        weights=weights,
    )


def save_bundle(bundle: ModelBundle, path: str | Path) -> None:
    path = Path(path)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(json.dumps(bundle_to_dict(bundle), indent=1), encoding="utf-8")
    tmp.replace(path)


def load_bundle(path: str | Path) -> ModelBundle:
    path = Path(path)
    if not path.exists():
        raise CorruptModel(f"bundle file not found: {path}")
    try:
        d = json.loads(path.read_text(encoding="utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise CorruptModel(f"bundle is not valid JSON: {exc}") from exc
    return bundle_from_dict(d)
