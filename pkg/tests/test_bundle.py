import json

import numpy as np
import pytest

from pdscreen.bundle import (
    FORMAT_VERSION,
    CorruptModel,
    ModelBundle,
    UnknownVersion,
    bundle_to_dict,
    load_bundle,
    save_bundle,
)
from pdscreen.core import FeatureVector
from pdscreen.dataset import Dataset, TaskType
from pdscreen.gbdt import GbdtParams, predict_gbdt, train_gbdt
from pdscreen.screening import AggregatorWeights
from pdscreen.svm import predict_svm_ensemble, train_svm_ensemble


@pytest.fixture(scope="module")
def trained_bundle():
    rng = np.random.default_rng(21)
    x = rng.normal(size=(40, 5))
    names = tuple(f"f{i}" for i in range(5))
    reg = Dataset("m.v1", names, x, rng.normal(size=40), TaskType.REGRESSION)
    cls_y = (x[:, 0] > 0).astype(float)
    cls = Dataset("s.v1", names, x, cls_y, TaskType.BINARY_CLASS)
    face_names = tuple(
        f"face_{task}_x{i}" for task in ("disgust", "smile") for i in range(3)
    )
    face = Dataset(
        "f.v1",
        face_names,
        rng.normal(size=(30, 6)),
        rng.integers(0, 2, 30).astype(float),
        TaskType.BINARY_CLASS,
    )
    return ModelBundle(
        speech_model=train_gbdt(cls, GbdtParams(n_trees=15)),
        face_model=train_svm_ensemble(face, max_passes=100),
        motor_model=train_gbdt(reg, GbdtParams(n_trees=15)),
        weights=AggregatorWeights(0.5, 0.2, 0.3),
    )


class TestRoundTrip:
    def test_predictions_bit_exact_after_round_trip(self, trained_bundle, tmp_path):
        path = tmp_path / "bundle.json"
        save_bundle(trained_bundle, path)
        loaded = load_bundle(path)

        rng = np.random.default_rng(5)
        for _ in range(100):
            row5 = tuple(rng.normal(size=5))
            fv_s = FeatureVector("s.v1", trained_bundle.speech_model.feature_names, row5)
            fv_m = FeatureVector("m.v1", trained_bundle.motor_model.feature_names, row5)
            fv_f = FeatureVector(
                "f.v1",
                trained_bundle.face_model.feature_names,
                tuple(rng.normal(size=6)),
            )
            assert predict_gbdt(loaded.speech_model, fv_s) == predict_gbdt(
                trained_bundle.speech_model, fv_s
            )
            assert predict_gbdt(loaded.motor_model, fv_m) == predict_gbdt(
                trained_bundle.motor_model, fv_m
            )
            assert predict_svm_ensemble(loaded.face_model, fv_f) == predict_svm_ensemble(
                trained_bundle.face_model, fv_f
            )

    def test_weights_survive(self, trained_bundle, tmp_path):
        path = tmp_path / "bundle.json"
        save_bundle(trained_bundle, path)
        weights = load_bundle(path).aggregator()
        assert weights.w_speech == 0.5
        assert weights.motor_probability(2.0) == 0.5

    def test_partial_bundle(self, trained_bundle, tmp_path):
        partial = ModelBundle(speech_model=trained_bundle.speech_model)
        path = tmp_path / "partial.json"
        save_bundle(partial, path)
        loaded = load_bundle(path)
        assert loaded.face_model is None
        assert loaded.motor_model is None
        assert loaded.speech_model is not None


class TestRejection:
    def test_unknown_version(self, trained_bundle, tmp_path):
        d = bundle_to_dict(trained_bundle)
        d["format_version"] = "999"
        path = tmp_path / "v999.json"
        path.write_text(json.dumps(d))
        with pytest.raises(UnknownVersion):
            load_bundle(path)

    def test_truncated_file(self, trained_bundle, tmp_path):
        path = tmp_path / "trunc.json"
        save_bundle(trained_bundle, path)
        path.write_bytes(path.read_bytes()[: path.stat().st_size // 2])
        with pytest.raises(CorruptModel):
            load_bundle(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(CorruptModel):
            load_bundle(tmp_path / "nope.json")

    def test_not_a_bundle(self, tmp_path):
        path = tmp_path / "x.json"
        path.write_text('{"hello": 1}')
        with pytest.raises(CorruptModel):
            load_bundle(path)

    def test_feature_index_out_of_range(self, trained_bundle, tmp_path):
        d = bundle_to_dict(trained_bundle)
        d["speech_model"]["trees"][0] = {
            "feature": 99,
            "threshold": 0.0,
            "left": {"value": 0.0},
            "right": {"value": 0.0},
        }
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(d))
        with pytest.raises(CorruptModel):
            load_bundle(path)

    def test_dual_coef_exceeding_box(self, trained_bundle, tmp_path):
        d = bundle_to_dict(trained_bundle)
        d["face_model"]["members"][0]["dual_coefs"][0] = 1e9
        path = tmp_path / "bad2.json"
        path.write_text(json.dumps(d))
        with pytest.raises(CorruptModel):
            load_bundle(path)

    def test_version_constant(self):
        assert FORMAT_VERSION == "pdscreen.bundle.v1"
