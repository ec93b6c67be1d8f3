import pytest

from pdscreen.bundle import ModelBundle
from pdscreen.cohort import build_face_cohort, build_motor_cohort, build_speech_cohort
from pdscreen.gbdt import GbdtParams, train_gbdt
from pdscreen.screening import load_resource_directory
from pdscreen.svm import train_svm_ensemble


@pytest.fixture(scope="session")
def small_bundle() -> ModelBundle:
    """A quick-to-train bundle for service/CLI/pipeline tests; model quality
    is irrelevant there, only schema compatibility."""
    params = GbdtParams(n_trees=40, max_depth=3)
    return ModelBundle(
        speech_model=train_gbdt(build_speech_cohort(48, seed=9001), params),
        face_model=train_svm_ensemble(build_face_cohort(32, seed=9002), max_passes=400),
        motor_model=train_gbdt(build_motor_cohort(48, seed=9003), params),
    )


@pytest.fixture(scope="session")
def resource_directory():
    return load_resource_directory()
