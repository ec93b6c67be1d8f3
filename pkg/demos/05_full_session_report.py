# The whole pipeline in one script: synthesize a screening session on disk
# (WAV + landmark tracks), train a small model bundle, analyze the session,
# and print the participant-facing report.

import json
import tempfile
from pathlib import Path

from pdscreen.bundle import ModelBundle, save_bundle
from pdscreen.cohort import (
    build_face_cohort,
    build_motor_cohort,
    build_speech_cohort,
    write_session_fixture,
)
from pdscreen.core import RiskReport
from pdscreen.gbdt import GbdtParams, train_gbdt
from pdscreen.pipeline import analyze_directory
from pdscreen.screening import load_resource_directory, render_report_text
from pdscreen.svm import train_svm_ensemble

workdir = Path(tempfile.mkdtemp(prefix="pdscreen-demo-"))
print(f"working in {workdir}")

print("training a small bundle on synthetic cohorts...")
params = GbdtParams(n_trees=60, max_depth=3)
bundle = ModelBundle(
    speech_model=train_gbdt(build_speech_cohort(60, seed=1), params),
    face_model=train_svm_ensemble(build_face_cohort(48, seed=2)),
    motor_model=train_gbdt(build_motor_cohort(60, seed=3), params),
)
save_bundle(bundle, workdir / "bundle.json")

print("writing a six-task session fixture (an affected subject)...")
session_dir = workdir / "session-001"
write_session_fixture(session_dir, seed=2024, affected=True)

print("analyzing...")
report_bytes = analyze_directory(session_dir, bundle, load_resource_directory())
report = RiskReport.from_dict(json.loads(report_bytes))

print()
print(render_report_text(report))
print(f"(canonical JSON persisted at {session_dir / 'report.json'})")
