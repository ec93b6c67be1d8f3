# Train the three modality models on synthetic cohorts with planted
# effects and evaluate held-out performance: the from-scratch GBDT and
# SVM-ensemble learners against the AUC / MAE / Pearson metrics.

from pdscreen.cohort import (
    build_face_cohort,
    build_motor_cohort,
    build_speech_cohort,
    split_dataset,
)
from pdscreen.core import FeatureVector
from pdscreen.gbdt import GbdtParams, predict_gbdt_batch, train_gbdt
from pdscreen.metrics import auc, mae_pearson
from pdscreen.svm import predict_svm_ensemble, train_svm_ensemble

N = 160  # bump to 400 for the acceptance-level run

print("generating cohorts (planted effects: jitter/shimmer up, AU range down,")
print("tap rate/amplitude down with decrement)...")
speech = build_speech_cohort(N, seed=101)
face = build_face_cohort(N, seed=102)
motor = build_motor_cohort(N, seed=103)

s_train, s_test = split_dataset(speech, 0.8, seed=1)
model = train_gbdt(s_train, GbdtParams(n_trees=120))
print(f"speech GBDT held-out AUC : {auc(predict_gbdt_batch(model, s_test.x), s_test.y):.3f}")

f_train, f_test = split_dataset(face, 0.8, seed=2)
ensemble = train_svm_ensemble(f_train)
preds = [
    predict_svm_ensemble(ensemble, FeatureVector(f_test.schema_id, f_test.feature_names, tuple(r)))
    for r in f_test.x
]
print(f"face SVM ensemble AUC    : {auc(preds, f_test.y):.3f}")

m_train, m_test = split_dataset(motor, 0.8, seed=3)
regressor = train_gbdt(m_train, GbdtParams(n_trees=120))
mae, r = mae_pearson(predict_gbdt_batch(regressor, m_test.x), m_test.y)
print(f"motor GBDT regressor     : MAE {mae:.3f}, Pearson r {r:.3f}")
