# Expression mimicry features: action-unit statistics and landmark mobility
# for an expressive face versus a hypomimic (reduced-expression) one.

import numpy as np

from pdscreen.cohort import FaceProfile, synth_face_track
from pdscreen.core import FACE_TASKS
from pdscreen.face import extract_face_features

rng = np.random.default_rng(11)

for label, expressivity in [("expressive", 1.1), ("hypomimic", 0.3)]:
    profile = FaceProfile(expressivity=expressivity)
    tracks = {task: synth_face_track(rng, task, profile) for task in FACE_TASKS}
    fv = extract_face_features(tracks)
    d = dict(zip(fv.names, fv.values))
    print(f"--- {label} (expressivity {expressivity})")
    print(f"    smile AU12 max        {d['face_smile_au12_max']:7.3f}")
    print(f"    smile mobility amp    {d['face_smile_mobility_amplitude']:7.4f}")
    print(f"    surprise AU01 max     {d['face_surprise_au01_max']:7.3f}")
    print(f"    disgust AU09 max      {d['face_disgust_au09_max']:7.3f}")
    print(f"    vector length         {len(fv.values)}")
