"""Expression-activation features from face landmark tracks.

Each of the three mimicry tasks (disgust, smile, surprise) contributes the
same per-task block — action-unit summary statistics over a fixed AU
subset plus two landmark-mobility measures and a presence flag — and the
blocks concatenate, task-name-prefixed, into the ``face.v1`` vector.
"""
from __future__ import annotations

import numpy as np

from .core import FACE_TASKS, FeatureVector, TaskKind
from .ingest import LandmarkTrack, TrackKind

FACE_SCHEMA_ID = "face.v1"

# Action units summarized per task (OpenFace naming): brow raiser/lowerer,
# cheek raiser, nose wrinkler, lip-corner puller, lips part, jaw drop.
AU_SUBSET = ("AU01", "AU02", "AU04", "AU06", "AU09", "AU12", "AU25", "AU26")
AU_STAT_NAMES = ("mean", "std", "max", "activation")
AU_ACTIVATION_THRESHOLD = 0.5

# MediaPipe FaceMesh indices. "left"/"right" follow image coordinates:
# index 33/70/105/61 sit on the low-x side of the mesh, 263/300/334/291 on
# the high-x side.
EYE_OUTER_CORNERS = (33, 263)       # inter-ocular normalization
MOUTH_CORNERS = (61, 291)
BROW_OUTER = (70, 300)
BROW_MID = (105, 334)
UPPER_LIP, LOWER_LIP = 13, 14

# landmarks whose peak displacement defines the mobility amplitude
MOBILITY_POINTS = (*MOUTH_CORNERS, *BROW_OUTER, *BROW_MID, UPPER_LIP, LOWER_LIP)
# low-x/high-x pairs compared (with the x-displacement mirrored) for asymmetry
MIRROR_PAIRS = (MOUTH_CORNERS, BROW_OUTER, BROW_MID)


class FaceError(Exception):
    pass


class MissingAUs(FaceError):
    pass


class TooFewFrames(FaceError):
    pass


class DegenerateGeometry(FaceError):
    pass


class NoFaceTasks(FaceError):
    pass


def au_statistics(track: LandmarkTrack) -> dict[str, tuple[float, float, float, float]]:
    """Per-AU (mean, std, max, activation_fraction) over the track's frames.

    Activation fraction counts frames with intensity above
    :data:`AU_ACTIVATION_THRESHOLD`. AUs absent from some frames are read
    as intensity 0 there.
    """
    if track.kind != TrackKind.FACE:
        raise ValueError("au_statistics needs a face track")
    if any(f.aus is None for f in track.frames):
        raise MissingAUs("track frames carry no action-unit intensities")

    keys = sorted(set().union(*(f.aus.keys() for f in track.frames)))
    out = {}
    for key in keys:
        series = np.array([f.aus.get(key, 0.0) for f in track.frames])
        out[key] = (
            float(series.mean()),
            float(series.std()),
            float(series.max()),
            float(np.mean(series > AU_ACTIVATION_THRESHOLD)),
        )
    return out


def _normalized_points(track: LandmarkTrack) -> np.ndarray:
    pts = np.stack([f.points for f in track.frames])
    left, right = EYE_OUTER_CORNERS
    iod = np.linalg.norm(pts[:, left] - pts[:, right], axis=1)
    if np.any(iod < 1e-6):
        raise DegenerateGeometry("inter-ocular distance collapsed to zero")
    return pts / iod[:, None, None]


def landmark_mobility(track: LandmarkTrack) -> tuple[float, float]:
    """(amplitude, asymmetry) of face motion, inter-ocular normalized.

    Amplitude: mean over the mouth/brow subset of each landmark's maximum
    displacement from the first frame. Asymmetry: mean difference between
    each low-x landmark's displacement and its high-x partner's mirrored
    displacement.
    """
    if track.kind != TrackKind.FACE:
        raise ValueError("landmark_mobility needs a face track")
    if len(track.frames) < 2:
        raise TooFewFrames("mobility needs at least 2 frames")

    pts = _normalized_points(track)
    disp = pts - pts[0]  # (n_frames, n_points, 3)

    subset = disp[:, MOBILITY_POINTS, :]
    amplitude = float(np.linalg.norm(subset, axis=2).max(axis=0).mean())

    diffs = []
    for low, high in MIRROR_PAIRS:
        mirrored = disp[1:, high, :].copy()
        mirrored[:, 0] = -mirrored[:, 0]
        diffs.append(np.linalg.norm(disp[1:, low, :] - mirrored, axis=1))
    asymmetry = float(np.mean(diffs)) if diffs else 0.0
    return amplitude, asymmetry


def _task_block_names(task: TaskKind) -> tuple[str, ...]:
    names = []
    for au in AU_SUBSET:
        for stat in AU_STAT_NAMES:
            names.append(f"{task.value}_{au.lower()}_{stat}")
    names.append(f"{task.value}_mobility_amplitude")
    names.append(f"{task.value}_mobility_asymmetry")
    names.append(f"{task.value}_present")
    return tuple(names)


FACE_FEATURE_NAMES = tuple(
    name for task in FACE_TASKS for name in _task_block_names(task)
)


def extract_face_features(
    tracks: dict[TaskKind, LandmarkTrack],
) -> FeatureVector:
    """The ``face.v1`` vector from whichever mimicry tasks are present.

    Absent tasks contribute zeros plus a presence flag of 0, so one schema
    serves complete and partial sessions alike.
    """
    if not any(task in tracks for task in FACE_TASKS):
        raise NoFaceTasks("no face task tracks supplied")

    values: list[float] = []
    for task in FACE_TASKS:
        track = tracks.get(task)
        if track is None:
            values.extend([0.0] * (len(AU_SUBSET) * len(AU_STAT_NAMES) + 2))
            values.append(0.0)
            continue
        stats = au_statistics(track)
        for au in AU_SUBSET:
            values.extend(stats.get(au, (0.0, 0.0, 0.0, 0.0)))
        amplitude, asymmetry = landmark_mobility(track)
        values.extend([amplitude, asymmetry, 1.0])

    return FeatureVector(
        schema_id=FACE_SCHEMA_ID,
        names=FACE_FEATURE_NAMES,
        values=tuple(values),
    )
