"""Score aggregation, severity bucketing, and report assembly.

The overall likelihood is a weighted mean of the per-modality
probabilities (the motor severity is first mapped through a monotone
piecewise-linear curve), with weights renormalized over whichever
modalities are actually present. The report always carries the screening
disclaimer and a set of care resources matched to the participant's
region.
"""
from __future__ import annotations

import json
from datetime import datetime
from importlib import resources as importlib_resources
from pathlib import Path

import numpy as np

from .core import (
    Modality,
    ModalityScore,
    ResourceEntry,
    ResourceKind,
    RiskReport,
    SeverityBucket,
    utcnow,
)

DISCLAIMER = (
    "This screening result is informational only and is not intended for "
    "clinical use. It is not a diagnosis. Only a qualified clinician can "
    "diagnose Parkinson's disease; please share these results with a "
    "doctor if you have concerns."
)

_BUCKET_ORDER = (
    SeverityBucket.NONE,
    SeverityBucket.SLIGHT,
    SeverityBucket.MILD,
    SeverityBucket.MODERATE,
    SeverityBucket.SEVERE,
)

MOTOR_SCORE_MAX = 4.0


class ScreeningError(Exception):
    pass


class NoScores(ScreeningError):
    pass


class OutOfRange(ScreeningError):
    pass


class DirectoryMissing(ScreeningError):
    pass


class AggregatorWeights:
    """Modality weights plus the motor severity -> probability curve.

    Weights must be nonnegative and sum to 1; the curve must be monotone
    nondecreasing with f(0) = 0 and f(4) = 1.
    """

    def __init__(
        self,
        w_speech: float = 1 / 3,
        w_face: float = 1 / 3,
        w_motor: float = 1 / 3,
        motor_to_prob: tuple[tuple[float, float], ...] = ((0.0, 0.0), (4.0, 1.0)),
    ):
        weights = (w_speech, w_face, w_motor)
        if any(w < 0 for w in weights):
            raise ValueError("weights must be nonnegative")
        if abs(sum(weights) - 1.0) > 1e-9:
            raise ValueError(f"weights must sum to 1, got {sum(weights)}")
        pts = tuple((float(x), float(y)) for x, y in motor_to_prob)
        if len(pts) < 2 or pts[0] != (0.0, 0.0) or pts[-1][0] != MOTOR_SCORE_MAX or pts[-1][1] != 1.0:
            raise ValueError("motor curve must run from (0, 0) to (4, 1)")
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        if any(b <= a for a, b in zip(xs, xs[1:])) or any(b < a for a, b in zip(ys, ys[1:])):
            raise ValueError("motor curve must be monotone nondecreasing")
        self.w_speech, self.w_face, self.w_motor = weights
        self.motor_to_prob_points = pts

    def weight(self, modality: Modality) -> float:
        return {
            Modality.SPEECH: self.w_speech,
            Modality.FACE: self.w_face,
            Modality.MOTOR: self.w_motor,
        }[modality]

    def motor_probability(self, raw: float) -> float:
        xs = [p[0] for p in self.motor_to_prob_points]
        ys = [p[1] for p in self.motor_to_prob_points]
        return float(np.interp(raw, xs, ys))

    def as_dict(self) -> dict:
        return {
            "w_speech": self.w_speech,
            "w_face": self.w_face,
            "w_motor": self.w_motor,
            "motor_to_prob": [list(p) for p in self.motor_to_prob_points],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AggregatorWeights":
        return cls(
            w_speech=float(d["w_speech"]),
            w_face=float(d["w_face"]),
            w_motor=float(d["w_motor"]),
            motor_to_prob=tuple(tuple(p) for p in d["motor_to_prob"]),
        )


def modality_probability(score: ModalityScore, weights: AggregatorWeights) -> float:
    if score.modality == Modality.MOTOR:
        return weights.motor_probability(score.raw_score)
    return score.raw_score


def aggregate(scores: list[ModalityScore], weights: AggregatorWeights) -> float:
    """Weighted mean probability over present modalities."""
    if not scores:
        raise NoScores("no modality scores to aggregate")
    if len(scores) == 1:
        # renormalization contract: one modality passes through exactly
        return modality_probability(scores[0], weights)
    num = 0.0
    den = 0.0
    for score in scores:
        w = weights.weight(score.modality)
        num += w * modality_probability(score, weights)
        den += w
    if den == 0.0:
        # all present modalities carry zero weight; fall back to plain mean
        return float(np.mean([modality_probability(s, weights) for s in scores]))
    return num / den


def severity_bucket(modality: Modality, raw_score: float) -> SeverityBucket:
    """Deterministic severity bucket for a modality score.

    Probability modalities bucket on [0, 0.2), [0.2, 0.4), ... with the top
    interval closed; motor scores round half-up to the 0-4 item scale.
    """
    if modality == Modality.MOTOR:
        if not 0.0 <= raw_score <= MOTOR_SCORE_MAX:
            raise OutOfRange(f"motor score {raw_score} outside [0, 4]")
        return _BUCKET_ORDER[min(int(np.floor(raw_score + 0.5)), 4)]
    if not 0.0 <= raw_score <= 1.0:
        raise OutOfRange(f"{modality.value} score {raw_score} outside [0, 1]")
    # explicit boundaries: division by 0.2 misplaces the cut points in float
    if raw_score < 0.2:
        return SeverityBucket.NONE
    if raw_score < 0.4:
        return SeverityBucket.SLIGHT
    if raw_score < 0.6:
        return SeverityBucket.MILD
    if raw_score < 0.8:
        return SeverityBucket.MODERATE
    return SeverityBucket.SEVERE


def score_modality(modality: Modality, raw_score: float) -> ModalityScore:
    return ModalityScore(
        modality=modality,
        raw_score=raw_score,
        severity_bucket=severity_bucket(modality, raw_score),
    )


def load_resource_directory(path: str | Path | None = None) -> list[ResourceEntry]:
    """Load the resource directory JSON (the packaged one by default)."""
    if path is None:
        ref = importlib_resources.files("pdscreen").joinpath("data/resources.json")
        try:
            raw = ref.read_text(encoding="utf-8")
        except FileNotFoundError as exc:
            raise DirectoryMissing("packaged resource directory missing") from exc
    else:
        path = Path(path)
        if not path.exists():
            raise DirectoryMissing(f"resource directory not found: {path}")
        raw = path.read_text(encoding="utf-8")
    try:
        entries = json.loads(raw) if raw.strip() else []
    except json.JSONDecodeError as exc:
        raise DirectoryMissing(f"resource directory unreadable: {exc}") from exc
    if not entries:
        raise DirectoryMissing("resource directory is empty")
    return [ResourceEntry.from_dict(e) for e in entries]


def find_resources(
    directory: list[ResourceEntry],
    region_code: str,
    kinds: tuple[ResourceKind, ...] | None = None,
) -> list[ResourceEntry]:
    """Entries for the region, falling back region -> country -> global.

    Global entries use region_code "*". Output ordering is stable: by kind
    (directory enum order) then title.
    """
    if not directory:
        raise DirectoryMissing("resource directory is empty")
    pool = directory
    if kinds is not None:
        pool = [e for e in pool if e.kind in kinds]

    for code in _fallback_codes(region_code):
        matches = [e for e in pool if e.region_code == code]
        if matches:
            kind_order = {k: i for i, k in enumerate(ResourceKind)}
            return sorted(matches, key=lambda e: (kind_order[e.kind], e.title))
    return []


def _fallback_codes(region_code: str) -> list[str]:
    codes = []
    code = (region_code or "*").strip()
    if code and code != "*":
        codes.append(code)
        if "-" in code:
            codes.append(code.split("-", 1)[0])
    codes.append("*")
    return codes


def build_report(
    session_id: str,
    scores: list[ModalityScore],
    directory: list[ResourceEntry],
    region_code: str = "*",
    now: datetime | None = None,
    weights: AggregatorWeights | None = None,
) -> RiskReport:
    """Assemble the participant-facing report.

    With zero scores the report is still produced: likelihood absent, every
    modality marked not assessed, disclaimer present.
    """
    if weights is None:
        weights = AggregatorWeights()
    present = {s.modality for s in scores}
    not_assessed = tuple(m.value for m in Modality if m not in present)
    likelihood = aggregate(scores, weights) if scores else None
    resources = find_resources(directory, region_code)
    return RiskReport(
        session_id=session_id,
        generated_at=now if now is not None else utcnow(),
        modality_scores=tuple(scores),
        not_assessed=not_assessed,
        resources=tuple(resources),
        disclaimer=DISCLAIMER,
        overall_likelihood=likelihood,
    )


_SEVERITY_PHRASES = {
    SeverityBucket.NONE: "no signs detected",
    SeverityBucket.SLIGHT: "slight signs",
    SeverityBucket.MILD: "mild signs",
    SeverityBucket.MODERATE: "moderate signs",
    SeverityBucket.SEVERE: "strong signs",
}

_MODALITY_LABELS = {
    Modality.SPEECH: "Voice",
    Modality.FACE: "Facial expression",
    Modality.MOTOR: "Hand movement",
}


def render_report_text(report: RiskReport) -> str:
    """Plain-language rendering of a report (placeholder copy)."""
    lines = ["Screening results", "================="]
    if report.overall_likelihood is not None:
        lines.append(
            f"Overall likelihood of showing signs of Parkinsonism: "
            f"{report.overall_likelihood * 100:.0f}%"
        )
    else:
        lines.append(
            "Not enough data was collected to estimate an overall likelihood."
        )
    lines.append("")
    by_modality = {s.modality: s for s in report.modality_scores}
    for modality in Modality:
        label = _MODALITY_LABELS[modality]
        score = by_modality.get(modality)
        if score is None:
            lines.append(f"{label}: not assessed")
        else:
            lines.append(f"{label}: {_SEVERITY_PHRASES[score.severity_bucket]}")
    if report.resources:
        lines.append("")
        lines.append("Resources")
        lines.append("---------")
        for entry in report.resources:
            link = entry.url or entry.contact
            lines.append(f"- [{entry.kind.value}] {entry.title}: {link}")
    lines.append("")
    lines.append(report.disclaimer)
    return "\n".join(lines) + "\n"
