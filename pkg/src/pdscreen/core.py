"""Shared domain types: tasks, sessions, feature vectors, scores, reports.

Everything here is an immutable value type with a stable snake_case JSON
encoding; these encodings are the wire format of the HTTP API and the
on-disk session store.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone


class TaskKind(str, enum.Enum):
    """The six guided recording tasks of one screening session."""

    SPEECH = "speech"
    FACE_DISGUST = "face_disgust"
    FACE_SMILE = "face_smile"
    FACE_SURPRISE = "face_surprise"
    MOTOR_LEFT = "motor_left"
    MOTOR_RIGHT = "motor_right"


FACE_TASKS = (TaskKind.FACE_DISGUST, TaskKind.FACE_SMILE, TaskKind.FACE_SURPRISE)
MOTOR_TASKS = (TaskKind.MOTOR_LEFT, TaskKind.MOTOR_RIGHT)


class Modality(str, enum.Enum):
    SPEECH = "speech"
    FACE = "face"
    MOTOR = "motor"


class SessionStatus(str, enum.Enum):
    COLLECTING = "collecting"
    ANALYZING = "analyzing"
    COMPLETE = "complete"
    FAILED = "failed"


class SeverityBucket(str, enum.Enum):
    NONE = "none"
    SLIGHT = "slight"
    MILD = "mild"
    MODERATE = "moderate"
    SEVERE = "severe"


class ResourceKind(str, enum.Enum):
    NEUROLOGIST = "neurologist"
    SUPPORT_GROUP = "support_group"
    EXERCISE = "exercise"
    DIET = "diet"
    EXTERNAL = "external"


class CoreError(Exception):
    """Base class for domain-type validation failures."""


class LengthMismatch(CoreError):
    pass


class NonFiniteValue(CoreError):
    def __init__(self, name: str):
        super().__init__(f"feature {name!r} is not finite")
        self.name = name


class EmptySchema(CoreError):
    pass


def utcnow() -> datetime:
    return datetime.now(timezone.utc)


def _encode_time(dt: datetime) -> str:
    return dt.astimezone(timezone.utc).isoformat()


def _decode_time(s: str) -> datetime:
    return datetime.fromisoformat(s)


@dataclass(frozen=True)
class FeatureVector:
    """Ordered, named, finite feature values for one modality.

    ``schema_id`` names the feature schema and version (e.g. ``speech.v1``);
    for a given schema_id the name tuple is identical across all vectors, so
    trained models can reject mismatched feature sets.
    """

    schema_id: str
    names: tuple[str, ...]
    values: tuple[float, ...]

    def as_dict(self) -> dict:
        return {
            "schema_id": self.schema_id,
            "names": list(self.names),
            "values": [float(v) for v in self.values],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FeatureVector":
        return cls(
            schema_id=d["schema_id"],
            names=tuple(d["names"]),
            values=tuple(float(v) for v in d["values"]),
        )


def validate_feature_vector(fv: FeatureVector) -> None:
    """Raise unless the vector satisfies the FeatureVector invariants."""
    if len(fv.names) == 0:
        raise EmptySchema("feature vector has no features")
    if len(fv.names) != len(fv.values):
        raise LengthMismatch(
            f"{len(fv.names)} names but {len(fv.values)} values"
        )
    for name, value in zip(fv.names, fv.values):
        if not math.isfinite(value):
            raise NonFiniteValue(name)


@dataclass(frozen=True)
class SessionManifest:
    """One screening session: participant handle, artifacts, lifecycle status."""

    session_id: str
    created_at: datetime
    artifacts: dict[TaskKind, str] = field(default_factory=dict)
    status: SessionStatus = SessionStatus.COLLECTING
    participant: str = ""
    region: str = "*"
    errors: dict[str, str] = field(default_factory=dict)

    def with_artifact(self, task: TaskKind, ref: str) -> "SessionManifest":
        artifacts = dict(self.artifacts)
        artifacts[task] = ref
        return replace(self, artifacts=artifacts)

    def with_status(self, status: SessionStatus) -> "SessionManifest":
        return replace(self, status=status)

    def as_dict(self) -> dict:
        return {
            "session_id": self.session_id,
            "created_at": _encode_time(self.created_at),
            "artifacts": {k.value: v for k, v in sorted(self.artifacts.items())},
            "status": self.status.value,
            "participant": self.participant,
            "region": self.region,
            "errors": dict(sorted(self.errors.items())),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SessionManifest":
        return cls(
            session_id=d["session_id"],
            created_at=_decode_time(d["created_at"]),
            artifacts={TaskKind(k): v for k, v in d.get("artifacts", {}).items()},
            status=SessionStatus(d.get("status", "collecting")),
            participant=d.get("participant", ""),
            region=d.get("region", "*"),
            errors=dict(d.get("errors", {})),
        )


def session_ready_for_analysis(m: SessionManifest) -> bool:
    """True iff the session has at least one artifact and is still collecting."""
    return bool(m.artifacts) and m.status == SessionStatus.COLLECTING


@dataclass(frozen=True)
class ModalityScore:
    """One modality's model output plus its severity bucket.

    ``raw_score`` is a probability in [0, 1] for speech and face, and a
    predicted severity in [0, 4] for motor.
    """

    modality: Modality
    raw_score: float
    severity_bucket: SeverityBucket

    def as_dict(self) -> dict:
        return {
            "modality": self.modality.value,
            "raw_score": float(self.raw_score),
            "severity_bucket": self.severity_bucket.value,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ModalityScore":
        return cls(
            modality=Modality(d["modality"]),
            raw_score=float(d["raw_score"]),
            severity_bucket=SeverityBucket(d["severity_bucket"]),
        )


@dataclass(frozen=True)
class ResourceEntry:
    """A care resource: provider directory, support group, lifestyle link."""

    kind: ResourceKind
    title: str
    region_code: str
    url: str = ""
    contact: str = ""

    def as_dict(self) -> dict:
        d = {
            "kind": self.kind.value,
            "title": self.title,
            "region_code": self.region_code,
        }
        if self.url:
            d["url"] = self.url
        if self.contact:
            d["contact"] = self.contact
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ResourceEntry":
        return cls(
            kind=ResourceKind(d["kind"]),
            title=d["title"],
            region_code=d["region_code"],
            url=d.get("url", ""),
            contact=d.get("contact", ""),
        )


@dataclass(frozen=True)
class RiskReport:
    """Aggregated screening outcome presented to the participant.

    ``overall_likelihood`` is present iff at least one modality produced a
    score; the disclaimer is always present and non-empty.
    """

    session_id: str
    generated_at: datetime
    modality_scores: tuple[ModalityScore, ...]
    not_assessed: tuple[str, ...]
    resources: tuple[ResourceEntry, ...]
    disclaimer: str
    overall_likelihood: float | None = None

    def as_dict(self) -> dict:
        d = {
            "session_id": self.session_id,
            "generated_at": _encode_time(self.generated_at),
            "modality_scores": [s.as_dict() for s in self.modality_scores],
            "not_assessed": list(self.not_assessed),
            "resources": [r.as_dict() for r in self.resources],
            "disclaimer": self.disclaimer,
        }
        if self.overall_likelihood is not None:
            d["overall_likelihood"] = float(self.overall_likelihood)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RiskReport":
        likelihood = d.get("overall_likelihood")
        return cls(
            session_id=d["session_id"],
            generated_at=_decode_time(d["generated_at"]),
            modality_scores=tuple(
                ModalityScore.from_dict(s) for s in d["modality_scores"]
            ),
            not_assessed=tuple(d.get("not_assessed", [])),
            resources=tuple(ResourceEntry.from_dict(r) for r in d["resources"]),
            disclaimer=d["disclaimer"],
            overall_likelihood=None if likelihood is None else float(likelihood),
        )
