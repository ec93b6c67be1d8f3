"""Multimodal Parkinson's disease screening pipeline.

Guided-task recordings in (pangram speech, expression mimicry, finger
tapping), per-modality features and model scores computed, an aggregated
plain-language risk report out. Ships as a library plus an HTTP service,
a CLI, and a browser UI client.
"""

from .core import (
    FeatureVector,
    Modality,
    ModalityScore,
    ResourceEntry,
    ResourceKind,
    RiskReport,
    SessionManifest,
    SessionStatus,
    SeverityBucket,
    TaskKind,
)

__version__ = "0.1.0"

__all__ = [
    "FeatureVector",
    "Modality",
    "ModalityScore",
    "ResourceEntry",
    "ResourceKind",
    "RiskReport",
    "SessionManifest",
    "SessionStatus",
    "SeverityBucket",
    "TaskKind",
    "__version__",
]
