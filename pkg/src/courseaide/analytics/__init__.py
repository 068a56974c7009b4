"""Interaction analytics: usage reports, annotation aggregation, sampling,
and the synthetic log generator that anchors the report tests."""

from .annotations import (
    Annotation,
    AnnotationValidationError,
    aggregate_annotations,
    read_annotations_csv,
)
from .reports import DurationBuckets, UsageReport, compute_report, follow_up_report
from .sampling import SampleResult, has_llm_question, sample_for_annotation
from .synthetic import CourseSpec, SimulationSpec, generate_synthetic_logs

__all__ = [
    "Annotation",
    "AnnotationValidationError",
    "aggregate_annotations",
    "read_annotations_csv",
    "DurationBuckets",
    "UsageReport",
    "compute_report",
    "follow_up_report",
    "SampleResult",
    "has_llm_question",
    "sample_for_annotation",
    "CourseSpec",
    "SimulationSpec",
    "generate_synthetic_logs",
]
