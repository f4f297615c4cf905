"""Ground truth, segment matching, and precision/recall reporting.

A page's extracted segments are matched one-to-one against annotated
segments: the image sources must intersect and the context text must
match under the chosen policy (exact string equality after whitespace
collapse and lowercasing, or a word-set Jaccard threshold). Precision is
correct/extracted, recall correct/actual, both 0 on a zero denominator.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

from .dom import DomTree, normalize_text
from .images import FilterPolicy
from .segmenter import ImageClass, ImageSegment, segment_page
from .structure import DEFAULT_TOLERANCE

__all__ = [
    "GroundTruthSegment",
    "GroundTruthPage",
    "MatchMode",
    "MatchPolicy",
    "PageEval",
    "EvalReport",
    "match_segments",
    "precision_recall",
    "evaluate_corpus",
    "load_ground_truth",
    "format_report_table",
]


@dataclass(frozen=True)
class GroundTruthSegment:
    image_srcs: tuple[str, ...]
    context_text: str
    label: ImageClass | None = None

    def __post_init__(self):
        if not self.image_srcs:
            raise ValueError("a ground-truth segment needs at least one image src")
        if len(set(self.image_srcs)) != len(self.image_srcs):
            raise ValueError("image srcs must be unique within a ground-truth segment")


@dataclass(frozen=True)
class GroundTruthPage:
    source_identifier: str
    segments: tuple[GroundTruthSegment, ...]


class MatchMode(Enum):
    EXACT = "exact"
    JACCARD = "jaccard"


@dataclass(frozen=True)
class MatchPolicy:
    mode: MatchMode = MatchMode.EXACT
    jaccard_threshold: float = 0.8

    def __post_init__(self):
        if not 0 < self.jaccard_threshold <= 1:
            raise ValueError("jaccard_threshold must be in (0, 1]")


@dataclass
class PageEval:
    source: str
    actual: int
    extracted: int
    correct: int
    ambiguous: bool = False


@dataclass
class EvalReport:
    actual: int
    extracted: int
    correct: int
    precision: float
    recall: float
    per_page: list[PageEval] = field(default_factory=list)
    config_echo: dict = field(default_factory=dict)
    mean_seconds_per_page: float = 0.0

    def to_dict(self) -> dict:
        return {
            "actual": self.actual,
            "extracted": self.extracted,
            "correct": self.correct,
            "precision": self.precision,
            "recall": self.recall,
            "per_page": [
                {
                    "source": page.source,
                    "actual": page.actual,
                    "extracted": page.extracted,
                    "correct": page.correct,
                    "ambiguous": page.ambiguous,
                }
                for page in self.per_page
            ],
            "config": self.config_echo,
            "mean_seconds_per_page": self.mean_seconds_per_page,
        }


def _match_text(text: str) -> str:
    return normalize_text(text).lower()


def _segment_text(segment: ImageSegment) -> str:
    return _match_text(" ".join(segment.context_texts))


def _texts_match(extracted: str, truth: str, policy: MatchPolicy) -> bool:
    if policy.mode is MatchMode.EXACT:
        return extracted == truth
    extracted_words = set(extracted.split())
    truth_words = set(truth.split())
    union = extracted_words | truth_words
    if not union:
        return True
    jaccard = len(extracted_words & truth_words) / len(union)
    return jaccard >= policy.jaccard_threshold


def _match_page(
    extracted: Sequence[ImageSegment],
    truth: GroundTruthPage,
    policy: MatchPolicy,
) -> tuple[int, bool]:
    truth_texts = [_match_text(segment.context_text) for segment in truth.segments]
    truth_srcs = [frozenset(segment.image_srcs) for segment in truth.segments]
    taken = [False] * len(truth.segments)
    correct = 0
    ambiguous = False
    for segment in extracted:
        text = _segment_text(segment)
        srcs = {image.src for image in segment.images}
        candidates = [
            index
            for index in range(len(truth.segments))
            if srcs & truth_srcs[index] and _texts_match(text, truth_texts[index], policy)
        ]
        if len(candidates) > 1:
            ambiguous = True
        for index in candidates:
            if not taken[index]:
                taken[index] = True
                correct += 1
                break
    return correct, ambiguous


def match_segments(
    extracted: Sequence[ImageSegment],
    truth: GroundTruthPage,
    policy: MatchPolicy | None = None,
) -> int:
    """Greedy one-to-one matching in document order; returns the number of
    correctly extracted segments."""
    correct, _ = _match_page(extracted, truth, policy or MatchPolicy())
    return correct


def precision_recall(correct: int, extracted: int, actual: int) -> tuple[float, float]:
    """(precision, recall) with the 0-denominator convention; total function."""
    precision = correct / extracted if extracted else 0.0
    recall = correct / actual if actual else 0.0
    return precision, recall


def evaluate_corpus(
    pages: Sequence[tuple[DomTree, GroundTruthPage]],
    policy: FilterPolicy | None = None,
    tolerance: float = DEFAULT_TOLERANCE,
    match: MatchPolicy | None = None,
) -> EvalReport:
    """Segment every page, match against its truth, and aggregate counts.

    Also measures mean segmentation wall time per page. Pairs whose tree
    and truth identifiers disagree are a configuration error.
    """
    policy = policy or FilterPolicy()
    match = match or MatchPolicy()

    mismatched = [
        f"{tree.source_identifier!r} != {truth.source_identifier!r}"
        for tree, truth in pages
        if tree.source_identifier != truth.source_identifier
    ]
    if mismatched:
        raise ValueError("page/truth identifier mismatch: " + ", ".join(mismatched))

    report = EvalReport(actual=0, extracted=0, correct=0, precision=0.0, recall=0.0)
    elapsed = 0.0
    for tree, truth in pages:
        started = time.perf_counter()
        page_result = segment_page(tree, policy=policy, tolerance=tolerance)
        elapsed += time.perf_counter() - started
        correct, ambiguous = _match_page(page_result.segments, truth, match)
        page_eval = PageEval(
            source=truth.source_identifier,
            actual=len(truth.segments),
            extracted=len(page_result.segments),
            correct=correct,
            ambiguous=ambiguous,
        )
        report.per_page.append(page_eval)
        report.actual += page_eval.actual
        report.extracted += page_eval.extracted
        report.correct += page_eval.correct

    report.precision, report.recall = precision_recall(
        report.correct, report.extracted, report.actual
    )
    report.mean_seconds_per_page = elapsed / len(pages) if pages else 0.0
    report.config_echo = {
        "tolerance": tolerance,
        "match_mode": match.mode.value,
        "jaccard_threshold": match.jaccard_threshold,
        "filter_policy": {
            "large_min_px": policy.large_min_px,
            "small_min_px": policy.small_min_px,
            "unknown_dims_valid": policy.unknown_dims_valid,
        },
    }
    return report


_LABELS = {klass.value: klass for klass in ImageClass}


def load_ground_truth(text_or_path) -> dict[str, GroundTruthPage]:
    """Read the ground-truth JSON file: a list of pages, each with a
    ``source`` and its ``segments`` of ``{images, text, label}``."""
    if hasattr(text_or_path, "read_text"):
        raw = text_or_path.read_text(encoding="utf-8")
    else:
        raw = text_or_path
    data = json.loads(raw)
    if not isinstance(data, list):
        raise ValueError("ground truth must be a JSON list of pages")
    pages: dict[str, GroundTruthPage] = {}
    for entry in data:
        source = entry["source"]
        segments = []
        for segment in entry.get("segments", []):
            label_raw = segment.get("label")
            label = _LABELS[label_raw] if label_raw else None
            segments.append(
                GroundTruthSegment(
                    image_srcs=tuple(segment["images"]),
                    context_text=segment["text"],
                    label=label,
                )
            )
        if source in pages:
            raise ValueError(f"duplicate ground-truth entry for {source!r}")
        pages[source] = GroundTruthPage(source_identifier=source, segments=tuple(segments))
    return pages


def format_report_table(report: EvalReport, column: str = "This run") -> str:
    """Plain-text summary with Actual/Extracted/Correct/Recall/Precision rows."""
    rows = [
        ("Actual", str(report.actual)),
        ("Extracted", str(report.extracted)),
        ("Correct", str(report.correct)),
        ("Recall", f"{report.recall:.2f}"),
        ("Precision", f"{report.precision:.2f}"),
    ]
    label_width = max(len(label) for label, _ in rows)
    value_width = max(len(column), max(len(value) for _, value in rows))
    lines = [f"{'':<{label_width}}  {column:>{value_width}}"]
    for label, value in rows:
        lines.append(f"{label:<{label_width}}  {value:>{value_width}}")
    return "\n".join(lines)
