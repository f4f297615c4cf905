"""imgseg: webpage segmentation for images and their surrounding text.

Parse HTML into a normalized DOM tree, pick out the images worth keeping,
and walk upward from each one to find the region a reader would say the
image belongs to, together with the text inside it. Ships a fixed-window
baseline, a precision/recall evaluation harness, scikit-learn style
transformers, and a CLI (``imgseg``).
"""

from .baseline import WindowContext, fixed_window_context
from .dom import (
    DomNode,
    DomTree,
    NodeKind,
    TreeBuilder,
    ancestors,
    child_index_path,
    subtree_counts,
    tree_to_html,
)
from .estimators import FixedWindowBaseline, ImageSegmenter
from .evaluation import (
    EvalReport,
    GroundTruthPage,
    GroundTruthSegment,
    MatchMode,
    MatchPolicy,
    evaluate_corpus,
    load_ground_truth,
    match_segments,
    precision_recall,
)
from .images import (
    FilterPolicy,
    ImageDescriptor,
    collect_images,
    collect_valid_images,
    is_valid_image,
)
from .ingest import IngestOptions, parse_html
from .segmenter import (
    ImageClass,
    ImageSegment,
    PageSegmentation,
    SkippedImage,
    find_segment,
    segment_page,
)
from .structure import (
    PartitionPlan,
    find_semi_listed_partition,
    is_listed_context,
    shape_signature,
    signatures_similar,
)

__version__ = "0.1.0"

__all__ = [
    "DomNode",
    "DomTree",
    "NodeKind",
    "TreeBuilder",
    "ancestors",
    "subtree_counts",
    "child_index_path",
    "tree_to_html",
    "IngestOptions",
    "parse_html",
    "FilterPolicy",
    "ImageDescriptor",
    "is_valid_image",
    "collect_images",
    "collect_valid_images",
    "PartitionPlan",
    "shape_signature",
    "signatures_similar",
    "is_listed_context",
    "find_semi_listed_partition",
    "ImageClass",
    "ImageSegment",
    "PageSegmentation",
    "SkippedImage",
    "find_segment",
    "segment_page",
    "WindowContext",
    "fixed_window_context",
    "GroundTruthPage",
    "GroundTruthSegment",
    "MatchMode",
    "MatchPolicy",
    "EvalReport",
    "match_segments",
    "precision_recall",
    "evaluate_corpus",
    "load_ground_truth",
    "ImageSegmenter",
    "FixedWindowBaseline",
]
