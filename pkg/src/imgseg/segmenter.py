"""Per-image segment discovery via upward text-count tracking.

Each valid image starts a walk from its own node toward the root. The
walk watches the descendant text count at every ancestor; a level where
that count moves while both image and text counts are positive marks a
candidate boundary. The first such level is the tight boundary: if its
children form a repeating image+text pattern the image is semi-listed and
the matching range is the segment. Otherwise the walk continues until a
second change: look-alike image-bearing siblings there mean a listed
image (keep the tight boundary), anything else an unlisted image (keep
the wider one). Running out of ancestors after one change falls back to
the tight boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .dom import DomTree, NodeKind, subtree_counts
from .images import FilterPolicy, ImageDescriptor, collect_images, is_valid_image
from .structure import DEFAULT_TOLERANCE, find_semi_listed_partition, is_listed_context

__all__ = [
    "ImageClass",
    "ImageSegment",
    "SkippedImage",
    "PageSegmentation",
    "find_segment",
    "segment_page",
]

SKIP_FILTERED = "filtered_invalid"
SKIP_NO_TEXT = "no_text_context"


class ImageClass(Enum):
    UNLISTED = "unlisted"
    LISTED = "listed"
    SEMI_LISTED = "semi-listed"


@dataclass(frozen=True)
class ImageSegment:
    """An extracted region: boundary node, the images it answers for, and
    the surrounding text in document order."""

    root: int
    child_range: tuple[int, int] | None
    images: tuple[ImageDescriptor, ...]
    image_class: ImageClass
    context_texts: tuple[str, ...]
    page_title: str = ""


@dataclass(frozen=True)
class SkippedImage:
    src: str
    reason: str


@dataclass
class PageSegmentation:
    segments: list[ImageSegment] = field(default_factory=list)
    skipped: list[SkippedImage] = field(default_factory=list)


def _texts_under(tree: DomTree, root: int, child_range: tuple[int, int] | None) -> tuple[str, ...]:
    if child_range is None:
        roots = [root]
    else:
        start, end = child_range
        roots = list(tree.node(root).children[start:end])
    texts: list[str] = []
    for subtree_root in roots:
        for node_id in tree.iter_preorder(subtree_root):
            node = tree.node(node_id)
            if node.kind is NodeKind.TEXT:
                texts.append(node.text or "")
    return tuple(texts)


def _make_segment(
    tree: DomTree,
    root: int,
    child_range: tuple[int, int] | None,
    image: ImageDescriptor,
    image_class: ImageClass,
) -> ImageSegment:
    return ImageSegment(
        root=root,
        child_range=child_range,
        images=(image,),
        image_class=image_class,
        context_texts=_texts_under(tree, root, child_range),
        page_title=tree.page_title,
    )


def find_segment(
    tree: DomTree, image: ImageDescriptor, tolerance: float = DEFAULT_TOLERANCE
) -> ImageSegment | None:
    """Walk upward from one image and return its segment, or ``None`` when
    no ancestor ever contributes text (no segment can hold a text node)."""
    node = tree.node(image.node_id)
    if node.kind is not NodeKind.IMAGE:
        raise ValueError(f"node {image.node_id} is not an image")

    child_id = image.node_id
    parent_id = node.parent_id
    state = 0
    changed_once = False
    first_change: int | None = None

    while parent_id is not None:
        images_n, texts_n = subtree_counts(tree, parent_id)
        if texts_n != state and images_n > 0 and texts_n > 0:
            if changed_once:
                if is_listed_context(tree, parent_id, child_id, tolerance):
                    # Look-alike image-bearing siblings: keep the tight boundary.
                    return _make_segment(tree, first_change, None, image, ImageClass.LISTED)
                return _make_segment(tree, parent_id, None, image, ImageClass.UNLISTED)
            first_change = parent_id
            if images_n >= 2:
                plan = find_semi_listed_partition(tree, parent_id, tolerance)
                if plan is not None:
                    child_index = tree.node(parent_id).children.index(child_id)
                    section = plan.range_for_child(child_index)
                    if section is not None:
                        return _make_segment(
                            tree, parent_id, section, image, ImageClass.SEMI_LISTED
                        )
            state = texts_n
            changed_once = True
        child_id = parent_id
        parent_id = tree.node(parent_id).parent_id

    if first_change is not None:
        # Ran out of ancestors after a single change: the tight boundary is
        # the only one we know, take it.
        return _make_segment(tree, first_change, None, image, ImageClass.UNLISTED)
    return None


def segment_page(
    tree: DomTree,
    policy: FilterPolicy | None = None,
    tolerance: float = DEFAULT_TOLERANCE,
) -> PageSegmentation:
    """Segment every valid image of a page.

    Segments sharing one boundary (same root and range) are merged into a
    single segment carrying all their images, so a collage emits one
    region instead of duplicates. Images that were filtered out or that
    found no text context end up in the skip list with a reason.
    """
    policy = policy or FilterPolicy()
    result = PageSegmentation()
    merged: dict[tuple[int, tuple[int, int] | None], ImageSegment] = {}

    for descriptor in collect_images(tree):
        if not is_valid_image(descriptor, policy):
            result.skipped.append(SkippedImage(src=descriptor.src, reason=SKIP_FILTERED))
            continue
        segment = find_segment(tree, descriptor, tolerance)
        if segment is None:
            result.skipped.append(SkippedImage(src=descriptor.src, reason=SKIP_NO_TEXT))
            continue
        key = (segment.root, segment.child_range)
        existing = merged.get(key)
        if existing is None:
            merged[key] = segment
        else:
            merged[key] = ImageSegment(
                root=existing.root,
                child_range=existing.child_range,
                images=existing.images + segment.images,
                image_class=existing.image_class,
                context_texts=existing.context_texts,
                page_title=existing.page_title,
            )

    def order_key(segment: ImageSegment):
        start = segment.child_range[0] if segment.child_range else -1
        return (segment.root, start)

    result.segments = sorted(merged.values(), key=order_key)
    return result
