"""Structural analyses: subtree shape signatures, sibling similarity, and
repeating-pattern partitioning of a single child level.

A shape signature flattens a subtree to its preorder tag/kind tokens, so
"do these siblings look alike" reduces to edit distance over short token
sequences. The partitioner cuts one parent's child list into repeating
image+text ranges anchored at its image-bearing children.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .dom import DomTree, NodeKind, subtree_counts

__all__ = [
    "TEXT_TOKEN",
    "IMAGE_TOKEN",
    "PartitionPlan",
    "shape_signature",
    "signatures_similar",
    "normalized_edit_distance",
    "is_listed_context",
    "find_semi_listed_partition",
]

TEXT_TOKEN = "TEXT"
IMAGE_TOKEN = "IMG"

DEFAULT_TOLERANCE = 0.2


@dataclass(frozen=True)
class PartitionPlan:
    """Half-open child-index ranges carving one parent into repeating
    sections, each holding exactly one image-bearing child."""

    parent: int
    ranges: tuple[tuple[int, int], ...]

    def range_for_child(self, child_index: int) -> tuple[int, int] | None:
        for start, end in self.ranges:
            if start <= child_index < end:
                return (start, end)
        return None


def _token(tree: DomTree, node_id: int) -> str:
    node = tree.node(node_id)
    if node.kind is NodeKind.TEXT:
        return TEXT_TOKEN
    if node.kind is NodeKind.IMAGE:
        return IMAGE_TOKEN
    return node.tag or ""


def shape_signature(tree: DomTree, node_id: int) -> tuple[str, ...]:
    """Preorder tag/kind tokens of the subtree rooted at ``node_id``."""
    tokens: list[str] = []
    stack = [node_id]
    while stack:
        current = stack.pop()
        tokens.append(_token(tree, current))
        stack.extend(reversed(tree.node(current).children))
    return tuple(tokens)


def levenshtein(a: Sequence[str], b: Sequence[str]) -> int:
    """Plain edit distance over token sequences, two-row DP."""
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, token_a in enumerate(a, start=1):
        current = [i]
        for j, token_b in enumerate(b, start=1):
            cost = 0 if token_a == token_b else 1
            current.append(min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + cost))
        previous = current
    return previous[-1]


def normalized_edit_distance(a: Sequence[str], b: Sequence[str]) -> float:
    longest = max(len(a), len(b))
    if longest == 0:
        return 0.0
    return levenshtein(a, b) / longest


def signatures_similar(
    a: Sequence[str], b: Sequence[str], tolerance: float = DEFAULT_TOLERANCE
) -> bool:
    """True when the normalized edit distance is within ``tolerance``.

    Tolerance 0 demands exact equality; the 0.2 default allows roughly one
    stray token per five.
    """
    return normalized_edit_distance(a, b) <= tolerance


def is_listed_context(
    tree: DomTree, parent: int, child: int, tolerance: float = DEFAULT_TOLERANCE
) -> bool:
    """Whether ``child`` sits in a list of look-alike image-bearing siblings.

    True iff some other child of ``parent`` both contains an image and has
    a shape signature similar to ``child``'s.
    """
    parent_node = tree.node(parent)
    if child not in parent_node.children:
        raise ValueError(f"node {child} is not a child of {parent}")
    child_signature = shape_signature(tree, child)
    for sibling in parent_node.children:
        if sibling == child:
            continue
        sibling_images, _ = subtree_counts(tree, sibling)
        if sibling_images < 1:
            continue
        if signatures_similar(child_signature, shape_signature(tree, sibling), tolerance):
            return True
    return False


def _range_signature(tree: DomTree, children: Sequence[int], start: int, end: int):
    tokens: list[str] = []
    for child in children[start:end]:
        tokens.extend(shape_signature(tree, child))
    return tokens


def find_semi_listed_partition(
    tree: DomTree, node_id: int, tolerance: float = DEFAULT_TOLERANCE
) -> PartitionPlan | None:
    """Partition ``node_id``'s children into repeating image+text ranges.

    Anchors are the children whose subtrees contain images; each candidate
    range extends left of its anchor by a common offset, chosen so the
    first two ranges' child-token sequences agree best (ties prefer the
    earliest start). The plan is returned only if all ranges are pairwise
    similar and every range contains at least one text node; otherwise
    ``None``.
    """
    node = tree.node(node_id)
    if node.kind is not NodeKind.ELEMENT:
        raise ValueError(f"node {node_id} is not an element")
    total_images, _ = subtree_counts(tree, node_id)
    if total_images < 2:
        raise ValueError(f"node {node_id} holds fewer than two images")

    children = node.children
    anchors = [
        index for index, child in enumerate(children) if subtree_counts(tree, child)[0] >= 1
    ]
    if len(anchors) < 2:
        return None

    min_gap = min(b - a for a, b in zip(anchors, anchors[1:]))
    max_offset = min(anchors[0], min_gap - 1)

    def ranges_for(offset: int) -> tuple[tuple[int, int], ...]:
        starts = [anchor - offset for anchor in anchors]
        ends = starts[1:] + [len(children)]
        return tuple(zip(starts, ends))

    best: tuple[int, int] | None = None  # (distance, start) -> offset
    best_offset = 0
    for offset in range(0, max_offset + 1):
        ranges = ranges_for(offset)
        first = [_token(tree, child) for child in children[ranges[0][0] : ranges[0][1]]]
        second = [_token(tree, child) for child in children[ranges[1][0] : ranges[1][1]]]
        key = (levenshtein(first, second), ranges[0][0])
        if best is None or key < best:
            best = key
            best_offset = offset

    ranges = ranges_for(best_offset)
    signatures = [_range_signature(tree, children, start, end) for start, end in ranges]
    for i in range(len(signatures)):
        for j in range(i + 1, len(signatures)):
            if not signatures_similar(signatures[i], signatures[j], tolerance):
                return None
    for start, end in ranges:
        texts = sum(subtree_counts(tree, child)[1] for child in children[start:end])
        if texts < 1:
            return None
        image_children = sum(
            1 for child in children[start:end] if subtree_counts(tree, child)[0] >= 1
        )
        if image_children != 1:
            return None
    return PartitionPlan(parent=node_id, ranges=ranges)
