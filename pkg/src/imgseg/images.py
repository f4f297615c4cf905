"""Valid-image filtering: which images are worth segmenting at all.

Two acceptance bands, both driven by declared pixel dimensions only (no
rendering, no byte fetching): large images need a width-height ratio
within [1/5, 5]; small near-square images between 45 and 60 pixels pass a
tighter [1/2, 2] ratio band. Images with no parseable dimensions default
to valid so that recall is not lost on attribute-less markup.
"""

from __future__ import annotations

from dataclasses import dataclass
from urllib.parse import urlsplit

from .dom import DomTree, NodeKind

__all__ = [
    "ImageDescriptor",
    "FilterPolicy",
    "is_valid_image",
    "collect_images",
    "collect_valid_images",
]


@dataclass(frozen=True)
class ImageDescriptor:
    """A candidate image as declared in markup."""

    node_id: int
    src: str
    filename: str
    alt: str = ""
    width_px: int | None = None
    height_px: int | None = None


@dataclass(frozen=True)
class FilterPolicy:
    """Size thresholds for the two acceptance bands.

    ``wide_ratio_low`` must be the reciprocal of ``wide_ratio_high`` (and
    likewise for the square band) so that validity is symmetric in width
    and height.
    """

    large_min_px: int = 60
    small_min_px: int = 45
    wide_ratio_low: float = 1 / 5
    wide_ratio_high: float = 5.0
    square_ratio_low: float = 1 / 2
    square_ratio_high: float = 2.0
    unknown_dims_valid: bool = True

    def __post_init__(self):
        if not 0 < self.small_min_px < self.large_min_px:
            raise ValueError("need 0 < small_min_px < large_min_px")
        for low, high in (
            (self.wide_ratio_low, self.wide_ratio_high),
            (self.square_ratio_low, self.square_ratio_high),
        ):
            if not 0 < low <= 1 <= high:
                raise ValueError("ratio bounds must straddle 1")
            if abs(low * high - 1.0) > 1e-9:
                raise ValueError("ratio bounds must be reciprocal (low = 1/high)")


def _parse_px(value: str | None) -> int | None:
    """Plain non-negative pixel integers only; percentages, CSS units and
    anything else count as unknown."""
    if value is None:
        return None
    value = value.strip()
    if not value.isdigit():
        return None
    return int(value)


def _filename_of(src: str) -> str:
    path = urlsplit(src).path
    return path.rsplit("/", 1)[-1]


def descriptor_for(tree: DomTree, node_id: int) -> ImageDescriptor:
    """Build the descriptor for an image node."""
    node = tree.node(node_id)
    if node.kind is not NodeKind.IMAGE:
        raise ValueError(f"node {node_id} is not an image")
    src = node.attributes.get("src", "")
    return ImageDescriptor(
        node_id=node_id,
        src=src,
        filename=_filename_of(src),
        alt=node.attributes.get("alt", ""),
        width_px=_parse_px(node.attributes.get("width")),
        height_px=_parse_px(node.attributes.get("height")),
    )


def is_valid_image(desc: ImageDescriptor, policy: FilterPolicy | None = None) -> bool:
    """Whether an image is eligible for segmentation.

    A single known dimension is as good as none, so it falls back to the
    unknown-dimensions policy. All bounds are inclusive; small images must
    have BOTH dimensions inside [small_min_px, large_min_px).
    """
    policy = policy or FilterPolicy()
    width, height = desc.width_px, desc.height_px
    if width is None or height is None:
        return policy.unknown_dims_valid
    if width >= policy.large_min_px and height >= policy.large_min_px:
        ratio = width / height
        return policy.wide_ratio_low <= ratio <= policy.wide_ratio_high
    if (
        policy.small_min_px <= width < policy.large_min_px
        and policy.small_min_px <= height < policy.large_min_px
    ):
        ratio = width / height
        return policy.square_ratio_low <= ratio <= policy.square_ratio_high
    return False


def collect_images(tree: DomTree) -> list[ImageDescriptor]:
    """Descriptors for every image node, in document order."""
    return [
        descriptor_for(tree, node_id)
        for node_id in sorted(tree.nodes)
        if tree.node(node_id).kind is NodeKind.IMAGE
    ]


def collect_valid_images(
    tree: DomTree, policy: FilterPolicy | None = None
) -> list[ImageDescriptor]:
    """Images passing the filter, in document order.

    Duplicate ``src`` values are kept: the same image file may legitimately
    anchor several segments.
    """
    policy = policy or FilterPolicy()
    return [desc for desc in collect_images(tree) if is_valid_image(desc, policy)]
