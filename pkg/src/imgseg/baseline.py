"""Fixed-window context baseline: n words before and after an image.

The crude comparison point from the literature. The page's text nodes are
flattened into one document-order word stream; the window takes up to n
words on each side of the image's position, fewer near the edges. A word
is a maximal non-whitespace run, nothing fancier.
"""

from __future__ import annotations

from dataclasses import dataclass

from .dom import DomTree, NodeKind
from .images import ImageDescriptor

__all__ = ["WindowContext", "fixed_window_context"]

DEFAULT_WINDOW_WORDS = 32


@dataclass(frozen=True)
class WindowContext:
    image: ImageDescriptor
    before_words: tuple[str, ...]
    after_words: tuple[str, ...]
    n: int


def fixed_window_context(tree: DomTree, image: ImageDescriptor, n: int = DEFAULT_WINDOW_WORDS) -> WindowContext:
    """Window of up to ``n`` words on each side of the image.

    ``n == 0`` means unbounded (the whole-page variant).
    """
    if n < 0:
        raise ValueError("window size must be >= 0")
    node = tree.node(image.node_id)
    if node.kind is not NodeKind.IMAGE:
        raise ValueError(f"node {image.node_id} is not an image")

    before: list[str] = []
    after: list[str] = []
    for node_id in tree.iter_preorder():
        current = tree.node(node_id)
        if current.kind is not NodeKind.TEXT:
            continue
        words = (current.text or "").split()
        if node_id < image.node_id:
            before.extend(words)
        else:
            after.extend(words)
    if n:
        before = before[-n:]
        after = after[:n]
    return WindowContext(
        image=image, before_words=tuple(before), after_words=tuple(after), n=n
    )
