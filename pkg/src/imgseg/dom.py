"""Normalized document tree shared by every analysis stage.

The tree is deliberately minimal: elements are internal nodes, text and
images are always leaves. Node ids are dense integers assigned in
document (preorder) order, so comparing ids compares document positions.
Trees are immutable once built; all operations here are pure reads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from html import escape

__all__ = [
    "NodeKind",
    "DomNode",
    "DomTree",
    "TreeBuilder",
    "ancestors",
    "subtree_counts",
    "child_index_path",
    "normalize_text",
    "tree_to_html",
    "VOID_TAGS",
]

VOID_TAGS = frozenset(
    "area base br col embed hr img input link meta param source track wbr".split()
)


def normalize_text(raw: str) -> str:
    """Collapse runs of whitespace to single spaces and strip the ends."""
    return " ".join(raw.split())


class NodeKind(Enum):
    ELEMENT = "element"
    TEXT = "text"
    IMAGE = "image"


@dataclass(frozen=True)
class DomNode:
    """One node of a :class:`DomTree`.

    ``tag`` is set for elements and images (images always carry ``img``),
    ``text`` only for text nodes, ``children`` only for elements. Text and
    image nodes are leaves by construction.
    """

    node_id: int
    kind: NodeKind
    tag: str | None = None
    attributes: dict[str, str] = field(default_factory=dict)
    text: str | None = None
    children: tuple[int, ...] = ()
    parent_id: int | None = None

    @property
    def is_leaf(self) -> bool:
        return self.kind is not NodeKind.ELEMENT


class DomTree:
    """Immutable document tree with per-node image/text counts precomputed.

    The counts cache is filled bottom-up during construction, which is what
    keeps the segmenter's upward walks proportional to tree depth instead
    of subtree size.
    """

    def __init__(
        self,
        root_id: int,
        nodes: dict[int, DomNode],
        page_title: str = "",
        source_identifier: str = "",
    ):
        self.root_id = root_id
        self.nodes = nodes
        self.page_title = page_title
        self.source_identifier = source_identifier
        self._counts = self._compute_counts()

    def node(self, node_id: int) -> DomNode:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise KeyError(f"unknown node id {node_id!r}") from None

    def __len__(self) -> int:
        return len(self.nodes)

    def __contains__(self, node_id: int) -> bool:
        return node_id in self.nodes

    def _compute_counts(self) -> dict[int, tuple[int, int]]:
        # Children always carry larger preorder ids than their parent, so a
        # single descending pass sees every child before its parent.
        counts: dict[int, tuple[int, int]] = {}
        for node_id in sorted(self.nodes, reverse=True):
            node = self.nodes[node_id]
            images = 1 if node.kind is NodeKind.IMAGE else 0
            texts = 1 if node.kind is NodeKind.TEXT else 0
            for child_id in node.children:
                child_images, child_texts = counts[child_id]
                images += child_images
                texts += child_texts
            counts[node_id] = (images, texts)
        return counts

    def iter_preorder(self, start: int | None = None):
        """Yield node ids in document order from ``start`` (default root)."""
        stack = [self.root_id if start is None else start]
        while stack:
            node_id = stack.pop()
            node = self.node(node_id)
            yield node_id
            stack.extend(reversed(node.children))


def ancestors(tree: DomTree, node_id: int) -> list[int]:
    """Proper ancestors of ``node_id``, nearest first, ending at the root."""
    node = tree.node(node_id)
    chain: list[int] = []
    parent = node.parent_id
    while parent is not None:
        chain.append(parent)
        parent = tree.node(parent).parent_id
    return chain


def subtree_counts(tree: DomTree, node_id: int) -> tuple[int, int]:
    """(image_count, text_count) over the subtree rooted at ``node_id``.

    Counts include the node itself, so an image leaf reports ``(1, 0)``.
    """
    tree.node(node_id)
    return tree._counts[node_id]


def child_index_path(tree: DomTree, node_id: int) -> str:
    """Slash-joined child-index path from the document root, '' for the root.

    Paths are stable across runs because they depend only on structure,
    never on node-id assignment.
    """
    indexes: list[str] = []
    node = tree.node(node_id)
    while node.parent_id is not None:
        parent = tree.node(node.parent_id)
        indexes.append(str(parent.children.index(node.node_id)))
        node = parent
    return "/".join(reversed(indexes))


class TreeBuilder:
    """Accumulates nodes, then freezes them into a DomTree.

    Nodes may be added in any order relative to their siblings' subtrees;
    ``build()`` renumbers everything in preorder so the dense-id invariant
    holds no matter how the caller interleaved calls.
    """

    class _Pending:
        __slots__ = ("kind", "tag", "attributes", "text", "children")

        def __init__(self, kind, tag=None, attributes=None, text=None):
            self.kind = kind
            self.tag = tag
            self.attributes = attributes or {}
            self.text = text
            self.children: list[TreeBuilder._Pending] = []

    def __init__(self) -> None:
        self._root: TreeBuilder._Pending | None = None

    def element(self, tag: str, parent=None, attributes: dict[str, str] | None = None):
        node = self._Pending(NodeKind.ELEMENT, tag=tag.lower(), attributes=dict(attributes or {}))
        self._attach(node, parent)
        return node

    def text(self, content: str, parent) -> None:
        normalized = normalize_text(content)
        if not normalized:
            raise ValueError("text nodes must be non-empty after normalization")
        self._attach(self._Pending(NodeKind.TEXT, text=normalized), parent)

    def image(self, parent, attributes: dict[str, str] | None = None, **extra: str):
        merged = {**(attributes or {}), **extra}
        node = self._Pending(
            NodeKind.IMAGE, tag="img", attributes={k.lower(): v for k, v in merged.items()}
        )
        self._attach(node, parent)
        return node

    def _attach(self, node, parent) -> None:
        if parent is None:
            if self._root is not None:
                raise ValueError("tree already has a root")
            if node.kind is not NodeKind.ELEMENT:
                raise ValueError("root must be an element")
            self._root = node
        else:
            if parent.kind is not NodeKind.ELEMENT:
                raise ValueError("only elements take children")
            parent.children.append(node)

    def build(self, page_title: str = "", source_identifier: str = "") -> DomTree:
        if self._root is None:
            raise ValueError("cannot build an empty tree")
        nodes: dict[int, DomNode] = {}
        counter = 0

        def assign_preorder(pending, parent_id: int | None) -> int:
            nonlocal counter
            node_id = counter
            counter += 1
            child_ids = []
            for child in pending.children:
                child_ids.append(assign_preorder(child, node_id))
            nodes[node_id] = DomNode(
                node_id=node_id,
                kind=pending.kind,
                tag=pending.tag,
                attributes=dict(pending.attributes),
                text=pending.text,
                children=tuple(child_ids),
                parent_id=parent_id,
            )
            return node_id

        root_id = assign_preorder(self._root, None)
        return DomTree(root_id, nodes, page_title=page_title, source_identifier=source_identifier)


def tree_to_html(tree: DomTree) -> str:
    """Serialize the normalized tree back to HTML.

    Used for debugging and for checking normalization idempotence; the
    output re-parses to a tree with identical tag/kind/text structure.
    """
    parts: list[str] = []

    def emit(node_id: int) -> None:
        node = tree.node(node_id)
        if node.kind is NodeKind.TEXT:
            parts.append(escape(node.text or "", quote=False))
            return
        attrs = "".join(f' {name}="{escape(value)}"' for name, value in node.attributes.items())
        if node.kind is NodeKind.IMAGE or node.tag in VOID_TAGS:
            parts.append(f"<{node.tag}{attrs}>")
            return
        parts.append(f"<{node.tag}{attrs}>")
        previous_was_text = False
        for child_id in node.children:
            child = tree.node(child_id)
            # Adjacent text siblings cannot survive an HTML round trip; a
            # space keeps their words apart when they merge on re-parse.
            if child.kind is NodeKind.TEXT and previous_was_text:
                parts.append(" ")
            emit(child_id)
            previous_was_text = child.kind is NodeKind.TEXT
        parts.append(f"</{node.tag}>")

    emit(tree.root_id)
    return "".join(parts)
