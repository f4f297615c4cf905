"""Parse raw HTML bytes into a normalized :class:`~imgseg.dom.DomTree`.

Built on the stdlib ``html.parser`` tokenizer with a small recovery layer:

* a single ``html`` root is synthesized (or adopted) and stray content is
  placed into an implicit ``body``;
* void elements (``br``, ``img``, ...) never open a scope;
* a start tag implies closing the open siblings it would terminate in
  practice (``p`` closes ``p``, ``td`` closes ``td``/``th``, block-level
  tags close an open ``p``, and so on);
* unmatched end tags are ignored.

Normalization then collapses whitespace, merges each maximal run of
character data into at most one text node (runs also merge across removed
comments and stripped subtrees), and turns every ``img`` element into an
image leaf.
"""

from __future__ import annotations

import codecs
import re
from dataclasses import dataclass, field
from html.parser import HTMLParser

from .dom import VOID_TAGS, DomTree, TreeBuilder, normalize_text

__all__ = ["IngestOptions", "parse_html"]

DEFAULT_STRIP_TAGS = frozenset({"script", "style", "noscript", "head"})

# Tags that belong in <head> when encountered before any body content.
_HEAD_ONLY = frozenset({"title", "meta", "link", "base", "basefont"})

_IMPLIES_END = {
    "p": frozenset({"p"}),
    "li": frozenset({"li"}),
    "dt": frozenset({"dt", "dd"}),
    "dd": frozenset({"dt", "dd"}),
    "tr": frozenset({"tr", "td", "th"}),
    "td": frozenset({"td", "th"}),
    "th": frozenset({"td", "th"}),
    "thead": frozenset({"thead", "tbody", "tfoot", "tr", "td", "th"}),
    "tbody": frozenset({"thead", "tbody", "tfoot", "tr", "td", "th"}),
    "tfoot": frozenset({"thead", "tbody", "tfoot", "tr", "td", "th"}),
    "option": frozenset({"option"}),
    "optgroup": frozenset({"option", "optgroup"}),
}

_P_CLOSERS = frozenset(
    """address article aside blockquote details div dl fieldset figcaption
    figure footer form h1 h2 h3 h4 h5 h6 header hr main menu nav ol p pre
    section table ul""".split()
)

_CHARSET_RE = re.compile(rb"charset\s*=\s*[\"']?\s*([a-zA-Z0-9_.:-]+)", re.IGNORECASE)

# Pathological nesting flattens past this depth; real pages stay far below
# and downstream recursion stays inside the interpreter limit.
_MAX_DEPTH = 400


@dataclass(frozen=True)
class IngestOptions:
    """Knobs for normalization; the defaults match ordinary usage."""

    min_text_chars: int = 1
    strip_tags: frozenset[str] = DEFAULT_STRIP_TAGS
    treat_alt_as_text: bool = False

    def __post_init__(self):
        if self.min_text_chars < 1:
            raise ValueError("min_text_chars must be >= 1")
        tags = frozenset(tag.lower() for tag in self.strip_tags)
        object.__setattr__(self, "strip_tags", tags)
        forbidden = tags & {"img", "body", "html"}
        if forbidden:
            raise ValueError(f"strip_tags may not contain {sorted(forbidden)}")


class _RawNode:
    """Mutable element used while assembling the parse; children mix
    _RawNode instances and raw text chunks (str)."""

    __slots__ = ("tag", "attributes", "children")

    def __init__(self, tag: str, attributes: dict[str, str] | None = None):
        self.tag = tag
        self.attributes = attributes or {}
        self.children: list[object] = []


def _attr_dict(attrs) -> dict[str, str]:
    out: dict[str, str] = {}
    for name, value in attrs:
        out.setdefault(name.lower(), value if value is not None else "")
    return out


class _TreeAssembler(HTMLParser):
    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.root = _RawNode("html")
        self._head: _RawNode | None = None
        self._body: _RawNode | None = None
        self._stack: list[_RawNode] = [self.root]

    def _ensure_head(self) -> _RawNode:
        if self._head is None:
            self._head = _RawNode("head")
            self.root.children.append(self._head)
        return self._head

    def _ensure_body(self) -> _RawNode:
        if self._body is None:
            self._body = _RawNode("body")
            self.root.children.append(self._body)
        return self._body

    def _protected(self, node: _RawNode) -> bool:
        return node is self.root or node is self._head or node is self._body

    def handle_starttag(self, tag, attrs):
        attributes = _attr_dict(attrs)
        if tag == "html":
            if not self.root.attributes:
                self.root.attributes.update(attributes)
            return
        if tag == "head":
            self._stack[:] = [self.root]
            self._stack.append(self._ensure_head())
            return
        if tag == "body":
            body = self._ensure_body()
            if not body.attributes:
                body.attributes.update(attributes)
            self._stack[:] = [self.root, body]
            return

        if self._stack[-1] is self.root:
            if tag in _HEAD_ONLY and self._body is None:
                self._stack.append(self._ensure_head())
            else:
                self._stack.append(self._ensure_body())

        closes = _IMPLIES_END.get(tag, frozenset())
        if tag in _P_CLOSERS:
            closes = closes | {"p"}
        while not self._protected(self._stack[-1]) and self._stack[-1].tag in closes:
            self._stack.pop()

        node = _RawNode(tag, attributes)
        self._stack[-1].children.append(node)
        if tag not in VOID_TAGS and len(self._stack) < _MAX_DEPTH:
            self._stack.append(node)

    def handle_endtag(self, tag):
        if tag in VOID_TAGS:
            return
        if tag in ("html", "head", "body"):
            self._stack[:] = [self.root]
            return
        for index in range(len(self._stack) - 1, -1, -1):
            node = self._stack[index]
            if self._protected(node):
                return  # unmatched end tag, ignore
            if node.tag == tag:
                del self._stack[index:]
                return

    def handle_data(self, data):
        if self._stack[-1] is self.root:
            if not data.strip():
                return
            self._stack.append(self._ensure_body())
        self._stack[-1].children.append(data)

    # Comments, doctypes, and processing instructions carry no content we
    # keep; dropping them here lets surrounding text runs merge.
    def handle_comment(self, data):
        pass

    def handle_decl(self, decl):
        pass

    def handle_pi(self, data):
        pass

    def unknown_decl(self, data):
        pass


def _decode(data: bytes) -> str:
    for bom, codec in (
        (codecs.BOM_UTF8, "utf-8"),
        (codecs.BOM_UTF16_LE, "utf-16-le"),
        (codecs.BOM_UTF16_BE, "utf-16-be"),
    ):
        if data.startswith(bom):
            return data[len(bom):].decode(codec, errors="replace")
    match = _CHARSET_RE.search(data[:2048])
    if match:
        declared = match.group(1).decode("ascii", errors="ignore")
        try:
            codecs.lookup(declared)
        except LookupError:
            pass
        else:
            return data.decode(declared, errors="replace")
    return data.decode("utf-8", errors="replace")


def _find_title(node: _RawNode) -> str:
    if node.tag == "title":
        chunks = [child for child in node.children if isinstance(child, str)]
        return normalize_text("".join(chunks))
    for child in node.children:
        if isinstance(child, _RawNode):
            title = _find_title(child)
            if title:
                return title
    return ""


def parse_html(
    data: bytes | str,
    source_identifier: str = "",
    options: IngestOptions | None = None,
) -> DomTree:
    """Parse HTML into a normalized DomTree.

    ``data`` may be raw bytes (decoded per declared charset, UTF-8 with
    lossy replacement otherwise) or an already-decoded string. Empty or
    whitespace-only input raises ``ValueError``; a document with no body
    content yields a tree with an empty root instead.
    """
    opts = options or IngestOptions()
    if isinstance(data, (bytes, bytearray)):
        text = _decode(data)
    elif isinstance(data, str):
        text = data
    else:
        raise TypeError(f"expected bytes or str, got {type(data).__name__}")
    if not text or not text.strip():
        raise ValueError("empty document")

    assembler = _TreeAssembler()
    assembler.feed(text)
    assembler.close()
    raw_root = assembler.root
    page_title = _find_title(raw_root)

    builder = TreeBuilder()
    root = builder.element(raw_root.tag, attributes=raw_root.attributes)
    _normalize_into(builder, raw_root, root, opts)
    return builder.build(page_title=page_title, source_identifier=source_identifier)


def _normalize_into(builder: TreeBuilder, raw: _RawNode, parent, opts: IngestOptions) -> None:
    buffer: list[str] = []

    def flush() -> None:
        if not buffer:
            return
        joined = normalize_text("".join(buffer))
        buffer.clear()
        if len(joined) >= opts.min_text_chars:
            builder.text(joined, parent)

    for child in raw.children:
        if isinstance(child, str):
            buffer.append(child)
            continue
        if child.tag in opts.strip_tags:
            continue  # removal merges the surrounding run
        flush()
        if child.tag == "img":
            builder.image(parent, attributes=child.attributes)
            if opts.treat_alt_as_text:
                alt = normalize_text(child.attributes.get("alt", ""))
                if len(alt) >= opts.min_text_chars:
                    builder.text(alt, parent)
            continue
        element = builder.element(child.tag, parent, attributes=child.attributes)
        _normalize_into(builder, child, element, opts)
    flush()
