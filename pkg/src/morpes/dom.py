"""Minimal error-tolerant DOM built on the stdlib HTML parser.

The segmenter only needs a handful of DOM facilities: a tree that survives
real-web markup, a notion of block-level vs inline elements, visible-text
extraction, and re-serialization of subtrees. Building this on
``html.parser`` keeps the pipeline dependency-free and fully deterministic:
identical input bytes always produce an identical tree.

Repair strategy for malformed input:
- unknown/mismatched end tags are ignored (or close up to the nearest
  matching open element),
- void elements never stay on the open stack,
- a small table of implied end tags handles the common unclosed cases
  (``<p>``, ``<li>``, table rows/cells, definition lists, options).
"""

from __future__ import annotations

import html as html_escape
import re
from html.parser import HTMLParser

TEXT = "#text"
DOCUMENT = "#document"

VOID_ELEMENTS = frozenset({
    "area", "base", "br", "col", "embed", "hr", "img", "input",
    "link", "meta", "param", "source", "track", "wbr",
})

BLOCK_ELEMENTS = frozenset({
    "address", "article", "aside", "blockquote", "canvas", "dd", "details",
    "div", "dl", "dt", "fieldset", "figcaption", "figure", "footer", "form",
    "h1", "h2", "h3", "h4", "h5", "h6", "header", "hr", "li", "main", "nav",
    "ol", "p", "pre", "section", "table", "tbody", "td", "tfoot", "th",
    "thead", "tr", "ul", "body", "html",
})

# Content that never renders: stripped before segmentation so it is neither
# scored nor displayed.
INVISIBLE_ELEMENTS = frozenset({
    "script", "style", "noscript", "template", "head", "title", "meta",
    "link", "base", "iframe", "svg", "object", "embed", "datalist",
})

# Tags whose open element is implicitly closed when one of the listed tags
# starts. "*block*" means any block-level start closes it.
_IMPLIED_END: dict[str, frozenset[str] | str] = {
    "p": "*block*",
    "li": frozenset({"li"}),
    "dt": frozenset({"dt", "dd"}),
    "dd": frozenset({"dt", "dd"}),
    "tr": frozenset({"tr", "tbody", "tfoot", "thead"}),
    "td": frozenset({"td", "th", "tr", "tbody", "tfoot", "thead"}),
    "th": frozenset({"td", "th", "tr", "tbody", "tfoot", "thead"}),
    "option": frozenset({"option", "optgroup"}),
    "thead": frozenset({"tbody", "tfoot"}),
    "tbody": frozenset({"tbody", "tfoot"}),
}

_WHITESPACE_RE = re.compile(r"\s+")
_HIDDEN_STYLE_RE = re.compile(r"display\s*:\s*none|visibility\s*:\s*hidden", re.I)


class Node:
    """One DOM node: an element, a text node, or the document root."""

    __slots__ = ("tag", "attrs", "children", "text")

    def __init__(self, tag: str, attrs: dict[str, str] | None = None, text: str = ""):
        self.tag = tag
        self.attrs: dict[str, str] = attrs or {}
        self.children: list[Node] = []
        self.text = text

    @property
    def is_text(self) -> bool:
        return self.tag == TEXT

    @property
    def is_block(self) -> bool:
        return self.tag in BLOCK_ELEMENTS

    def iter(self):
        """Yield this node and all descendants in document order."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def find(self, tag: str) -> Node | None:
        for node in self.iter():
            if node.tag == tag:
                return node
        return None

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        if self.is_text:
            return f"Node(#text {self.text[:20]!r})"
        return f"Node(<{self.tag}> children={len(self.children)})"


class _TreeBuilder(HTMLParser):
    """Accumulates parser events into a Node tree, repairing as it goes."""

    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.root = Node(DOCUMENT)
        self._stack: list[Node] = [self.root]

    def _top(self) -> Node:
        return self._stack[-1]

    def _autoclose(self, incoming: str) -> None:
        while len(self._stack) > 1:
            open_tag = self._top().tag
            rule = _IMPLIED_END.get(open_tag)
            if rule is None:
                return
            if rule == "*block*":
                if incoming in BLOCK_ELEMENTS:
                    self._stack.pop()
                    continue
                return
            if incoming in rule:
                self._stack.pop()
                continue
            return

    def handle_starttag(self, tag, attrs):
        self._autoclose(tag)
        node = Node(tag, {k: (v if v is not None else "") for k, v in attrs})
        self._top().children.append(node)
        if tag not in VOID_ELEMENTS:
            self._stack.append(node)

    def handle_startendtag(self, tag, attrs):
        self._autoclose(tag)
        node = Node(tag, {k: (v if v is not None else "") for k, v in attrs})
        self._top().children.append(node)

    def handle_endtag(self, tag):
        if tag in VOID_ELEMENTS:
            return
        for i in range(len(self._stack) - 1, 0, -1):
            if self._stack[i].tag == tag:
                del self._stack[i:]
                return
        # Stray end tag with no matching open element: drop it.

    def handle_data(self, data):
        if not data:
            return
        children = self._top().children
        if children and children[-1].is_text:
            children[-1].text += data
        else:
            children.append(Node(TEXT, text=data))


def parse_html(markup: str) -> Node:
    """Parse markup into a document node. Never raises on bad input."""
    builder = _TreeBuilder()
    builder.feed(markup)
    builder.close()
    return builder.root


def is_hidden(node: Node) -> bool:
    """True for elements hidden by attribute rather than by tag name."""
    if node.is_text:
        return False
    if "hidden" in node.attrs:
        return True
    style = node.attrs.get("style", "")
    return bool(style and _HIDDEN_STYLE_RE.search(style))


def strip_invisible(node: Node) -> None:
    """Remove non-rendering subtrees (scripts, styles, hidden elements) in place."""
    node.children = [
        child for child in node.children
        if child.is_text or (child.tag not in INVISIBLE_ELEMENTS and not is_hidden(child))
    ]
    for child in node.children:
        if not child.is_text:
            strip_invisible(child)


def normalize_whitespace(text: str) -> str:
    return _WHITESPACE_RE.sub(" ", text).strip()


def visible_text(nodes: Node | list[Node]) -> str:
    """Whitespace-normalized text of one or more subtrees.

    Block boundaries contribute a separating space so sibling blocks never
    run together; inline content keeps its own spacing.
    """
    parts: list[str] = []

    def walk(node: Node) -> None:
        if node.is_text:
            parts.append(node.text)
            return
        if node.is_block:
            parts.append(" ")
        for child in node.children:
            walk(child)
        if node.is_block:
            parts.append(" ")

    for node in nodes if isinstance(nodes, list) else [nodes]:
        walk(node)
    return normalize_whitespace("".join(parts))


def serialize(node: Node) -> str:
    """Re-serialize a subtree to markup with entities re-escaped."""
    out: list[str] = []
    _serialize_into(node, out)
    return "".join(out)


def _serialize_into(node: Node, out: list[str]) -> None:
    if node.is_text:
        out.append(html_escape.escape(node.text, quote=False))
        return
    if node.tag == DOCUMENT:
        for child in node.children:
            _serialize_into(child, out)
        return
    out.append(f"<{node.tag}")
    for key, value in node.attrs.items():
        out.append(f' {key}="{html_escape.escape(value, quote=True)}"')
    out.append(">")
    if node.tag in VOID_ELEMENTS:
        return
    for child in node.children:
        _serialize_into(child, out)
    out.append(f"</{node.tag}>")
