"""Page fetching and DOM-based segmentation.

A page is split top-down from its body: block-level elements become segment
roots, and a root is descended into only when its visible text exceeds
``max_chars`` and it still has block-level structure inside. Loose inline
content between blocks is grouped into synthetic segments so every visible
text node of the page lands in exactly one segment. Undersized segments are
merged into their successor (the trailing one merges backward) as long as
the merge stays within ``max_chars``.

Everything here is deterministic: identical input bytes and parameters
yield identical segment ids, order, and boundaries.
"""

from __future__ import annotations

import hashlib
import re
import time
from dataclasses import dataclass, field
from typing import Callable
from urllib.parse import urljoin, urlparse

import httpx

from .dom import Node, parse_html, serialize, strip_invisible, visible_text
from .errors import ContentTypeError, EmptyPageError, FetchError

_HTML_CONTENT_TYPES = ("text/html", "application/xhtml+xml")
_META_CHARSET_RE = re.compile(
    rb"""<meta[^>]+charset\s*=\s*["']?\s*([a-zA-Z0-9_.:-]+)""", re.I
)
_EMPHASIS_TAGS = frozenset({"em", "strong", "b"})
_HEADING_RE = re.compile(r"^h([1-6])$")

USER_AGENT = "morpes/0.1 (+segment rendering proxy)"


@dataclass(frozen=True)
class SegmentationParams:
    """Granularity bounds for the splitter."""

    max_chars: int = 1200
    min_chars: int = 40


@dataclass(frozen=True)
class RawPage:
    url: str
    html: str
    fetched_at: float


@dataclass(frozen=True)
class Link:
    href: str
    anchor_text: str


@dataclass(frozen=True)
class Image:
    src: str
    alt_text: str


@dataclass(frozen=True)
class Segment:
    id: str
    order_index: int
    html_fragment: str
    text: str
    links: tuple[Link, ...]
    images: tuple[Image, ...]
    char_count: int
    heading_level: int
    emphasis_count: int
    dom_depth: int

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "order_index": self.order_index,
            "html_fragment": self.html_fragment,
            "text": self.text,
            "links": [{"href": l.href, "anchor_text": l.anchor_text} for l in self.links],
            "images": [{"src": i.src, "alt_text": i.alt_text} for i in self.images],
            "char_count": self.char_count,
            "heading_level": self.heading_level,
            "emphasis_count": self.emphasis_count,
            "dom_depth": self.dom_depth,
        }


@dataclass(frozen=True)
class SegmentSet:
    page_url: str
    segments: tuple[Segment, ...]

    def to_dict(self) -> dict:
        return {
            "page_url": self.page_url,
            "segments": [segment.to_dict() for segment in self.segments],
        }

    def by_id(self) -> dict[str, Segment]:
        return {segment.id: segment for segment in self.segments}


def fetch_page(url: str, timeout: float = 10.0, clock: Callable[[], float] = time.time) -> RawPage:
    """Fetch ``url`` and decode its markup. Relative URLs stay unresolved.

    ``clock`` supplies fetched_at so tests can freeze time.
    """
    parsed = urlparse(url)
    if parsed.scheme not in ("http", "https") or not parsed.netloc:
        raise ValueError(f"not an absolute http/https URL: {url!r}")
    try:
        response = httpx.get(
            url,
            timeout=timeout,
            follow_redirects=True,
            headers={"User-Agent": USER_AGENT},
        )
    except httpx.TimeoutException as exc:
        raise TimeoutError(f"fetch of {url} timed out after {timeout}s") from exc
    except httpx.HTTPError as exc:
        raise FetchError(f"fetch of {url} failed: {exc}") from exc
    if not (200 <= response.status_code < 300):
        raise FetchError(f"HTTP {response.status_code} from {url}", status=response.status_code)
    content_type = response.headers.get("content-type", "")
    media_type = content_type.split(";")[0].strip().lower()
    if media_type and media_type not in _HTML_CONTENT_TYPES:
        raise ContentTypeError(f"expected HTML, got {media_type} from {url}")
    markup = _decode_body(response.content, content_type)
    return RawPage(url=str(response.url), html=markup, fetched_at=clock())


def _decode_body(body: bytes, content_type: str) -> str:
    """Decode honoring the declared charset, defaulting to UTF-8, never failing."""
    charset = None
    if "charset=" in content_type.lower():
        charset = content_type.lower().split("charset=", 1)[1].split(";")[0].strip().strip('"\'')
    if not charset:
        match = _META_CHARSET_RE.search(body[:2048])
        if match:
            charset = match.group(1).decode("ascii", errors="replace")
    for candidate in (charset, "utf-8"):
        if not candidate:
            continue
        try:
            return body.decode(candidate, errors="replace")
        except LookupError:
            continue
    return body.decode("utf-8", errors="replace")


@dataclass
class _Proto:
    """A candidate segment before merging: whole DOM nodes plus their depth."""

    nodes: list[Node]
    dom_depth: int
    text: str = field(default="")

    def refresh_text(self) -> None:
        self.text = visible_text(self.nodes)


def segment_page(page: RawPage, params: SegmentationParams | None = None) -> SegmentSet:
    """Split the page into an ordered, feature-extracted set of segments."""
    params = params or SegmentationParams()
    document = parse_html(page.html)
    strip_invisible(document)
    body = document.find("body") or document

    protos: list[_Proto] = []
    _collect(body, _node_depth(document, body) + 1, params, protos)
    if not protos:
        raise EmptyPageError(f"no visible content in {page.url}")

    protos = _merge_undersized(protos, params)

    digest = hashlib.sha256(page.html.encode("utf-8")).hexdigest()[:12]
    segments = tuple(
        extract_features(
            proto.nodes,
            base_url=page.url,
            segment_id=f"{digest}-{index}",
            order_index=index,
            dom_depth=proto.dom_depth,
        )
        for index, proto in enumerate(protos)
    )
    return SegmentSet(page_url=page.url, segments=segments)


def _node_depth(root: Node, target: Node) -> int:
    """Depth of ``target`` below ``root`` (root itself is depth 0)."""
    stack = [(root, 0)]
    while stack:
        node, depth = stack.pop()
        if node is target:
            return depth
        stack.extend((child, depth + 1) for child in node.children)
    return 0


def _is_blocklike(node: Node) -> bool:
    if node.is_text:
        return False
    if node.is_block:
        return True
    return any(child.is_block for child in node.iter() if child is not node)


def _has_content(nodes: list[Node]) -> bool:
    if visible_text(nodes):
        return True
    for node in nodes:
        for inner in node.iter():
            if inner.tag == "a" and "href" in inner.attrs:
                return True
            if inner.tag == "img" and "src" in inner.attrs:
                return True
    return False


def _collect(container: Node, depth: int, params: SegmentationParams, out: list[_Proto]) -> None:
    run: list[Node] = []

    def flush_run() -> None:
        if run and _has_content(run):
            out.append(_Proto(nodes=list(run), dom_depth=depth))
        run.clear()

    for child in container.children:
        if not child.is_text and _is_blocklike(child):
            flush_run()
            text = visible_text(child)
            if len(text) > params.max_chars and any(
                _is_blocklike(grandchild) for grandchild in child.children
            ):
                _collect(child, depth + 1, params, out)
            elif _has_content([child]):
                out.append(_Proto(nodes=[child], dom_depth=depth))
        else:
            run.append(child)
    flush_run()


def _merge_undersized(protos: list[_Proto], params: SegmentationParams) -> list[_Proto]:
    """Fold sub-minimum protos into their successor without breaching max_chars."""
    for proto in protos:
        proto.refresh_text()

    merged: list[_Proto] = []
    carry: _Proto | None = None
    for proto in protos:
        if carry is not None:
            combined = _Proto(nodes=carry.nodes + proto.nodes, dom_depth=min(carry.dom_depth, proto.dom_depth))
            combined.refresh_text()
            if len(combined.text) <= params.max_chars:
                proto = combined
            else:
                merged.append(carry)
            carry = None
        if len(proto.text) < params.min_chars:
            carry = proto
        else:
            merged.append(proto)
    if carry is not None:
        if merged:
            tail = _Proto(nodes=merged[-1].nodes + carry.nodes,
                          dom_depth=min(merged[-1].dom_depth, carry.dom_depth))
            tail.refresh_text()
            if len(tail.text) <= params.max_chars:
                merged[-1] = tail
            else:
                merged.append(carry)
        else:
            merged.append(carry)
    return merged


def extract_features(
    subtree: Node | list[Node],
    base_url: str = "",
    *,
    segment_id: str = "",
    order_index: int = 0,
    dom_depth: int = 0,
) -> Segment:
    """Build a Segment from a subtree: resolved links/images, headings, emphasis."""
    nodes = subtree if isinstance(subtree, list) else [subtree]
    text = visible_text(nodes)

    links: list[Link] = []
    images: list[Image] = []
    heading_level = 0
    emphasis_count = 0
    for node in nodes:
        for inner in node.iter():
            if inner.is_text:
                continue
            if inner.tag == "a" and "href" in inner.attrs:
                links.append(Link(
                    href=urljoin(base_url, inner.attrs["href"]),
                    anchor_text=visible_text(inner),
                ))
            elif inner.tag == "img" and "src" in inner.attrs:
                images.append(Image(
                    src=urljoin(base_url, inner.attrs["src"]),
                    alt_text=inner.attrs.get("alt", ""),
                ))
            elif inner.tag in _EMPHASIS_TAGS:
                emphasis_count += 1
            else:
                heading = _HEADING_RE.match(inner.tag)
                if heading:
                    level = int(heading.group(1))
                    if heading_level == 0 or level < heading_level:
                        heading_level = level

    return Segment(
        id=segment_id,
        order_index=order_index,
        html_fragment="".join(serialize(node) for node in nodes),
        text=text,
        links=tuple(links),
        images=tuple(images),
        char_count=len(text),
        heading_level=heading_level,
        emphasis_count=emphasis_count,
        dom_depth=dom_depth,
    )
