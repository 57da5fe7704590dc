"""Ranking, template selection, shot partitioning, and shot rendering.

Scored segments are sorted descending (document order breaks ties), the
selected template's capacity chunks the ranking into shots, and everything
not yet served waits in the segment buffer. Rendering emits a standalone
mobile-viewport HTML document per shot.
"""

from __future__ import annotations

import html
from dataclasses import dataclass, replace
from functools import lru_cache
from importlib.resources import files

from .errors import NoMoreShotsError, RenderError, TemplateNotFoundError
from .evaluator import PageScores
from .segmenter import SegmentSet


@dataclass(frozen=True)
class Template:
    id: str
    capacity: int
    skin: str
    show_nav: bool
    max_width_px: int

    def __post_init__(self):
        if self.capacity < 1:
            raise ValueError("template capacity must be >= 1")
        if self.max_width_px <= 0:
            raise ValueError("template max_width_px must be > 0")


DEFAULT_TEMPLATES = (
    Template(id="compact", capacity=3, skin="compact", show_nav=True, max_width_px=320),
    Template(id="regular", capacity=5, skin="regular", show_nav=True, max_width_px=480),
    Template(id="wide", capacity=8, skin="wide", show_nav=True, max_width_px=768),
)


@dataclass(frozen=True)
class RankedEntry:
    segment_id: str
    total_score: float


@dataclass(frozen=True)
class RankedSegments:
    entries: tuple[RankedEntry, ...]


@dataclass(frozen=True)
class Shot:
    index: int
    segment_ids: tuple[str, ...]


@dataclass(frozen=True)
class ShotPlan:
    page_url: str
    template_id: str
    shots: tuple[Shot, ...]
    buffer: tuple[str, ...]

    def served_ids(self) -> list[str]:
        return [segment_id for shot in self.shots for segment_id in shot.segment_ids]


def sort_segments(scores: PageScores) -> RankedSegments:
    """Rank by total score descending; equal scores keep document order."""
    ordered = sorted(scores.scores, key=lambda score: -score.total)
    return RankedSegments(
        entries=tuple(
            RankedEntry(segment_id=score.segment_id, total_score=score.total)
            for score in ordered
        )
    )


def select_template(
    templates: list[Template] | tuple[Template, ...],
    requested: str | None = None,
    device_width_px: int | None = None,
) -> Template:
    """Requested id wins; else the widest template fitting the device; else the first."""
    if not templates:
        raise ValueError("no templates configured")
    if requested is not None:
        for template in templates:
            if template.id == requested:
                return template
        raise TemplateNotFoundError(f"unknown template {requested!r}")
    if device_width_px is not None:
        fitting = [t for t in templates if t.max_width_px <= device_width_px]
        if fitting:
            return max(fitting, key=lambda t: t.max_width_px)
    return templates[0]


def compose_shots(ranking: RankedSegments, template: Template, page_url: str = "") -> ShotPlan:
    """Materialize shot 1 from the top of the ranking; the rest is buffered."""
    ids = [entry.segment_id for entry in ranking.entries]
    if not ids:
        return ShotPlan(page_url=page_url, template_id=template.id, shots=(), buffer=())
    first = Shot(index=1, segment_ids=tuple(ids[: template.capacity]))
    return ShotPlan(
        page_url=page_url,
        template_id=template.id,
        shots=(first,),
        buffer=tuple(ids[template.capacity:]),
    )


def next_shot(plan: ShotPlan, template: Template) -> tuple[ShotPlan, Shot]:
    """Drain the next capacity-sized chunk of the buffer into a new shot."""
    if not plan.buffer:
        raise NoMoreShotsError(f"segment buffer exhausted for {plan.page_url}")
    taken = plan.buffer[: template.capacity]
    last_index = plan.shots[-1].index if plan.shots else 0
    shot = Shot(index=last_index + 1, segment_ids=taken)
    updated = replace(
        plan,
        shots=plan.shots + (shot,),
        buffer=plan.buffer[template.capacity:],
    )
    return updated, shot


@lru_cache(maxsize=None)
def _skin_css(skin: str) -> str:
    resource = files("morpes").joinpath(f"data/skins/{skin}.css")
    try:
        return resource.read_text(encoding="utf-8")
    except FileNotFoundError:
        return _skin_css("compact") if skin != "compact" else ""


def render_shot(
    shot: Shot,
    segments: SegmentSet,
    template: Template,
    nav: dict,
) -> str:
    """Emit a standalone HTML document for one shot.

    ``nav`` carries page_url, shot_index, total_shots, and session_id; when
    the template shows navigation, previous/next links target the proxy's
    /shot endpoint for the same session.
    """
    by_id = segments.by_id()
    missing = [segment_id for segment_id in shot.segment_ids if segment_id not in by_id]
    if missing:
        raise RenderError(f"unknown segment ids in shot {shot.index}: {missing}")

    page_url = nav.get("page_url", segments.page_url)
    shot_index = int(nav.get("shot_index", shot.index))
    total_shots = int(nav.get("total_shots", shot.index))
    session_id = nav.get("session_id", "")

    parts = [
        "<!DOCTYPE html>",
        '<html><head><meta charset="utf-8">',
        '<meta name="viewport" content="width=device-width, initial-scale=1">',
        f"<title>Shot {shot_index} – {html.escape(page_url)}</title>",
        f"<style>{_skin_css(template.skin)}</style>",
        "</head><body>",
        f'<p class="morpes-page-title">{html.escape(page_url)}</p>',
    ]
    for segment_id in shot.segment_ids:
        segment = by_id[segment_id]
        parts.append(
            f'<section class="morpes-segment" data-segment-id="{html.escape(segment_id, quote=True)}">'
            f"{segment.html_fragment}</section>"
        )
    if template.show_nav:
        parts.append(_nav_bar(session_id, shot_index, total_shots))
    parts.append("</body></html>")
    return "".join(parts)


def _nav_bar(session_id: str, shot_index: int, total_shots: int) -> str:
    token = html.escape(session_id, quote=True)
    pieces = ['<nav class="morpes-nav">']
    if shot_index > 1:
        pieces.append(
            f'<a rel="prev" href="/shot?session={token}&amp;i={shot_index - 1}">Previous</a>'
        )
    else:
        pieces.append("<span></span>")
    pieces.append(
        f'<span class="morpes-shot-label">Shot {shot_index} of {total_shots}</span>'
    )
    if shot_index < total_shots:
        pieces.append(
            f'<a rel="next" href="/shot?session={token}&amp;i={shot_index + 1}">Next</a>'
        )
    else:
        pieces.append("<span></span>")
    pieces.append("</nav>")
    return "".join(pieces)
