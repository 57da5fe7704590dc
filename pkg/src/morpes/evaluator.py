"""Five-dimension personalized segment scoring.

Every dimension is normalized to [0, 1] and hand-verifiable:

- link weight:   mean over links of matched-profile-weight / total-profile-weight
                 computed on anchor text,
- image weight:  the same ratio over image alt text,
- theme weight:  cosine similarity between the segment's content-word
                 term-frequency vector and the profile weight vector,
- visual weight: headings, emphasis density, and position on the page
                 (profile-independent),
- freshness:     exponential decay over the age of the most recent date
                 mentioned in the segment (profile-independent).

The total is a weighted sum; with all weights at 1 it is the plain sum of
the five dimensions.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from datetime import date, datetime, timezone

from .profile import Profile
from .segmenter import Segment, SegmentSet
from .tokens import tokenize

_MONTHS = {
    name: number
    for number, names in enumerate(
        [
            ("january", "jan"), ("february", "feb"), ("march", "mar"),
            ("april", "apr"), ("may",), ("june", "jun"), ("july", "jul"),
            ("august", "aug"), ("september", "sep", "sept"), ("october", "oct"),
            ("november", "nov"), ("december", "dec"),
        ],
        start=1,
    )
    for name in names
}
_MONTH_PATTERN = "|".join(sorted(_MONTHS, key=len, reverse=True))
_ISO_DATE_RE = re.compile(r"\b(\d{4})-(\d{2})-(\d{2})\b")
_DMY_DATE_RE = re.compile(
    rf"\b(\d{{1,2}})(?:st|nd|rd|th)?\s+({_MONTH_PATTERN})\s+(\d{{4}})\b", re.I
)
_MDY_DATE_RE = re.compile(
    rf"\b({_MONTH_PATTERN})\s+(\d{{1,2}})(?:st|nd|rd|th)?,?\s+(\d{{4}})\b", re.I
)

FRESHNESS_DECAY_DAYS = 30.0
EMPHASIS_SATURATION = 5


@dataclass(frozen=True)
class DimensionWeights:
    w_link: float = 1.0
    w_image: float = 1.0
    w_theme: float = 1.0
    w_visual: float = 1.0
    w_fresh: float = 1.0

    def __post_init__(self):
        values = (self.w_link, self.w_image, self.w_theme, self.w_visual, self.w_fresh)
        if any(value < 0 for value in values):
            raise ValueError("dimension weights must be >= 0")
        if sum(values) <= 0:
            raise ValueError("at least one dimension weight must be positive")

    def scaled(self, factor: float) -> DimensionWeights:
        return DimensionWeights(
            self.w_link * factor,
            self.w_image * factor,
            self.w_theme * factor,
            self.w_visual * factor,
            self.w_fresh * factor,
        )


@dataclass(frozen=True)
class SegmentScore:
    segment_id: str
    link_w: float
    image_w: float
    theme_w: float
    visual_w: float
    fresh_w: float
    total: float

    def to_dict(self) -> dict:
        return {
            "segment_id": self.segment_id,
            "link_w": self.link_w,
            "image_w": self.image_w,
            "theme_w": self.theme_w,
            "visual_w": self.visual_w,
            "fresh_w": self.fresh_w,
            "total": self.total,
        }


@dataclass(frozen=True)
class PageScores:
    page_url: str
    scores: tuple[SegmentScore, ...]

    def to_dict(self) -> dict:
        return {
            "page_url": self.page_url,
            "scores": [score.to_dict() for score in self.scores],
        }


def _clamp(value: float) -> float:
    return min(max(value, 0.0), 1.0)


def _match_ratio(text: str, profile: Profile) -> float:
    """Matched profile weight over total profile weight, 0 for empty profiles."""
    total = profile.total_weight()
    if total <= 0:
        return 0.0
    present = set(tokenize(text))
    matched = sum(term.weight for name, term in profile.terms.items() if name in present)
    return matched / total


def link_weight(segment: Segment, profile: Profile) -> float:
    if not segment.links:
        return 0.0
    ratios = [_match_ratio(link.anchor_text, profile) for link in segment.links]
    return _clamp(sum(ratios) / len(ratios))


def image_weight(segment: Segment, profile: Profile) -> float:
    if not segment.images:
        return 0.0
    ratios = [_match_ratio(image.alt_text, profile) for image in segment.images]
    return _clamp(sum(ratios) / len(ratios))


def theme_weight(segment: Segment, profile: Profile) -> float:
    """Cosine similarity over the union vocabulary of segment and profile."""
    frequencies: dict[str, int] = {}
    for token in tokenize(segment.text):
        frequencies[token] = frequencies.get(token, 0) + 1
    if not frequencies or not profile.terms:
        return 0.0
    dot = sum(
        count * profile.terms[token].weight
        for token, count in frequencies.items()
        if token in profile.terms
    )
    segment_norm = math.sqrt(sum(count * count for count in frequencies.values()))
    profile_norm = math.sqrt(sum(t.weight * t.weight for t in profile.terms.values()))
    if segment_norm == 0 or profile_norm == 0:
        return 0.0
    return _clamp(dot / (segment_norm * profile_norm))


def visual_weight(segment: Segment, profile: Profile, segment_count: int) -> float:
    """Headings, emphasis, and page position; independent of the profile."""
    if segment.heading_level > 0:
        heading = (7 - segment.heading_level) / 6
    else:
        heading = 0.0
    emphasis = min(segment.emphasis_count / EMPHASIS_SATURATION, 1.0)
    if segment_count <= 1:
        position = 1.0
    else:
        position = 1.0 - segment.order_index / (segment_count - 1)
    return _clamp((heading + emphasis + position) / 3.0)


def freshness_weight(segment: Segment, profile: Profile, now: float) -> float:
    """Decay over the age of the most recent non-future date in the text."""
    today = datetime.fromtimestamp(now, tz=timezone.utc).date()
    best: date | None = None
    for found in _scan_dates(segment.text):
        if found <= today and (best is None or found > best):
            best = found
    if best is None:
        return 0.0
    age_days = (today - best).days
    return _clamp(math.exp(-age_days / FRESHNESS_DECAY_DAYS))


def _scan_dates(text: str):
    for match in _ISO_DATE_RE.finditer(text):
        year, month, day = (int(group) for group in match.groups())
        parsed = _safe_date(year, month, day)
        if parsed:
            yield parsed
    for match in _DMY_DATE_RE.finditer(text):
        day, month_name, year = match.groups()
        parsed = _safe_date(int(year), _MONTHS[month_name.lower()], int(day))
        if parsed:
            yield parsed
    for match in _MDY_DATE_RE.finditer(text):
        month_name, day, year = match.groups()
        parsed = _safe_date(int(year), _MONTHS[month_name.lower()], int(day))
        if parsed:
            yield parsed


def _safe_date(year: int, month: int, day: int) -> date | None:
    try:
        return date(year, month, day)
    except ValueError:
        return None


def evaluate_segment(
    segment: Segment,
    profile: Profile,
    weights: DimensionWeights,
    now: float,
    segment_count: int,
) -> SegmentScore:
    link = link_weight(segment, profile)
    image = image_weight(segment, profile)
    theme = theme_weight(segment, profile)
    visual = visual_weight(segment, profile, segment_count)
    fresh = freshness_weight(segment, profile, now)
    total = (
        weights.w_link * link
        + weights.w_image * image
        + weights.w_theme * theme
        + weights.w_visual * visual
        + weights.w_fresh * fresh
    )
    return SegmentScore(
        segment_id=segment.id,
        link_w=link,
        image_w=image,
        theme_w=theme,
        visual_w=visual,
        fresh_w=fresh,
        total=total,
    )


def score_page(
    segments: SegmentSet,
    profile: Profile,
    weights: DimensionWeights | None = None,
    now: float = 0.0,
) -> PageScores:
    weights = weights or DimensionWeights()
    count = len(segments.segments)
    scores = tuple(
        evaluate_segment(segment, profile, weights, now, count)
        for segment in segments.segments
    )
    return PageScores(page_url=segments.page_url, scores=scores)
