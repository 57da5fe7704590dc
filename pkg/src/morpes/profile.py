"""User profiles: weighted term sets built from seeds and interaction events.

Updates are event-driven and pure: boosting happens once per event per
occurring term (frequency inside the segment does not matter), then every
weight decays, then bounds are enforced. Persistence is one JSON document
per user, written atomically; the store serializes writes per user id.
"""

from __future__ import annotations

import json
import os
import tempfile
import threading
from dataclasses import dataclass
from urllib.parse import quote

from .errors import EventMismatchError, InvalidUserError, NotFoundError, StoreError
from .segmenter import Segment
from .tokens import tokenize

EVENT_KINDS = ("click", "dwell")

# One full dwell credit after this many milliseconds on screen.
DWELL_SATURATION_MS = 10_000


@dataclass(frozen=True)
class ProfileTerm:
    term: str
    weight: float
    updated_at: float


@dataclass(frozen=True)
class Profile:
    user_id: str
    terms: dict[str, ProfileTerm]

    def total_weight(self) -> float:
        return sum(term.weight for term in self.terms.values())

    def weights(self) -> dict[str, float]:
        return {name: term.weight for name, term in self.terms.items()}


@dataclass(frozen=True)
class InteractionEvent:
    user_id: str
    session_id: str
    page_url: str
    segment_id: str
    kind: str
    dwell_ms: int
    at: float

    def __post_init__(self):
        if self.kind not in EVENT_KINDS:
            raise ValueError(f"unknown event kind {self.kind!r}")
        if self.kind == "dwell" and self.dwell_ms <= 0:
            raise ValueError("dwell events require dwell_ms > 0")
        if self.dwell_ms < 0:
            raise ValueError("dwell_ms must be >= 0")


@dataclass(frozen=True)
class UpdateParams:
    boost: float = 0.2
    decay: float = 0.98
    floor: float = 0.01
    max_profile_terms: int = 500


def build_profile(user_id: str, seed_terms: list[str], at: float = 0.0) -> Profile:
    """Seed a profile: every distinct content word of the seeds at weight 1.0."""
    if not user_id:
        raise InvalidUserError("user_id must be non-empty")
    terms: dict[str, ProfileTerm] = {}
    for seed in seed_terms:
        for token in tokenize(seed):
            terms[token] = ProfileTerm(term=token, weight=1.0, updated_at=at)
    return Profile(user_id=user_id, terms=terms)


def update_profile(
    profile: Profile,
    event: InteractionEvent,
    segment: Segment,
    params: UpdateParams | None = None,
) -> Profile:
    """Boost the segment's content words, decay everything, enforce bounds."""
    params = params or UpdateParams()
    if event.segment_id != segment.id:
        raise EventMismatchError(
            f"event references {event.segment_id!r}, segment is {segment.id!r}"
        )

    if event.kind == "dwell":
        boost = params.boost * min(event.dwell_ms / DWELL_SATURATION_MS, 1.0)
    else:
        boost = params.boost

    occurring = set(tokenize(segment.text))
    terms: dict[str, ProfileTerm] = {}
    for name, term in profile.terms.items():
        weight = term.weight
        updated_at = term.updated_at
        if name in occurring:
            weight += boost
            updated_at = event.at
        weight = min(weight * params.decay, 1.0)
        terms[name] = ProfileTerm(term=name, weight=weight, updated_at=updated_at)
    for name in occurring:
        if name not in terms:
            weight = min(boost * params.decay, 1.0)
            terms[name] = ProfileTerm(term=name, weight=weight, updated_at=event.at)

    terms = {name: term for name, term in terms.items() if term.weight >= params.floor}
    if len(terms) > params.max_profile_terms:
        # Keep the heaviest; among equals, more recently updated wins.
        survivors = sorted(
            terms.values(), key=lambda t: (t.weight, t.updated_at), reverse=True
        )[: params.max_profile_terms]
        terms = {term.term: term for term in survivors}
    return Profile(user_id=profile.user_id, terms=terms)


class ProfileStore:
    """Directory of ``<user_id>.json`` documents with per-user write locks."""

    def __init__(self, directory: str):
        self.directory = directory
        os.makedirs(directory, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def _lock_for(self, user_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(user_id, threading.Lock())

    def _path_for(self, user_id: str) -> str:
        return os.path.join(self.directory, f"{quote(user_id, safe='')}.json")

    def persist_profile(self, profile: Profile) -> None:
        payload = {
            "user_id": profile.user_id,
            "terms": [
                {"term": t.term, "weight": t.weight, "updated_at": t.updated_at}
                for t in profile.terms.values()
            ],
        }
        path = self._path_for(profile.user_id)
        with self._lock_for(profile.user_id):
            try:
                fd, tmp_path = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
                with os.fdopen(fd, "w", encoding="utf-8") as handle:
                    json.dump(payload, handle, ensure_ascii=False)
                os.replace(tmp_path, path)
            except OSError as exc:
                raise StoreError(f"could not persist profile {profile.user_id!r}: {exc}") from exc

    def load_profile(self, user_id: str) -> Profile:
        path = self._path_for(user_id)
        try:
            with open(path, encoding="utf-8") as handle:
                payload = json.load(handle)
        except FileNotFoundError:
            raise NotFoundError(f"no stored profile for {user_id!r}") from None
        except OSError as exc:
            raise StoreError(f"could not load profile {user_id!r}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise StoreError(f"corrupt profile document for {user_id!r}: {exc}") from exc
        terms = {
            entry["term"]: ProfileTerm(
                term=entry["term"],
                weight=float(entry["weight"]),
                updated_at=float(entry["updated_at"]),
            )
            for entry in payload.get("terms", [])
        }
        return Profile(user_id=payload.get("user_id", user_id), terms=terms)

    def load_or_create(self, user_id: str) -> Profile:
        try:
            return self.load_profile(user_id)
        except NotFoundError:
            return build_profile(user_id, [])
