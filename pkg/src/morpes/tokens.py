"""Term normalization shared by profile updates and segment scoring.

One pipeline everywhere: lowercase, strip punctuation, drop a bundled list
of ~120 English function words, no stemming. Profile terms and the words
they are matched against must pass through the same rules or whole-word
matching silently breaks.
"""

from __future__ import annotations

import re
from functools import lru_cache
from importlib.resources import files

# Words are runs of letters/digits; internal apostrophes survive so
# contractions stay single tokens, edge apostrophes are trimmed.
_TOKEN_RE = re.compile(r"[a-z0-9']+")


@lru_cache(maxsize=1)
def stopwords() -> frozenset[str]:
    text = files("morpes").joinpath("data/stopwords.txt").read_text(encoding="utf-8")
    return frozenset(line.strip() for line in text.splitlines() if line.strip())


def tokenize(text: str) -> list[str]:
    """Content words of ``text`` in order, duplicates preserved."""
    stop = stopwords()
    tokens = []
    for raw in _TOKEN_RE.findall(text.lower()):
        token = raw.strip("'")
        if token and token not in stop:
            tokens.append(token)
    return tokens
