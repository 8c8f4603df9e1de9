"""Shared tokenizer and the packaged stopword list.

The same tokenizer is used when training word embeddings on debate
transcripts and when extracting topic tokens from articles, so that the two
vocabularies line up.  It is deliberately simple: lowercase, strip
punctuation, split on whitespace.
"""

from __future__ import annotations

import string
from functools import lru_cache
from importlib import resources

# ASCII punctuation plus the few non-ASCII marks common in news copy.
_PUNCTUATION = string.punctuation + "“”‘’–—…«»"
_STRIP_TABLE = str.maketrans({ch: " " for ch in _PUNCTUATION})


def tokenize(text: str) -> list[str]:
    """Lowercase, replace punctuation with spaces, split on whitespace."""
    return text.lower().translate(_STRIP_TABLE).split()


@lru_cache(maxsize=1)
def load_stopwords() -> frozenset[str]:
    """Load the stopword list shipped with the package.

    The list is a fixed file under ``newsleaning/data`` so results do not
    depend on external downloads or on the version of any NLP library.
    """
    raw = resources.files("newsleaning").joinpath("data/stopwords.txt").read_text("utf-8")
    words = set()
    for line in raw.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line)
    return frozenset(words)
