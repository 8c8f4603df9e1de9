"""Political-leaning classification of news articles.

The package trains a three-way classifier (left / center / right) over news
articles and measures how much of its apparent skill is really outlet
recognition: alongside the usual random split it evaluates on media splits,
where every test article comes from an outlet never seen in training.  To
close the gap it infuses two kinds of outside knowledge into the article
representation: an encyclopedia page describing the publishing outlet, and
topic embeddings learned from presidential-debate transcripts.
"""

__version__ = "0.1.0"

from .corpus import (  # noqa: F401
    Article,
    Corpus,
    Leaning,
    SplitSpec,
    load_corpus,
    make_media_split,
    make_random_split,
    validate_split,
)
from .errors import PipelineError  # noqa: F401
from .metrics import MetricsReport  # noqa: F401
from .model import KnowledgeFusedClassifier  # noqa: F401
from .topics import TopicVectorizer  # noqa: F401
