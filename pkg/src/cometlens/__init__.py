"""cometlens: multimodal alignment analysis for coded design-meeting corpora.

Parses annotated verbal and graphico-gestural units, finds parallel
activity, labels it integrated or not, segments the meeting into episodes
and reports focus-gap coalitions together with descriptive statistics.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .model import AnalysisConfig, AnnotationUnit, Corpus, Granularity, ObjectRef, TimeInterval  # noqa: E402
from .corpus_io import load_corpus, parse_corpus, write_corpus  # noqa: E402

__all__ = [
    "AnalysisConfig",
    "AnnotationUnit",
    "Corpus",
    "Granularity",
    "ObjectRef",
    "TimeInterval",
    "load_corpus",
    "parse_corpus",
    "write_corpus",
    "__version__",
]
