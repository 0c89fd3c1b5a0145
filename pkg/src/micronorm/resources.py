"""Paths to and cached loaders for the bundled data files."""

from __future__ import annotations

from functools import lru_cache
from importlib import resources

from .g2p import default_engine
from .lexicon import PhonLexicon, compile_lexicon, load_raw_lexicon
from .similarity import DistanceVariant


def data_path(name: str) -> str:
    return str(resources.files("micronorm") / "data" / name)


SAMPLE_LEXICON = "sample_lexicon.tsv"
MICROTEXT_SUITE = "microtext_suite.tsv"
GATE_CORPUS = "gate_corpus.tsv"


@lru_cache(maxsize=2)
def default_lexicon(variant: DistanceVariant = DistanceVariant.CHAR_SET) -> PhonLexicon:
    """The bundled sample lexicon, compiled with the bundled G2P engine."""
    raw = load_raw_lexicon(data_path(SAMPLE_LEXICON))
    return compile_lexicon(raw, default_engine(), variant)
