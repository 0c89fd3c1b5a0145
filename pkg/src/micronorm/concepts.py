"""Lexicon-driven concept extraction from a tokenized sentence.

A greedy left-to-right longest-match pass tries n-grams (longest
first) against the lexicon's surface forms.  Hits become in-vocabulary
candidates; any other non-stopword token becomes a single-token
out-of-vocabulary candidate for phonetic normalization.  A tiny
substitution table rewrites pronoun-like shorthand (u, r, 2, ...)
before extraction.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from .lexicon import PhonLexicon
from .oov_gate import tokenize


@dataclass(frozen=True)
class ConceptCandidate:
    concept: str
    span: tuple[int, int]  # token offsets [start, end)
    matched_iv: bool


def load_wordlist(path) -> frozenset[str]:
    words = set()
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if line and not line.startswith("#"):
                words.add(line)
    return frozenset(words)


def load_substitutions(path) -> dict[str, str]:
    table: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            src, _, dst = line.partition("\t")
            if src and dst:
                table[src] = dst
    return table


@lru_cache(maxsize=1)
def default_stopwords() -> frozenset[str]:
    data = resources.files("micronorm") / "data"
    return load_wordlist(str(data / "stopwords.txt"))


@lru_cache(maxsize=1)
def default_substitutions() -> dict[str, str]:
    data = resources.files("micronorm") / "data"
    return load_substitutions(str(data / "substitutions.tsv"))


def _concept_key(tokens: list[str]) -> str:
    # tokenizer output may carry apostrophes; concept keys may not
    return "_".join(tok.replace("'", "") for tok in tokens)


def extract_concepts(
    sentence: str,
    lex: PhonLexicon,
    max_n: int = 4,
    stopwords: frozenset[str] | None = None,
    substitutions: dict[str, str] | None = None,
) -> list[ConceptCandidate]:
    """Non-overlapping concept candidates tiling the sentence's tokens."""
    if stopwords is None:
        stopwords = default_stopwords()
    if substitutions is None:
        substitutions = default_substitutions()
    tokens = [substitutions.get(tok, tok) for tok in tokenize(sentence)]
    candidates: list[ConceptCandidate] = []
    i = 0
    while i < len(tokens):
        hit = None
        for n in range(min(max_n, len(tokens) - i), 0, -1):
            key = _concept_key(tokens[i : i + n])
            if lex.lookup(key) is not None:
                hit = (key, n)
                break
        if hit is not None:
            key, n = hit
            candidates.append(ConceptCandidate(concept=key, span=(i, i + n), matched_iv=True))
            i += n
            continue
        tok = tokens[i]
        if tok not in stopwords:
            key = _concept_key([tok])
            if key:
                candidates.append(ConceptCandidate(concept=key, span=(i, i + 1), matched_iv=False))
        i += 1
    return candidates


def substituted_tokens(
    sentence: str, substitutions: dict[str, str] | None = None
) -> list[str]:
    """Tokenization after shorthand substitution, as extraction sees it."""
    if substitutions is None:
        substitutions = default_substitutions()
    return [substitutions.get(tok, tok) for tok in tokenize(sentence)]
