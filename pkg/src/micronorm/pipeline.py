"""End-to-end polarity pipeline: gate, extract, normalize, average.

A sentence is optionally gated by the OOV/IV classifier.  Concepts are
extracted against the lexicon; out-of-vocabulary candidates are G2P
encoded and matched phonetically, and a match is accepted when its
Dice distance stays within the acceptance threshold.  Sentence
polarity is the arithmetic mean of the accepted concepts' polarity
values, labeled by sign (zero is Neutral); unaccepted concepts
contribute nothing.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

from .concepts import ConceptCandidate, extract_concepts, substituted_tokens
from .errors import ConfigError, EncodingError, MicronormError
from .g2p import G2PEngine
from .lexicon import PhonLexicon, polarity_label
from .match_index import InvertedIndex, top_k
from .oov_gate import IV, OOV, GateModel
from .similarity import DistanceVariant

UNGATED = "Ungated"


@dataclass(frozen=True)
class PipelineConfig:
    accept_distance: float = 0.45
    k: int = 5
    variant: DistanceVariant = DistanceVariant.CHAR_SET
    gate_enabled: bool = False
    min_sim: float = 0.5
    max_ngram: int = 4

    def __post_init__(self):
        if not 0.0 <= self.accept_distance <= 1.0:
            raise ConfigError("accept_distance must be in [0, 1]")
        if self.accept_distance > 1.0 - self.min_sim + 1e-12:
            raise ConfigError(
                f"accept_distance {self.accept_distance} exceeds the search ceiling "
                f"1 - min_sim = {1.0 - self.min_sim}; matches would be cut off"
            )
        if self.k < 1:
            raise ConfigError("k must be >= 1")


@dataclass(frozen=True)
class NormalizationOutcome:
    original: str
    span: tuple[int, int]
    accepted: bool
    matched: str | None = None
    distance: float | None = None
    polarity_value: float | None = None
    error: str | None = None


@dataclass(frozen=True)
class SentencePolarity:
    label: str
    score: float
    trace: tuple[NormalizationOutcome, ...]
    gated_as: str


@dataclass
class PipelineCounters:
    """Thread-safe counters backing the gating-efficiency measurement."""

    phonetic_searches: int = 0
    sentences: int = 0
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def bump_search(self) -> None:
        with self._lock:
            self.phonetic_searches += 1

    def bump_sentence(self) -> None:
        with self._lock:
            self.sentences += 1


def normalize_concept(
    candidate: ConceptCandidate,
    lex: PhonLexicon,
    idx: InvertedIndex,
    g2p: G2PEngine,
    cfg: PipelineConfig,
    counters: PipelineCounters | None = None,
) -> NormalizationOutcome:
    """Resolve one candidate to a lexicon concept and polarity."""
    if candidate.matched_iv:
        entry = lex.lookup(candidate.concept)
        if entry is None:
            raise MicronormError(f"IV candidate {candidate.concept!r} missing from lexicon")
        return NormalizationOutcome(
            original=candidate.concept,
            span=candidate.span,
            accepted=True,
            matched=entry.concept,
            distance=0.0,
            polarity_value=entry.polarity_value,
        )
    try:
        query = g2p.encode_concept(candidate.concept)
    except EncodingError as exc:
        return NormalizationOutcome(
            original=candidate.concept, span=candidate.span, accepted=False, error=str(exc)
        )
    if counters is not None:
        counters.bump_search()
    matches = top_k(idx, query, k=cfg.k, min_sim=cfg.min_sim)
    if matches and matches[0].distance <= cfg.accept_distance:
        best = matches[0]
        entry = lex.entries[best.entry_id]
        return NormalizationOutcome(
            original=candidate.concept,
            span=candidate.span,
            accepted=True,
            matched=entry.concept,
            distance=best.distance,
            polarity_value=entry.polarity_value,
        )
    return NormalizationOutcome(
        original=candidate.concept, span=candidate.span, accepted=False
    )


def _exact_outcome(candidate: ConceptCandidate, lex: PhonLexicon) -> NormalizationOutcome:
    if candidate.matched_iv:
        entry = lex.lookup(candidate.concept)
        if entry is not None:
            return NormalizationOutcome(
                original=candidate.concept,
                span=candidate.span,
                accepted=True,
                matched=entry.concept,
                distance=0.0,
                polarity_value=entry.polarity_value,
            )
    return NormalizationOutcome(
        original=candidate.concept, span=candidate.span, accepted=False
    )


def sentence_polarity(
    sentence: str,
    lex: PhonLexicon,
    idx: InvertedIndex,
    g2p: G2PEngine,
    cfg: PipelineConfig,
    model: GateModel | None = None,
    counters: PipelineCounters | None = None,
    with_normalization: bool = True,
) -> SentencePolarity:
    """Score a sentence by averaging its accepted concepts' polarities."""
    if counters is not None:
        counters.bump_sentence()
    gated_as = UNGATED
    if cfg.gate_enabled and model is not None:
        gated_as, _ = model.predict(sentence)
    candidates = extract_concepts(sentence, lex, max_n=cfg.max_ngram)
    normalize = with_normalization and gated_as != IV
    trace = tuple(
        normalize_concept(c, lex, idx, g2p, cfg, counters)
        if normalize
        else _exact_outcome(c, lex)
        for c in candidates
    )
    accepted = [o.polarity_value for o in trace if o.accepted]
    score = sum(accepted) / len(accepted) if accepted else 0.0
    return SentencePolarity(
        label=polarity_label(score), score=score, trace=trace, gated_as=gated_as
    )


def normalize_sentence(
    sentence: str,
    lex: PhonLexicon,
    idx: InvertedIndex,
    g2p: G2PEngine,
    cfg: PipelineConfig,
    counters: PipelineCounters | None = None,
) -> str:
    """Rewrite accepted concept spans with their matched surface forms."""
    tokens = substituted_tokens(sentence)
    candidates = extract_concepts(sentence, lex, max_n=cfg.max_ngram)
    replacements: dict[int, tuple[int, str]] = {}
    for cand in candidates:
        outcome = normalize_concept(cand, lex, idx, g2p, cfg, counters)
        if outcome.accepted and outcome.matched is not None:
            start, end = outcome.span
            replacements[start] = (end, outcome.matched.replace("_", " "))
    out: list[str] = []
    i = 0
    while i < len(tokens):
        if i in replacements:
            end, text = replacements[i]
            out.append(text)
            i = end
        else:
            out.append(tokens[i])
            i += 1
    return " ".join(out)


def eval_polarity(
    corpus: list[tuple[str, str]],
    lex: PhonLexicon,
    idx: InvertedIndex,
    g2p: G2PEngine,
    cfg: PipelineConfig,
    model: GateModel | None = None,
) -> dict:
    """Before/after normalization accuracy over a gold-labeled corpus."""
    valid = {"Positive", "Negative", "Neutral"}
    rows = []
    correct_before = correct_after = 0
    for text, gold in corpus:
        if gold not in valid:
            raise MicronormError(f"unknown gold label {gold!r} for record {text!r}")
        before = sentence_polarity(
            text, lex, idx, g2p, cfg, model=model, with_normalization=False
        )
        after = sentence_polarity(text, lex, idx, g2p, cfg, model=model)
        correct_before += before.label == gold
        correct_after += after.label == gold
        rows.append(
            {
                "text": text,
                "gold": gold,
                "before": before.label,
                "after": after.label,
                "score_after": after.score,
                "trace": [
                    {
                        "original": o.original,
                        "matched": o.matched,
                        "distance": o.distance,
                        "accepted": o.accepted,
                    }
                    for o in after.trace
                ],
            }
        )
    n = len(corpus)
    acc_before = correct_before / n if n else 0.0
    acc_after = correct_after / n if n else 0.0
    return {
        "accuracy_before": acc_before,
        "accuracy_after": acc_after,
        "delta": acc_after - acc_before,
        "rows": rows,
    }
