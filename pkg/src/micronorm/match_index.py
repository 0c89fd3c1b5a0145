"""Exact top-k Dice search via an inverted index over encoding symbols.

The index maps each symbol (or bigram) to the sorted list of entries
containing it.  A query merges the posting lists of its own symbols,
which yields the exact intersection size |A&B| per entry; the Dice
distance then follows from the stored set sizes without touching the
encoding strings.  Entries are only scored when they pass the size
window and intersection bound implied by the similarity floor, yet the
result list is guaranteed identical to the exhaustive scan restricted
to distance <= 1 - min_sim.  With min_sim = 0 the scan may also surface
entries with fully disjoint symbol sets (distance exactly 1), so the
query pads its result list from the non-candidates to preserve
scan-equality.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .errors import SimilarityError
from .lexicon import PhonLexicon
from .similarity import DistanceVariant, MatchResult, dice_distance, symbol_set

# Slack for the candidate-generation bounds only; keeps borderline
# entries alive through float rounding without admitting false hits
# (the exact distance filter still decides membership).
_EPS = 1e-9


@dataclass
class InvertedIndex:
    variant: DistanceVariant
    postings: dict[str, list[int]]
    sizes: list[int]
    concepts: list[str]
    encodings: list[str]
    # entries too short to have a bigram; always scored under the bigram variant
    short_entries: list[int] = field(default_factory=list)
    # diagnostics: entries exactly scored / queries answered since build
    visited: int = 0
    queries: int = 0


def build_index(lex: PhonLexicon, variant: DistanceVariant = DistanceVariant.CHAR_SET) -> InvertedIndex:
    postings: dict[str, list[int]] = {}
    sizes: list[int] = []
    short: list[int] = []
    for entry_id, entry in enumerate(lex.entries):
        syms = symbol_set(entry.ipa, variant)
        sizes.append(len(syms))
        if variant is DistanceVariant.BIGRAM and len(entry.ipa) < 2:
            short.append(entry_id)
        for sym in syms:
            postings.setdefault(sym, []).append(entry_id)
    for plist in postings.values():
        plist.sort()
    return InvertedIndex(
        variant=variant,
        postings=postings,
        sizes=sizes,
        concepts=[e.concept for e in lex.entries],
        encodings=[e.ipa for e in lex.entries],
        short_entries=short,
    )


def size_bounds(q: int, min_sim: float) -> tuple[float, float]:
    """Set-size window for candidates: 2*min(q,m)/(q+m) >= t forces
    t*q/(2-t) <= m <= q*(2-t)/t."""
    if min_sim <= 0.0:
        return 0.0, float("inf")
    t = min_sim
    return t * q / (2.0 - t), q * (2.0 - t) / t


def top_k(
    idx: InvertedIndex,
    query: str,
    k: int = 1,
    min_sim: float = 0.0,
    variant: DistanceVariant | None = None,
) -> list[MatchResult]:
    """Top-k entries by ascending (distance, entry_id), distance <= 1 - min_sim."""
    if variant is not None and variant is not idx.variant:
        raise SimilarityError(f"index built for {idx.variant.value}, queried as {variant.value}")
    if not query:
        raise SimilarityError("empty query")
    if k < 1:
        raise SimilarityError("k must be >= 1")
    if not 0.0 <= min_sim <= 1.0:
        raise SimilarityError("min_sim must be in [0, 1]")

    idx.queries += 1
    n = len(idx.sizes)
    max_dist = 1.0 - min_sim
    scored: list[tuple[float, int]] = []

    if idx.variant is DistanceVariant.BIGRAM and len(query) < 2:
        # every pairing falls back to character sets; nothing to prune
        for entry_id in range(n):
            dist = dice_distance(query, idx.encodings[entry_id], idx.variant)
            if dist <= max_dist:
                scored.append((dist, entry_id))
        idx.visited += n
    else:
        qsyms = symbol_set(query, idx.variant)
        qsize = len(qsyms)
        lo, hi = size_bounds(qsize, min_sim)
        overlap: Counter[int] = Counter()
        for sym in qsyms:
            for entry_id in idx.postings.get(sym, ()):
                overlap[entry_id] += 1
        fallback = set(idx.short_entries)
        for entry_id, shared in overlap.items():
            if entry_id in fallback:
                continue
            msize = idx.sizes[entry_id]
            # The window and intersection bound are relaxed by a tiny
            # epsilon so float rounding in t*(q+m) can never prune an
            # entry whose distance lands exactly on 1 - min_sim; the
            # final distance test below stays authoritative.
            if not lo - _EPS <= msize <= hi + _EPS:
                continue
            # Dice needs |A&B| >= t*(|A|+|B|)/2 to clear the floor
            if 2.0 * shared < min_sim * (qsize + msize) - _EPS:
                continue
            idx.visited += 1
            dist = 1.0 - 2.0 * shared / (qsize + msize)
            if dist <= max_dist:
                scored.append((dist, entry_id))
        for entry_id in fallback:
            idx.visited += 1
            dist = dice_distance(query, idx.encodings[entry_id], idx.variant)
            if dist <= max_dist:
                scored.append((dist, entry_id))

    scored.sort()
    results = scored[:k]

    if min_sim <= 0.0 and len(results) < k:
        # entries sharing no symbol sit at distance exactly 1.0; merge them
        # in by (distance, entry_id) as the scan would
        reached = {eid for _, eid in scored}
        pad: list[tuple[float, int]] = []
        for entry_id in range(n):
            if len(pad) >= k:
                break
            if entry_id not in reached:
                pad.append((1.0, entry_id))
        results = sorted(results + pad)[:k]

    return [
        MatchResult(entry_id=eid, concept=idx.concepts[eid], distance=dist)
        for dist, eid in results
    ]
