"""Concept-polarity lexicon: loading, phonetic compilation, persistence.

A raw lexicon is a two-column TSV of concept and polarity value in
[-1, 1].  Compiling it attaches a Soundex code and an IPA encoding to
every concept and builds the lookup structures used by matching.  The
compiled form round-trips through a JSON-lines file.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Iterable

from .errors import LexiconError
from .g2p import G2PEngine
from .similarity import DistanceVariant
from .soundex import soundex_concept

_CONCEPT_RE = re.compile(r"[a-z0-9-]+(_[a-z0-9-]+)*\Z")

POSITIVE = "Positive"
NEGATIVE = "Negative"
NEUTRAL = "Neutral"

FORMAT_NAME = "phonlex"
FORMAT_VERSION = 1


def canonicalize_concept(raw: str) -> str:
    """Lowercase and unify separators: spaces and hyphens become '_'."""
    surface = raw.strip().lower().replace(" ", "_").replace("-", "_")
    surface = re.sub(r"_+", "_", surface).strip("_")
    return surface


def validate_concept(surface: str) -> str:
    if not _CONCEPT_RE.fullmatch(surface):
        raise LexiconError(f"invalid concept surface {surface!r}")
    return surface


def polarity_label(value: float) -> str:
    if value > 0:
        return POSITIVE
    if value < 0:
        return NEGATIVE
    return NEUTRAL


@dataclass(frozen=True)
class LexiconEntry:
    concept: str
    polarity_value: float
    ipa: str
    soundex: str

    @property
    def polarity_label(self) -> str:
        return polarity_label(self.polarity_value)


@dataclass
class PhonLexicon:
    """Compiled lexicon: entries plus exact and phonetic lookup tables."""

    entries: list[LexiconEntry]
    variant: DistanceVariant = DistanceVariant.CHAR_SET
    surface_map: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if not self.surface_map:
            self.surface_map = {e.concept: i for i, e in enumerate(self.entries)}
        self._index = None

    def __len__(self) -> int:
        return len(self.entries)

    def lookup(self, surface: str) -> LexiconEntry | None:
        idx = self.surface_map.get(surface)
        return None if idx is None else self.entries[idx]

    @property
    def match_index(self):
        """Inverted index over IPA encodings, built on first use."""
        if self._index is None:
            from .match_index import build_index

            self._index = build_index(self, self.variant)
        return self._index


@dataclass(frozen=True)
class DuplicateReport:
    scheme: str
    num_concepts: int
    num_distinct_codes: int
    num_duplicated_concepts: int
    top_collisions: list[tuple[str, list[str]]]


def load_raw_lexicon(path) -> list[tuple[str, float]]:
    """Read a concept<TAB>polarity TSV; canonicalizes and validates rows."""
    rows: list[tuple[str, float]] = []
    seen: dict[str, int] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line:
                continue
            if lineno == 1 and line == "concept\tpolarity":
                continue
            cols = line.split("\t")
            if len(cols) != 2:
                raise LexiconError(f"{path}:{lineno}: expected 2 columns, got {len(cols)}")
            surface = canonicalize_concept(cols[0])
            try:
                validate_concept(surface)
            except LexiconError as exc:
                raise LexiconError(f"{path}:{lineno}: {exc}") from None
            try:
                value = float(cols[1])
            except ValueError:
                raise LexiconError(f"{path}:{lineno}: bad polarity {cols[1]!r}") from None
            if not -1.0 <= value <= 1.0:
                raise LexiconError(f"{path}:{lineno}: polarity {value} outside [-1, 1]")
            if surface in seen:
                raise LexiconError(
                    f"{path}:{lineno}: duplicate concept {surface!r} (first at line {seen[surface]})"
                )
            seen[surface] = lineno
            rows.append((surface, value))
    return rows


def compile_lexicon(
    raw: Iterable[tuple[str, float]],
    g2p: G2PEngine,
    variant: DistanceVariant = DistanceVariant.CHAR_SET,
) -> PhonLexicon:
    """Attach phonetic encodings to every concept and build lookups."""
    entries: list[LexiconEntry] = []
    seen: set[str] = set()
    for surface, value in raw:
        surface = validate_concept(surface)
        if surface in seen:
            raise LexiconError(f"duplicate concept {surface!r}")
        seen.add(surface)
        try:
            ipa = g2p.encode_concept(surface)
        except Exception as exc:
            raise LexiconError(f"cannot encode concept {surface!r}: {exc}") from exc
        entries.append(
            LexiconEntry(
                concept=surface,
                polarity_value=value,
                ipa=ipa,
                soundex=soundex_concept(surface),
            )
        )
    if not entries:
        raise LexiconError("cannot compile an empty lexicon")
    return PhonLexicon(entries=entries, variant=variant)


def save_compiled(lex: PhonLexicon, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        header = {"format": FORMAT_NAME, "version": FORMAT_VERSION, "variant": lex.variant.value}
        fh.write(json.dumps(header, ensure_ascii=False) + "\n")
        for e in lex.entries:
            row = {"concept": e.concept, "polarity": e.polarity_value, "ipa": e.ipa, "soundex": e.soundex}
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")


def load_compiled(path) -> PhonLexicon:
    with open(path, encoding="utf-8") as fh:
        first = fh.readline()
        if not first:
            raise LexiconError(f"{path}: empty compiled lexicon")
        try:
            header = json.loads(first)
        except json.JSONDecodeError:
            raise LexiconError(f"{path}:1: malformed header") from None
        if header.get("format") != FORMAT_NAME or header.get("version") != FORMAT_VERSION:
            raise LexiconError(f"{path}: unsupported format tag {header!r}")
        try:
            variant = DistanceVariant(header.get("variant", DistanceVariant.CHAR_SET.value))
        except ValueError:
            raise LexiconError(f"{path}: unknown variant {header.get('variant')!r}") from None
        entries: list[LexiconEntry] = []
        for lineno, raw in enumerate(fh, start=2):
            line = raw.strip()
            if not line:
                continue
            try:
                row = json.loads(line)
                entries.append(
                    LexiconEntry(
                        concept=row["concept"],
                        polarity_value=float(row["polarity"]),
                        ipa=row["ipa"],
                        soundex=row["soundex"],
                    )
                )
            except (json.JSONDecodeError, KeyError, TypeError, ValueError):
                raise LexiconError(f"{path}:{lineno}: malformed entry") from None
    if not entries:
        raise LexiconError(f"{path}: compiled lexicon has no entries")
    return PhonLexicon(entries=entries, variant=variant)


def duplicate_report(lex: PhonLexicon, scheme: str, top_n: int = 10) -> DuplicateReport:
    """Collision statistics for one encoding scheme over the lexicon.

    A concept counts as duplicated when its code is shared by at least
    one other concept, i.e. the sum of collision-group sizes over all
    groups of size >= 2.
    """
    scheme_norm = scheme.lower()
    if scheme_norm not in ("soundex", "ipa"):
        raise LexiconError(f"unknown encoding scheme {scheme!r}")
    groups: dict[str, list[str]] = {}
    for e in lex.entries:
        code = e.soundex if scheme_norm == "soundex" else e.ipa
        groups.setdefault(code, []).append(e.concept)
    collisions = {code: members for code, members in groups.items() if len(members) >= 2}
    top = sorted(collisions.items(), key=lambda kv: (-len(kv[1]), kv[0]))[:top_n]
    return DuplicateReport(
        scheme="Soundex" if scheme_norm == "soundex" else "IPA",
        num_concepts=len(lex.entries),
        num_distinct_codes=len(groups),
        num_duplicated_concepts=sum(len(m) for m in collisions.values()),
        top_collisions=[(code, list(members)) for code, members in top],
    )
