"""Curated regression corpus.

Entries live in ``corpus.txt`` next to this module, one per line in the form
``name ; formula ; expected [; provenance]``.  The expected verdicts were
fixed by the brute-force semantic oracle and are re-checked by the test
suite, so the file doubles as a regression fence for the provers.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

from .formula import Formula, parse

__all__ = ["CorpusEntry", "load_corpus", "PROVED", "REFUTED"]

PROVED = "proved"
REFUTED = "refuted"


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    formula: Formula
    expected: str  # PROVED or REFUTED
    provenance: str


def _parse_line(line: str, lineno: int) -> CorpusEntry | None:
    text = line.split("#", 1)[0].strip()
    if not text:
        return None
    parts = [p.strip() for p in text.split(";")]
    if len(parts) == 3:
        name, source, expected = parts
        provenance = "curated"
    elif len(parts) == 4:
        name, source, expected, provenance = parts
    else:
        raise ValueError(f"corpus line {lineno}: expected 3 or 4 fields, got {len(parts)}")
    if not name:
        raise ValueError(f"corpus line {lineno}: empty name")
    if expected not in (PROVED, REFUTED):
        raise ValueError(f"corpus line {lineno}: bad verdict {expected!r}")
    return CorpusEntry(name, parse(source), expected, provenance)


def load_corpus() -> list[CorpusEntry]:
    """Parse corpus.txt into a list of entries (order preserved)."""
    raw = resources.files(__package__).joinpath("corpus.txt").read_text("utf-8")
    entries = []
    seen = set()
    for lineno, line in enumerate(raw.splitlines(), start=1):
        entry = _parse_line(line, lineno)
        if entry is None:
            continue
        if entry.name in seen:
            raise ValueError(f"corpus line {lineno}: duplicate name {entry.name!r}")
        seen.add(entry.name)
        entries.append(entry)
    return entries
