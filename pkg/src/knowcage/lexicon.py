"""Surface-term to medical-concept lookup used to augment the text graph.

The lexicon is a user-supplied TSV (term, CUI, preferred name) standing in
for a licensed metathesaurus export. Lookup is exact match on lowercase
preprocessed tokens; multi-word surface matching is out of scope.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from .corpus import preprocess, tokenize
from .errors import ParseError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ConceptEntry:
    term: str
    cui: str
    preferred_name: str


@dataclass(frozen=True)
class ConceptLexicon:
    entries: dict[str, ConceptEntry]

    def lookup(self, token: str) -> ConceptEntry | None:
        return self.entries.get(token)

    def __len__(self) -> int:
        return len(self.entries)


EMPTY_LEXICON = ConceptLexicon(entries={})


def load_lexicon(path) -> ConceptLexicon:
    """Load a term/cui/preferred_name TSV; later duplicate terms override earlier."""
    entries: dict[str, ConceptEntry] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            cols = line.split("\t")
            if len(cols) != 3:
                raise ParseError(path, line_no, f"expected 3 tab-separated columns, got {len(cols)}")
            term, cui, preferred = cols
            if not cui or not preferred:
                raise ParseError(path, line_no, "cui and preferred_name must be non-empty")
            key = term.lower()
            if key in entries:
                log.info("lexicon %s:%d: duplicate term %r overrides earlier entry", path, line_no, key)
            entries[key] = ConceptEntry(term=key, cui=cui, preferred_name=preferred)
    return ConceptLexicon(entries=entries)


def concept_tokens(entry: ConceptEntry) -> list[str]:
    """Tokens of the preferred name after standard preprocessing.

    May be empty when the preferred name is all stop words; such entries
    contribute no concept nodes.
    """
    return tokenize(preprocess(entry.preferred_name))
