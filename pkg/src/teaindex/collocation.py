"""Mutual-information scoring of token sequences and iterative compound-term building.

Compounds grow one token at a time: every length-n candidate ``s`` is extended
by each selected simple term ``t`` that follows it in the corpus, and ``s·t``
is kept when ``MI(s, t) > threshold``. Probabilities are maximum-likelihood
estimates over the W surviving tokens; ``P(s)`` for a multiword ``s`` uses the
sequence's own corpus count.
"""

from __future__ import annotations

import csv
import io
import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import DomainError, NoCooccurrenceError
from .preprocessing import Document

DEFAULT_MI_THRESHOLD = 0.15
DEFAULT_LOG_BASE = 10.0
DEFAULT_MAX_LEN = 4


@dataclass(frozen=True)
class SequenceCounts:
    total_tokens: int
    unigram: Mapping[str, int]
    # token tuple (length 1..max_len) -> occurrences inside single documents
    sequences: Mapping[tuple, int]
    window: int = 1

    def count(self, seq: Sequence[str]) -> int:
        seq = tuple(seq)
        if len(seq) == 1:
            return self.unigram.get(seq[0], 0)
        return self.sequences.get(seq, 0)

    def adjacency_count(self, seq: Sequence[str], nxt: str) -> int:
        return self.sequences.get(tuple(seq) + (nxt,), 0)

    @property
    def adjacency(self) -> dict:
        """``{(sequence, next_token): count}`` for every observed extension."""
        return {(seq[:-1], seq[-1]): c for seq, c in self.sequences.items() if len(seq) >= 2}


def count_sequences(documents: Iterable[Document], max_len: int = DEFAULT_MAX_LEN,
                    window: int = 1) -> SequenceCounts:
    """Count unigrams and sequences of up to ``max_len`` tokens.

    With ``window = 1`` sequences are contiguous. A larger window lets each
    next token follow its predecessor at distance up to ``window``. Sequences
    never cross document boundaries.
    """
    if max_len < 2:
        raise DomainError("max_len must be at least 2")
    if window < 1:
        raise DomainError("window must be at least 1")
    unigram: Counter = Counter()
    sequences: Counter = Counter()
    total = 0

    for doc in documents:
        toks = doc.tokens if isinstance(doc, Document) else tuple(doc)
        total += len(toks)
        unigram.update(toks)
        n = len(toks)

        def extend(seq, last):
            for nxt in range(last + 1, min(last + window, n - 1) + 1):
                longer = seq + (toks[nxt],)
                sequences[longer] += 1
                if len(longer) < max_len:
                    extend(longer, nxt)

        for i in range(n):
            sequences[(toks[i],)] += 1
            extend((toks[i],), i)

    return SequenceCounts(total, dict(unigram), dict(sequences), window)


def mutual_information(seq: Sequence[str], nxt: str, counts: SequenceCounts,
                       log_base: float = DEFAULT_LOG_BASE) -> float:
    """``log(P(seq·nxt) / (P(seq) P(nxt)))`` in base ``log_base``.

    Raises:
        NoCooccurrenceError: ``seq`` is never followed by ``nxt``.
    """
    joint = counts.adjacency_count(seq, nxt)
    if joint == 0:
        raise NoCooccurrenceError(f"{' '.join(seq)!s} is never followed by {nxt!r}")
    left, right = counts.count(seq), counts.count((nxt,))
    if left == 0 or right == 0:
        raise DomainError("sequence counts must be positive")
    ratio = joint * counts.total_tokens / (left * right)
    return math.log(ratio) / math.log(log_base)


@dataclass(frozen=True)
class CompoundTerm:
    tokens: tuple
    mi_score: float
    support: int
    surface: str = ""

    @property
    def text(self) -> str:
        return " ".join(self.tokens)


def _selected_terms(simple_terms) -> list[str]:
    out = []
    for t in simple_terms:
        if isinstance(t, str):
            out.append(t)
        elif getattr(t, "selected", True):
            out.append(t.term)
    return sorted(set(out))


def extract_compound_terms(simple_terms, documents: Sequence[Document],
                           mi_threshold: float = DEFAULT_MI_THRESHOLD,
                           max_len: int = DEFAULT_MAX_LEN,
                           log_base: float = DEFAULT_LOG_BASE,
                           window: int = 1,
                           surfaces: Mapping[str, str] | None = None,
                           counts: SequenceCounts | None = None) -> list[CompoundTerm]:
    """Build compounds of length 2..max_len from the selected simple terms.

    ``simple_terms`` may hold :class:`~teaindex.weighting.TermCandidate`
    objects (only selected ones are used) or plain stems. Results are sorted
    longest first, then by MI descending, then lexicographically.
    """
    vocabulary = _selected_terms(simple_terms)
    if counts is None:
        counts = count_sequences(documents, max_len, window)
    in_vocab = set(vocabulary)

    # prefix -> tokens observed right after it
    followers: dict[tuple, set] = defaultdict(set)
    for seq in counts.sequences:
        if len(seq) >= 2 and seq[-1] in in_vocab:
            followers[seq[:-1]].add(seq[-1])

    found: list[CompoundTerm] = []
    level = [(t,) for t in vocabulary]
    while level and len(level[0]) < max_len:
        next_level = []
        for seq in level:
            for nxt in sorted(followers.get(seq, ())):
                mi = mutual_information(seq, nxt, counts, log_base)
                if mi > mi_threshold:
                    longer = seq + (nxt,)
                    next_level.append(longer)
                    surface = ""
                    if surfaces is not None:
                        surface = " ".join(surfaces.get(t, t) for t in longer)
                    found.append(CompoundTerm(longer, mi, counts.count(longer), surface))
        level = next_level

    found.sort(key=lambda c: (-len(c.tokens), -c.mi_score, c.tokens))
    return found


COMPOUND_REPORT_COLUMNS = ("compound", "length", "mi_score", "support")


def compound_report_rows(compounds: Iterable[CompoundTerm]) -> list[dict]:
    return [
        {"compound": c.surface or c.text, "length": len(c.tokens),
         "mi_score": round(c.mi_score, 6), "support": c.support}
        for c in compounds
    ]


def compound_report_csv(compounds: Iterable[CompoundTerm]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=COMPOUND_REPORT_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in compound_report_rows(compounds):
        row["mi_score"] = f"{row['mi_score']:.6f}"
        writer.writerow(row)
    return buf.getvalue()
