"""Corpus statistics and pivoted tf.idf scoring for simple-term selection.

A term present in a document scores::

    0.4 + 0.6 * tf / (tf + 0.5 + 1.5 * doc_len / avg_len)
              * log((N + 0.5) / df) / log(N + 1)

and an absent term scores exactly 0. A term is selected when its score
averaged over all N documents (zeros included) is strictly greater than the
threshold.
"""

from __future__ import annotations

import csv
import io
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import DomainError, StatisticsError
from .preprocessing import Document, dominant_surface

DEFAULT_TFIDF_THRESHOLD = 0.125


@dataclass(frozen=True)
class CorpusStats:
    N: int
    doc_lengths: tuple  # δ_j by document index
    avg_length: float
    df: Mapping[str, int]
    tf: Mapping[str, Mapping[int, int]]  # term -> {document index: count}

    def tf_of(self, term: str, doc: int) -> int:
        return self.tf.get(term, {}).get(doc, 0)


def compute_stats(documents: Sequence[Document]) -> CorpusStats:
    """Count N, δ_j, δ̄, n_i and tf_ij over ``documents``.

    Raises:
        StatisticsError: if no document has any token, which would make the
            average length zero.
    """
    lengths = tuple(d.length_words for d in documents)
    if not documents or sum(lengths) == 0:
        raise StatisticsError("corpus has no non-empty document; average length would be 0")
    tf: dict[str, dict[int, int]] = {}
    for j, doc in enumerate(documents):
        for term, count in Counter(doc.tokens).items():
            tf.setdefault(term, {})[j] = count
    df = {term: len(postings) for term, postings in tf.items()}
    return CorpusStats(
        N=len(documents),
        doc_lengths=lengths,
        avg_length=sum(lengths) / len(documents),
        df=df,
        tf=tf,
    )


def pivoted_tfidf(tf: float, doc_len: float, avg_len: float, n_docs: int, df: int) -> float:
    """The weighting formula on raw statistics; 0.0 when ``tf`` is 0."""
    if tf == 0:
        return 0.0
    if df < 1 or df > n_docs:
        raise DomainError(f"document frequency {df} outside [1, {n_docs}]")
    tf_part = tf / (tf + 0.5 + 1.5 * doc_len / avg_len)
    idf_part = math.log((n_docs + 0.5) / df) / math.log(n_docs + 1)
    return 0.4 + 0.6 * tf_part * idf_part


def tfidf_score(term: str, doc: int, stats: CorpusStats) -> float:
    df = stats.df.get(term, 0)
    if df == 0:
        raise DomainError(f"term {term!r} does not occur in the corpus")
    return pivoted_tfidf(stats.tf_of(term, doc), stats.doc_lengths[doc], stats.avg_length,
                         stats.N, df)


@dataclass
class TermCandidate:
    term: str
    avg_score: float
    per_doc_scores: dict = field(default_factory=dict)
    df: int = 0
    surface: str = ""
    selected: bool = False


def _rank(candidates: list[TermCandidate], threshold: float) -> list[TermCandidate]:
    for c in candidates:
        c.selected = c.avg_score > threshold
    candidates.sort(key=lambda c: (-c.avg_score, c.term))
    return candidates


def corpus_surfaces(documents: Iterable[Document]) -> dict[str, str]:
    """Dominant surface form of every stem across ``documents``."""
    totals: dict[str, Counter] = {}
    for doc in documents:
        for stem, counts in doc.surface_counts.items():
            totals.setdefault(stem, Counter()).update(counts)
    return {stem: dominant_surface(c) for stem, c in totals.items()}


def select_simple_terms(documents: Sequence[Document], stats: CorpusStats,
                        tfidf_threshold: float = DEFAULT_TFIDF_THRESHOLD,
                        doc_ids: Sequence[int] | None = None) -> list[TermCandidate]:
    """Score every term and flag those whose average tf.idf exceeds the threshold.

    ``doc_ids`` restricts scoring and averaging to a subset of the documents
    ``stats`` was computed on (the annotations of one image); by default all
    N documents are used.
    """
    if doc_ids is None:
        doc_ids = range(stats.N)
    doc_ids = list(doc_ids)
    if not doc_ids:
        return []
    surfaces = corpus_surfaces(documents[j] for j in doc_ids)
    terms = sorted({t for j in doc_ids for t in documents[j].tokens})
    candidates = []
    for term in terms:
        scores = {j: tfidf_score(term, j, stats) for j in doc_ids
                  if stats.tf_of(term, j) > 0}
        candidates.append(TermCandidate(
            term=term,
            avg_score=sum(scores.values()) / len(doc_ids),
            per_doc_scores=scores,
            df=stats.df[term],
            surface=surfaces.get(term, term),
        ))
    return _rank(candidates, tfidf_threshold)


def select_from_averages(avg_scores: Mapping[str, float],
                         tfidf_threshold: float = DEFAULT_TFIDF_THRESHOLD) -> list[TermCandidate]:
    """Apply the selection rule to precomputed average scores."""
    candidates = [TermCandidate(term=t, avg_score=s, surface=t) for t, s in avg_scores.items()]
    return _rank(candidates, tfidf_threshold)


TERM_REPORT_COLUMNS = ("term", "surface_form", "n_i", "avg_score", "selected")


def term_report_rows(candidates: Iterable[TermCandidate]) -> list[dict]:
    return [
        {"term": c.term, "surface_form": c.surface, "n_i": c.df,
         "avg_score": round(c.avg_score, 6), "selected": c.selected}
        for c in candidates
    ]


def term_report_csv(candidates: Iterable[TermCandidate]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=TERM_REPORT_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in term_report_rows(candidates):
        row["avg_score"] = f"{row['avg_score']:.6f}"
        row["selected"] = str(row["selected"]).lower()
        writer.writerow(row)
    return buf.getvalue()
