"""Scoring simple terms with the pivoted tf.idf and keeping those above 0.125.

Run from the repository root:  python3 demos/02_term_weighting.py
"""
from pathlib import Path

from teaindex import load_corpus
from teaindex.preprocessing import french_cleaning_config, french_ruleset, preprocess_document
from teaindex.weighting import compute_stats, pivoted_tfidf, select_simple_terms, term_report_csv

ROOT = Path(__file__).resolve().parents[1]
corpus = load_corpus(ROOT / "tests" / "fixtures" / "brain_ct" / "manifest.json")
docs = [preprocess_document(a, french_cleaning_config(), french_ruleset())
        for a in corpus.annotations]

stats = compute_stats(docs)
print(f"N={stats.N}  average length={stats.avg_length:.3f}")

# %% Any term present in a document scores above 0.4; absent terms score 0,
# so the average over all N documents is what separates frequent terms.
print(pivoted_tfidf(2, 3, 2.5, 2, 1))

candidates = select_simple_terms(docs, stats, 0.125)
print(term_report_csv(candidates))

# %% Kept terms, shown with their most frequent surface form
print([c.surface for c in candidates if c.selected])
