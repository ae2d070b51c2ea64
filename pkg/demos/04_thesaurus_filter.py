"""Keeping only the terms a thesaurus knows about.

Run from the repository root:  python3 demos/04_thesaurus_filter.py
"""
from pathlib import Path

from teaindex.collocation import CompoundTerm
from teaindex.thesaurus import MatchPolicy, extract_concepts, parse_thesaurus

FIXTURES = Path(__file__).resolve().parents[1] / "tests" / "fixtures"

# %% A real SKOS excerpt: one concept uses labels as XML attributes and an
# undeclared "mesh:" prefix, which is tolerated with a warning.
excerpt = parse_thesaurus(FIXTURES / "mesh_excerpt.rdf")
print(excerpt.summary())
print(excerpt.warnings)

# %% The small test thesaurus holds the three brain CT concepts.
mini = parse_thesaurus(FIXTURES / "mini_thesaurus.rdf")
compounds = [
    CompoundTerm(("hématom", "fronto", "pariétal"), 0.6, 6, "hématome fronto pariétale"),
    CompoundTerm(("pariétal", "droit"), 0.3, 3, "pariétale droit"),
]
for m in extract_concepts([], compounds, mini):
    print(m.keyword, "->", m.concept_id)

# %% Matching ignores case and accents by default; stems are opt-in.
print(mini.label_index.get("hemorragie meningee"))
print(MatchPolicy(stem_labels=True).snapshot())
