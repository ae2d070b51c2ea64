"""Growing compound terms with mutual information.

Run from the repository root:  python3 demos/03_compound_terms.py
"""
from pathlib import Path

from teaindex import load_corpus
from teaindex.collocation import compound_report_csv, count_sequences, extract_compound_terms, mutual_information
from teaindex.preprocessing import french_cleaning_config, french_ruleset, preprocess_document
from teaindex.weighting import compute_stats, corpus_surfaces, select_simple_terms

ROOT = Path(__file__).resolve().parents[1]
corpus = load_corpus(ROOT / "tests" / "fixtures" / "brain_ct" / "manifest.json")
docs = [preprocess_document(a, french_cleaning_config(), french_ruleset())
        for a in corpus.annotations]
simple = select_simple_terms(docs, compute_stats(docs))

# %% One pair by hand: hémorragie is always followed by méningée.
counts = count_sequences(docs, max_len=2)
print(mutual_information(("hémorrag",), "méning", counts))

# %% Candidates start from kept simple terms and grow one token at a time
# while the base-10 MI of the extension stays above 0.15.
compounds = extract_compound_terms(simple, docs, surfaces=corpus_surfaces(docs))
print(compound_report_csv(compounds))

# %% The same set comes out in base 2 once the threshold is rescaled.
import math

base2 = extract_compound_terms(simple, docs, mi_threshold=0.15 * math.log2(10), log_base=2)
print({c.tokens for c in base2} == {c.tokens for c in compounds})
