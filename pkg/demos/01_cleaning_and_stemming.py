"""Cleaning and stemming one expert comment.

Run from the repository root:  python3 demos/01_cleaning_and_stemming.py
"""
from pathlib import Path

from teaindex import load_corpus
from teaindex.preprocessing import clean, french_cleaning_config, french_ruleset, stem

ROOT = Path(__file__).resolve().parents[1]
corpus = load_corpus(ROOT / "tests" / "fixtures" / "brain_ct" / "manifest.json")
cleaning = french_cleaning_config()
rules = french_ruleset()

# %% The raw comment, as typed by the radiologist
text = corpus.annotations[0].text
print(text)

# %% Cleaning lowercases, splits clitics on apostrophes, drops numbers and
# stop words, and merges the split "hémato me" through the repair map.
words = clean(text, cleaning)
print(words)

# %% Stemming folds inflections together: pariétale and pariétal share a stem.
for w in ("pariétale", "pariétal", "méningée", "hémorragie", "engagement"):
    print(f"{w:>12} -> {stem(w, rules)}")

# %% The shipped English rules are a Porter-style approximation.
from teaindex.preprocessing import english_ruleset

en = english_ruleset()
print([stem(w, en) for w in ("caresses", "ponies", "motoring", "happy")])
