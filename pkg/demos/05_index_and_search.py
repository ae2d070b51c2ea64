"""Indexing the brain CT comments and querying the index.

Run from the repository root:  python3 demos/05_index_and_search.py
"""
import tempfile
from pathlib import Path

from teaindex import PipelineConfig, index_comments, load_corpus, load_index, save_index, search
from teaindex.indexer import keyword_block

FIXTURES = Path(__file__).resolve().parents[1] / "tests" / "fixtures"

corpus = load_corpus(FIXTURES / "brain_ct" / "manifest.json")
config = PipelineConfig(thesaurus_path=str(FIXTURES / "mini_thesaurus.rdf"))
index = index_comments(corpus, config)
print(keyword_block(index, {"brain-ct": "brain CT"}))

# %% The index file carries a checksum and a snapshot of the configuration.
with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "index.json"
    save_index(index, path)
    index = load_index(path)
print(sorted(index.config))

# %% Queries go through the same cleaning and stemming as the comments.
for query in ("hémorragies", "inondation du ventricule", "le la"):
    print(query, "->", search(index, query))
