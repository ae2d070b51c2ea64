"""Terminology extraction from expert image annotations and keyword indexing of images."""

from .collocation import (CompoundTerm, SequenceCounts, count_sequences, extract_compound_terms,
                          mutual_information)
from .corpus import Annotation, Corpus, ImageInfo, corpus_fingerprint, load_corpus
from .evaluation import average_precision, mean_average_precision, pr_curve
from .indexer import (ImageIndex, PipelineConfig, index_comments, load_index, save_index,
                      search)
from .preprocessing import (CleaningConfig, Document, StemmerRuleset, clean, load_ruleset,
                            load_stopwords, preprocess_document, stem)
from .thesaurus import (Concept, MatchPolicy, Thesaurus, extract_concepts, normalize_label,
                        parse_thesaurus)
from .weighting import (CorpusStats, TermCandidate, compute_stats, select_simple_terms,
                        tfidf_score)

__version__ = "0.1.0"
