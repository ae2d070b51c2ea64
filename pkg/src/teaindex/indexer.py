"""End-to-end comment indexing: pipeline orchestration, index persistence and keyword search."""

from __future__ import annotations

import hashlib
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Mapping, NamedTuple

from .collocation import (DEFAULT_LOG_BASE, DEFAULT_MAX_LEN, DEFAULT_MI_THRESHOLD,
                          extract_compound_terms)
from .corpus import Corpus, corpus_fingerprint
from .errors import (ConfigurationError, FormatVersionError, IngestionError, IntegrityError,
                     PipelineError, StatisticsError)
from .preprocessing import (FRENCH_REPAIRS, FRENCH_RULES, FRENCH_STOPWORDS, CleaningConfig,
                            StemmerRuleset, clean, data_path, load_repair_map, load_ruleset,
                            load_stopwords, preprocess_document, stem)
from .thesaurus import MatchPolicy, Thesaurus, extract_concepts, parse_thesaurus
from .weighting import (DEFAULT_TFIDF_THRESHOLD, compute_stats, corpus_surfaces,
                        select_simple_terms)

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
_CLEANING_OPTIONS = ("fold_case", "split_apostrophes", "strip_punctuation",
                     "drop_numeric_tokens", "min_token_length")


@dataclass(frozen=True)
class PipelineConfig:
    """Thresholds and resource files for :func:`index_comments`.

    Resource paths left as ``None`` fall back to the shipped French stop
    lists, repair map and stemmer rules. ``repair_path=""`` disables repairs.
    """

    tfidf_threshold: float = DEFAULT_TFIDF_THRESHOLD
    mi_threshold: float = DEFAULT_MI_THRESHOLD
    mi_log_base: float = DEFAULT_LOG_BASE
    max_compound_len: int = DEFAULT_MAX_LEN
    window: int = 1
    stopwords_paths: tuple | None = None
    stemmer_path: str | None = None
    repair_path: str | None = None
    thesaurus_path: str | None = None
    cleaning_options: Mapping = field(default_factory=dict)
    match_policy: MatchPolicy = MatchPolicy()

    def __post_init__(self):
        if self.tfidf_threshold < 0 or self.mi_threshold < 0:
            raise ConfigurationError("thresholds must be >= 0")
        if self.max_compound_len < 2:
            raise ConfigurationError("max_compound_len must be >= 2")
        if self.mi_log_base <= 0 or self.mi_log_base == 1:
            raise ConfigurationError("mi_log_base must be positive and != 1")
        if self.window < 1:
            raise ConfigurationError("window must be >= 1")
        unknown = set(self.cleaning_options) - set(_CLEANING_OPTIONS)
        if unknown:
            raise ConfigurationError(f"unknown cleaning options: {sorted(unknown)}")
        if self.stopwords_paths is not None:
            paths = self.stopwords_paths
            if isinstance(paths, (str, Path)):
                paths = (paths,)
            object.__setattr__(self, "stopwords_paths", tuple(str(p) for p in paths))

    @classmethod
    def from_dict(cls, data: Mapping, base_dir=None) -> "PipelineConfig":
        """Build from the JSON config-file mirror; relative paths resolve against ``base_dir``."""
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        kwargs = dict(data)

        def resolve(p):
            if p is None or p == "" or base_dir is None:
                return p
            return str(Path(base_dir) / p)

        for key in ("stemmer_path", "repair_path", "thesaurus_path"):
            if key in kwargs:
                kwargs[key] = resolve(kwargs[key])
        if kwargs.get("stopwords_paths") is not None:
            paths = kwargs["stopwords_paths"]
            paths = [paths] if isinstance(paths, str) else paths
            kwargs["stopwords_paths"] = tuple(resolve(p) for p in paths)
        if "match_policy" in kwargs:
            kwargs["match_policy"] = MatchPolicy(**kwargs["match_policy"])
        return cls(**kwargs)

    def resolve(self) -> tuple[CleaningConfig, StemmerRuleset]:
        stop_paths = self.stopwords_paths
        if stop_paths is None:
            stop_paths = [data_path(n) for n in FRENCH_STOPWORDS]
        fold_case = self.cleaning_options.get("fold_case", True)
        repair = self.repair_path
        repairs = {}
        if repair is None:
            repairs = load_repair_map(data_path(FRENCH_REPAIRS), fold_case)
        elif repair:
            repairs = load_repair_map(repair, fold_case)
        cleaning = CleaningConfig(stopwords=load_stopwords(stop_paths, fold_case),
                                  repair_map=repairs, **self.cleaning_options)
        ruleset = load_ruleset(self.stemmer_path or data_path(FRENCH_RULES))
        return cleaning, ruleset

    def load_thesaurus(self) -> Thesaurus:
        if not self.thesaurus_path:
            raise ConfigurationError("no thesaurus configured (thesaurus_path is required)")
        if not Path(self.thesaurus_path).is_file():
            raise ConfigurationError(f"thesaurus not found: {self.thesaurus_path}")
        return parse_thesaurus(self.thesaurus_path)


@dataclass
class ImageIndex:
    # image_id -> [{"keyword", "stems", "kind", "score", "concept_id"}, ...]
    per_image: dict
    # keyword -> sorted image ids
    inverted: dict
    corpus_fingerprint: str
    config: dict
    format_version: int = FORMAT_VERSION

    def payload(self) -> dict:
        return {
            "format_version": self.format_version,
            "corpus_fingerprint": self.corpus_fingerprint,
            "config": self.config,
            "per_image": self.per_image,
            "inverted": self.inverted,
        }

    def keywords(self, image_id: str) -> list[str]:
        return [e["keyword"] for e in self.per_image.get(image_id, [])]


def _invert(per_image: Mapping[str, list]) -> dict:
    inverted: dict[str, set] = {}
    for image_id, entries in per_image.items():
        for entry in entries:
            inverted.setdefault(entry["keyword"], set()).add(image_id)
    return {k: sorted(v) for k, v in sorted(inverted.items())}


def _sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def index_comments(corpus: Corpus, config: PipelineConfig, jobs: int = 1,
                   thesaurus: Thesaurus | None = None) -> ImageIndex:
    """Run clean → stem → simple terms → compound terms → concept filter.

    Corpus statistics (N, document frequencies, average length) are pooled
    over every annotation; term selection, compound building and keyword
    attribution are done per image on that image's own annotations.

    Raises:
        PipelineError: the corpus is empty or has no content token after cleaning.
        ConfigurationError: the thesaurus is missing.
    """
    if not corpus.annotations:
        raise PipelineError("corpus has no annotations")
    thesaurus_digest = None
    if thesaurus is None:
        thesaurus = config.load_thesaurus()
        thesaurus_digest = _sha256_file(config.thesaurus_path)
    cleaning, ruleset = config.resolve()

    def prep(annotation):
        return preprocess_document(annotation, cleaning, ruleset)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            documents = list(pool.map(prep, corpus.annotations))
    else:
        documents = [prep(a) for a in corpus.annotations]

    try:
        stats = compute_stats(documents)
    except StatisticsError as exc:
        raise PipelineError("no content tokens after cleaning") from exc
    surfaces = corpus_surfaces(documents)

    per_image: dict[str, list] = {}
    for image_id in sorted(corpus.images):
        doc_ids = [j for j, d in enumerate(documents) if d.image_id == image_id]
        if not doc_ids or all(documents[j].length_words == 0 for j in doc_ids):
            per_image[image_id] = []
            continue
        candidates = select_simple_terms(documents, stats, config.tfidf_threshold, doc_ids)
        for c in candidates:
            c.surface = surfaces[c.term]
        compounds = extract_compound_terms(
            candidates, [documents[j] for j in doc_ids],
            mi_threshold=config.mi_threshold, max_len=config.max_compound_len,
            log_base=config.mi_log_base, window=config.window, surfaces=surfaces,
        )
        matches = extract_concepts(candidates, compounds, thesaurus,
                                   config.match_policy, ruleset)
        per_image[image_id] = [
            {"keyword": m.keyword, "stems": list(m.stems), "kind": m.kind,
             "score": m.score, "concept_id": m.concept_id}
            for m in matches
        ]

    snapshot = {
        "tfidf_threshold": config.tfidf_threshold,
        "mi_threshold": config.mi_threshold,
        "mi_log_base": config.mi_log_base,
        "max_compound_len": config.max_compound_len,
        "window": config.window,
        "cleaning": cleaning.snapshot(),
        "stemmer": ruleset.snapshot(),
        "match_policy": config.match_policy.snapshot(),
        "thesaurus_sha256": thesaurus_digest,
    }
    return ImageIndex(per_image, _invert(per_image), corpus_fingerprint(corpus), snapshot)


# -- persistence --------------------------------------------------------------

def _canonical(payload: Mapping) -> bytes:
    return json.dumps(payload, sort_keys=True, ensure_ascii=False,
                      separators=(",", ":")).encode("utf-8")


def save_index(index: ImageIndex, path) -> None:
    payload = index.payload()
    payload["checksum"] = hashlib.sha256(_canonical(payload)).hexdigest()
    text = json.dumps(payload, sort_keys=True, ensure_ascii=False, indent=2) + "\n"
    Path(path).write_text(text, encoding="utf-8")


def load_index(path) -> ImageIndex:
    """Read an index written by :func:`save_index`, verifying version and checksum."""
    path = Path(path)
    try:
        raw = path.read_text(encoding="utf-8")
    except FileNotFoundError as exc:
        raise IngestionError(f"index not found: {path}") from exc
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise IntegrityError(f"{path}: truncated or corrupt index ({exc.msg})") from exc
    if not isinstance(data, dict):
        raise IntegrityError(f"{path}: not an index file")
    version = data.get("format_version")
    if version != FORMAT_VERSION:
        raise FormatVersionError(
            f"{path}: index format version {version!r} is not supported "
            f"(expected {FORMAT_VERSION}); rebuild the index with this version"
        )
    checksum = data.pop("checksum", None)
    if checksum != hashlib.sha256(_canonical(data)).hexdigest():
        raise IntegrityError(f"{path}: checksum mismatch")
    try:
        return ImageIndex(data["per_image"], data["inverted"], data["corpus_fingerprint"],
                          data["config"], version)
    except KeyError as exc:
        raise IntegrityError(f"{path}: missing field {exc}") from exc


# -- search -------------------------------------------------------------------

class SearchHit(NamedTuple):
    image_id: str
    score: int  # number of index keywords matched
    weight: float  # summed keyword scores, first tie-breaker
    keywords: tuple


def query_stems(index: ImageIndex, query: str) -> list[str]:
    """Clean and stem ``query`` with the configuration the index was built with."""
    cleaning = CleaningConfig.from_snapshot(index.config["cleaning"])
    ruleset = StemmerRuleset.from_snapshot(index.config["stemmer"])
    return [stem(t, ruleset) for t in clean(query, cleaning)]


def search(index: ImageIndex, query: str) -> list[SearchHit]:
    """Rank images by how many of their keywords share a stem with the query.

    Ties are broken by the summed scores of the matched keywords, then by
    image id. Images matching nothing are omitted.
    """
    wanted = set(query_stems(index, query))
    if not wanted:
        return []
    hits = []
    for image_id, entries in index.per_image.items():
        matched = [e for e in entries if wanted.intersection(e["stems"])]
        if matched:
            hits.append(SearchHit(image_id, len(matched), sum(e["score"] for e in matched),
                                  tuple(e["keyword"] for e in matched)))
    hits.sort(key=lambda h: (-h.score, -h.weight, h.image_id))
    return hits


def keyword_block(index: ImageIndex, image_names: Mapping[str, str] | None = None) -> str:
    """Human-readable "Index Keywords :" listing, one block per image."""
    blocks = []
    for image_id in sorted(index.per_image):
        words = [k[:1].upper() + k[1:] for k in index.keywords(image_id)]
        name = (image_names or {}).get(image_id)
        header = f"Image {image_id}" + (f" ({name})" if name else "")
        if words:
            body = "Index Keywords : " + ".\n                 ".join(words)
        else:
            body = "Index Keywords : (none)"
        blocks.append(header + "\n" + body)
    return "\n\n".join(blocks) + "\n"


def with_overrides(config: PipelineConfig, **overrides) -> PipelineConfig:
    """Copy of ``config`` with the non-None overrides applied."""
    return replace(config, **{k: v for k, v in overrides.items() if v is not None})
