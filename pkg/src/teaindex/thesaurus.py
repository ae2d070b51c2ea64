"""SKOS/RDF thesaurus parsing and concept verification of extracted terms."""

from __future__ import annotations

import re
import unicodedata
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import IngestionError, ParseError

RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
SKOS_NS = "http://www.w3.org/2004/02/skos/core#"
XML_NS = "http://www.w3.org/XML/1998/namespace"

_RDF = "{%s}" % RDF_NS
_SKOS = "{%s}" % SKOS_NS
_LANG = "{%s}lang" % XML_NS
LABEL_KINDS = ("prefLabel", "altLabel", "hiddenLabel")


@dataclass(frozen=True)
class Concept:
    concept_id: str
    pref_labels: tuple = ()  # ((text, lang or None), ...)
    alt_labels: tuple = ()
    hidden_labels: tuple = ()
    scope_note: str | None = None

    def labels(self):
        for kind, labels in zip(LABEL_KINDS, (self.pref_labels, self.alt_labels, self.hidden_labels)):
            for text, lang in labels:
                yield kind, text, lang


@dataclass(frozen=True)
class MatchPolicy:
    fold_case: bool = True
    fold_diacritics: bool = True
    stem_labels: bool = False
    allow_token_subset: bool = False

    def snapshot(self) -> dict:
        return dict(fold_case=self.fold_case, fold_diacritics=self.fold_diacritics,
                    stem_labels=self.stem_labels, allow_token_subset=self.allow_token_subset)


def _fold_diacritics(text: str) -> str:
    decomposed = unicodedata.normalize("NFD", text)
    return unicodedata.normalize("NFC", "".join(ch for ch in decomposed
                                                if unicodedata.category(ch) != "Mn"))


def normalize_label(text: str, policy: MatchPolicy = MatchPolicy()) -> str:
    """Case/diacritic folding per ``policy`` and whitespace collapsing."""
    text = unicodedata.normalize("NFC", text)
    if policy.fold_case:
        text = text.lower()
    if policy.fold_diacritics:
        text = _fold_diacritics(text)
    return " ".join(text.split())


_WORD = re.compile(r"[^\W_]+")


def _stemmed_key(text: str, policy: MatchPolicy, ruleset) -> str:
    from .preprocessing import stem

    text = unicodedata.normalize("NFC", text)
    if policy.fold_case:
        text = text.lower()
    stems = [stem(w, ruleset) for w in _WORD.findall(text)]
    return _fold_stems(stems, policy)


def _fold_stems(stems: Sequence[str], policy: MatchPolicy) -> str:
    return normalize_label(" ".join(stems), MatchPolicy(fold_case=policy.fold_case,
                                                        fold_diacritics=policy.fold_diacritics))


@dataclass
class Thesaurus:
    concepts: dict = field(default_factory=dict)  # concept_id -> Concept
    warnings: list = field(default_factory=list)
    _indexes: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def label_index(self) -> dict:
        """Normalized label (default policy) -> frozenset of concept ids."""
        return self.index_for(MatchPolicy())

    def index_for(self, policy: MatchPolicy, ruleset=None) -> dict:
        if policy.stem_labels and ruleset is None:
            raise ValueError("stem_labels policy needs a stemmer ruleset")
        cache_key = (policy.fold_case, policy.fold_diacritics, policy.stem_labels, id(ruleset))
        if cache_key not in self._indexes:
            index: dict[str, set] = {}
            for cid, concept in self.concepts.items():
                for _, text, _ in concept.labels():
                    key = (_stemmed_key(text, policy, ruleset) if policy.stem_labels
                           else normalize_label(text, policy))
                    if key:
                        index.setdefault(key, set()).add(cid)
            self._indexes[cache_key] = {k: frozenset(v) for k, v in index.items()}
        return self._indexes[cache_key]

    def summary(self) -> dict:
        counts = {kind: 0 for kind in LABEL_KINDS}
        for concept in self.concepts.values():
            for kind, _, _ in concept.labels():
                counts[kind] += 1
        return {"concepts": len(self.concepts), **counts,
                "distinct_labels": len(self.label_index), "warnings": len(self.warnings)}


# -- parsing ----------------------------------------------------------------

_TAG_PREFIX = re.compile(r"</?([A-Za-z_][\w.-]*):[A-Za-z_]")
_ATTR_PREFIX = re.compile(r"\s([A-Za-z_][\w.-]*):[A-Za-z_][\w.-]*\s*=")
_DECLARED = re.compile(r"xmlns:([A-Za-z_][\w.-]*)\s*=")
_ROOT_START = re.compile(r"<(?![?!])[^\s>/]+")


def _declare_missing_prefixes(text: str) -> tuple[str, list[str]]:
    """Bind prefixes used without an xmlns declaration to placeholder URNs.

    Published MeSH/SKOS excerpts often use ``mesh:`` attributes without
    declaring the namespace, which strict XML parsers reject.
    """
    used = set(_TAG_PREFIX.findall(text)) | set(_ATTR_PREFIX.findall(text))
    missing = sorted(used - set(_DECLARED.findall(text)) - {"xml", "xmlns"})
    if not missing:
        return text, []
    root = _ROOT_START.search(text)
    if root is None:
        return text, []
    decls = "".join(f' xmlns:{p}="urn:undeclared:{p}"' for p in missing)
    return text[: root.end()] + decls + text[root.end():], missing


def _parse_xml(text: str, source: str):
    try:
        return ET.fromstring(text), []
    except ET.ParseError as exc:
        if "unbound prefix" not in str(exc):
            line, col = exc.position
            raise ParseError(f"malformed XML at column {col}: {exc}", source, line) from exc
    patched, missing = _declare_missing_prefixes(text)
    try:
        root = ET.fromstring(patched)
    except ET.ParseError as exc:
        line, col = exc.position
        raise ParseError(f"malformed XML at column {col}: {exc}", source, line) from exc
    return root, [f"undeclared namespace prefix {p!r} bound to a placeholder" for p in missing]


def _element_labels(elem, kind: str, inherited_lang):
    out = []
    attr = elem.get(_SKOS + kind)
    if attr is not None and attr.strip():
        out.append((attr.strip(), elem.get(_LANG, inherited_lang)))
    for child in elem.findall(_SKOS + kind):
        text = "".join(child.itertext()).strip()
        if text:
            out.append((text, child.get(_LANG, elem.get(_LANG, inherited_lang))))
    return out


def _is_typed_concept(elem) -> bool:
    for t in elem.findall(_RDF + "type"):
        if t.get(_RDF + "resource") == SKOS_NS + "Concept":
            return True
    return False


def parse_thesaurus_string(text: str, source: str = "<string>") -> Thesaurus:
    root, warnings = _parse_xml(text, source)
    concepts: dict[str, dict] = {}
    anonymous = 0
    root_lang = root.get(_LANG)

    for elem in root.iter():
        is_concept = elem.tag == _SKOS + "Concept"
        if not is_concept and elem.tag != _RDF + "Description":
            continue
        labels = {k: _element_labels(elem, k, root_lang) for k in LABEL_KINDS}
        if not is_concept and not labels["prefLabel"] and not _is_typed_concept(elem):
            if labels["altLabel"] or labels["hiddenLabel"]:
                warnings.append(f"rdf:Description {elem.get(_RDF + 'about')!r} has labels but no prefLabel; skipped")
            continue
        cid = elem.get(_RDF + "about") or elem.get(_RDF + "ID") or elem.get(_RDF + "nodeID")
        if not cid:
            anonymous += 1
            cid = f"_:concept{anonymous}"
        if not labels["prefLabel"] and cid not in concepts:
            warnings.append(f"concept {cid!r} has no prefLabel; skipped")
            continue
        note = elem.get(_SKOS + "scopeNote")
        child_note = elem.find(_SKOS + "scopeNote")
        if child_note is not None:
            note = "".join(child_note.itertext()).strip()
        entry = concepts.setdefault(cid, {k: [] for k in LABEL_KINDS} | {"note": None})
        for k in LABEL_KINDS:
            for label in labels[k]:
                if label not in entry[k]:
                    entry[k].append(label)
        entry["note"] = entry["note"] or note

    thesaurus = Thesaurus(warnings=warnings)
    for cid, entry in concepts.items():
        thesaurus.concepts[cid] = Concept(
            cid, tuple(entry["prefLabel"]), tuple(entry["altLabel"]),
            tuple(entry["hiddenLabel"]), entry["note"],
        )
    return thesaurus


def parse_thesaurus(path) -> Thesaurus:
    """Parse an RDF/XML SKOS file.

    Every ``skos:Concept`` and every ``rdf:Description`` carrying a
    ``skos:prefLabel`` (as child element or attribute) becomes a
    :class:`Concept`. ``broader``/``related`` links are ignored. Concepts
    without a preferred label are skipped and reported in ``warnings``.
    """
    path = Path(path)
    try:
        text = path.read_bytes().decode("utf-8")
    except OSError as exc:
        raise IngestionError(f"cannot read thesaurus {path}: {exc.strerror or exc}") from exc
    except UnicodeDecodeError as exc:
        raise IngestionError(f"thesaurus {path} is not valid UTF-8") from exc
    return parse_thesaurus_string(text, str(path))


def dump_thesaurus(thesaurus: Thesaurus) -> str:
    """Serialize to RDF/XML SKOS that :func:`parse_thesaurus_string` reads back."""
    ET.register_namespace("rdf", RDF_NS)
    ET.register_namespace("skos", SKOS_NS)
    root = ET.Element(_RDF + "RDF")
    for cid in sorted(thesaurus.concepts):
        concept = thesaurus.concepts[cid]
        elem = ET.SubElement(root, _SKOS + "Concept", {_RDF + "about": cid})
        for kind, text, lang in concept.labels():
            child = ET.SubElement(elem, _SKOS + kind)
            child.text = text
            if lang:
                child.set(_LANG, lang)
        if concept.scope_note:
            ET.SubElement(elem, _SKOS + "scopeNote").text = concept.scope_note
    ET.indent(root)
    return '<?xml version="1.0" encoding="utf-8"?>\n' + ET.tostring(root, encoding="unicode") + "\n"


# -- concept verification -----------------------------------------------------

@dataclass(frozen=True)
class ConceptMatch:
    keyword: str
    concept_id: str | None
    kind: str  # "compound" or "simple"
    stems: tuple
    score: float = 0.0


def _as_term(item, kind: str):
    """(stems, surface, score) for a TermCandidate, CompoundTerm, or plain string."""
    if isinstance(item, str):
        stems = tuple(item.split()) if kind == "compound" else (item,)
        return stems, item, 0.0
    if kind == "compound":
        return tuple(item.tokens), item.surface or " ".join(item.tokens), item.mi_score
    return (item.term,), item.surface or item.term, item.avg_score


def extract_concepts(simple_terms: Iterable, compound_terms: Iterable, thesaurus: Thesaurus,
                     policy: MatchPolicy = MatchPolicy(), ruleset=None,
                     keep_unmatched: bool = False) -> list[ConceptMatch]:
    """Keep the extracted terms whose label exists in the thesaurus.

    Compound terms come first and are matched as whole phrases (or, with
    ``allow_token_subset``, when all their tokens occur in one label of one
    concept). A simple term whose stem is a token of a kept compound is
    dropped. When several concepts match, the smallest concept id is the
    witness. With ``keep_unmatched`` rejected terms are returned too, with
    ``concept_id=None``.
    """
    index = thesaurus.index_for(policy, ruleset)

    def key_of(stems, surface):
        if policy.stem_labels:
            return _fold_stems(stems, policy)
        return normalize_label(surface, policy)

    token_sets = None
    if policy.allow_token_subset:
        token_sets = [(frozenset(_WORD.findall(k)), ids) for k, ids in index.items()]

    out: list[ConceptMatch] = []
    kept_stems: set[str] = set()
    for item in compound_terms:
        stems, surface, score = _as_term(item, "compound")
        key = key_of(stems, surface)
        ids = index.get(key)
        if not ids and token_sets is not None:
            wanted = set(_WORD.findall(key))
            ids = frozenset(cid for tokens, cids in token_sets if wanted <= tokens for cid in cids)
        if ids:
            out.append(ConceptMatch(surface, min(ids), "compound", stems, score))
            kept_stems.update(stems)
        elif keep_unmatched:
            out.append(ConceptMatch(surface, None, "compound", stems, score))

    for item in simple_terms:
        if not isinstance(item, str) and not getattr(item, "selected", True):
            continue
        stems, surface, score = _as_term(item, "simple")
        if stems[0] in kept_stems:
            continue
        ids = index.get(key_of(stems, surface))
        if ids:
            out.append(ConceptMatch(surface, min(ids), "simple", stems, score))
        elif keep_unmatched:
            out.append(ConceptMatch(surface, None, "simple", stems, score))
    return out


def keyword_report(matches: Iterable[ConceptMatch]) -> list[dict]:
    return [{"keyword": m.keyword, "concept_id": m.concept_id} for m in matches]
