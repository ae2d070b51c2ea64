"""Cleaning and suffix-stripping stemming of annotation text.

Cleaning turns raw comment text into an ordered list of content tokens:
Unicode NFC normalization, case folding, apostrophe splitting, punctuation
removal, optional repair of split words, stop-word and short-token removal.

Stemming applies a :class:`StemmerRuleset` of ordered phases. In each phase
the rule with the longest suffix matching the token is selected; it fires
only if the residual stem is at least ``minstem`` characters long.
"""

from __future__ import annotations

import re
import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

from .corpus import Annotation
from .errors import IngestionError, ParseError, ValidationError

_APOSTROPHES = "'’ʼ"
_WORD = re.compile(r"[^\W_]+")
_WORD_WITH_APOSTROPHES = re.compile(r"[^\W_]+(?:[" + _APOSTROPHES + r"][^\W_]+)*")
_APOSTROPHE_SPLIT = re.compile("[" + _APOSTROPHES + "]")


def _nfc(text: str) -> str:
    return unicodedata.normalize("NFC", text)


@dataclass(frozen=True)
class CleaningConfig:
    stopwords: frozenset = frozenset()
    fold_case: bool = True
    split_apostrophes: bool = True
    strip_punctuation: bool = True
    drop_numeric_tokens: bool = True
    min_token_length: int = 2
    # (first, second) surface bigram -> replacement token
    repair_map: Mapping[tuple, str] = field(default_factory=dict)

    def __post_init__(self):
        if self.min_token_length < 1:
            raise ValidationError("min_token_length must be >= 1")
        object.__setattr__(self, "stopwords", frozenset(self.stopwords))
        for word in self.stopwords:
            if _tokenize(word, self) != [word]:
                raise ValidationError(f"stopword {word!r} is not in normalized form")

    def snapshot(self) -> dict:
        return {
            "stopwords": sorted(self.stopwords),
            "fold_case": self.fold_case,
            "split_apostrophes": self.split_apostrophes,
            "strip_punctuation": self.strip_punctuation,
            "drop_numeric_tokens": self.drop_numeric_tokens,
            "min_token_length": self.min_token_length,
            "repair_map": sorted([a, b, r] for (a, b), r in self.repair_map.items()),
        }

    @classmethod
    def from_snapshot(cls, data: Mapping) -> "CleaningConfig":
        return cls(
            stopwords=frozenset(data.get("stopwords", ())),
            fold_case=data.get("fold_case", True),
            split_apostrophes=data.get("split_apostrophes", True),
            strip_punctuation=data.get("strip_punctuation", True),
            drop_numeric_tokens=data.get("drop_numeric_tokens", True),
            min_token_length=data.get("min_token_length", 2),
            repair_map={(a, b): r for a, b, r in data.get("repair_map", ())},
        )


def _tokenize(text: str, config: CleaningConfig) -> list[str]:
    text = _nfc(text)
    if config.fold_case:
        text = text.lower()
    if config.strip_punctuation:
        pattern = _WORD if config.split_apostrophes else _WORD_WITH_APOSTROPHES
        return pattern.findall(text)
    tokens = text.split()
    if config.split_apostrophes:
        tokens = [piece for tok in tokens for piece in _APOSTROPHE_SPLIT.split(tok) if piece]
    return tokens


def _repair(tokens: list[str], repair_map: Mapping[tuple, str]) -> list[str]:
    if not repair_map:
        return tokens
    out = []
    i = 0
    while i < len(tokens):
        if i + 1 < len(tokens) and (tokens[i], tokens[i + 1]) in repair_map:
            out.append(repair_map[tokens[i], tokens[i + 1]])
            i += 2
        else:
            out.append(tokens[i])
            i += 1
    return out


def clean(text: str, config: CleaningConfig) -> list[str]:
    """Return the content tokens of ``text`` in their original order.

    The repair map is applied before stop-word removal so that a split
    artifact like ``hémato me`` is merged before ``me`` could be dropped
    as a pronoun.
    """
    tokens = _tokenize(text, config)
    if config.drop_numeric_tokens:
        tokens = [t for t in tokens if not any(ch.isdigit() for ch in t)]
    tokens = _repair(tokens, config.repair_map)
    return [
        t for t in tokens
        if t not in config.stopwords and len(t) >= config.min_token_length
    ]


# -- stemming ---------------------------------------------------------------

@dataclass(frozen=True)
class Rule:
    suffix: str
    replacement: str = ""
    minstem: int = 1


@dataclass(frozen=True)
class StemmerRuleset:
    phases: tuple  # tuple[tuple[Rule, ...], ...]
    language: str = ""

    def __post_init__(self):
        phases = tuple(tuple(p) for p in self.phases)
        object.__setattr__(self, "phases", phases)
        for n, phase in enumerate(phases, 1):
            seen = set()
            for rule in phase:
                if rule.suffix in seen:
                    raise ValidationError(f"duplicate suffix {rule.suffix!r} in phase {n}")
                seen.add(rule.suffix)
                if not rule.suffix:
                    raise ValidationError(f"empty suffix in phase {n}")
                if rule.minstem < 1:
                    raise ValidationError(f"minstem must be >= 1 (suffix {rule.suffix!r})")
                if len(rule.replacement) > len(rule.suffix):
                    raise ValidationError(
                        f"rule {rule.suffix!r} -> {rule.replacement!r} would lengthen tokens"
                    )
        # longest suffix first, for the per-phase lookup in stem()
        ordered = tuple(tuple(sorted(p, key=lambda r: -len(r.suffix))) for p in phases)
        object.__setattr__(self, "_ordered", ordered)

    def snapshot(self) -> dict:
        return {
            "language": self.language,
            "phases": [[[r.suffix, r.replacement, r.minstem] for r in p] for p in self.phases],
        }

    @classmethod
    def from_snapshot(cls, data: Mapping) -> "StemmerRuleset":
        phases = [[Rule(s, r, m) for s, r, m in p] for p in data.get("phases", ())]
        return cls(tuple(phases), data.get("language", ""))


def apply_phase(token: str, phase: Iterable[Rule]) -> str:
    """Apply one rule group: the longest matching suffix is chosen, then its condition checked."""
    for rule in sorted(phase, key=lambda r: -len(r.suffix)):
        if token.endswith(rule.suffix):
            if len(token) - len(rule.suffix) >= rule.minstem:
                return token[: len(token) - len(rule.suffix)] + rule.replacement
            return token
    return token


def stem(token: str, ruleset: StemmerRuleset) -> str:
    for phase in ruleset._ordered:
        for rule in phase:
            if token.endswith(rule.suffix):
                if len(token) - len(rule.suffix) >= rule.minstem:
                    token = token[: len(token) - len(rule.suffix)] + rule.replacement
                break
    return token


# -- documents --------------------------------------------------------------

@dataclass(frozen=True)
class Document:
    annotation_id: str
    image_id: str
    tokens: tuple
    # stem -> {surface form: count}
    surface_counts: Mapping[str, Mapping[str, int]] = field(default_factory=dict)

    @property
    def length_words(self) -> int:
        return len(self.tokens)

    @property
    def surface_forms(self) -> dict[str, str]:
        return {s: dominant_surface(c) for s, c in self.surface_counts.items()}


def dominant_surface(counts: Mapping[str, int]) -> str:
    """Most frequent surface form; ties go to the lexicographically smallest."""
    return min(counts.items(), key=lambda kv: (-kv[1], kv[0]))[0]


def preprocess_document(annotation: Annotation, config: CleaningConfig,
                        ruleset: StemmerRuleset) -> Document:
    words = clean(annotation.text, config)
    stems = [stem(w, ruleset) for w in words]
    counts: dict[str, Counter] = {}
    for w, s in zip(words, stems):
        counts.setdefault(s, Counter())[w] += 1
    return Document(
        annotation_id=annotation.annotation_id,
        image_id=annotation.image_id,
        tokens=tuple(stems),
        surface_counts={s: dict(c) for s, c in counts.items()},
    )


# -- data files -------------------------------------------------------------

_RULE_LINE = re.compile(r"^(\S+)\s*->\s*(\S*?)\s*(?:\[minstem=(\d+)\])?$")
_PHASE_LINE = re.compile(r"^phase\s+(\d+)$")
_LANG_LINE = re.compile(r"^language\s+(\S+)$")


def _read_lines(path) -> list[str]:
    path = Path(path)
    try:
        return path.read_text(encoding="utf-8").splitlines()
    except FileNotFoundError as exc:
        raise IngestionError(f"file not found: {path}") from exc
    except UnicodeDecodeError as exc:
        raise IngestionError(f"{path} is not valid UTF-8") from exc


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0].strip()


def parse_ruleset(lines: Iterable[str], source=None) -> StemmerRuleset:
    """Parse the rule-file format.

    ::

        language fr
        phase 1
        ées -> é [minstem=3]
        s ->  [minstem=3]
    """
    phases: list[list[Rule]] = []
    language = ""
    for lineno, raw in enumerate(lines, 1):
        line = _nfc(_strip_comment(raw))
        if not line:
            continue
        if m := _LANG_LINE.match(line):
            language = m.group(1)
            continue
        if m := _PHASE_LINE.match(line):
            n = int(m.group(1))
            if n != len(phases) + 1:
                raise ValidationError(
                    f"{source or 'ruleset'}:{lineno}: phase {n} out of declared order "
                    f"(expected phase {len(phases) + 1})"
                )
            phases.append([])
            continue
        m = _RULE_LINE.match(line)
        if m is None:
            raise ParseError(f"malformed rule line {raw.strip()!r}", source, lineno)
        if not phases:
            raise ParseError("rule before any 'phase' header", source, lineno)
        suffix, replacement, minstem = m.group(1), m.group(2), m.group(3)
        if replacement in ("''", '""'):
            replacement = ""
        phase = phases[-1]
        if any(r.suffix == suffix for r in phase):
            raise ValidationError(
                f"{source or 'ruleset'}:{lineno}: duplicate suffix {suffix!r} in phase {len(phases)}"
            )
        phase.append(Rule(suffix, replacement, int(minstem) if minstem else 1))
    try:
        return StemmerRuleset(tuple(tuple(p) for p in phases), language)
    except ValidationError as exc:
        raise ValidationError(f"{source or 'ruleset'}: {exc}") from exc


def load_ruleset(path) -> StemmerRuleset:
    return parse_ruleset(_read_lines(path), source=str(path))


def load_stopwords(paths, fold_case: bool = True) -> frozenset:
    """Read one or more stop-word files (one token per line, ``#`` comments)."""
    if isinstance(paths, (str, Path)):
        paths = [paths]
    words = set()
    for path in paths:
        for line in _read_lines(path):
            word = _nfc(_strip_comment(line))
            if word:
                words.add(word.lower() if fold_case else word)
    return frozenset(words)


def load_repair_map(path, fold_case: bool = True) -> dict[tuple, str]:
    """Read ``first second => replacement`` lines."""
    repairs = {}
    for lineno, raw in enumerate(_read_lines(path), 1):
        line = _nfc(_strip_comment(raw))
        if not line:
            continue
        if fold_case:
            line = line.lower()
        lhs, sep, rhs = line.partition("=>")
        parts = lhs.split()
        if not sep or len(parts) != 2 or len(rhs.split()) != 1:
            raise ParseError(f"malformed repair line {raw.strip()!r}", str(path), lineno)
        repairs[parts[0], parts[1]] = rhs.strip()
    return repairs


# -- shipped resources --------------------------------------------------------

def data_path(name: str) -> Path:
    return Path(str(resources.files("teaindex") / "data" / name))


FRENCH_STOPWORDS = ("stopwords_fr.txt", "stopwords_fr_corpus.txt")
FRENCH_RULES = "stemmer_fr.rules"
ENGLISH_RULES = "stemmer_en.rules"
FRENCH_REPAIRS = "repair_fr.txt"


def french_ruleset() -> StemmerRuleset:
    return load_ruleset(data_path(FRENCH_RULES))


def english_ruleset() -> StemmerRuleset:
    return load_ruleset(data_path(ENGLISH_RULES))


def french_cleaning_config(**overrides) -> CleaningConfig:
    """Cleaning config with the shipped French stop lists and repair map."""
    params = dict(
        stopwords=load_stopwords([data_path(n) for n in FRENCH_STOPWORDS]),
        repair_map=load_repair_map(data_path(FRENCH_REPAIRS)),
    )
    params.update(overrides)
    return CleaningConfig(**params)
