"""Annotation corpora: images, the expert comments attached to them, and manifest loading."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from .errors import IngestionError, ValidationError


@dataclass(frozen=True)
class ImageInfo:
    image_id: str
    name: str = ""
    path: str | None = None


@dataclass(frozen=True)
class Annotation:
    """One expert comment bound to one image. Each annotation is a document."""

    annotation_id: str
    image_id: str
    text: str
    author: str | None = None

    def __post_init__(self):
        if not self.text.strip():
            raise ValidationError(f"annotation {self.annotation_id!r} has empty text")


@dataclass(frozen=True)
class Corpus:
    annotations: tuple[Annotation, ...] = ()
    images: Mapping[str, ImageInfo] = field(default_factory=dict)

    def __post_init__(self):
        seen = set()
        for ann in self.annotations:
            key = (ann.image_id, ann.annotation_id)
            if key in seen:
                raise ValidationError(
                    f"duplicate annotation_id {ann.annotation_id!r} on image {ann.image_id!r}"
                )
            seen.add(key)
            if ann.image_id not in self.images:
                raise ValidationError(
                    f"annotation {ann.annotation_id!r} references unknown image_id {ann.image_id!r}"
                )

    def __len__(self):
        return len(self.annotations)

    def annotations_for(self, image_id: str) -> list[Annotation]:
        return [a for a in self.annotations if a.image_id == image_id]


def _read_text(path: Path) -> str:
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise IngestionError(f"cannot read {path}: {exc.strerror or exc}") from exc
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise IngestionError(f"{path} is not valid UTF-8 (byte {exc.start})") from exc


def load_corpus(manifest_path) -> Corpus:
    """Load a JSON corpus manifest.

    Annotation texts are given inline (``text``) or as a file reference
    (``text_path``), resolved relative to the manifest's directory.

    Raises:
        IngestionError: the manifest or a referenced text file is missing,
            unreadable or not UTF-8.
        ValidationError: duplicate annotation ids, unknown image ids, or a
            malformed entry.
    """
    manifest_path = Path(manifest_path)
    if not manifest_path.is_file():
        raise IngestionError(f"manifest not found: {manifest_path}")
    try:
        data = json.loads(_read_text(manifest_path))
    except json.JSONDecodeError as exc:
        raise IngestionError(f"{manifest_path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc
    if not isinstance(data, dict):
        raise ValidationError(f"{manifest_path}: manifest must be a JSON object")

    base = manifest_path.parent
    images: dict[str, ImageInfo] = {}
    for entry in data.get("images", []):
        try:
            image_id = str(entry["image_id"])
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"{manifest_path}: image entry without image_id") from exc
        if image_id in images:
            raise ValidationError(f"{manifest_path}: duplicate image_id {image_id!r}")
        images[image_id] = ImageInfo(image_id, str(entry.get("name", "")), entry.get("path"))

    annotations = []
    for entry in data.get("annotations", []):
        if not isinstance(entry, dict) or "annotation_id" not in entry or "image_id" not in entry:
            raise ValidationError(f"{manifest_path}: annotation entry needs annotation_id and image_id")
        if "text" in entry:
            text = entry["text"]
        elif "text_path" in entry:
            text = _read_text(base / entry["text_path"])
        else:
            raise ValidationError(
                f"{manifest_path}: annotation {entry['annotation_id']!r} has neither text nor text_path"
            )
        annotations.append(
            Annotation(
                annotation_id=str(entry["annotation_id"]),
                image_id=str(entry["image_id"]),
                text=text,
                author=entry.get("author"),
            )
        )
    return Corpus(tuple(annotations), images)


def corpus_fingerprint(corpus: Corpus) -> str:
    """SHA-256 over image ids and (image_id, annotation_id, text) triples in sorted order."""
    canonical = {
        "images": sorted(corpus.images),
        "annotations": sorted([a.image_id, a.annotation_id, a.text] for a in corpus.annotations),
    }
    blob = json.dumps(canonical, ensure_ascii=False, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()
