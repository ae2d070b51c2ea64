"""Ranked-retrieval metrics: average precision, MAP and precision/recall curves."""

from __future__ import annotations

import csv
import io
import logging
from pathlib import Path
from typing import Mapping, Sequence

from .errors import DomainError, IngestionError, ParseError, ValidationError

logger = logging.getLogger(__name__)

RECALL_LEVELS = tuple(i / 10 for i in range(11))


def average_precision(ranked: Sequence[str], relevant) -> float:
    """Sum of precision@r over the ranks r holding a relevant item, divided by ``|relevant|``."""
    relevant = set(relevant)
    if not relevant:
        raise DomainError("average precision is undefined for an empty relevant set")
    hits = 0
    total = 0.0
    for rank, item in enumerate(ranked, 1):
        if item in relevant:
            hits += 1
            total += hits / rank
    return total / len(relevant)


def mean_average_precision(run: Mapping[str, Sequence[str]],
                           qrels: Mapping[str, set]) -> float:
    """Mean AP over the queries in ``qrels``; a query absent from ``run`` scores 0."""
    if not qrels:
        raise DomainError("MAP over an empty set of queries is undefined")
    missing = sorted(q for q in qrels if q not in run)
    if missing:
        logger.warning("%d queries missing from run, scored as 0: %s", len(missing), missing)
    return sum(average_precision(run.get(q, ()), rel) for q, rel in qrels.items()) / len(qrels)


def pr_curve(ranked: Sequence[str], relevant, interpolated: bool = False) -> list[tuple]:
    """Precision/recall points, one per rank, or the 11-point interpolated curve.

    Interpolated precision at recall level ``l`` is the maximum precision
    over all points with recall >= ``l`` (0 if there is none).
    """
    relevant = set(relevant)
    if not relevant:
        raise DomainError("precision/recall is undefined for an empty relevant set")
    points = []
    hits = 0
    for rank, item in enumerate(ranked, 1):
        if item in relevant:
            hits += 1
        points.append((hits / len(relevant), hits / rank))
    if interpolated:
        return interpolate(points)
    return points


def interpolate(points: Sequence[tuple]) -> list[tuple]:
    out = []
    for level in RECALL_LEVELS:
        eligible = [p for r, p in points if r >= level - 1e-12]
        out.append((level, max(eligible) if eligible else 0.0))
    return out


def macro_curve(run: Mapping[str, Sequence[str]], qrels: Mapping[str, set]) -> list[tuple]:
    """Interpolated 11-point curve averaged over the queries in ``qrels``."""
    if not qrels:
        raise DomainError("no queries")
    curves = [pr_curve(run.get(q, ()), rel, interpolated=True) for q, rel in qrels.items()]
    return [(level, sum(c[i][1] for c in curves) / len(curves))
            for i, level in enumerate(RECALL_LEVELS)]


# -- files --------------------------------------------------------------------

def _lines(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IngestionError(f"cannot read {path}: {exc.strerror or exc}") from exc
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if line and not line.startswith("#"):
            yield lineno, line.split()


def load_qrels(path) -> dict[str, set]:
    """Read ``query_id image_id relevance`` lines; relevance > 0 means relevant."""
    judged: dict[str, set] = {}
    for lineno, parts in _lines(path):
        if len(parts) != 3:
            raise ParseError("expected 'query_id image_id relevance'", str(path), lineno)
        qid, image_id, rel = parts
        try:
            rel = int(rel)
        except ValueError:
            raise ParseError(f"relevance {rel!r} is not an integer", str(path), lineno) from None
        judged.setdefault(qid, set())
        if rel > 0:
            judged[qid].add(image_id)
    empty = sorted(q for q, rel in judged.items() if not rel)
    if empty:
        raise ValidationError(f"{path}: queries without any relevant image: {empty}")
    return judged


def load_run(path) -> dict[str, list]:
    """Read ``query_id image_id rank score`` lines into rank-ordered lists."""
    rows: dict[str, list] = {}
    for lineno, parts in _lines(path):
        if len(parts) != 4:
            raise ParseError("expected 'query_id image_id rank score'", str(path), lineno)
        qid, image_id, rank, score = parts
        try:
            rows.setdefault(qid, []).append((int(rank), -float(score), image_id))
        except ValueError:
            raise ParseError("rank must be an integer and score a number", str(path), lineno) from None
    run = {}
    for qid, entries in rows.items():
        ranked = [image_id for _, _, image_id in sorted(entries)]
        if len(set(ranked)) != len(ranked):
            raise ValidationError(f"{path}: query {qid!r} ranks the same image twice")
        run[qid] = ranked
    return run


def write_run(run: Mapping[str, Sequence[str]], path, scores=None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for qid in sorted(run):
            for rank, image_id in enumerate(run[qid], 1):
                score = scores[qid][rank - 1] if scores else float(len(run[qid]) - rank + 1)
                fh.write(f"{qid} {image_id} {rank} {score:g}\n")


def curve_csv(run: Mapping[str, Sequence[str]], qrels: Mapping[str, set]) -> str:
    """``query_id,recall,precision`` rows: raw curve per query, then the macro-averaged curve."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["query_id", "recall", "precision"])
    for qid in sorted(qrels):
        for r, p in pr_curve(run.get(qid, ()), qrels[qid]):
            writer.writerow([qid, f"{r:.6f}", f"{p:.6f}"])
    for r, p in macro_curve(run, qrels):
        writer.writerow(["macro", f"{r:.6f}", f"{p:.6f}"])
    return buf.getvalue()
