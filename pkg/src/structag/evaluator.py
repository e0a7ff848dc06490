"""Chunk-level precision/recall/F1 for IOB tag sequences.

Chunk extraction follows the shared-task scorer conventions: B-X always
opens a chunk, and I-X opens one too when it follows O or a different
type. A chunk ends before O, before any B, and before an I of another
type. Scores are percentages.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import DataError


def _split_tag(tag: str) -> tuple[str, str]:
    """Tag -> (prefix, type). Unrecognized forms count as O."""
    if tag == "O" or not tag:
        return "O", ""
    if tag.startswith("B-"):
        return "B", tag[2:]
    if tag.startswith("I-"):
        return "I", tag[2:]
    return "O", ""


def extract_chunks(tags: list[str] | tuple[str, ...]) -> set[tuple[int, int, str]]:
    """All chunks in one sequence as (start, end_inclusive, type) triples."""
    chunks = set()
    start = None
    ctype = ""
    for i, tag in enumerate(tags):
        prefix, ttype = _split_tag(tag)
        inside = start is not None
        if inside and (prefix != "I" or ttype != ctype):
            chunks.add((start, i - 1, ctype))
            start = None
        if prefix == "B" or (prefix == "I" and (not inside or ttype != ctype)):
            start = i
            ctype = ttype
    if start is not None:
        chunks.add((start, len(tags) - 1, ctype))
    return chunks


@dataclass
class _Counts:
    gold: int = 0
    predicted: int = 0
    correct: int = 0


def _prf(c: _Counts) -> tuple[float, float, float]:
    if c.gold == 0 and c.predicted == 0:
        # Nothing to find and nothing found: treat as a perfect score.
        return 100.0, 100.0, 100.0
    p = 100.0 * c.correct / c.predicted if c.predicted else 0.0
    r = 100.0 * c.correct / c.gold if c.gold else 0.0
    f = 2.0 * p * r / (p + r) if p + r > 0 else 0.0
    return p, r, f


def evaluate(gold: list[list[str]], predicted: list[list[str]],
             ids: list[str] | None = None) -> dict:
    """Score predicted tag sequences against gold, chunk by chunk.

    Returns overall and per-type precision/recall/F1 plus raw counts and
    token accuracy. Sequences are matched by position; a length mismatch
    is a data error.
    """
    if len(gold) != len(predicted):
        raise DataError(f"got {len(gold)} gold sequences but "
                        f"{len(predicted)} predicted")
    overall = _Counts()
    by_type: dict[str, _Counts] = {}
    tokens = 0
    tokens_correct = 0
    for i, (g, p) in enumerate(zip(gold, predicted)):
        if len(g) != len(p):
            label = ids[i] if ids else f"#{i}"
            raise DataError(
                f"utterance {label}: {len(g)} gold tags vs {len(p)} predicted")
        tokens += len(g)
        tokens_correct += sum(1 for a, b in zip(g, p) if a == b)
        gold_chunks = extract_chunks(g)
        pred_chunks = extract_chunks(p)
        matched = gold_chunks & pred_chunks
        for chunk_set, attr in ((gold_chunks, "gold"),
                                (pred_chunks, "predicted"),
                                (matched, "correct")):
            for _, _, ctype in chunk_set:
                counts = by_type.setdefault(ctype, _Counts())
                setattr(counts, attr, getattr(counts, attr) + 1)
                setattr(overall, attr, getattr(overall, attr) + 1)
    p, r, f = _prf(overall)
    report = {
        "precision": p, "recall": r, "f1": f,
        "gold": overall.gold, "predicted": overall.predicted,
        "correct": overall.correct,
        "tokens": tokens,
        "token_accuracy": 100.0 * tokens_correct / tokens if tokens else 0.0,
        "types": {},
    }
    for ctype in sorted(by_type):
        tp, tr, tf = _prf(by_type[ctype])
        report["types"][ctype] = {
            "precision": tp, "recall": tr, "f1": tf,
            "gold": by_type[ctype].gold,
            "predicted": by_type[ctype].predicted,
            "correct": by_type[ctype].correct,
        }
    return report


def format_report(report: dict) -> str:
    """Classic text rendering of an evaluation report."""
    lines = [
        f"processed {report['tokens']} tokens with {report['gold']} phrases; "
        f"found: {report['predicted']} phrases; correct: {report['correct']}.",
        f"accuracy: {report['token_accuracy']:6.2f}%; "
        f"precision: {report['precision']:6.2f}%; "
        f"recall: {report['recall']:6.2f}%; "
        f"FB1: {report['f1']:6.2f}",
    ]
    width = max((len(t) for t in report["types"]), default=0)
    for ctype, t in report["types"].items():
        lines.append(
            f"{ctype.rjust(width + 2)}: "
            f"precision: {t['precision']:6.2f}%; "
            f"recall: {t['recall']:6.2f}%; "
            f"FB1: {t['f1']:6.2f}  {t['predicted']}")
    return "\n".join(lines) + "\n"


def save_report(report: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
