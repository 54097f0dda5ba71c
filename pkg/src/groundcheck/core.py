"""Core data types and dataset plumbing.

Defines the claim/evidence/record shapes used everywhere else, the
canonical binary label vocabulary, the raw-label unification map, and the
group-exclusive validation/test split.
"""
from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass, field
from enum import IntEnum
from pathlib import Path
from typing import Iterable, Sequence

from .errors import DataError


class SupportLabel(IntEnum):
    """Binary support verdict: is the claim grounded in the evidence?"""

    UNSUPPORTED = 0
    SUPPORTED = 1


@dataclass(frozen=True)
class EvidenceDoc:
    """One evidence document. Documents are scored independently and are
    never concatenated at ingestion time; chunking happens at check time."""

    id: str
    text: str


@dataclass(frozen=True)
class GroundedClaim:
    """A claim plus the evidence it should be checked against.

    context carries prior sentences (e.g. earlier conversation turns or
    surrounding summary sentences) used only for decontextualization.
    query_group ties together records derived from the same source query
    so splits can keep them on one side.
    """

    id: str
    text: str
    evidence: tuple[EvidenceDoc, ...]
    context: tuple[str, ...] = ()
    query_group: str = ""


VALIDATION = "validation"
TEST = "test"


@dataclass
class BenchRecord:
    """One benchmark example: a grounded claim with a gold label.

    Benchmark records must carry at least one evidence document; empty
    evidence is only legal for synthesis inputs.
    """

    dataset: str
    grounded: GroundedClaim
    gold: SupportLabel
    raw_label: str
    split: str | None = None  # "validation" | "test" | None (unassigned)

    def __post_init__(self) -> None:
        if not self.grounded.evidence:
            raise DataError(
                f"record {self.grounded.id!r} in dataset {self.dataset!r} "
                "has no evidence documents"
            )
        if self.split not in (None, VALIDATION, TEST):
            raise DataError(f"record {self.grounded.id!r}: bad split {self.split!r}")


@dataclass(frozen=True)
class SynthTuple:
    """One synthesized (document, claim, label) training example.

    provenance records enough of the construction to re-derive the label
    (which fact/sentence was omitted, which subclaim subset, the verdicts
    used), keyed by pipeline-specific fields.
    """

    document: EvidenceDoc
    claim: str
    label: SupportLabel
    pipeline: str  # "C2D" | "D2C" | "C2D-Simp" | "D2C-Simp"
    provenance: dict = field(default_factory=dict)


PIPELINES = ("C2D", "D2C", "C2D-Simp", "D2C-Simp")


# ---------------------------------------------------------------------------
# Label unification
# ---------------------------------------------------------------------------

# Raw annotation vocabularies differ per source dataset; everything maps
# onto the binary scheme. Unknown strings are a hard error, never a guess.
_SUPPORTED_RAW = {
    "supported",
    "fully attributable",
    "completely support",
    "completely supported",
    "complete",
}

_UNSUPPORTED_RAW = {
    "unsupported",
    "not supported",
    "not_supported",
    "non-supported",
    "non supported",
    "partially-supported",
    "partially supported",
    "partially support",
    "partially attributable",
    "not attributable",
    "contradictory",
    "contradiction",
    "partial",
    "refute",
    "refuted",
    "irrelevant",
    "incomplete",
    "attributable but contradictory",
}

_WS = re.compile(r"\s+")


def unify_label(raw: str, dataset: str = "") -> SupportLabel:
    """Map a source dataset's raw label string onto the binary scheme.

    Case-insensitive; surrounding/internal whitespace is normalized.
    Raises DataError naming the offending string and dataset for any
    label outside the known vocabulary.
    """
    if isinstance(raw, bool):
        return SupportLabel.SUPPORTED if raw else SupportLabel.UNSUPPORTED
    if isinstance(raw, (int, float)) and raw in (0, 1):
        return SupportLabel(int(raw))
    if not isinstance(raw, str):
        raise DataError(f"unknown raw label {raw!r} in dataset {dataset!r}")
    norm = _WS.sub(" ", raw.strip().lower())
    if norm in _SUPPORTED_RAW:
        return SupportLabel.SUPPORTED
    if norm in _UNSUPPORTED_RAW:
        return SupportLabel.UNSUPPORTED
    raise DataError(f"unknown raw label {raw!r} in dataset {dataset!r}")


# ---------------------------------------------------------------------------
# JSONL record I/O
# ---------------------------------------------------------------------------


def parse_ingest_record(obj: dict, line_no: int, dataset: str | None = None) -> BenchRecord:
    """Parse one line of raw ingestion JSONL into a BenchRecord.

    Expected keys: id, dataset, query_group, claim, context (list of
    strings), docs (list of strings), raw_label. A --dataset override
    wins over the per-line value.
    """
    try:
        rec_id = str(obj["id"])
        ds = dataset or str(obj["dataset"])
        claim = obj["claim"]
        docs = obj["docs"]
        raw_label = obj["raw_label"]
    except KeyError as exc:
        raise DataError(f"line {line_no}: missing required key {exc}")
    if not isinstance(claim, str) or not claim.strip():
        raise DataError(f"line {line_no}: claim must be a non-empty string")
    if not isinstance(docs, list) or not docs:
        raise DataError(f"line {line_no}: docs must be a non-empty list")
    context = obj.get("context", [])
    if not isinstance(context, list):
        raise DataError(f"line {line_no}: context must be a list of strings")
    evidence = []
    for i, doc in enumerate(docs):
        if not isinstance(doc, str) or not doc.strip():
            raise DataError(f"line {line_no}: docs[{i}] must be a non-empty string")
        evidence.append(EvidenceDoc(id=f"{rec_id}/d{i}", text=doc))
    grounded = GroundedClaim(
        id=rec_id,
        text=claim,
        evidence=tuple(evidence),
        context=tuple(str(c) for c in context),
        query_group=str(obj.get("query_group", rec_id)),
    )
    return BenchRecord(
        dataset=ds,
        grounded=grounded,
        gold=unify_label(raw_label, ds),
        raw_label=str(raw_label),
        split=obj.get("split"),
    )


def record_to_json(rec: BenchRecord) -> dict:
    return {
        "id": rec.grounded.id,
        "dataset": rec.dataset,
        "split": rec.split,
        "query_group": rec.grounded.query_group,
        "claim": rec.grounded.text,
        "context": list(rec.grounded.context),
        "docs": [{"id": d.id, "text": d.text} for d in rec.grounded.evidence],
        "gold": int(rec.gold),
        "raw_label": rec.raw_label,
    }


def record_from_json(obj: dict, line_no: int = 0) -> BenchRecord:
    """Parse one normalized (post-ingest) record."""
    try:
        evidence = tuple(
            EvidenceDoc(id=str(d["id"]), text=str(d["text"])) for d in obj["docs"]
        )
        grounded = GroundedClaim(
            id=str(obj["id"]),
            text=str(obj["claim"]),
            evidence=evidence,
            context=tuple(str(c) for c in obj.get("context", [])),
            query_group=str(obj.get("query_group", obj["id"])),
        )
        return BenchRecord(
            dataset=str(obj["dataset"]),
            grounded=grounded,
            gold=SupportLabel(int(obj["gold"])),
            raw_label=str(obj.get("raw_label", "")),
            split=obj.get("split"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"line {line_no}: malformed record: {exc}")


def read_jsonl(path: str | Path) -> list[dict]:
    out = []
    if not Path(path).is_file():
        raise DataError(f"no such file: {path}")
    with open(path, encoding="utf-8") as fh:
        for i, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                out.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}:{i}: invalid JSON: {exc}")
    return out


def read_records(path: str | Path) -> list[BenchRecord]:
    return [record_from_json(obj, i) for i, obj in enumerate(read_jsonl(path), start=1)]


def write_records(path: str | Path, records: Iterable[BenchRecord]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(record_to_json(rec), ensure_ascii=False) + "\n")


# ---------------------------------------------------------------------------
# Validation/test split
# ---------------------------------------------------------------------------


def make_split(
    records: Sequence[BenchRecord], seed: int, fraction: float = 0.5
) -> list[BenchRecord]:
    """Assign validation/test splits, keeping query groups on one side.

    Deterministic: group ids are sorted, shuffled with random.Random(seed),
    then assigned greedily to validation while the validation count is
    below fraction * len(records). Pure function of the record ids, their
    query groups, the seed, and the fraction — input order does not matter.
    """
    if not 0.0 < fraction < 1.0:
        raise DataError(f"split fraction must be in (0, 1), got {fraction}")
    groups: dict[str, list[str]] = {}
    for rec in records:
        groups.setdefault(rec.grounded.query_group, []).append(rec.grounded.id)
    order = sorted(groups)
    random.Random(seed).shuffle(order)
    target = fraction * len(records)
    assignment: dict[str, str] = {}
    val_count = 0
    for gid in order:
        if val_count < target:
            side = VALIDATION
            val_count += len(groups[gid])
        else:
            side = TEST
        assignment[gid] = side
    out = []
    for rec in records:
        out.append(
            BenchRecord(
                dataset=rec.dataset,
                grounded=rec.grounded,
                gold=rec.gold,
                raw_label=rec.raw_label,
                split=assignment[rec.grounded.query_group],
            )
        )
    return out
