"""Document-to-claim synthesis.

A real document is cut into three approximately equal chunks at sentence
boundaries. Each chunk is summarized into one short claim (assumed
faithful), the claim is decomposed into atomic facts, and labeled tuples
are derived two ways: removing one sentence at a time from the claim's
own chunk, and pairing the claim with the other two chunks. In both
cases a subclaim is supported iff every member fact is individually
entailed by the (ablated or cross) document; all verdicts land in a
FactVerdictMatrix so emitted labels can be audited.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .core import EvidenceDoc, SupportLabel, SynthTuple
from .decomp import ATOM_CAP, AtomicFact, FactSubset, decompose, merge, power_set
from .errors import BackendError, DataError, FormatError
from .gateway import Gateway
from .textutil import (
    SentenceSplitter,
    count_ws_tokens,
    parse_json_block,
    parse_yes_no,
    split_sentences,
)

log = logging.getLogger(__name__)

MAX_EDITS = 10  # ceiling on inconsistent summary variants per chunk


@dataclass(frozen=True)
class DocChunk:
    """One of the three contiguous sentence runs of a source document."""

    parent_id: str
    index: int  # 1..3
    sentences: tuple[str, ...]

    @property
    def text(self) -> str:
        return " ".join(self.sentences)

    def ablated(self, removed: int) -> str:
        """Chunk text with sentence `removed` (0-based) dropped."""
        return " ".join(s for k, s in enumerate(self.sentences) if k != removed)


class FactVerdictMatrix:
    """Per-fact entailment verdicts for one claim, keyed by document.

    Document keys name the ablated chunk ("chunk2-rm1") or the cross
    chunk ("chunk3"). Labels emitted by the pipeline are conjunctions of
    these entries, so the matrix is the audit trail.
    """

    def __init__(self) -> None:
        self.entries: dict[tuple[str, int], int] = {}

    def record(self, doc_key: str, fact_index: int, verdict: bool) -> None:
        self.entries[(doc_key, fact_index)] = int(verdict)

    def get(self, doc_key: str, fact_index: int) -> int:
        return self.entries[(doc_key, fact_index)]

    def conjunction(self, doc_key: str, indices: tuple[int, ...]) -> int:
        return int(all(self.entries[(doc_key, i)] for i in indices))


def chunk3(document: EvidenceDoc, splitter: SentenceSplitter = split_sentences,
           sentences: list[str] | None = None) -> list[DocChunk]:
    """Split a document into three contiguous sentence chunks of
    approximately equal word count.

    Exhausts every contiguous 3-partition and keeps the one minimizing
    the maximum deviation of chunk word counts from total/3; ties go to
    the earliest boundary pair. Pass pre-split sentences to bypass the
    splitter.
    """
    sents = sentences if sentences is not None else splitter(document.text)
    n = len(sents)
    if n < 3:
        raise DataError(
            f"document {document.id!r} has {n} sentences; need at least 3 to chunk"
        )
    words = [count_ws_tokens(s) for s in sents]
    prefix = [0]
    for w in words:
        prefix.append(prefix[-1] + w)
    total = prefix[-1]
    target = total / 3
    best: tuple[float, int, int] | None = None
    for a in range(1, n - 1):
        for b in range(a + 1, n):
            chunk_words = (prefix[a], prefix[b] - prefix[a], total - prefix[b])
            deviation = max(abs(w - target) for w in chunk_words)
            if best is None or deviation < best[0]:
                best = (deviation, a, b)
    assert best is not None
    _, a, b = best
    pieces = (sents[:a], sents[a:b], sents[b:])
    return [
        DocChunk(parent_id=document.id, index=i + 1, sentences=tuple(piece))
        for i, piece in enumerate(pieces)
    ]


def summarize_chunk(gateway: Gateway, chunk: DocChunk) -> str:
    """Summarize one chunk into a single short sentence.

    The summary is taken on faith as a supported claim for its own
    chunk. Multi-sentence or empty completions error; length is policed
    softly (warn above 20 words — the prompt asks for 15).
    """
    completion = gateway.run("summarize-chunk", {"DOCUMENT": chunk.text}).strip()
    if not completion:
        raise FormatError("chunk summary is empty", raw=completion)
    sentences = split_sentences(completion)
    if len(sentences) != 1:
        raise FormatError(
            f"chunk summary must be one sentence, got {len(sentences)}",
            raw=completion,
        )
    summary = sentences[0]
    if count_ws_tokens(summary) > 20:
        log.warning(
            "summary for %s chunk %d runs long (%d words): %r",
            chunk.parent_id, chunk.index, count_ws_tokens(summary), summary,
        )
    return summary


@dataclass
class D2CResult:
    """Everything run_document produced, including the audit trail."""

    tuples: list[SynthTuple] = field(default_factory=list)
    chunks: list[DocChunk] = field(default_factory=list)
    summaries: list[str] = field(default_factory=list)
    facts: dict[int, list[AtomicFact]] = field(default_factory=dict)
    matrices: dict[int, FactVerdictMatrix] = field(default_factory=dict)


class D2CPipeline:
    def __init__(self, gateway: Gateway, atom_cap: int = ATOM_CAP,
                 splitter: SentenceSplitter = split_sentences):
        self.gateway = gateway
        self.atom_cap = atom_cap
        self.splitter = splitter

    def _entails(self, source: str, claim: str) -> bool:
        completion = self.gateway.run("entailment", {"SOURCE": source, "CLAIM": claim})
        return parse_yes_no(completion)

    def _subclaims(self, facts: list[AtomicFact]) -> list[tuple[FactSubset, str]]:
        out = []
        for subset in power_set(facts, self.atom_cap):
            try:
                out.append((subset, merge(self.gateway, subset, facts)))
            except (BackendError, DataError) as exc:
                log.warning("merge failed for subset %s: %s", subset.indices, exc)
        return out

    def doc_claim_aug(self, chunk: DocChunk, claim_chunk: int,
                      facts: list[AtomicFact],
                      subclaims: list[tuple[FactSubset, str]],
                      matrix: FactVerdictMatrix) -> list[SynthTuple]:
        """Remove each sentence of the claim's own chunk in turn, check
        every fact against the ablated text, and label each subclaim by
        the conjunction of its member verdicts."""
        if len(chunk.sentences) < 2:
            raise DataError(
                f"chunk {chunk.index} of {chunk.parent_id!r} has "
                f"{len(chunk.sentences)} sentence(s); ablation needs at least 2"
            )
        tuples: list[SynthTuple] = []
        for removed in range(len(chunk.sentences)):
            ablated = chunk.ablated(removed)
            doc_key = f"chunk{chunk.index}-rm{removed}"
            try:
                verdicts = {f.index: self._entails(ablated, f.text) for f in facts}
            except BackendError as exc:
                log.warning(
                    "skipping ablation %s of %s: %s", doc_key, chunk.parent_id, exc
                )
                continue
            for index, verdict in verdicts.items():
                matrix.record(doc_key, index, verdict)
            doc = EvidenceDoc(id=f"{chunk.parent_id}/{doc_key}", text=ablated)
            for subset, subclaim in subclaims:
                label = SupportLabel(matrix.conjunction(doc_key, subset.indices))
                tuples.append(
                    SynthTuple(
                        document=doc,
                        claim=subclaim,
                        label=label,
                        pipeline="D2C",
                        provenance={
                            "doc_id": chunk.parent_id,
                            "kind": "ablation",
                            "claim_chunk": claim_chunk,
                            "removed_sentence": removed,
                            "subset": list(subset.indices),
                            "verdicts": {
                                str(i): int(verdicts[i]) for i in subset.indices
                            },
                        },
                    )
                )
        return tuples

    def cross_doc_aug(self, chunks: list[DocChunk], claim_chunk: int,
                      facts: list[AtomicFact],
                      subclaims: list[tuple[FactSubset, str]],
                      matrix: FactVerdictMatrix) -> list[SynthTuple]:
        """Check the claim of one chunk against each *other* chunk."""
        tuples: list[SynthTuple] = []
        for other in chunks:
            if other.index == claim_chunk:
                continue
            doc_key = f"chunk{other.index}"
            try:
                verdicts = {f.index: self._entails(other.text, f.text) for f in facts}
            except BackendError as exc:
                log.warning(
                    "skipping cross pair (%d, %d) of %s: %s",
                    claim_chunk, other.index, other.parent_id, exc,
                )
                continue
            for index, verdict in verdicts.items():
                matrix.record(doc_key, index, verdict)
            doc = EvidenceDoc(id=f"{other.parent_id}/{doc_key}", text=other.text)
            for subset, subclaim in subclaims:
                label = SupportLabel(matrix.conjunction(doc_key, subset.indices))
                tuples.append(
                    SynthTuple(
                        document=doc,
                        claim=subclaim,
                        label=label,
                        pipeline="D2C",
                        provenance={
                            "doc_id": other.parent_id,
                            "kind": "cross",
                            "claim_chunk": claim_chunk,
                            "doc_chunk": other.index,
                            "subset": list(subset.indices),
                            "verdicts": {
                                str(i): int(verdicts[i]) for i in subset.indices
                            },
                        },
                    )
                )
        return tuples

    def run_document(self, document: EvidenceDoc,
                     sentences: list[str] | None = None) -> D2CResult:
        """Full pipeline for one document: chunk, summarize, decompose,
        then ablation and cross-chunk augmentation."""
        result = D2CResult()
        result.chunks = chunk3(document, splitter=self.splitter, sentences=sentences)
        for chunk in result.chunks:
            summary = summarize_chunk(self.gateway, chunk)
            result.summaries.append(summary)
            result.tuples.append(
                SynthTuple(
                    document=EvidenceDoc(
                        id=f"{chunk.parent_id}/chunk{chunk.index}", text=chunk.text
                    ),
                    claim=summary,
                    label=SupportLabel.SUPPORTED,
                    pipeline="D2C",
                    provenance={
                        "doc_id": chunk.parent_id,
                        "kind": "summary",
                        "claim_chunk": chunk.index,
                    },
                )
            )
        for chunk, summary in zip(result.chunks, result.summaries):
            try:
                facts = decompose(self.gateway, summary)
                subclaims = self._subclaims(facts)
            except (BackendError, DataError) as exc:
                log.warning(
                    "skipping augmentation for %s chunk %d: %s",
                    document.id, chunk.index, exc,
                )
                continue
            result.facts[chunk.index] = facts
            matrix = FactVerdictMatrix()
            result.matrices[chunk.index] = matrix
            if len(chunk.sentences) >= 2:
                result.tuples.extend(
                    self.doc_claim_aug(chunk, chunk.index, facts, subclaims, matrix)
                )
            else:
                log.info(
                    "chunk %d of %s has a single sentence; no ablations",
                    chunk.index, document.id,
                )
            result.tuples.extend(
                self.cross_doc_aug(result.chunks, chunk.index, facts, subclaims, matrix)
            )
        return result


def run_d2c_simp(gateway: Gateway, document: EvidenceDoc,
                 splitter: SentenceSplitter = split_sentences,
                 sentences: list[str] | None = None) -> list[SynthTuple]:
    """Single-shot variant: per chunk, the faithful summary plus up to
    ten minimally edited inconsistent versions of it."""
    tuples: list[SynthTuple] = []
    for chunk in chunk3(document, splitter=splitter, sentences=sentences):
        summary = summarize_chunk(gateway, chunk)
        chunk_doc = EvidenceDoc(
            id=f"{chunk.parent_id}/chunk{chunk.index}", text=chunk.text
        )
        tuples.append(
            SynthTuple(
                document=chunk_doc,
                claim=summary,
                label=SupportLabel.SUPPORTED,
                pipeline="D2C-Simp",
                provenance={
                    "doc_id": chunk.parent_id,
                    "kind": "simp-summary",
                    "claim_chunk": chunk.index,
                },
            )
        )
        completion = gateway.run(
            "simp-edit-summaries",
            {"DOCUMENT": chunk.text, "CONSISTENT_SUMMARY": summary},
        )
        obj = parse_json_block(completion)
        if not isinstance(obj, dict) or "inconsistent_summaries" not in obj:
            raise FormatError(
                "edit completion must be {\"inconsistent_summaries\": [...]}",
                raw=completion,
            )
        edits = obj["inconsistent_summaries"]
        if not isinstance(edits, list) or not all(isinstance(e, str) for e in edits):
            raise FormatError(
                "inconsistent_summaries must be a list of strings", raw=completion
            )
        for k, edit in enumerate(edits[:MAX_EDITS]):
            tuples.append(
                SynthTuple(
                    document=chunk_doc,
                    claim=edit,
                    label=SupportLabel.UNSUPPORTED,
                    pipeline="D2C-Simp",
                    provenance={
                        "doc_id": chunk.parent_id,
                        "kind": "simp-edit",
                        "claim_chunk": chunk.index,
                        "edit_index": k,
                    },
                )
            )
    return tuples
