"""Claim-to-document synthesis.

Starting from a claim, expand each atomic fact into a two-sentence pair
(the fact must only follow from both sentences together), generate one
supporting document mentioning every pair sentence, generate candidate
non-supporting documents by omitting a single pair sentence, and emit
labeled tuples over the subclaim power set. Every gate is an entailment
check through the gateway, and every kept document records its gate
outcomes so labels can be re-derived from provenance alone.
"""
from __future__ import annotations

import logging
import threading
from dataclasses import dataclass, field

from .core import EvidenceDoc, SupportLabel, SynthTuple
from .decomp import (
    ATOM_CAP,
    AtomicFact,
    FactSubset,
    decompose,
    merge,
    parse_sentence_pair,
    power_set,
)
from .errors import BackendError, DataError, FormatError, SkipDatapoint
from .gateway import Gateway
from .textutil import parse_json_block, parse_yes_no

log = logging.getLogger(__name__)

DEFAULT_ATTEMPTS = 3


@dataclass(frozen=True)
class SentencePair:
    """Two sentences that jointly (and only jointly) support one fact."""

    first: str
    second: str
    fact_index: int

    def sentence(self, side: int) -> str:
        if side == 1:
            return self.first
        if side == 2:
            return self.second
        raise DataError(f"sentence side must be 1 or 2, got {side}")


@dataclass
class GenDoc:
    """A generated passage plus the gate bookkeeping that produced it.

    omitted is None for the supporting document and (fact_index, side)
    for a non-supporting candidate built by dropping that pair sentence.
    gate_trace holds one list of entailment verdicts per generation
    attempt (per-sentence checks for supporting docs; the single residual
    check for non-supporting candidates).
    """

    text: str
    omitted: tuple[int, int] | None
    gate_trace: list[list[bool]] = field(default_factory=list)


class RejectionStats:
    """Rejection counters for the three quality gates.

    Rates are rejections/checks per gate; thread-safe because claims may
    be synthesized concurrently.
    """

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self.pair_checks = 0
        self.pair_rejections = 0
        self.doc_checks = 0
        self.doc_rejections = 0
        self.ablation_checks = 0
        self.ablation_discards = 0

    def count_pair(self, ok: bool) -> None:
        with self._lock:
            self.pair_checks += 1
            if not ok:
                self.pair_rejections += 1

    def count_doc(self, ok: bool) -> None:
        with self._lock:
            self.doc_checks += 1
            if not ok:
                self.doc_rejections += 1

    def count_ablation(self, kept: bool) -> None:
        with self._lock:
            self.ablation_checks += 1
            if not kept:
                self.ablation_discards += 1

    def rates(self) -> dict[str, float]:
        def rate(rej: int, total: int) -> float:
            return rej / total if total else 0.0

        return {
            "pair_gate": rate(self.pair_rejections, self.pair_checks),
            "support_doc_gate": rate(self.doc_rejections, self.doc_checks),
            "nonsupport_discard": rate(self.ablation_discards, self.ablation_checks),
        }

    def as_dict(self) -> dict:
        return {
            "pair_checks": self.pair_checks,
            "pair_rejections": self.pair_rejections,
            "doc_checks": self.doc_checks,
            "doc_rejections": self.doc_rejections,
            "ablation_checks": self.ablation_checks,
            "ablation_discards": self.ablation_discards,
            "rates": self.rates(),
        }


class C2DPipeline:
    def __init__(self, gateway: Gateway, attempts: int = DEFAULT_ATTEMPTS,
                 atom_cap: int = ATOM_CAP):
        if attempts < 1:
            raise DataError(f"attempts must be >= 1, got {attempts}")
        self.gateway = gateway
        self.attempts = attempts
        self.atom_cap = atom_cap
        self.stats = RejectionStats()

    # -- gates ------------------------------------------------------------

    def _entails(self, source: str, claim: str) -> bool:
        completion = self.gateway.run("entailment", {"SOURCE": source, "CLAIM": claim})
        return parse_yes_no(completion)

    # -- step 2: sentence-pair expansion ----------------------------------

    def expand_fact(self, fact: AtomicFact, attempts: int | None = None) -> SentencePair:
        """Generate a sentence pair for one fact, gated three ways:
        the combined pair must entail the fact and neither sentence alone
        may. Retries generation up to `attempts` times, counting each
        failure; exhaustion drops the datapoint.
        """
        attempts = attempts or self.attempts
        for _ in range(attempts):
            completion = self.gateway.run("expand-pair", {"CLAIM": fact.text})
            try:
                first, second = parse_sentence_pair(completion)
            except FormatError as exc:
                log.warning("pair parse failed for fact %r: %s", fact.text, exc)
                self.stats.count_pair(ok=False)
                continue
            joint = self._entails(f"{first} {second}", fact.text)
            solo_first = self._entails(first, fact.text)
            solo_second = self._entails(second, fact.text)
            ok = joint and not solo_first and not solo_second
            self.stats.count_pair(ok)
            if ok:
                return SentencePair(first=first, second=second, fact_index=fact.index)
        raise SkipDatapoint(
            f"no acceptable sentence pair for fact {fact.index} "
            f"({fact.text!r}) within {attempts} attempts"
        )

    # -- step 3: supporting document --------------------------------------

    def gen_supporting_doc(self, pairs: list[SentencePair],
                           attempts: int | None = None) -> GenDoc:
        """Generate a document mentioning every pair sentence.

        The gate checks each sentence individually against the document;
        any miss regenerates the whole document.
        """
        if not pairs:
            raise DataError("cannot generate a supporting document without pairs")
        attempts = attempts or self.attempts
        sentences = [s for pair in pairs for s in (pair.first, pair.second)]
        doc = GenDoc(text="", omitted=None)
        for _ in range(attempts):
            text = self.gateway.run("generate-doc", {"FACTS": sentences})
            verdicts = [self._entails(text, s) for s in sentences]
            doc.gate_trace.append(verdicts)
            ok = all(verdicts)
            self.stats.count_doc(ok)
            if ok:
                doc.text = text.strip()
                return doc
        raise SkipDatapoint(
            f"supporting document failed its per-sentence gate "
            f"{attempts} times"
        )

    # -- step 4: non-supporting candidates ---------------------------------

    def gen_nonsupporting_docs(self, pairs: list[SentencePair],
                               facts: list[AtomicFact]) -> list[GenDoc]:
        """Generate one candidate per (fact, side) by omitting that
        sentence, keeping only candidates whose omitted fact really is no
        longer derivable.

        The residual check asks whether the fact still follows from the
        pair's remaining sentence plus all other atomic facts (redundant
        information would leak the fact back in); candidates that still
        support the fact are discarded and counted.
        """
        by_index = {f.index: f for f in facts}
        kept: list[GenDoc] = []
        for pair in pairs:
            fact = by_index[pair.fact_index]
            for side in (1, 2):
                sentences = [
                    p.sentence(s_side)
                    for p in pairs
                    for s_side in (1, 2)
                    if not (p.fact_index == pair.fact_index and s_side == side)
                ]
                try:
                    text = self.gateway.run("generate-doc", {"FACTS": sentences})
                    residual_parts = [pair.sentence(3 - side)] + [
                        f.text for f in facts if f.index != pair.fact_index
                    ]
                    residual = " ".join(_ensure_period(p) for p in residual_parts)
                    still_supported = self._entails(residual, fact.text)
                except BackendError as exc:
                    log.warning(
                        "skipping non-supporting candidate (fact %d, side %d): %s",
                        pair.fact_index, side, exc,
                    )
                    continue
                self.stats.count_ablation(kept=not still_supported)
                if still_supported:
                    continue
                kept.append(
                    GenDoc(
                        text=text.strip(),
                        omitted=(pair.fact_index, side),
                        gate_trace=[[still_supported]],
                    )
                )
        return kept

    # -- step 5: subclaim pairing ------------------------------------------

    def pair_subclaims(self, claim_id: str, facts: list[AtomicFact],
                       supporting: GenDoc, nonsupporting: list[GenDoc]) -> list[SynthTuple]:
        """Pair every document with every merged subclaim.

        The supporting document labels every subclaim 1. A candidate that
        omitted fact i labels a subclaim 1 iff i is not in its subset.
        Merge failures skip just that subclaim.
        """
        subsets = power_set(facts, self.atom_cap)
        subclaims: list[tuple[FactSubset, str]] = []
        for subset in subsets:
            try:
                subclaims.append((subset, merge(self.gateway, subset, facts)))
            except (BackendError, DataError) as exc:
                log.warning(
                    "merge failed for claim %s subset %s: %s; skipping subclaim",
                    claim_id, subset.indices, exc,
                )
        tuples: list[SynthTuple] = []
        support_doc = EvidenceDoc(id=f"{claim_id}/support", text=supporting.text)
        for subset, subclaim in subclaims:
            tuples.append(
                SynthTuple(
                    document=support_doc,
                    claim=subclaim,
                    label=SupportLabel.SUPPORTED,
                    pipeline="C2D",
                    provenance={
                        "claim_id": claim_id,
                        "kind": "support",
                        "subset": list(subset.indices),
                    },
                )
            )
        for doc in nonsupporting:
            omit_fact, omit_side = doc.omitted  # type: ignore[misc]
            ev = EvidenceDoc(
                id=f"{claim_id}/ablate-{omit_fact}.{omit_side}", text=doc.text
            )
            for subset, subclaim in subclaims:
                label = (
                    SupportLabel.SUPPORTED
                    if omit_fact not in subset
                    else SupportLabel.UNSUPPORTED
                )
                tuples.append(
                    SynthTuple(
                        document=ev,
                        claim=subclaim,
                        label=label,
                        pipeline="C2D",
                        provenance={
                            "claim_id": claim_id,
                            "kind": "ablation",
                            "subset": list(subset.indices),
                            "omit_fact": omit_fact,
                            "omit_side": omit_side,
                        },
                    )
                )
        return tuples

    # -- whole-claim driver -------------------------------------------------

    def run_claim(self, claim_id: str, claim: str) -> list[SynthTuple]:
        """Run the full pipeline for one claim; returns [] when any gate
        exhausts its retries (the datapoint is dropped, not partially
        emitted)."""
        facts = decompose(self.gateway, claim)
        try:
            power_set(facts, self.atom_cap)  # cap check before spending calls
        except DataError as exc:
            log.warning("skipping claim %s: %s", claim_id, exc)
            return []
        try:
            pairs = [self.expand_fact(fact) for fact in facts]
            supporting = self.gen_supporting_doc(pairs)
        except SkipDatapoint as exc:
            log.info("dropping claim %s: %s", claim_id, exc)
            return []
        nonsupporting = self.gen_nonsupporting_docs(pairs, facts)
        return self.pair_subclaims(claim_id, facts, supporting, nonsupporting)


def _ensure_period(text: str) -> str:
    text = text.strip()
    return text if text.endswith((".", "!", "?")) else text + "."


def run_c2d_simp(gateway: Gateway, claim_id: str, claim: str) -> list[SynthTuple]:
    """Single-shot variant: one generated supporting article and one
    minimally revised non-supporting article (revision type recorded)."""
    if not claim.strip():
        raise DataError("cannot synthesize from an empty claim")
    article = gateway.run("simp-support-doc", {"CLAIM": claim}).strip()
    completion = gateway.run(
        "simp-revise-doc", {"CLAIM": claim, "ARTICLE": article}
    )
    obj = parse_json_block(completion)
    if not isinstance(obj, dict):
        raise FormatError("revision must be a JSON object", raw=completion)
    try:
        revision_type = str(obj["revision_type"])
        revised = str(obj["revised_article"]).strip()
    except KeyError as exc:
        raise FormatError(f"revision JSON missing key {exc}", raw=completion)
    if not revised:
        raise FormatError("revised_article is empty", raw=completion)
    return [
        SynthTuple(
            document=EvidenceDoc(id=f"{claim_id}/simp-support", text=article),
            claim=claim,
            label=SupportLabel.SUPPORTED,
            pipeline="C2D-Simp",
            provenance={"claim_id": claim_id, "kind": "simp-support"},
        ),
        SynthTuple(
            document=EvidenceDoc(id=f"{claim_id}/simp-revised", text=revised),
            claim=claim,
            label=SupportLabel.UNSUPPORTED,
            pipeline="C2D-Simp",
            provenance={
                "claim_id": claim_id,
                "kind": "simp-revision",
                "revision_type": revision_type,
            },
        ),
    ]
