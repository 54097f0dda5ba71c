"""Fact-checking runtime: chunking, scoring, thresholding, and wrappers.

A checker maps (chunk, claim) to a score inside a declared range. A
claim's score against an evidence set is the max over all documents of
the max over each document's chunks — a claim is supported if any one
document supports it. Decisions compare the score strictly against a
threshold resolved from the active policy.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol, Sequence

import httpx

from .core import EvidenceDoc, SupportLabel
from .decomp import decompose
from .errors import BackendError, DataError, FormatError
from .gateway import Gateway
from .textutil import (
    SentenceSplitter,
    content_words,
    count_ws_tokens,
    parse_json_block,
    parse_yes_no,
    split_sentences,
    ws_tokens,
)


@dataclass(frozen=True)
class CheckerOutput:
    """A raw checker score plus the checker's declared output range."""

    score: float
    range: tuple[float, float]

    def __post_init__(self) -> None:
        v_min, v_max = self.range
        if not v_min < v_max:
            raise DataError(f"invalid score range ({v_min}, {v_max}): min must be < max")
        if not v_min <= self.score <= v_max:
            raise DataError(
                f"score {self.score} outside declared range ({v_min}, {v_max})"
            )


@dataclass(frozen=True)
class ChunkPlan:
    """How to cut documents before scoring: strategy and size in
    whitespace tokens."""

    strategy: str  # "whitespace" | "sentence-boundary"
    size: int

    def __post_init__(self) -> None:
        if self.strategy not in ("whitespace", "sentence-boundary"):
            raise DataError(
                f"chunk strategy must be whitespace or sentence-boundary, "
                f"got {self.strategy!r}"
            )
        if self.size <= 0:
            raise DataError(f"chunk size must be positive, got {self.size}")

    @classmethod
    def parse(cls, spec: str) -> "ChunkPlan":
        """Parse "whitespace:500" / "sentence-boundary:350" ("sentence"
        is accepted as shorthand)."""
        strategy, sep, size = spec.partition(":")
        if not sep:
            raise DataError(f"chunk plan must look like strategy:size, got {spec!r}")
        if strategy == "sentence":
            strategy = "sentence-boundary"
        try:
            return cls(strategy=strategy, size=int(size))
        except ValueError:
            raise DataError(f"chunk size must be an integer, got {size!r}")

    def __str__(self) -> str:
        return f"{self.strategy}:{self.size}"


# The default suits seq2seq-style checkers; encoder-style checkers tend
# to want sentence-boundary:350..400 (set per checker in config).
DEFAULT_PLAN = ChunkPlan("whitespace", 500)


def chunk(text: str, plan: ChunkPlan,
          splitter: SentenceSplitter = split_sentences) -> list[str]:
    """Cut text into chunks per the plan. Empty text yields no chunks.

    whitespace: greedy fill to `size` tokens. sentence-boundary: greedy
    sentence packing that flushes before overflowing; a single sentence
    longer than `size` becomes its own (oversized) chunk.
    """
    if not text.strip():
        return []
    if plan.strategy == "whitespace":
        tokens = ws_tokens(text)
        return [
            " ".join(tokens[i : i + plan.size])
            for i in range(0, len(tokens), plan.size)
        ]
    chunks: list[str] = []
    current: list[str] = []
    current_len = 0
    for sentence in splitter(text):
        length = count_ws_tokens(sentence)
        if current and current_len + length > plan.size:
            chunks.append(" ".join(current))
            current = []
            current_len = 0
        current.append(sentence)
        current_len += length
    if current:
        chunks.append(" ".join(current))
    return chunks


@dataclass(frozen=True)
class ThresholdPolicy:
    """How the decision threshold t is chosen.

    fixed: t = value. midpoint: t = (v_min + v_max)/2 of the checker's
    range. tuned: t = value looked up from a tuning run (resolving a
    tuned policy with no stored value is an error).
    """

    mode: str  # "fixed" | "midpoint" | "tuned"
    value: float | None = None
    source: str = ""  # where a tuned value came from (file/dataset), for reports

    def __post_init__(self) -> None:
        if self.mode not in ("fixed", "midpoint", "tuned"):
            raise DataError(f"unknown threshold mode {self.mode!r}")
        if self.mode == "fixed" and self.value is None:
            raise DataError("fixed threshold policy needs a value")

    def resolve(self, score_range: tuple[float, float]) -> float:
        if self.mode == "midpoint":
            v_min, v_max = score_range
            return (v_min + v_max) / 2
        if self.value is None:
            raise DataError(
                "tuned threshold policy has no stored threshold "
                f"(source: {self.source or 'unset'})"
            )
        return self.value


class Checker(Protocol):
    name: str

    def score(self, chunk_text: str, claim: str) -> CheckerOutput: ...


class LexicalStubChecker:
    """Deterministic offline checker: fraction of the claim's content
    words present in the chunk. Only for tests and plumbing runs."""

    name = "stub"

    def score(self, chunk_text: str, claim: str) -> CheckerOutput:
        claim_words = content_words(claim)
        if not claim_words:
            raise DataError(f"claim has no content words to match: {claim!r}")
        overlap = len(claim_words & content_words(chunk_text))
        return CheckerOutput(score=overlap / len(claim_words), range=(0.0, 1.0))


def lexical_stub(chunk_text: str, claim: str) -> CheckerOutput:
    return LexicalStubChecker().score(chunk_text, claim)


class RemoteChecker:
    """Client for a checker served over HTTP.

    Wire contract: POST url with {"doc": chunk, "claim": claim}; the
    response carries {"score": z, "v_min": lo, "v_max": hi}. The declared
    range is required so midpoint policies stay well-defined.
    """

    def __init__(self, url: str, client: httpx.Client | None = None,
                 timeout: float = 30.0):
        self.url = url
        self.name = f"remote:{url}"
        self._client = client or httpx.Client(timeout=timeout)

    def score(self, chunk_text: str, claim: str) -> CheckerOutput:
        try:
            resp = self._client.post(self.url, json={"doc": chunk_text, "claim": claim})
        except httpx.HTTPError as exc:
            raise BackendError(f"remote checker {self.url} unreachable: {exc}")
        if resp.status_code != 200:
            raise BackendError(
                f"remote checker {self.url} returned {resp.status_code}: "
                f"{resp.text[:200]}"
            )
        try:
            obj = resp.json()
            return CheckerOutput(
                score=float(obj["score"]),
                range=(float(obj["v_min"]), float(obj["v_max"])),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise BackendError(
                f"remote checker {self.url} returned a malformed body: {exc}"
            )


class LlmChecker:
    """Zero-shot yes/no consistency checker through the gateway.

    Scores are 1.0 (yes) or 0.0 (no) in a declared (0, 1) range, so the
    midpoint policy lands at 0.5 and strict > keeps "no" unsupported.
    """

    def __init__(self, gateway: Gateway, model_tag: str | None = None):
        self.gateway = gateway
        self.model_tag = model_tag
        self.name = f"llm:{model_tag or 'routed'}"

    def score(self, chunk_text: str, claim: str) -> CheckerOutput:
        completion = self.gateway.run(
            "consistency",
            {"DOCUMENT": chunk_text, "CLAIM": claim},
            model_tag=self.model_tag,
        )
        verdict = parse_yes_no(completion)
        return CheckerOutput(score=1.0 if verdict else 0.0, range=(0.0, 1.0))


def score_claim(checker: Checker, evidence: Sequence[EvidenceDoc], claim: str,
                plan: ChunkPlan = DEFAULT_PLAN,
                splitter: SentenceSplitter = split_sentences) -> CheckerOutput:
    """Max over documents of max over chunks.

    Any chunk-call failure aborts the whole claim — a partial max would
    silently bias decisions toward unsupported.
    """
    if not evidence:
        raise DataError("score_claim needs at least one evidence document")
    best: float | None = None
    declared: tuple[float, float] | None = None
    for doc in evidence:
        for piece in chunk(doc.text, plan, splitter):
            out = checker.score(piece, claim)
            if declared is None:
                declared = out.range
            elif declared != out.range:
                raise DataError(
                    f"checker changed its declared range mid-claim: "
                    f"{declared} vs {out.range}"
                )
            if best is None or out.score > best:
                best = out.score
    if best is None or declared is None:
        raise DataError("no scorable chunks in the evidence (all documents empty)")
    return CheckerOutput(score=best, range=declared)


def decide(output: CheckerOutput, policy: ThresholdPolicy) -> SupportLabel:
    """Supported iff score strictly exceeds the resolved threshold."""
    t = policy.resolve(output.range)
    return SupportLabel.SUPPORTED if output.score > t else SupportLabel.UNSUPPORTED


def check_decomposed(gateway: Gateway, checker: Checker,
                     evidence: Sequence[EvidenceDoc], claim: str,
                     plan: ChunkPlan = DEFAULT_PLAN,
                     policy: ThresholdPolicy = ThresholdPolicy("fixed", 0.5),
                     splitter: SentenceSplitter = split_sentences) -> SupportLabel:
    """Decompose the claim and require every atomic fact to be supported."""
    facts = decompose(gateway, claim)
    for fact in facts:
        verdict = decide(score_claim(checker, evidence, fact.text, plan, splitter), policy)
        if verdict is SupportLabel.UNSUPPORTED:
            return SupportLabel.UNSUPPORTED
    return SupportLabel.SUPPORTED


def check_batch_llm(gateway: Gateway, document: EvidenceDoc,
                    claims: Sequence[str]) -> list[SupportLabel]:
    """Check several claims against one shared document in a single call.

    Claims are numbered [1..n]; the completion must be a JSON object with
    exactly those keys mapping to yes/no.
    """
    if not claims:
        raise DataError("check_batch_llm needs at least one claim")
    block = "\n".join(f"[{i}] {c}" for i, c in enumerate(claims, start=1))
    completion = gateway.run(
        "consistency-multi", {"DOCUMENT": document.text, "CLAIM": block}
    )
    obj = parse_json_block(completion)
    if not isinstance(obj, dict):
        raise FormatError("multi-claim completion must be a JSON object", raw=completion)
    expected = [f"[{i}]" for i in range(1, len(claims) + 1)]
    missing = [k for k in expected if k not in obj]
    if missing:
        raise FormatError(f"multi-claim JSON missing keys {missing}", raw=completion)
    extra = [k for k in obj if k not in expected]
    if extra:
        raise FormatError(f"multi-claim JSON has unexpected keys {extra}", raw=completion)
    labels = []
    for key in expected:
        verdict = parse_yes_no(str(obj[key]))
        labels.append(SupportLabel.SUPPORTED if verdict else SupportLabel.UNSUPPORTED)
    return labels
