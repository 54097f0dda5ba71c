"""Shared fixtures: scripted mock backends for both synthesis pipelines,
paths to bundled data files, and a terminal summary that prints one
pass/fail line per acceptance criterion."""
from __future__ import annotations

from pathlib import Path

import pytest

from groundcheck.gateway import Gateway, GatewayConfig, MockBackend

FIXTURES_DIR = Path(__file__).parent / "fixtures"
BENCH50 = FIXTURES_DIR / "bench50.jsonl"
ANNOTATION_TASKS = FIXTURES_DIR / "annotation_tasks.jsonl"
TOKENS_FILE = FIXTURES_DIR / "tokens.json"


def make_gateway(backend, **config_kwargs) -> Gateway:
    """Gateway wired for tests: mock backend, no real backoff sleeps."""
    return Gateway(backend, GatewayConfig(**config_kwargs), sleep=None)


# ---------------------------------------------------------------------------
# scripted claim-to-document run: 2 facts, all gates pass, 4 ablations kept
# ---------------------------------------------------------------------------

C2D_CLAIM = "Nadia Rossi founded Helix Labs in 2011 and Helix Labs is based in Porto."
C2D_FACTS = [
    "Nadia Rossi founded Helix Labs in 2011.",
    "Helix Labs is based in Porto.",
]
C2D_PAIRS = [
    ("In 2011 Nadia Rossi founded a biotech startup.",
     "The startup Nadia Rossi founded was Helix Labs."),
    ("Helix Labs operates from a Portuguese city.",
     "That Portuguese city is Porto."),
]
C2D_MERGED = "Nadia Rossi founded Helix Labs in 2011 and it is based in Porto."
C2D_SUPPORT_TEXT = " ".join(s for pair in C2D_PAIRS for s in pair)


def build_c2d_backend() -> MockBackend:
    """Scripts every gateway call the pipeline makes for C2D_CLAIM, with
    all gates passing and all four ablated candidates retained."""
    mb = MockBackend()

    def entail(source: str, claim: str, answer: str) -> None:
        mb.script("entailment", {"SOURCE": source, "CLAIM": claim}, answer)

    mb.script("decompose", {"SENTENCE": C2D_CLAIM},
              "\n".join(f"- {f}" for f in C2D_FACTS))
    for fact, (first, second) in zip(C2D_FACTS, C2D_PAIRS):
        mb.script("expand-pair", {"CLAIM": fact},
                  f"Sentence 1: {first}\nSentence 2: {second}")
        entail(f"{first} {second}", fact, "Yes")
        entail(first, fact, "No")
        entail(second, fact, "No")

    all_sentences = [s for pair in C2D_PAIRS for s in pair]
    mb.script("generate-doc", {"FACTS": all_sentences}, C2D_SUPPORT_TEXT)
    for s in all_sentences:
        entail(C2D_SUPPORT_TEXT, s, "Yes")

    for fact_index, (first, second) in enumerate(C2D_PAIRS):
        for side, omitted in ((1, first), (2, second)):
            remaining = [s for s in all_sentences if s != omitted]
            text = (
                f"A passage about Helix Labs that leaves out one detail "
                f"(fact {fact_index}, sentence {side}). " + " ".join(remaining)
            )
            mb.script("generate-doc", {"FACTS": remaining}, text)
            other = second if side == 1 else first
            other_facts = [f for k, f in enumerate(C2D_FACTS) if k != fact_index]
            residual = " ".join([other] + other_facts)
            entail(residual, C2D_FACTS[fact_index], "No")

    mb.script("merge-facts", {"FACTS": C2D_FACTS}, C2D_MERGED)
    return mb


# a claim whose only fact keeps producing a pair where one sentence alone
# gives the fact away; every attempt fails the gate
LEAKY_CLAIM = "The observatory recorded a supernova."
LEAKY_PAIR = ("The observatory recorded a supernova last night.",
              "Astronomers stayed up to watch the sky.")


def build_leaky_pair_backend() -> MockBackend:
    mb = MockBackend()
    mb.script("decompose", {"SENTENCE": LEAKY_CLAIM}, f"- {LEAKY_CLAIM}")
    first, second = LEAKY_PAIR
    mb.script("expand-pair", {"CLAIM": LEAKY_CLAIM},
              f"Sentence 1: {first}\nSentence 2: {second}")
    mb.script("entailment", {"SOURCE": f"{first} {second}", "CLAIM": LEAKY_CLAIM}, "Yes")
    mb.script("entailment", {"SOURCE": first, "CLAIM": LEAKY_CLAIM}, "Yes")  # leak
    mb.script("entailment", {"SOURCE": second, "CLAIM": LEAKY_CLAIM}, "No")
    return mb


# ---------------------------------------------------------------------------
# scripted document-to-claim run: 6 sentences -> 3 chunks of 2
# ---------------------------------------------------------------------------

D2C_SENTENCES = [
    "The harbor crew repaired the wooden pier.",
    "Fresh planks replaced every rotten board there.",
    "A new crane arrived from the factory.",
    "Workers bolted the crane onto concrete footings.",
    "The village council inspected the finished pier.",
    "Fishing boats returned to the harbor afterwards.",
]
D2C_DOC_TEXT = " ".join(D2C_SENTENCES)
D2C_SUMMARIES = [
    "The crew rebuilt the pier with fresh planks.",
    "A factory crane was bolted onto concrete footings.",
    "The council inspected the pier before boats returned.",
]
D2C_FACTS = [
    ["The crew rebuilt the pier.", "Fresh planks were used."],
    ["A crane came from a factory.", "The crane was bolted onto concrete footings."],
    ["The council inspected the pier.", "Boats returned afterwards."],
]
D2C_MERGED = [
    "The crew rebuilt the pier using fresh planks.",
    "A factory crane was bolted onto concrete footings there.",
    "The council inspected the pier and boats returned afterwards.",
]


def build_d2c_backend() -> MockBackend:
    """Scripts the full document run. Each chunk's fact k is entailed by
    its own sentence k only, so ablating sentence k kills exactly fact k;
    cross-chunk checks all fail except chunk 2's first fact, which chunk 3
    happens to support."""
    mb = MockBackend()
    chunks = [D2C_SENTENCES[0:2], D2C_SENTENCES[2:4], D2C_SENTENCES[4:6]]
    chunk_texts = [" ".join(c) for c in chunks]

    def entail(source: str, claim: str, answer: str) -> None:
        mb.script("entailment", {"SOURCE": source, "CLAIM": claim}, answer)

    for i, (text, summary, facts, merged) in enumerate(
        zip(chunk_texts, D2C_SUMMARIES, D2C_FACTS, D2C_MERGED)
    ):
        mb.script("summarize-chunk", {"DOCUMENT": text}, summary)
        mb.script("decompose", {"SENTENCE": summary},
                  "\n".join(f"- {f}" for f in facts))
        mb.script("merge-facts", {"FACTS": facts}, merged)
        for removed in (0, 1):
            ablated = chunks[i][1 - removed]
            for k, fact in enumerate(facts):
                entail(ablated, fact, "No" if k == removed else "Yes")
        for j, other_text in enumerate(chunk_texts):
            if j == i:
                continue
            for k, fact in enumerate(facts):
                answer = "Yes" if (i, j, k) == (1, 2, 0) else "No"
                entail(other_text, fact, answer)
    return mb


# ---------------------------------------------------------------------------
# pytest fixtures
# ---------------------------------------------------------------------------


@pytest.fixture
def c2d_gateway() -> Gateway:
    return make_gateway(build_c2d_backend())


@pytest.fixture
def leaky_gateway() -> Gateway:
    return make_gateway(build_leaky_pair_backend())


@pytest.fixture
def d2c_gateway() -> Gateway:
    return make_gateway(build_d2c_backend())


@pytest.fixture
def bench50_path() -> Path:
    return BENCH50


# ---------------------------------------------------------------------------
# acceptance summary: one line per criterion
# ---------------------------------------------------------------------------

ACCEPTANCE_CRITERIA = {
    "test_c2d_count_law": "C2D count law: (2^2-1)*(4+1)=15 tuples, labels re-derived from provenance, <5s",
    "test_c2d_gate_semantics": "C2D gate semantics: leaky pair rejected and retried, 3 rejections then drop",
    "test_d2c_audit": "D2C audit: labels equal verdict-matrix conjunctions; chunks rejoin; ablations per chunk = sentence count",
    "test_metrics_exactness": "Metrics exactness: bacc 0.625, dense-grid tuning, dual bootstrap, hand-computed kappa",
    "test_scoring_equivalence": "Scoring equivalence: brute-force max over 5x3, duplicate doc no-op, strict >",
    "test_threshold_policies": "Threshold policies: midpoint t for (-1,1)/(0,1); tuned never below midpoint on validation",
    "test_end_to_end_determinism": "End-to-end determinism: byte-identical reports across reruns and workers 1 vs 8",
    "test_decomposition_wrapper": "Decomposition wrapper: supported iff every atomic fact is; single fact equals plain decide",
    "test_annotation_round_trip": "Annotation round trip: adjudicated disagreement, kappa from pre-adjudication verdicts, no label leakage",
}

_acceptance_results: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1].split("[")[0]
    if name in ACCEPTANCE_CRITERIA:
        # a parametrized criterion fails as a whole if any case fails
        if _acceptance_results.get(name) != "failed":
            _acceptance_results[name] = report.outcome


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_results:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for name, label in ACCEPTANCE_CRITERIA.items():
        outcome = _acceptance_results.get(name)
        if outcome is None:
            continue
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"[{status}] {label}")
