import pytest

from groundcheck.c2d import C2DPipeline, SentencePair, run_c2d_simp
from groundcheck.decomp import AtomicFact
from groundcheck.errors import SkipDatapoint
from groundcheck.gateway import MockBackend

import oracles
from conftest import (
    C2D_CLAIM,
    C2D_FACTS,
    C2D_MERGED,
    C2D_PAIRS,
    C2D_SUPPORT_TEXT,
    build_c2d_backend,
    build_leaky_pair_backend,
    make_gateway,
)


def scripted_pipeline() -> C2DPipeline:
    return C2DPipeline(make_gateway(build_c2d_backend()))


class TestExpandFact:
    def test_good_pair_accepted_first_try(self):
        pipe = scripted_pipeline()
        pair = pipe.expand_fact(AtomicFact(text=C2D_FACTS[0], index=0))
        assert (pair.first, pair.second) == C2D_PAIRS[0]
        assert pipe.stats.pair_checks == 1
        assert pipe.stats.pair_rejections == 0

    def test_leaky_pair_retried_then_dropped(self):
        pipe = C2DPipeline(make_gateway(build_leaky_pair_backend()))
        from conftest import LEAKY_CLAIM
        with pytest.raises(SkipDatapoint):
            pipe.expand_fact(AtomicFact(text=LEAKY_CLAIM, index=0))
        assert pipe.stats.pair_checks == 3
        assert pipe.stats.pair_rejections == 3

    def test_unparseable_pair_counts_as_rejection(self):
        mb = MockBackend()
        fact = AtomicFact(text="some fact.", index=0)
        mb.script("expand-pair", {"CLAIM": fact.text}, "no sentences here")
        pipe = C2DPipeline(make_gateway(mb), attempts=2)
        with pytest.raises(SkipDatapoint):
            pipe.expand_fact(fact)
        assert pipe.stats.pair_rejections == 2


class TestSupportingDoc:
    def build_pairs(self):
        return [
            SentencePair(first=a, second=b, fact_index=i)
            for i, (a, b) in enumerate(C2D_PAIRS)
        ]

    def test_gate_checks_every_sentence(self):
        pipe = scripted_pipeline()
        doc = pipe.gen_supporting_doc(self.build_pairs())
        assert doc.text == C2D_SUPPORT_TEXT
        assert doc.omitted is None
        assert doc.gate_trace == [[True, True, True, True]]

    def test_single_miss_regenerates_whole_doc(self):
        mb = MockBackend()
        pairs = self.build_pairs()
        sentences = [s for p in pairs for s in (p.first, p.second)]
        mb.script("generate-doc", {"FACTS": sentences}, ["bad draft", "good draft"])
        for s in sentences:
            mb.script("entailment", {"SOURCE": "bad draft", "CLAIM": s},
                      "No" if s == sentences[2] else "Yes")
            mb.script("entailment", {"SOURCE": "good draft", "CLAIM": s}, "Yes")
        pipe = C2DPipeline(make_gateway(mb))
        doc = pipe.gen_supporting_doc(pairs)
        assert doc.text == "good draft"
        assert doc.gate_trace == [[True, True, False, True], [True] * 4]
        assert pipe.stats.doc_checks == 2
        assert pipe.stats.doc_rejections == 1

    def test_exhaustion_drops_datapoint(self):
        mb = MockBackend()
        pairs = self.build_pairs()
        sentences = [s for p in pairs for s in (p.first, p.second)]
        mb.script("generate-doc", {"FACTS": sentences}, "always bad")
        for s in sentences:
            mb.script("entailment", {"SOURCE": "always bad", "CLAIM": s}, "No")
        pipe = C2DPipeline(make_gateway(mb), attempts=3)
        with pytest.raises(SkipDatapoint):
            pipe.gen_supporting_doc(pairs)
        assert pipe.stats.doc_rejections == 3


class TestNonsupportingDocs:
    def test_all_four_candidates_kept(self):
        pipe = scripted_pipeline()
        pairs = TestSupportingDoc().build_pairs()
        fact_objs = [AtomicFact(text=t, index=i) for i, t in enumerate(C2D_FACTS)]
        docs = pipe.gen_nonsupporting_docs(pairs, fact_objs)
        assert [d.omitted for d in docs] == [(0, 1), (0, 2), (1, 1), (1, 2)]
        assert pipe.stats.ablation_checks == 4
        assert pipe.stats.ablation_discards == 0

    def test_residual_support_discards_candidate(self):
        # the residual check re-derives fact 0 from the remaining sentence
        # plus the other fact, so the (0, 1) candidate must be discarded
        mb = build_c2d_backend()
        first, second = C2D_PAIRS[0]
        residual = " ".join([second, C2D_FACTS[1]])
        mb.script("entailment", {"SOURCE": residual, "CLAIM": C2D_FACTS[0]}, "Yes")
        pipe = C2DPipeline(make_gateway(mb))
        pairs = TestSupportingDoc().build_pairs()
        fact_objs = [AtomicFact(text=t, index=i) for i, t in enumerate(C2D_FACTS)]
        docs = pipe.gen_nonsupporting_docs(pairs, fact_objs)
        assert [d.omitted for d in docs] == [(0, 2), (1, 1), (1, 2)]
        assert pipe.stats.ablation_discards == 1

    def test_generation_failure_skips_only_that_candidate(self):
        mb = build_c2d_backend()
        all_sentences = [s for pair in C2D_PAIRS for s in pair]
        remaining = [s for s in all_sentences if s != C2D_PAIRS[0][0]]
        mb.script("generate-doc", {"FACTS": remaining}, {"error": "status", "code": 400})
        pipe = C2DPipeline(make_gateway(mb))
        pairs = TestSupportingDoc().build_pairs()
        fact_objs = [AtomicFact(text=t, index=i) for i, t in enumerate(C2D_FACTS)]
        docs = pipe.gen_nonsupporting_docs(pairs, fact_objs)
        assert [d.omitted for d in docs] == [(0, 2), (1, 1), (1, 2)]


class TestRunClaim:
    def test_count_law_and_labels_match_oracle(self):
        pipe = scripted_pipeline()
        tuples = pipe.run_claim("c1", C2D_CLAIM)
        expected = oracles.c2d_expected_labels(2, [(0, 1), (0, 2), (1, 1), (1, 2)])
        assert len(tuples) == len(expected) == 15
        got = {
            (t.document.id.split("/")[-1],
             frozenset(t.provenance["subset"]),
             int(t.label))
            for t in tuples
        }
        want = {(kind, subset, label) for kind, subset, label in expected}
        assert got == want

    def test_provenance_rederives_every_label(self):
        tuples = scripted_pipeline().run_claim("c1", C2D_CLAIM)
        for t in tuples:
            prov = t.provenance
            if prov["kind"] == "support":
                assert int(t.label) == 1
            else:
                assert prov["kind"] == "ablation"
                rederived = 0 if prov["omit_fact"] in prov["subset"] else 1
                assert int(t.label) == rederived

    def test_subclaim_texts(self):
        tuples = scripted_pipeline().run_claim("c1", C2D_CLAIM)
        claims = {t.claim for t in tuples}
        assert claims == {C2D_FACTS[0], C2D_FACTS[1], C2D_MERGED}

    def test_pair_gate_exhaustion_drops_whole_claim(self):
        from conftest import LEAKY_CLAIM
        pipe = C2DPipeline(make_gateway(build_leaky_pair_backend()))
        assert pipe.run_claim("c2", LEAKY_CLAIM) == []

    def test_atom_cap_skips_claim_before_generation(self):
        mb = MockBackend()
        mb.script("decompose", {"SENTENCE": "huge claim"},
                  "\n".join(f"- fact {i}." for i in range(9)))
        pipe = C2DPipeline(make_gateway(mb))  # default cap 8
        assert pipe.run_claim("c3", "huge claim") == []
        assert pipe.gateway.stats["calls"] == 1  # nothing generated after the cap

    def test_merge_failure_skips_only_that_subclaim(self):
        mb = build_c2d_backend()
        mb.script("merge-facts", {"FACTS": C2D_FACTS}, {"error": "status", "code": 400})
        pipe = C2DPipeline(make_gateway(mb))
        tuples = pipe.run_claim("c1", C2D_CLAIM)
        # 2 subclaims remain x (1 support + 4 ablations) = 10
        assert len(tuples) == 10
        assert {t.claim for t in tuples} == set(C2D_FACTS)


class TestSimplifiedVariant:
    def script(self, revision: str) -> MockBackend:
        mb = MockBackend()
        mb.script("simp-support-doc", {"CLAIM": "the claim."}, "a supporting article.")
        mb.script("simp-revise-doc",
                  {"CLAIM": "the claim.", "ARTICLE": "a supporting article."},
                  revision)
        return mb

    def test_emits_exactly_two_tuples(self):
        gw = make_gateway(self.script(
            '{"revision_type": "negation", "revised_article": "a contradicting article."}'
        ))
        tuples = run_c2d_simp(gw, "s1", "the claim.")
        assert [int(t.label) for t in tuples] == [1, 0]
        assert tuples[0].document.text == "a supporting article."
        assert tuples[1].document.text == "a contradicting article."
        assert tuples[1].provenance["revision_type"] == "negation"
        assert {t.pipeline for t in tuples} == {"C2D-Simp"}

    def test_malformed_revision_fails(self):
        from groundcheck.errors import FormatError
        gw = make_gateway(self.script("I rewrote it as follows: the article."))
        with pytest.raises(FormatError):
            run_c2d_simp(gw, "s1", "the claim.")
