import random

import pytest

from groundcheck.core import EvidenceDoc
from groundcheck.d2c import (
    MAX_EDITS,
    D2CPipeline,
    DocChunk,
    FactVerdictMatrix,
    chunk3,
    run_d2c_simp,
    summarize_chunk,
)
from groundcheck.errors import DataError, FormatError
from groundcheck.gateway import MockBackend

import oracles
from conftest import (
    D2C_DOC_TEXT,
    D2C_FACTS,
    D2C_SENTENCES,
    D2C_SUMMARIES,
    build_d2c_backend,
    make_gateway,
)


def word_sentence(n_words: int, tag: str) -> str:
    return " ".join(f"{tag}w{i}" for i in range(n_words)) + "."


class TestChunk3:
    def test_hand_computed_fixture(self):
        sents = [
            word_sentence(count, f"s{i}")
            for i, count in enumerate(oracles.CHUNK3_FIXTURE_COUNTS)
        ]
        doc = EvidenceDoc(id="d", text=" ".join(sents))
        chunks = chunk3(doc, sentences=sents)
        a, b = oracles.CHUNK3_FIXTURE_BOUNDARIES
        assert list(chunks[0].sentences) == sents[:a]
        assert list(chunks[1].sentences) == sents[a:b]
        assert list(chunks[2].sentences) == sents[b:]

    def test_matches_brute_force_on_random_documents(self):
        rng = random.Random(17)
        for trial in range(30):
            n = rng.randrange(3, 12)
            counts = [rng.randrange(1, 40) for _ in range(n)]
            sents = [word_sentence(c, f"t{trial}s{i}") for i, c in enumerate(counts)]
            doc = EvidenceDoc(id=f"d{trial}", text=" ".join(sents))
            chunks = chunk3(doc, sentences=sents)
            a = len(chunks[0].sentences)
            b = a + len(chunks[1].sentences)
            assert (a, b) == oracles.brute_force_3partition(counts), f"trial {trial}"

    def test_concatenation_reconstructs_document(self):
        doc = EvidenceDoc(id="d", text=D2C_DOC_TEXT)
        chunks = chunk3(doc)
        assert " ".join(c.text for c in chunks) == D2C_DOC_TEXT
        assert [c.index for c in chunks] == [1, 2, 3]

    def test_too_few_sentences(self):
        doc = EvidenceDoc(id="d", text="One sentence. Two sentences.")
        with pytest.raises(DataError):
            chunk3(doc)

    def test_tie_breaks_to_earliest_boundaries(self):
        # four equal sentences: several partitions share the same deviation
        sents = [word_sentence(10, f"s{i}") for i in range(4)]
        doc = EvidenceDoc(id="d", text=" ".join(sents))
        chunks = chunk3(doc, sentences=sents)
        a = len(chunks[0].sentences)
        b = a + len(chunks[1].sentences)
        assert (a, b) == oracles.brute_force_3partition([10] * 4)


class TestSummarize:
    def chunk(self) -> DocChunk:
        return DocChunk(parent_id="d", index=1, sentences=tuple(D2C_SENTENCES[:2]))

    def test_single_sentence_summary(self):
        mb = MockBackend()
        mb.script("summarize-chunk", {"DOCUMENT": self.chunk().text},
                  D2C_SUMMARIES[0])
        assert summarize_chunk(make_gateway(mb), self.chunk()) == D2C_SUMMARIES[0]

    def test_multi_sentence_summary_fails(self):
        mb = MockBackend()
        mb.script("summarize-chunk", {"DOCUMENT": self.chunk().text},
                  "First sentence. Second sentence.")
        with pytest.raises(FormatError):
            summarize_chunk(make_gateway(mb), self.chunk())

    def test_long_summary_warns_but_passes(self, caplog):
        long_summary = " ".join(["word"] * 24) + "."
        mb = MockBackend()
        mb.script("summarize-chunk", {"DOCUMENT": self.chunk().text}, long_summary)
        with caplog.at_level("WARNING"):
            out = summarize_chunk(make_gateway(mb), self.chunk())
        assert out == long_summary
        assert any("long" in r.message for r in caplog.records)


class TestVerdictMatrix:
    def test_conjunction(self):
        m = FactVerdictMatrix()
        m.record("chunk1-rm0", 0, False)
        m.record("chunk1-rm0", 1, True)
        assert m.conjunction("chunk1-rm0", (1,)) == 1
        assert m.conjunction("chunk1-rm0", (0,)) == 0
        assert m.conjunction("chunk1-rm0", (0, 1)) == 0


def doc_key_of(provenance: dict) -> str:
    if provenance["kind"] == "ablation":
        return f"chunk{provenance['claim_chunk']}-rm{provenance['removed_sentence']}"
    assert provenance["kind"] == "cross"
    return f"chunk{provenance['doc_chunk']}"


class TestRunDocument:
    def run(self):
        pipe = D2CPipeline(make_gateway(build_d2c_backend()))
        return pipe.run_document(EvidenceDoc(id="d1", text=D2C_DOC_TEXT))

    def test_tuple_census(self):
        result = self.run()
        kinds = {}
        for t in result.tuples:
            kinds[t.provenance["kind"]] = kinds.get(t.provenance["kind"], 0) + 1
        # 3 summaries; per chunk: 2 ablations x 3 subclaims + 2 cross x 3
        assert kinds == {"summary": 3, "ablation": 18, "cross": 18}

    def test_ablation_docs_equal_sentence_count(self):
        result = self.run()
        for chunk in result.chunks:
            keys = {
                t.document.id
                for t in result.tuples
                if t.provenance["kind"] == "ablation"
                and t.provenance["claim_chunk"] == chunk.index
            }
            assert len(keys) == len(chunk.sentences)

    def test_every_label_is_matrix_conjunction(self):
        result = self.run()
        for t in result.tuples:
            prov = t.provenance
            if prov["kind"] == "summary":
                assert int(t.label) == 1
                continue
            matrix = result.matrices[prov["claim_chunk"]]
            expected = matrix.conjunction(doc_key_of(prov), tuple(prov["subset"]))
            assert int(t.label) == expected

    def test_provenance_verdicts_match_matrix(self):
        result = self.run()
        for t in result.tuples:
            prov = t.provenance
            if prov["kind"] == "summary":
                continue
            matrix = result.matrices[prov["claim_chunk"]]
            for i_str, verdict in prov["verdicts"].items():
                assert matrix.get(doc_key_of(prov), int(i_str)) == verdict

    def test_cross_pairs_cover_all_ordered_pairs(self):
        result = self.run()
        pairs = {
            (t.provenance["claim_chunk"], t.provenance["doc_chunk"])
            for t in result.tuples
            if t.provenance["kind"] == "cross"
        }
        assert pairs == {(i, j) for i in (1, 2, 3) for j in (1, 2, 3) if i != j}

    def test_ablation_skipped_on_backend_failure(self):
        mb = build_d2c_backend()
        # chunk 1 minus sentence 0 leaves sentence 1; kill its first check
        mb.script("entailment",
                  {"SOURCE": D2C_SENTENCES[1], "CLAIM": D2C_FACTS[0][0]},
                  {"error": "status", "code": 400})
        pipe = D2CPipeline(make_gateway(mb))
        result = pipe.run_document(EvidenceDoc(id="d1", text=D2C_DOC_TEXT))
        keys = {
            doc_key_of(t.provenance)
            for t in result.tuples
            if t.provenance["kind"] == "ablation"
        }
        assert "chunk1-rm0" not in keys
        assert len(keys) == 5  # the other five ablations proceeded


class TestSimplifiedVariant:
    def test_summary_plus_capped_edits(self):
        mb = build_d2c_backend()
        chunks = [D2C_SENTENCES[0:2], D2C_SENTENCES[2:4], D2C_SENTENCES[4:6]]
        for text, summary in zip((" ".join(c) for c in chunks), D2C_SUMMARIES):
            edits = [f"{summary[:-1]} variant {k}." for k in range(12)]
            mb.script("simp-edit-summaries",
                      {"DOCUMENT": text, "CONSISTENT_SUMMARY": summary},
                      '{"inconsistent_summaries": ' +
                      __import__("json").dumps(edits) + "}")
        tuples = run_d2c_simp(make_gateway(mb), EvidenceDoc(id="d1", text=D2C_DOC_TEXT))
        # per chunk: 1 positive summary + MAX_EDITS negatives
        assert len(tuples) == 3 * (1 + MAX_EDITS)
        by_chunk = {}
        for t in tuples:
            by_chunk.setdefault(t.provenance["claim_chunk"], []).append(int(t.label))
        assert all(sorted(v, reverse=True) == [1] + [0] * MAX_EDITS
                   for v in by_chunk.values())

    def test_malformed_edit_payload_fails(self):
        mb = build_d2c_backend()
        chunk1 = " ".join(D2C_SENTENCES[0:2])
        mb.script("simp-edit-summaries",
                  {"DOCUMENT": chunk1, "CONSISTENT_SUMMARY": D2C_SUMMARIES[0]},
                  '{"summaries": ["x"]}')
        with pytest.raises(FormatError):
            run_d2c_simp(make_gateway(mb), EvidenceDoc(id="d1", text=D2C_DOC_TEXT))
