import pytest

from groundcheck.errors import FormatError
from groundcheck.textutil import (
    content_words,
    count_ws_tokens,
    parse_bullets,
    parse_json_block,
    parse_yes_no,
    split_sentences,
    ws_tokens,
)


class TestSplitSentences:
    def test_basic_split(self):
        text = "The pier was rebuilt. The crane arrived. Boats returned."
        assert split_sentences(text) == [
            "The pier was rebuilt.",
            "The crane arrived.",
            "Boats returned.",
        ]

    def test_abbreviations_do_not_split(self):
        text = "Dr. Rossi met Prof. Chen at 3 p.m. on Tuesday. They spoke briefly."
        out = split_sentences(text)
        assert len(out) == 2
        assert out[0].startswith("Dr. Rossi")

    def test_question_and_exclamation(self):
        out = split_sentences("Did it work? It did! Great.")
        assert out == ["Did it work?", "It did!", "Great."]

    def test_single_initial(self):
        out = split_sentences("J. Smith wrote the report. It was long.")
        assert len(out) == 2

    def test_decimal_numbers_kept_together(self):
        out = split_sentences("The tower is 3.5 meters tall. It leans slightly.")
        assert len(out) == 2

    def test_empty_and_whitespace(self):
        assert split_sentences("") == []
        assert split_sentences("   \n  ") == []

    def test_no_terminal_punctuation(self):
        assert split_sentences("no punctuation here") == ["no punctuation here"]


class TestTokens:
    def test_ws_tokens(self):
        assert ws_tokens("a  b\tc\nd") == ["a", "b", "c", "d"]
        assert count_ws_tokens("one two three") == 3
        assert count_ws_tokens("") == 0


class TestParseYesNo:
    @pytest.mark.parametrize("text,expected", [
        ("Yes", True), ("yes.", True), ("YES, it does", True),
        ("No", False), ("no.", False), ("No, the sentence is not", False),
    ])
    def test_accepts(self, text, expected):
        assert parse_yes_no(text) is expected

    @pytest.mark.parametrize("text", ["maybe", "", "the answer is yes"])
    def test_rejects(self, text):
        with pytest.raises(FormatError):
            parse_yes_no(text)


class TestParseBullets:
    def test_dash_bullets(self):
        out = parse_bullets("- first fact\n- second fact\n")
        assert out == ["first fact", "second fact"]

    def test_unicode_bullets(self):
        assert parse_bullets("• one\n– two") == ["one", "two"]

    def test_blank_lines_ignored(self):
        assert parse_bullets("- one\n\n- two") == ["one", "two"]

    def test_non_bullet_line_fails(self):
        with pytest.raises(FormatError):
            parse_bullets("- one\nsecond item without a bullet")

    def test_empty_completion_fails(self):
        with pytest.raises(FormatError):
            parse_bullets("\n  \n")

    def test_raw_preserved_on_error(self):
        try:
            parse_bullets("plain prose answer")
        except FormatError as exc:
            assert exc.raw == "plain prose answer"
        else:
            pytest.fail("expected FormatError")


class TestParseJsonBlock:
    def test_plain_object(self):
        assert parse_json_block('{"a": 1}') == {"a": 1}

    def test_fenced_block(self):
        text = 'Here you go:\n```json\n{"label": "no"}\n```'
        assert parse_json_block(text) == {"label": "no"}

    def test_object_embedded_in_prose(self):
        text = 'Sure! {"revision_type": "negation", "revised_article": "x"} Done.'
        assert parse_json_block(text)["revision_type"] == "negation"

    def test_garbage_fails(self):
        with pytest.raises(FormatError):
            parse_json_block("not json at all")


class TestContentWords:
    def test_stopwords_removed(self):
        words = content_words("The study found the result of the trial.")
        assert "the" not in words and "of" not in words
        assert {"study", "found", "result", "trial"} <= words

    def test_case_and_punctuation_normalized(self):
        assert content_words("Tok3A, tok3b!") == {"tok3a", "tok3b"}

    def test_stopword_only_text(self):
        assert content_words("the of and") == set()
