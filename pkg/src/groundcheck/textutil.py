"""Small text utilities: sentence splitting, token counting, completion parsing."""
from __future__ import annotations

import json
import re
from typing import Any, Callable

from .errors import FormatError

# Common abbreviations that end with a period but do not end a sentence.
_ABBREVIATIONS = {
    "mr", "mrs", "ms", "dr", "prof", "sr", "jr", "st", "vs", "etc", "inc",
    "ltd", "co", "corp", "gen", "gov", "sen", "rep", "u.s", "u.k", "e.g",
    "i.e", "a.m", "p.m", "jan", "feb", "mar", "apr", "jun", "jul", "aug", "sep", "sept",
    "oct", "nov", "dec", "no", "vol", "fig", "al",
}

_SENTENCE_END = re.compile(r"([.!?][\"')\]]*)\s+")

SentenceSplitter = Callable[[str], list[str]]


def split_sentences(text: str) -> list[str]:
    """Split text into sentences on terminal punctuation.

    Rule-based: a period ends a sentence unless it trails a known
    abbreviation, a single initial ("J."), or a digit-dotted token
    ("3.5"). Good enough for newswire-style prose; callers that need a
    different notion of sentence can pass their own splitter wherever
    one is accepted.
    """
    text = text.strip()
    if not text:
        return []
    sentences: list[str] = []
    start = 0
    for match in _SENTENCE_END.finditer(text):
        candidate = text[start : match.end(1)]
        last_word = candidate.rsplit(None, 1)[-1] if candidate.split() else ""
        bare = last_word.rstrip(".!?\"')]").lstrip("(\"'[").lower()
        if last_word.endswith("."):
            if bare in _ABBREVIATIONS:
                continue
            if len(bare) == 1 and bare.isalpha():
                continue  # single initial, e.g. "J."
            if re.fullmatch(r"\d+(\.\d+)*", bare):
                continue  # numeric like "3." inside "3.5"
        sentences.append(candidate.strip())
        start = match.end()
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


def ws_tokens(text: str) -> list[str]:
    """Whitespace tokens; the unit for chunk sizes and cost estimates."""
    return text.split()


def count_ws_tokens(text: str) -> int:
    return len(text.split())


def parse_yes_no(text: str) -> bool:
    """Parse a yes/no completion; tolerant of trailing punctuation/prose."""
    head = text.strip().lower()
    if head.startswith("yes"):
        return True
    if head.startswith("no"):
        return False
    raise FormatError(f"expected a yes/no answer, got: {text[:120]!r}", raw=text)


def parse_bullets(text: str) -> list[str]:
    """Parse a bulleted list completion into items.

    Every non-blank line must start with one of "-", "–", "•";
    anything else fails loudly rather than silently merging lines.
    """
    items: list[str] = []
    for line in text.splitlines():
        stripped = line.strip()
        if not stripped:
            continue
        for prefix in ("-", "–", "•"):
            if stripped.startswith(prefix):
                item = stripped[len(prefix) :].strip()
                break
        else:
            raise FormatError(
                f"expected bulleted lines, got non-bullet line: {stripped[:120]!r}",
                raw=text,
            )
        if item:
            items.append(item)
    if not items:
        raise FormatError("expected at least one bullet item", raw=text)
    return items


_FENCE = re.compile(r"^```[a-zA-Z]*\s*|\s*```$")


def parse_json_block(text: str) -> Any:
    """Parse a JSON completion, stripping Markdown code fences if present."""
    cleaned = _FENCE.sub("", text.strip()).strip()
    try:
        return json.loads(cleaned)
    except json.JSONDecodeError:
        # Some models wrap JSON in prose; try the outermost braces/brackets.
        for open_ch, close_ch in (("{", "}"), ("[", "]")):
            start = cleaned.find(open_ch)
            end = cleaned.rfind(close_ch)
            if start != -1 and end > start:
                try:
                    return json.loads(cleaned[start : end + 1])
                except json.JSONDecodeError:
                    pass
        raise FormatError(f"completion is not valid JSON: {text[:120]!r}", raw=text)


# Minimal English stopword list for the lexical overlap stub.
STOPWORDS = frozenset(
    """a an the and or but if then than that this those these of in on at
    to from by for with about into over under after before between during
    is are was were be been being am do does did done has have had having
    will would shall should may might must can could not no nor so such
    as it its he she they them his her their our your my we you i who
    whom which what when where why how there here all any both each few
    more most other some than too very s t just don now""".split()
)

_WORD = re.compile(r"[a-z0-9]+")


def content_words(text: str) -> set[str]:
    """Lowercased alphanumeric words minus stopwords."""
    return {w for w in _WORD.findall(text.lower()) if w not in STOPWORDS}
