"""Claim decomposition into atomic facts, subclaim merging, and
decontextualization."""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Sequence

from .errors import DataError, FormatError
from .gateway import Gateway
from .textutil import parse_bullets, parse_json_block, split_sentences

# Claims that decompose into more facts than this are skipped by the
# synthesis pipelines: the subclaim power set doubles per fact.
ATOM_CAP = 8


@dataclass(frozen=True)
class AtomicFact:
    """One self-contained factual statement extracted from a claim."""

    text: str
    index: int


@dataclass(frozen=True)
class FactSubset:
    """A non-empty subset of a claim's fact indices."""

    indices: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.indices:
            raise DataError("fact subset may not be empty")
        if list(self.indices) != sorted(set(self.indices)):
            raise DataError(f"fact subset indices must be sorted unique: {self.indices}")

    def __contains__(self, index: int) -> bool:
        return index in self.indices

    def __len__(self) -> int:
        return len(self.indices)


def decompose(gateway: Gateway, claim: str) -> list[AtomicFact]:
    """Break one claim sentence into atomic facts.

    The completion must be a bulleted list; non-bullet lines fail loudly
    (no silent guessing about what the model meant).
    """
    if not claim.strip():
        raise DataError("cannot decompose an empty claim")
    completion = gateway.run("decompose", {"SENTENCE": claim})
    items = parse_bullets(completion)
    return [AtomicFact(text=item, index=i) for i, item in enumerate(items)]


def power_set(facts: Sequence[AtomicFact], cap: int = ATOM_CAP) -> list[FactSubset]:
    """All non-empty subsets of the facts' indices, smallest first.

    Raises DataError when the fact count exceeds the cap so callers can
    skip the claim instead of generating 2^n subclaims.
    """
    if not facts:
        raise DataError("cannot enumerate subclaims of zero facts")
    if len(facts) > cap:
        raise DataError(
            f"claim decomposes into {len(facts)} facts, above the cap of {cap}; "
            "skip this claim"
        )
    indices = [f.index for f in facts]
    out: list[FactSubset] = []
    for size in range(1, len(indices) + 1):
        for combo in itertools.combinations(indices, size):
            out.append(FactSubset(indices=combo))
    return out


def merge(gateway: Gateway, subset: FactSubset, facts: Sequence[AtomicFact]) -> str:
    """Merge a subset of atomic facts into one subclaim sentence.

    Singleton subsets bypass the model: the fact text is the subclaim
    verbatim. Multi-fact merges must come back as a single non-empty
    sentence.
    """
    by_index = {f.index: f for f in facts}
    try:
        members = [by_index[i] for i in subset.indices]
    except KeyError as exc:
        raise DataError(f"subset references unknown fact index {exc}")
    if len(members) == 1:
        return members[0].text
    completion = gateway.run("merge-facts", {"FACTS": [f.text for f in members]})
    completion = completion.strip()
    if not completion:
        raise FormatError("merge returned an empty completion", raw=completion)
    sentences = split_sentences(completion)
    if len(sentences) != 1:
        raise FormatError(
            f"merge must return exactly one sentence, got {len(sentences)}",
            raw=completion,
        )
    return sentences[0]


def decontextualize(gateway: Gateway, claim: str, context: Sequence[str]) -> tuple[bool, str]:
    """Rewrite a claim to stand alone given its context.

    Returns (changed, text): (False, claim) when the model says the claim
    already stands alone, else (True, rewritten claim).
    """
    completion = gateway.run(
        "decontextualize",
        {"CONTEXT": " ".join(context), "CLAIM": claim},
    )
    obj = parse_json_block(completion)
    if not isinstance(obj, dict) or "label" not in obj:
        raise FormatError(
            "decontextualization must return {label, decontext}", raw=completion
        )
    label = str(obj.get("label", "")).strip().lower()
    if label == "yes":
        return False, claim
    if label == "no":
        text = str(obj.get("decontext", "")).strip()
        if not text or text.upper() == "NA":
            raise FormatError(
                "decontextualization said the claim needs rewriting but "
                "returned no rewrite",
                raw=completion,
            )
        return True, text
    raise FormatError(
        f"decontextualization label must be yes/no, got {obj.get('label')!r}",
        raw=completion,
    )


_SENT_PAIR = re.compile(
    r"Sentence\s*1\s*:\s*(?P<first>.+?)\s*Sentence\s*2\s*:\s*(?P<second>.+)",
    re.IGNORECASE | re.DOTALL,
)


def parse_sentence_pair(completion: str) -> tuple[str, str]:
    """Parse a 'Sentence 1: ... Sentence 2: ...' completion."""
    match = _SENT_PAIR.search(completion.strip())
    if not match:
        raise FormatError(
            "expected 'Sentence 1: ... Sentence 2: ...'", raw=completion
        )
    first = " ".join(match.group("first").split())
    second = " ".join(match.group("second").split())
    if not first or not second:
        raise FormatError("sentence pair has an empty member", raw=completion)
    return first, second
