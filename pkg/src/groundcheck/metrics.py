"""Evaluation metrics: balanced accuracy, threshold tuning, paired
bootstrap significance, and Fleiss' kappa. All functions are pure and
deterministic given their seeds."""
from __future__ import annotations

import random
import warnings
from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import DataError


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fn: int
    tn: int
    fp: int

    def __post_init__(self) -> None:
        for name in ("tp", "fn", "tn", "fp"):
            if getattr(self, name) < 0:
                raise DataError(f"confusion count {name} is negative")

    @classmethod
    def from_pairs(cls, preds: Sequence[int], gold: Sequence[int]) -> "ConfusionCounts":
        if len(preds) != len(gold):
            raise DataError(
                f"prediction/gold length mismatch: {len(preds)} vs {len(gold)}"
            )
        tp = fn = tn = fp = 0
        for p, g in zip(preds, gold):
            if g == 1:
                if p == 1:
                    tp += 1
                else:
                    fn += 1
            else:
                if p == 1:
                    fp += 1
                else:
                    tn += 1
        return cls(tp=tp, fn=fn, tn=tn, fp=fp)

    def as_dict(self) -> dict[str, int]:
        return {"tp": self.tp, "fn": self.fn, "tn": self.tn, "fp": self.fp}


def bacc(counts: ConfusionCounts) -> float:
    """Balanced accuracy: mean of recall on positives and on negatives.

    Undefined (an error, not 0) when a gold class is absent.
    """
    positives = counts.tp + counts.fn
    negatives = counts.tn + counts.fp
    if positives == 0:
        raise DataError("balanced accuracy undefined: no gold-positive items")
    if negatives == 0:
        raise DataError("balanced accuracy undefined: no gold-negative items")
    return 0.5 * (counts.tp / positives + counts.tn / negatives)


def bacc_of(preds: Sequence[int], gold: Sequence[int]) -> float:
    return bacc(ConfusionCounts.from_pairs(preds, gold))


def candidate_thresholds(scores: Sequence[float],
                         score_range: tuple[float, float]) -> list[float]:
    """Candidate cut points: midpoints between consecutive distinct
    scores plus the range endpoints.

    With strict-> decisions, every achievable prediction vector over the
    range is realized by one of these candidates, so scanning them is an
    exact search, not an approximation.
    """
    v_min, v_max = score_range
    distinct = sorted(set(scores))
    mids = [(a + b) / 2 for a, b in zip(distinct, distinct[1:])]
    return sorted(set([v_min, v_max] + mids))


def tune_threshold(scored: Sequence[tuple[float, int]],
                   score_range: tuple[float, float]) -> float:
    """Threshold maximizing balanced accuracy on (score, gold) pairs.

    Ties break toward the smallest threshold. Requires both gold classes.
    """
    if not scored:
        raise DataError("cannot tune a threshold with no scored examples")
    gold = [g for _, g in scored]
    if len(set(gold)) < 2:
        raise DataError("cannot tune a threshold: only one gold class present")
    scores = [s for s, _ in scored]
    best_t: float | None = None
    best_bacc = -1.0
    for t in candidate_thresholds(scores, score_range):
        preds = [int(s > t) for s in scores]
        value = bacc_of(preds, gold)
        if value > best_bacc:
            best_bacc = value
            best_t = t
    assert best_t is not None
    return best_t


@dataclass(frozen=True)
class BootstrapResult:
    runs: int
    p_value: float  # fraction of resamples where the challenger >= the champion
    significant: bool  # champion's advantage significant at alpha
    alpha: float


def bootstrap_indices(n_items: int, runs: int, seed: int,
                      gold: Sequence[int]) -> Iterator[list[int]]:
    """The shared resample index stream for paired bootstrap tests.

    Indices are drawn with replacement, sequentially from one seeded
    generator; resamples missing a gold class are redrawn (balanced
    accuracy would be undefined). Public so an independent scorer can
    consume the identical stream.
    """
    if n_items < 1:
        raise DataError("bootstrap needs at least one item")
    if len(set(gold)) < 2:
        raise DataError("bootstrap needs both gold classes present")
    rng = random.Random(seed)
    for _ in range(runs):
        while True:
            idx = [rng.randrange(n_items) for _ in range(n_items)]
            if len({gold[i] for i in idx}) > 1:
                break
        yield idx


def paired_bootstrap(preds_a: Sequence[int], preds_b: Sequence[int],
                     gold: Sequence[int], runs: int = 1000, seed: int = 0,
                     alpha: float = 0.05) -> BootstrapResult:
    """Paired bootstrap comparing challenger b against champion a.

    p_value is the fraction of resamples where BAcc(b) >= BAcc(a), ties
    counting for the challenger: a high p means b is indistinguishable
    from (or better than) a. significant means a's advantage holds at the
    given alpha (p_value < alpha).
    """
    if not len(preds_a) == len(preds_b) == len(gold):
        raise DataError(
            "paired bootstrap needs equal-length inputs, got "
            f"{len(preds_a)}/{len(preds_b)}/{len(gold)}"
        )
    if runs < 1:
        raise DataError(f"bootstrap runs must be >= 1, got {runs}")
    wins = 0
    for idx in bootstrap_indices(len(gold), runs, seed, gold):
        g = [gold[i] for i in idx]
        score_a = bacc_of([preds_a[i] for i in idx], g)
        score_b = bacc_of([preds_b[i] for i in idx], g)
        if score_b >= score_a:
            wins += 1
    p_value = wins / runs
    return BootstrapResult(
        runs=runs, p_value=p_value, significant=p_value < alpha, alpha=alpha
    )


def fleiss_kappa(ratings: Sequence[Sequence]) -> float:
    """Fleiss' kappa over an items x raters label matrix.

    Labels may be any hashable values; every cell must be filled and
    every item rated by the same number (>= 2) of raters. When expected
    agreement is 1 (a single category ever used), kappa is returned as
    1.0 by convention, with a warning, since the formula degenerates.
    """
    if not ratings:
        raise DataError("fleiss_kappa needs at least one item")
    n_raters = len(ratings[0])
    if n_raters < 2:
        raise DataError("fleiss_kappa needs at least two raters")
    for i, row in enumerate(ratings):
        if len(row) != n_raters:
            raise DataError(
                f"item {i} has {len(row)} ratings, expected {n_raters}"
            )
        if any(r is None for r in row):
            raise DataError(f"item {i} has an empty rating cell")
    categories = sorted({r for row in ratings for r in row}, key=repr)
    n_items = len(ratings)
    totals = {c: 0 for c in categories}
    agreement_sum = 0.0
    for row in ratings:
        counts = {c: 0 for c in categories}
        for r in row:
            counts[r] += 1
        for c, k in counts.items():
            totals[c] += k
        agreement_sum += (sum(k * k for k in counts.values()) - n_raters) / (
            n_raters * (n_raters - 1)
        )
    p_bar = agreement_sum / n_items
    p_expected = sum(
        (totals[c] / (n_items * n_raters)) ** 2 for c in categories
    )
    if p_expected == 1.0:
        warnings.warn(
            "fleiss_kappa: every rating is the same single category; "
            "returning 1.0 by convention",
            stacklevel=2,
        )
        return 1.0
    return (p_bar - p_expected) / (1 - p_expected)
