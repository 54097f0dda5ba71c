"""Evaluation report assembly: canonical machine JSON plus a compact
human table.

Reports carry no timestamps — two identical runs must produce
byte-identical report files (run metadata with clocks lives in the
manifest, a separate file).
"""
from __future__ import annotations

import json
from pathlib import Path

from .errors import DataError

# Canonical presentation order for the benchmark's datasets; anything
# else lands after these, alphabetically.
DATASET_ORDER = [
    "AggreFact-CNN",
    "AggreFact-XSum",
    "TofuEval-MediaS",
    "TofuEval-MeetB",
    "Wice",
    "Reveal",
    "ClaimVerify",
    "FactCheck",
    "ExpertQA",
    "Lfqa",
]


def ordered_datasets(names) -> list[str]:
    known = [d for d in DATASET_ORDER if d in names]
    extra = sorted(n for n in names if n not in DATASET_ORDER)
    return known + extra


def dump_report(report: dict) -> str:
    """Canonical serialization: sorted keys, fixed indentation, trailing
    newline. Byte-stable for identical inputs."""
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def load_report(path: str) -> dict:
    if not Path(path).is_file():
        raise DataError(f"no such report file: {path}")
    with open(path, encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}: invalid report JSON: {exc}")


def human_table(report: dict) -> str:
    """One row of per-dataset balanced accuracies (in %) with an Avg
    column, followed by per-dataset details."""
    datasets = report.get("datasets", {})
    names = ordered_datasets(datasets.keys())
    header = ["checker"] + names + ["Avg"]
    row = [report.get("checker", "?")]
    for name in names:
        row.append(f"{datasets[name]['bacc'] * 100:.1f}")
    avg = report.get("average_bacc")
    row.append(f"{avg * 100:.1f}" if avg is not None else "-")
    widths = [max(len(h), len(v)) for h, v in zip(header, row)]
    lines = [
        "  ".join(h.ljust(w) for h, w in zip(header, widths)),
        "  ".join(v.ljust(w) for v, w in zip(row, widths)),
    ]
    lines.append("")
    lines.append(
        f"policy={report.get('policy', {}).get('mode', '?')} "
        f"plan={report.get('plan', '?')} split={report.get('split', '?')}"
    )
    for name in names:
        entry = datasets[name]
        parts = [f"{name}: n={entry['n']}"]
        if entry.get("threshold") is not None:
            parts.append(f"t={entry['threshold']:.4g}")
        counts = entry.get("counts")
        if counts:
            parts.append(
                "tp/fn/tn/fp={tp}/{fn}/{tn}/{fp}".format(**counts)
            )
        if entry.get("champion_p_value") is not None:
            tag = "sig" if entry.get("champion_significant") else "ns"
            parts.append(f"p={entry['champion_p_value']:.3f} ({tag})")
        if entry.get("decontext_changed_fraction") is not None:
            parts.append(
                f"decontext-changed={entry['decontext_changed_fraction'] * 100:.0f}%"
            )
        lines.append("  " + "  ".join(parts))
    return "\n".join(lines)
