"""Grounded fact-checking toolkit.

Synthesizes labeled (document, claim) training tuples from seed claims and
documents, checks claims against evidence with pluggable checkers, and
evaluates checkers on grounded fact-checking benchmarks with deterministic,
reproducible reports. Includes a small annotation service for human review
of synthetic labels.
"""
from .core import (
    BenchRecord,
    EvidenceDoc,
    GroundedClaim,
    SupportLabel,
    SynthTuple,
    unify_label,
)
from .errors import BackendError, DataError, FormatError, ToolkitError, TransportError

__version__ = "0.1.0"

__all__ = [
    "BenchRecord",
    "EvidenceDoc",
    "GroundedClaim",
    "SupportLabel",
    "SynthTuple",
    "unify_label",
    "ToolkitError",
    "DataError",
    "BackendError",
    "TransportError",
    "FormatError",
    "__version__",
]
