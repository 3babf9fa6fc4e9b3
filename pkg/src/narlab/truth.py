"""Evidence-grounded truth values.

A truth value is a (frequency, confidence) pair. It is a view of an amount
of evidence: ``w_plus`` positive units out of ``w`` total units, with

    f = w_plus / w        c = w / (w + 1)

Every operation here is pure arithmetic on immutable values.
"""
from __future__ import annotations

from dataclasses import dataclass

__all__ = [
    "DEFAULT_DECAY",
    "Evidence",
    "NoEvidence",
    "TruthValue",
    "deduction",
    "evidence_from_truth",
    "expectation",
    "limit_evidence",
    "project",
    "revise",
    "truth_from_evidence",
]

DEFAULT_DECAY = 0.75


class NoEvidence(ValueError):
    """Raised when a truth value is requested for zero total evidence."""


@dataclass(frozen=True)
class TruthValue:
    frequency: float = 1.0
    confidence: float = 0.9

    def __post_init__(self):
        if not 0.0 <= self.frequency <= 1.0:
            raise ValueError(f"frequency out of range: {self.frequency!r}")
        if not 0.0 <= self.confidence < 1.0:
            raise ValueError(f"confidence out of range: {self.confidence!r}")

    def __iter__(self):
        yield self.frequency
        yield self.confidence

    def __str__(self):
        return f"{{{self.frequency:.2f} {self.confidence:.2f}}}"


@dataclass(frozen=True)
class Evidence:
    positive: float
    total: float

    def __post_init__(self):
        if self.positive < 0 or self.total < 0:
            raise ValueError("evidence amounts must be nonnegative")
        # tolerate float noise from f * w round-trips
        if self.positive > self.total * (1 + 1e-12) + 1e-15:
            raise ValueError("positive evidence exceeds total evidence")

    @property
    def negative(self) -> float:
        return max(self.total - self.positive, 0.0)

    def __add__(self, other: "Evidence") -> "Evidence":
        return Evidence(self.positive + other.positive, self.total + other.total)


def truth_from_evidence(e: Evidence) -> TruthValue:
    if e.total <= 0:
        raise NoEvidence("no evidence: total is zero")
    f = min(e.positive / e.total, 1.0)
    return TruthValue(f, e.total / (e.total + 1.0))


def evidence_from_truth(t: TruthValue) -> Evidence:
    w = t.confidence / (1.0 - t.confidence)
    return Evidence(min(t.frequency * w, w), w)


def revise(t1: TruthValue, t2: TruthValue) -> TruthValue:
    """Pool two bodies of evidence. Caller guarantees they are disjoint."""
    e = evidence_from_truth(t1) + evidence_from_truth(t2)
    if e.total == 0:
        # two zero-confidence values carry no evidence at all
        return TruthValue(0.5 * (t1.frequency + t2.frequency), 0.0)
    return truth_from_evidence(e)


def deduction(t1: TruthValue, t2: TruthValue) -> TruthValue:
    f = t1.frequency * t2.frequency
    return TruthValue(f, f * t1.confidence * t2.confidence)


def expectation(t: TruthValue) -> float:
    return t.confidence * (t.frequency - 0.5) + 0.5


def project(t: TruthValue, dt: int, decay: float = DEFAULT_DECAY) -> TruthValue:
    """Discount confidence by ``decay`` per elapsed time step."""
    if dt < 0:
        raise ValueError("dt must be nonnegative")
    if dt == 0:
        return t
    return TruthValue(t.frequency, t.confidence * decay**dt)


def limit_evidence(e: Evidence, max_total: float | None) -> Evidence:
    """Rescale ``e`` so its total does not exceed ``max_total``.

    The ratio of positive to total evidence is preserved, so frequency is
    unchanged while older evidence is proportionally discounted.
    """
    if max_total is None or e.total <= max_total:
        return e
    k = max_total / e.total
    return Evidence(e.positive * k, max_total)
