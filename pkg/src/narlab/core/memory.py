"""Concept memory: stored temporal hypotheses with their evidence."""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass

from ..narsese import TemporalImplication, Term
from ..truth import Evidence, TruthValue, evidence_from_truth, expectation, limit_evidence, truth_from_evidence

log = logging.getLogger(__name__)


class CapacityEviction(UserWarning):
    """Non-fatal: a hypothesis was forgotten to stay within capacity."""


class StampOverlap(AssertionError):
    """Internal consistency failure: overlapping evidence was about to be pooled."""


@dataclass
class Hypothesis:
    term: TemporalImplication
    evidence: Evidence
    stamp: frozenset
    created: int
    order: int
    last_use: int
    use_count: int = 0

    @property
    def truth(self) -> TruthValue:
        return truth_from_evidence(self.evidence)


class ConceptMemory:
    def __init__(self, capacity: int = 4096, max_evidence: float | None = None):
        if capacity < 1:
            raise ValueError("capacity must be positive")
        self.capacity = capacity
        self.max_evidence = max_evidence
        self._items: dict[TemporalImplication, Hypothesis] = {}
        self._by_consequent: dict[Term, dict[TemporalImplication, Hypothesis]] = {}
        self._order = 0
        self.revisions = 0
        self.choices = 0
        self.evictions = 0

    def __len__(self) -> int:
        return len(self._items)

    def __contains__(self, term) -> bool:
        return term in self._items

    def __iter__(self):
        return iter(self._items.values())

    def get(self, term: TemporalImplication) -> Hypothesis | None:
        return self._items.get(term)

    def with_consequent(self, consequent: Term) -> list[Hypothesis]:
        return list(self._by_consequent.get(consequent, {}).values())

    def touch(self, h: Hypothesis, now: int) -> None:
        h.last_use = now
        h.use_count += 1

    @staticmethod
    def pool(a: Evidence, a_stamp: frozenset, b: Evidence, b_stamp: frozenset) -> Evidence:
        if a_stamp & b_stamp:
            raise StampOverlap(f"overlapping stamps: {sorted(a_stamp & b_stamp)}")
        return a + b

    def revise(self, term: TemporalImplication, truth: TruthValue, stamp: frozenset, now: int) -> tuple[TruthValue, bool]:
        """Add one observation to memory.

        Returns the stored truth and whether memory changed. Evidence that
        overlaps what is already stored is not pooled; the higher-confidence
        side is kept instead.
        """
        incoming = evidence_from_truth(truth)
        h = self._items.get(term)
        if h is None:
            if incoming.total == 0:
                return truth, False
            self._insert(term, limit_evidence(incoming, self.max_evidence), stamp, now)
            return self._items[term].truth, True
        h.last_use = now
        if h.stamp & stamp:
            self.choices += 1
            if truth.confidence > h.truth.confidence:
                h.evidence = limit_evidence(incoming, self.max_evidence)
                h.stamp = stamp
                return h.truth, True
            return h.truth, False
        if incoming.total == 0:
            return h.truth, False
        self.revisions += 1
        pooled = self.pool(h.evidence, h.stamp, incoming, stamp)
        h.evidence = limit_evidence(pooled, self.max_evidence)
        h.stamp = h.stamp | stamp
        return h.truth, True

    def _insert(self, term, evidence, stamp, now):
        if len(self._items) >= self.capacity:
            self._evict(now)
        self._order += 1
        h = Hypothesis(term, evidence, stamp, now, self._order, now)
        self._items[term] = h
        self._by_consequent.setdefault(term.consequent, {})[term] = h

    def _priority(self, h: Hypothesis, now: int) -> float:
        recency = 1.0 / (1 + max(now - h.last_use, 0))
        return expectation(h.truth) * (1 + h.use_count) * recency

    def _evict(self, now: int) -> None:
        victim = min(self._items.values(), key=lambda h: (self._priority(h, now), -h.order))
        del self._items[victim.term]
        del self._by_consequent[victim.term.consequent][victim.term]
        self.evictions += 1
        log.debug("evicted %s", victim.term)
        warnings.warn(CapacityEviction(f"memory full, forgot {victim.term}"), stacklevel=3)
