"""The sensorimotor reasoner.

One ``Engine`` consumes a serialized stream of sentences and clock steps.
Judgment events enter the FIFO window; an event that follows an executed
operation triggers temporal induction; goals trigger a one-step decision
that either exploits a stored hypothesis or falls back to motor babbling.
Executed operations register anticipations which, unless confirmed before
their deadline, add a little negative evidence to the hypothesis that
predicted them.
"""
from __future__ import annotations

import itertools
import logging
import random
from dataclasses import dataclass, field
from typing import Union

from ..narsese import Operation, Sentence, Sequence, TemporalImplication, Term
from ..truth import TruthValue, deduction, expectation, project
from .buffers import CyclingQueue, Event, EventWindow
from .memory import ConceptMemory

log = logging.getLogger(__name__)

UNIT_OBSERVATION = TruthValue(1.0, 0.5)


class UnknownOperation(RuntimeError):
    pass


@dataclass
class EngineConfig:
    decay: float = 0.75
    threshold: float = 0.52
    deadline: int = 50
    horizon: int = 20
    window: int = 20
    queue: int = 512
    memory: int = 4096
    motor_babbling: float = 0.9
    babbling_ops: int | None = None
    seed: int = 0
    # evidence ceiling per hypothesis; older evidence is discounted beyond it
    max_evidence: float | None = 3.0
    # weight of the implicit negative event when an anticipation times out
    anticipation_confidence: float = 0.01
    queue_decay: float = 0.9


@dataclass(frozen=True)
class Execute:
    operation: str
    implication: TemporalImplication
    expectation: float


@dataclass(frozen=True)
class Babble:
    operation: str


@dataclass(frozen=True)
class NoAction:
    pass


Decision = Union[Execute, Babble, NoAction]


@dataclass
class Anticipation:
    implication: TemporalImplication
    predicted: Term
    created: int
    deadline: int
    stamp: frozenset
    antecedent_time: int
    status: str = "pending"  # -> "confirmed" | "failed"


@dataclass(frozen=True)
class Induction:
    implication: TemporalImplication
    truth: TruthValue
    stamp: frozenset


@dataclass(frozen=True)
class Candidate:
    hypothesis: object
    operation: str
    desire: TruthValue
    expectation: float


def _antecedent(stimuli: list[Term], op: Operation) -> Term:
    seq = stimuli[0]
    for s in stimuli[1:]:
        seq = Sequence(seq, s)
    return Sequence(seq, op)


def induce(window: EventWindow, op_event: Event, outcome: Event, horizon: int, decay: float) -> list[Induction]:
    """Hypotheses ``(s &/ op) =/> outcome`` and ``((s1 &/ s2) &/ op) =/> outcome``.

    Stimuli are the non-operation events that precede ``op_event`` and lie
    within ``horizon`` steps of the outcome. When a term occurred more than
    once only its latest occurrence is used. Each hypothesis carries a
    single observation whose confidence is projected over the age of its
    oldest antecedent event.
    """
    latest: dict[Term, Event] = {}
    for e in window:
        if e.id >= op_event.id or e.is_operation or e.term == outcome.term:
            continue
        if outcome.time - e.time > horizon:
            continue
        latest.pop(e.term, None)
        latest[e.term] = e  # re-insert keeps arrival order
    stimuli = list(latest.values())
    op = op_event.term
    out: list[Induction] = []

    def emit(parts: list[Event]):
        age = outcome.time - parts[0].time
        conf = project(UNIT_OBSERVATION, age, decay).confidence
        truth = TruthValue(outcome.truth.frequency, conf)
        stamp = frozenset([op_event.id, outcome.id, *(p.id for p in parts)])
        imp = TemporalImplication(_antecedent([p.term for p in parts], op), outcome.term)
        out.append(Induction(imp, truth, stamp))

    for s in stimuli:
        emit([s])
    for s1, s2 in itertools.combinations(stimuli, 2):
        emit([s1, s2])
    return out


class Engine:
    def __init__(self, config: EngineConfig | None = None, operations=None):
        self.config = config or EngineConfig()
        cfg = self.config
        self.clock = 0
        self.window = EventWindow(cfg.window)
        self.queue: CyclingQueue = CyclingQueue(cfg.queue, cfg.queue_decay)
        self.memory = ConceptMemory(cfg.memory, cfg.max_evidence)
        self.anticipations: list[Anticipation] = []
        self.rng = random.Random(cfg.seed)
        self._ops: dict[int, str] = {}
        self._ids = itertools.count(1)
        self._updates: list[tuple[TemporalImplication, TruthValue]] = []
        if isinstance(operations, dict):
            for idx, name in operations.items():
                self.register_operation(idx, name)
        elif operations:
            for idx, name in enumerate(operations, 1):
                self.register_operation(idx, name)

    # -- operations -----------------------------------------------------

    def register_operation(self, index: int, name: str) -> None:
        self._ops[index] = name.lstrip("^")

    @property
    def operations(self) -> list[str]:
        return [self._ops[i] for i in sorted(self._ops)]

    def _babbling_pool(self) -> list[str]:
        ops = self.operations
        k = self.config.babbling_ops
        return ops[:k] if k else ops

    # -- input ----------------------------------------------------------

    def ingest(self, sentence: Sentence) -> list[str]:
        """Feed one sentence; returns the names of operations executed."""
        term = sentence.term
        if isinstance(term, TemporalImplication):
            # given knowledge: stored directly, no occurrence time
            self.revise_into_memory(term, sentence.truth, frozenset([next(self._ids)]))
            return []
        if sentence.is_goal:
            if not self._ops:
                raise UnknownOperation("goal received but no operations are registered")
            self.queue.push(("goal", sentence), expectation(sentence.truth), self.clock)
        elif sentence.is_event:
            event = Event(next(self._ids), term, sentence.truth, self.clock)
            self.window.push(event)
            self.queue.push(("event", event), expectation(sentence.truth), self.clock)
        else:
            return []
        return self._cycle()

    def _cycle(self) -> list[str]:
        emitted = []
        while self.queue:
            kind, item = self.queue.pop()
            if kind == "goal":
                decision = self.decide(item)
                if isinstance(decision, (Execute, Babble)):
                    self._execute(decision.operation)
                    emitted.append(decision.operation)
            elif item.is_operation:
                self._anticipate(item)
            else:
                self._observe(item)
        return emitted

    def step(self, n: int = 1) -> None:
        if n < 1:
            raise ValueError("step count must be positive")
        target = self.clock + n
        due = sorted(
            (a for a in self.anticipations if a.status == "pending" and a.deadline < target),
            key=lambda a: a.deadline,
        )
        for a in due:
            self.clock = max(self.clock, a.deadline + 1)
            self._resolve(a, TruthValue(0.0, self.config.anticipation_confidence), a.stamp, "failed")
        self.clock = target
        self.anticipations = [a for a in self.anticipations if a.status == "pending"]

    # -- learning -------------------------------------------------------

    def _observe(self, event: Event) -> None:
        cfg = self.config
        op_event = self.window.latest_operation(event, cfg.horizon)
        if op_event is not None:
            for ind in induce(self.window, op_event, event, cfg.horizon, cfg.decay):
                self.revise_into_memory(ind.implication, ind.truth, ind.stamp)
        for a in self.anticipations:
            if a.status != "pending" or a.predicted != event.term or a.created > event.time:
                continue
            conf = project(UNIT_OBSERVATION, event.time - a.antecedent_time, cfg.decay).confidence
            status = "confirmed" if event.truth.frequency >= 0.5 else "failed"
            self._resolve(a, TruthValue(event.truth.frequency, conf), a.stamp | {event.id}, status)

    def _resolve(self, a: Anticipation, truth: TruthValue, stamp: frozenset, status: str) -> None:
        a.status = status
        # overlapping stamps mean induction already counted this outcome
        self.revise_into_memory(a.implication, truth, stamp)

    def revise_into_memory(self, imp: TemporalImplication, truth: TruthValue, stamp: frozenset) -> TruthValue:
        stored, changed = self.memory.revise(imp, truth, stamp, self.clock)
        if changed:
            self._updates.append((imp, stored))
        return stored

    def drain_updates(self) -> list[tuple[TemporalImplication, TruthValue]]:
        out, self._updates = self._updates, []
        return out

    def query_hypothesis(self, pattern: TemporalImplication) -> TruthValue | None:
        h = self.memory.get(pattern)
        return h.truth if h is not None else None

    # -- decisions ------------------------------------------------------

    def _match(self, preconditions: list[Term], before_id: int | None = None) -> list[Event] | None:
        """Latest in-order occurrences of ``preconditions`` within the horizon."""
        events = [
            e
            for e in self.window.recent(self.clock, self.config.horizon)
            if not e.is_operation and (before_id is None or e.id < before_id)
        ]
        matched: list[Event] = []
        idx = len(events)
        for p in reversed(preconditions):
            idx -= 1
            while idx >= 0 and events[idx].term != p:
                idx -= 1
            if idx < 0:
                return None
            matched.append(events[idx])
        matched.reverse()
        return matched

    def candidates(self, goal: Sentence) -> list[Candidate]:
        out = []
        registered = set(self._ops.values())
        for h in self.memory.with_consequent(goal.term):
            op = h.term.operation
            if op is None or op.name not in registered:
                continue
            matched = self._match(h.term.preconditions)
            if matched is None:
                continue
            # a sequence occurs when its last component does
            age = self.clock - matched[-1].time if matched else 0
            desire = deduction(goal.truth, project(h.truth, age, self.config.decay))
            out.append(Candidate(h, op.name, desire, expectation(desire)))
        return out

    def decide(self, goal: Sentence) -> Decision:
        cands = self.candidates(goal)
        if cands:
            best = max(cands, key=lambda c: (c.expectation, c.hypothesis.truth.confidence, -c.hypothesis.order))
            if best.expectation >= self.config.threshold:
                self.memory.touch(best.hypothesis, self.clock)
                return Execute(best.operation, best.hypothesis.term, best.expectation)
        pool = self._babbling_pool()
        if pool and self.rng.random() < self.config.motor_babbling:
            return Babble(self.rng.choice(pool))
        return NoAction()

    def _execute(self, name: str) -> None:
        op_event = Event(next(self._ids), Operation(name), TruthValue(1.0, 0.9), self.clock)
        self.window.push(op_event)
        self._anticipate(op_event)

    def _anticipate(self, op_event: Event) -> None:
        name = op_event.term.name
        for h in list(self.memory):
            op = h.term.operation
            if op is None or op.name != name:
                continue
            matched = self._match(h.term.preconditions, before_id=op_event.id)
            if matched is None:
                continue
            self.register_anticipation(
                h.term,
                op_event.time,
                frozenset([op_event.id, *(e.id for e in matched)]),
                matched[0].time if matched else op_event.time,
            )

    def register_anticipation(self, imp: TemporalImplication, fired_at: int, stamp: frozenset = frozenset(), antecedent_time: int | None = None) -> Anticipation:
        a = Anticipation(
            imp,
            imp.consequent,
            fired_at,
            fired_at + self.config.deadline,
            stamp or frozenset([next(self._ids)]),
            fired_at if antecedent_time is None else antecedent_time,
        )
        self.anticipations.append(a)
        return a
