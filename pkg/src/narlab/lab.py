"""Operant-conditioning laboratory.

Encodes the three experimental designs (simple discrimination, contingency
reversal, conditional discrimination), runs them against an engine session
through the line protocol, scores each trial and collects the per-block
accuracy and hypothesis truth trajectories.
"""
from __future__ import annotations

import json
import random
from collections import Counter
from dataclasses import dataclass, field
from statistics import mean

from .narsese import Atom, Operation, Property, Sentence, Sequence, TemporalImplication, serialize, serialize_term
from .shell import EXPERIMENT_CONFIG, Session, SessionConfig

BLOCK_SIZE = 12
RESPONSE_WINDOW = 8
INTER_TRIAL_STEPS = 100

GOAL = Atom("G")
GOAL_LINE = "G! :|:"
POSITIVE_FEEDBACK = "G. :|:"
NEGATIVE_FEEDBACK = "G. :|: {0.0 0.9}"


class EngineFault(RuntimeError):
    """The engine executed an operation that is not registered."""


@dataclass(frozen=True)
class TrialSpec:
    stimuli: tuple[Sentence, ...]
    correct_op: str
    condition_id: int

    def __post_init__(self):
        if not self.stimuli:
            raise ValueError("a trial needs at least one stimulus")


@dataclass(frozen=True)
class PhaseSpec:
    name: str
    kind: str  # Baseline | Training | Testing
    blocks: int
    feedback: bool
    contingency: dict

    def __post_init__(self):
        if self.blocks < 1:
            raise ValueError("a phase needs at least one block")
        if self.kind not in ("Baseline", "Training", "Testing"):
            raise ValueError(f"unknown phase kind {self.kind!r}")
        if self.feedback != (self.kind == "Training"):
            raise ValueError("feedback is given in training phases only")


@dataclass
class TrialRecord:
    trial: TrialSpec
    executed_op: str | None
    correct: bool
    feedback_sent: str | None
    block_index: int
    phase_name: str
    clock_at_goal: int


@dataclass(frozen=True)
class HypothesisSample:
    block_index: int  # -1 = before the first block
    phase_name: str
    clock: int
    hypothesis: str
    frequency: float
    confidence: float


@dataclass
class Metrics:
    per_block_accuracy: list[float]
    block_phases: list[str]
    hypothesis_trajectories: dict[str, list[tuple[int, float, float]]]
    samples: list[HypothesisSample] = field(default_factory=list)

    def mean_truth(self, block_index: int, hypotheses=None) -> tuple[float, float]:
        """Mean (f, c) over ``hypotheses`` at the sample taken after ``block_index``."""
        rows = [s for s in self.samples if s.block_index == block_index]
        if hypotheses is not None:
            rows = [s for s in rows if s.hypothesis in hypotheses]
        return mean(s.frequency for s in rows), mean(s.confidence for s in rows)

    def truth_of(self, hypothesis: str) -> list[tuple[int, float, float]]:
        """(block_index, f, c) per sample for one hypothesis."""
        return [(s.block_index, s.frequency, s.confidence) for s in self.samples if s.hypothesis == hypothesis]

    def phase_blocks(self, phase_name: str) -> list[int]:
        return [i for i, p in enumerate(self.block_phases) if p == phase_name]


# -- task definitions -----------------------------------------------------


def _stim(name: str, place: str) -> Sentence:
    return Sentence(Property(name, place))


def _procedural(precondition, op: str):
    return TemporalImplication(Sequence(precondition, Operation(op)), GOAL)


def _p(name, place):
    return Property(name, place)


# condition id -> stimuli, in presentation order
LAYOUTS = {
    1: {
        0: (_stim("A1", "left"), _stim("A2", "right")),
        1: (_stim("A2", "left"), _stim("A1", "right")),
    },
    3: {
        0: (_stim("A1", "sample"), _stim("B1", "left"), _stim("B2", "right")),
        1: (_stim("A1", "sample"), _stim("B2", "left"), _stim("B1", "right")),
        2: (_stim("A2", "sample"), _stim("B2", "left"), _stim("B1", "right")),
        3: (_stim("A2", "sample"), _stim("B1", "left"), _stim("B2", "right")),
    },
}
LAYOUTS[2] = LAYOUTS[1]

FORWARD = {0: "left", 1: "right"}
REVERSED = {0: "right", 1: "left"}
CONDITIONAL = {0: "left", 1: "right", 2: "left", 3: "right"}

TARGETS = {
    1: [
        _procedural(_p("A1", "left"), "left"),
        _procedural(_p("A1", "right"), "right"),
    ],
    2: [
        _procedural(_p("A1", "left"), "left"),
        _procedural(_p("A2", "right"), "right"),
    ],
    3: [
        _procedural(Sequence(_p("A1", "sample"), _p("B1", "left")), "left"),
        _procedural(Sequence(_p("A1", "sample"), _p("B1", "right")), "right"),
        _procedural(Sequence(_p("A2", "sample"), _p("B2", "left")), "left"),
        _procedural(Sequence(_p("A2", "sample"), _p("B2", "right")), "right"),
    ],
}


def target_names(task: int) -> list[str]:
    return [serialize_term(t) for t in TARGETS[task]]


def phases(task: int) -> list[PhaseSpec]:
    if task == 1:
        return [
            PhaseSpec("Baseline", "Baseline", 3, False, FORWARD),
            PhaseSpec("Training", "Training", 3, True, FORWARD),
            PhaseSpec("Testing", "Testing", 3, False, FORWARD),
        ]
    if task == 2:
        return [
            PhaseSpec("Baseline", "Baseline", 2, False, FORWARD),
            PhaseSpec("Training1", "Training", 4, True, FORWARD),
            PhaseSpec("Testing1", "Testing", 2, False, FORWARD),
            PhaseSpec("Training2", "Training", 4, True, REVERSED),
            PhaseSpec("Testing2", "Testing", 2, False, REVERSED),
        ]
    if task == 3:
        return [
            PhaseSpec("Baseline", "Baseline", 3, False, CONDITIONAL),
            PhaseSpec("Training", "Training", 6, True, CONDITIONAL),
            PhaseSpec("Testing", "Testing", 3, False, CONDITIONAL),
        ]
    raise ValueError(f"unknown task {task!r}")


def generate_block(task: int, phase: PhaseSpec, rng: random.Random) -> list[TrialSpec]:
    layouts = LAYOUTS[task]
    reps = BLOCK_SIZE // len(layouts)
    block = [
        TrialSpec(stimuli, phase.contingency[cid], cid)
        for cid, stimuli in layouts.items()
        for _ in range(reps)
    ]
    rng.shuffle(block)
    return block


# -- running --------------------------------------------------------------


class Transcript:
    """JSON-lines record of every protocol line sent and received."""

    def __init__(self):
        self.rows: list[dict] = []

    def add(self, clock: int, direction: str, text: str) -> None:
        self.rows.append({"clock": clock, "dir": direction, "text": text})

    def inputs(self) -> list[str]:
        return [r["text"] for r in self.rows if r["dir"] == "in"]

    def outputs(self) -> list[str]:
        return [r["text"] for r in self.rows if r["dir"] == "out"]

    def dumps(self) -> str:
        return "".join(json.dumps(r, sort_keys=True) + "\n" for r in self.rows)

    @classmethod
    def loads(cls, text: str) -> "Transcript":
        t = cls()
        t.rows = [json.loads(line) for line in text.splitlines() if line.strip()]
        return t


class Protocol:
    """Drives a session line by line, recording the transcript."""

    def __init__(self, session: Session, transcript: Transcript | None = None):
        self.session = session
        self.transcript = transcript if transcript is not None else Transcript()

    def send(self, line: str) -> list[str]:
        self.transcript.add(self.session.clock, "in", line)
        out = self.session.exec_line(line)
        for o in out:
            self.transcript.add(self.session.clock, "out", o)
        return out

    def executed(self, out: list[str]) -> list[str]:
        ops = [o.split()[0][1:] for o in out if o.startswith("^") and o.endswith(" executed")]
        for op in ops:
            if op not in self.session.operations:
                raise EngineFault(f"unregistered operation ^{op}")
        return ops


def new_protocol(seed: int, overrides: dict | None = None) -> Protocol:
    proto = Protocol(Session(SessionConfig()))
    for line in EXPERIMENT_CONFIG + [f"*seed={seed}"]:
        proto.send(line)
    for key, value in (overrides or {}).items():
        proto.send(f"*{key}={value}")
    return proto


def run_trial(
    proto: Protocol,
    trial: TrialSpec,
    feedback: bool,
    block_index: int = 0,
    phase_name: str = "",
) -> TrialRecord:
    for s in trial.stimuli:
        proto.send(serialize(s))
        proto.send("1")
    clock_at_goal = proto.session.clock
    ops = proto.executed(proto.send(GOAL_LINE))
    waited = 0
    while not ops and waited < RESPONSE_WINDOW:
        ops = proto.executed(proto.send("1"))
        waited += 1
    if ops and waited == 0:
        proto.send("1")
    executed = ops[0] if ops else None
    correct = executed == trial.correct_op
    sent = None
    if feedback:
        sent = POSITIVE_FEEDBACK if correct else NEGATIVE_FEEDBACK
        proto.send(sent)
    proto.send(str(INTER_TRIAL_STEPS))
    return TrialRecord(trial, executed, correct, sent, block_index, phase_name, clock_at_goal)


def sample_hypotheses(proto: Protocol, task: int, block_index: int, phase_name: str) -> list[HypothesisSample]:
    engine = proto.session._ensure_engine()
    rows = []
    for term in TARGETS[task]:
        t = engine.query_hypothesis(term)
        f, c = (t.frequency, t.confidence) if t is not None else (0.0, 0.0)
        rows.append(HypothesisSample(block_index, phase_name, engine.clock, serialize_term(term), f, c))
    return rows


@dataclass
class ExperimentResult:
    task: int
    seed: int
    records: list[TrialRecord]
    samples: list[HypothesisSample]
    transcript: Transcript
    metrics: Metrics


def run_experiment(task: int, seed: int, overrides: dict | None = None) -> ExperimentResult:
    plan = phases(task)
    proto = new_protocol(seed, overrides)
    rng = random.Random(f"blocks:{task}:{seed}")
    records: list[TrialRecord] = []
    samples = sample_hypotheses(proto, task, -1, "Start")
    block_index = 0
    for phase in plan:
        for _ in range(phase.blocks):
            for trial in generate_block(task, phase, rng):
                records.append(run_trial(proto, trial, phase.feedback, block_index, phase.name))
            samples += sample_hypotheses(proto, task, block_index, phase.name)
            block_index += 1
    metrics = compute_metrics(records, samples)
    return ExperimentResult(task, seed, records, samples, proto.transcript, metrics)


# -- metrics --------------------------------------------------------------


def compute_metrics(records: list[TrialRecord], samples: list[HypothesisSample]) -> Metrics:
    by_block: dict[int, list[TrialRecord]] = {}
    for r in records:
        by_block.setdefault(r.block_index, []).append(r)
    accuracy, labels = [], []
    for idx in sorted(by_block):
        rows = by_block[idx]
        if len(rows) != BLOCK_SIZE:
            raise ValueError(f"block {idx} has {len(rows)} trials, expected {BLOCK_SIZE}")
        accuracy.append(sum(r.correct for r in rows) / BLOCK_SIZE)
        labels.append(rows[0].phase_name)
    trajectories: dict[str, list[tuple[int, float, float]]] = {}
    for s in samples:
        trajectories.setdefault(s.hypothesis, []).append((s.clock, s.frequency, s.confidence))
    return Metrics(accuracy, labels, trajectories, list(samples))


def accuracy_rows(result: ExperimentResult) -> list[dict]:
    m = result.metrics
    return [
        {"task": result.task, "seed": result.seed, "phase": phase, "block": i, "accuracy": acc}
        for i, (phase, acc) in enumerate(zip(m.block_phases, m.per_block_accuracy))
    ]


def hypothesis_rows(result: ExperimentResult) -> list[dict]:
    return [
        {
            "task": result.task,
            "seed": result.seed,
            "clock": s.clock,
            "hypothesis": s.hypothesis,
            "frequency": s.frequency,
            "confidence": s.confidence,
        }
        for s in result.samples
    ]


def block_composition(block: list[TrialSpec]) -> Counter:
    return Counter(t.condition_id for t in block)
