import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from narlab.lab import (
    BLOCK_SIZE,
    LAYOUTS,
    NEGATIVE_FEEDBACK,
    POSITIVE_FEEDBACK,
    EngineFault,
    HypothesisSample,
    PhaseSpec,
    Protocol,
    TrialRecord,
    TrialSpec,
    Transcript,
    accuracy_rows,
    block_composition,
    compute_metrics,
    generate_block,
    new_protocol,
    phases,
    run_experiment,
    run_trial,
    target_names,
)
from narlab.narsese import parse_line

CORRECT_LEFT = TrialSpec(LAYOUTS[1][0], "left", 0)


def always(op_index: int) -> Protocol:
    """A session that babbles only the given operation on every goal."""
    return new_protocol(0, {"motorbabbling": 1.0, "babblingops": op_index})


class TestDesign:
    @pytest.mark.parametrize("task,ladder", [
        (1, [("Baseline", 3), ("Training", 3), ("Testing", 3)]),
        (2, [("Baseline", 2), ("Training1", 4), ("Testing1", 2), ("Training2", 4), ("Testing2", 2)]),
        (3, [("Baseline", 3), ("Training", 6), ("Testing", 3)]),
    ])
    def test_phase_ladder(self, task, ladder):
        assert [(p.name, p.blocks) for p in phases(task)] == ladder

    def test_unknown_task(self):
        with pytest.raises(ValueError):
            phases(4)

    def test_feedback_only_in_training(self):
        with pytest.raises(ValueError):
            PhaseSpec("Testing", "Testing", 1, True, {})

    def test_reversal(self):
        t2 = phases(2)
        first, second = t2[1].contingency, t2[3].contingency
        assert all(first[c] != second[c] for c in LAYOUTS[2])

    def test_conditional_table(self):
        # sample A1 picks the side showing B1, sample A2 the side showing B2
        for cid, stimuli in LAYOUTS[3].items():
            sample = stimuli[0].term.subject
            wanted = "B1" if sample == "A1" else "B2"
            side = next(s.term.prop for s in stimuli[1:] if s.term.subject == wanted)
            assert phases(3)[1].contingency[cid] == side

    @settings(max_examples=50)
    @given(st.sampled_from([1, 2, 3]), st.integers(0, 10_000))
    def test_block_composition(self, task, seed):
        phase = phases(task)[1]
        block = generate_block(task, phase, random.Random(seed))
        assert len(block) == BLOCK_SIZE
        n = len(LAYOUTS[task])
        assert block_composition(block) == {cid: BLOCK_SIZE // n for cid in LAYOUTS[task]}
        assert all(t.correct_op == phase.contingency[t.condition_id] for t in block)

    def test_same_seed_same_order(self):
        p = phases(1)[0]
        a = generate_block(1, p, random.Random(5))
        b = generate_block(1, p, random.Random(5))
        assert a == b


class TestTrial:
    def test_golden_trial(self):
        # confidences: 0.5 * 0.75**age of the oldest antecedent (3, 2, 3 steps)
        proto = always(1)
        rec = run_trial(proto, CORRECT_LEFT, feedback=True)
        rows = [r for r in proto.transcript.dumps().splitlines() if '"text": "*' not in r]
        assert rows[:12] == [
            '{"clock": 0, "dir": "in", "text": "<A1 --> [left]>. :|:"}',
            '{"clock": 0, "dir": "in", "text": "1"}',
            '{"clock": 1, "dir": "in", "text": "<A2 --> [right]>. :|:"}',
            '{"clock": 1, "dir": "in", "text": "1"}',
            '{"clock": 2, "dir": "in", "text": "G! :|:"}',
            '{"clock": 2, "dir": "out", "text": "^left executed"}',
            '{"clock": 2, "dir": "in", "text": "1"}',
            '{"clock": 3, "dir": "in", "text": "G. :|:"}',
            '{"clock": 3, "dir": "out", "text": "Derived: <(<A1 --> [left]> &/ ^left) =/> G>. {1.00 0.21}"}',
            '{"clock": 3, "dir": "out", "text": "Derived: <(<A2 --> [right]> &/ ^left) =/> G>. {1.00 0.28}"}',
            '{"clock": 3, "dir": "out", "text": "Derived: <((<A1 --> [left]> &/ <A2 --> [right]>) &/ ^left) =/> G>. {1.00 0.21}"}',
            '{"clock": 3, "dir": "in", "text": "100"}',
        ]
        assert len(rows) == 12
        assert rec.correct and rec.feedback_sent == POSITIVE_FEEDBACK and rec.clock_at_goal == 2

    def test_every_input_line_parses(self):
        proto = always(2)
        run_trial(proto, CORRECT_LEFT, feedback=True)
        for line in proto.transcript.inputs():
            parse_line(line)

    def test_wrong_answer_negative_feedback(self):
        rec = run_trial(always(2), CORRECT_LEFT, feedback=True)
        assert rec.executed_op == "right" and not rec.correct
        assert rec.feedback_sent == NEGATIVE_FEEDBACK

    def test_no_response_waits_then_scores_wrong(self):
        proto = new_protocol(0, {"motorbabbling": 0.0})
        rec = run_trial(proto, CORRECT_LEFT, feedback=True)
        inputs = [line for line in proto.transcript.inputs() if not line.startswith("*")]
        assert inputs[4:] == ["G! :|:"] + ["1"] * 8 + [NEGATIVE_FEEDBACK, "100"]
        assert rec.executed_op is None and not rec.correct

    def test_testing_has_no_feedback(self):
        proto = always(1)
        rec = run_trial(proto, CORRECT_LEFT, feedback=False)
        assert rec.correct and rec.feedback_sent is None
        assert not any(line.startswith("G. ") for line in proto.transcript.inputs())

    def test_unregistered_operation_is_fault(self):
        proto = always(1)
        with pytest.raises(EngineFault):
            proto.executed(["^jump executed"])


class TestTranscript:
    def test_round_trip(self):
        t = Transcript()
        t.add(0, "in", "G! :|:")
        t.add(0, "out", "^left executed")
        assert Transcript.loads(t.dumps()).rows == t.rows


def _record(block, correct, phase="Training"):
    return TrialRecord(CORRECT_LEFT, "left" if correct else None, correct, None, block, phase, 0)


class TestMetrics:
    def test_accuracy(self):
        recs = [_record(0, True) for _ in range(12)] + [_record(1, i < 3) for i in range(12)]
        m = compute_metrics(recs, [])
        assert m.per_block_accuracy == [1.0, 0.25]
        assert m.block_phases == ["Training", "Training"]

    def test_partial_block_rejected(self):
        with pytest.raises(ValueError):
            compute_metrics([_record(0, True)], [])

    def test_absent_hypothesis_counts_as_zero(self):
        samples = [
            HypothesisSample(0, "Training", 10, "h1", 1.0, 0.6),
            HypothesisSample(0, "Training", 10, "h2", 0.0, 0.0),
        ]
        m = compute_metrics([_record(0, True) for _ in range(12)], samples)
        assert m.mean_truth(0) == pytest.approx((0.5, 0.3))
        assert m.truth_of("h1") == [(0, 1.0, 0.6)]


class TestExperiment:
    def test_task1_shape(self):
        r = run_experiment(1, 0)
        m = r.metrics
        assert len(m.per_block_accuracy) == 9
        assert len(r.samples) == 2 * 10
        assert all((rec.feedback_sent is not None) == (rec.phase_name == "Training") for rec in r.records)
        assert [row["block"] for row in accuracy_rows(r)] == list(range(9))

    def test_accuracy_from_records_alone(self):
        r = run_experiment(1, 1)
        assert compute_metrics(r.records, r.samples).per_block_accuracy == r.metrics.per_block_accuracy

    def test_second_hypothesis_silent_before_reversal(self):
        r = run_experiment(2, 0)
        h2 = target_names(2)[1]
        start = r.metrics.phase_blocks("Training2")[0]
        assert all(f == 0 for b, f, _ in r.metrics.truth_of(h2) if b < start)
