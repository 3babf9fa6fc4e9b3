import io
import itertools

import pytest

from narlab.shell import EXPERIMENT_CONFIG, Session, SessionConfig, repl

INTERACTION = [
    "<A1 --> [left]>. :|: // A1 is presented to the left",
    "<A2 --> [right]>. :|: // A2 is presented to the right",
    "G! :|: // G is established as a desired event",
    "^left. :|: // ^left executed by the system",
    "G. :|: // G is provided as a consequence",
    "<(<A1 --> [left]> &/ ^left) =/> G> // the learned contingency",
]
TRIAL = ["<A1 --> [left]>. :|:", "1", "<A2 --> [right]>. :|:", "1", "G! :|:", "1", "G. :|:", "100"]


def run(lines, session=None):
    session = session or Session()
    out = []
    for line in lines:
        out += session.exec_line(line)
    return session, out


def snapshot(session):
    eng = session.engine
    return (
        session.operations,
        eng.clock,
        sorted((str(h.term), h.evidence) for h in eng.memory),
        eng.rng.getstate(),
    )


class TestDirectives:
    def test_setopname(self):
        s, out = run(["*setopname 1 ^left"])
        assert out == [] and s.operations == ["left"]

    def test_config_block(self):
        s, _ = run(EXPERIMENT_CONFIG)
        assert s.config.engine.babbling_ops == 2
        assert s.config.engine.motor_babbling == 0.9
        assert s.config.volume == 100
        assert s.operations == ["left", "right"]

    def test_extra_knobs(self):
        s, _ = run(["*decay=0.5", "*threshold=0.6", "*deadline=30", "*seed=4"])
        e = s.config.engine
        assert (e.decay, e.threshold, e.deadline, e.seed) == (0.5, 0.6, 30, 4)

    def test_babbling_ops_bounded_by_registered(self):
        s, _ = run(["*setopname 1 ^left", "*babblingops=2"])
        (msg,) = s.exec_line("G! :|:")
        assert msg.startswith("Error:")

    def test_config_apply_rejects_bad_value(self):
        with pytest.raises(ValueError):
            SessionConfig().apply("motorbabbling", "2")

    def test_live_setopname(self):
        s, _ = run(["*setopname 1 ^left", "1", "*setopname 2 ^right"])
        assert s.engine.operations == ["left", "right"]


class TestSession:
    def test_interaction_derives_contingency(self):
        _, out = run(EXPERIMENT_CONFIG + INTERACTION)
        assert any(line.startswith("Derived: <(<A1 --> [left]> &/ ^left) =/> G>.") for line in out)

    def test_low_volume_hides_derivations(self):
        _, out = run(EXPERIMENT_CONFIG + ["*volume=0"] + INTERACTION)
        assert not any(line.startswith("Derived:") for line in out)

    def test_execution_line_format(self):
        _, out = run(EXPERIMENT_CONFIG + ["*motorbabbling=1.0", "G! :|:"])
        assert out in (["^left executed"], ["^right executed"])

    @pytest.mark.parametrize("junk", ["garbage <<<", "*warpdrive=9", "G. :|: {2 0.9}", "-5"])
    def test_garbage_gives_one_diagnostic(self, junk):
        s, _ = run(EXPERIMENT_CONFIG)
        out = s.exec_line(junk)
        assert len(out) == 1 and out[0].startswith("Error:")
        assert s.exec_line("G! :|:") is not None  # still alive

    def test_goal_without_operations(self):
        (msg,) = Session().exec_line("G! :|:")
        assert msg.startswith("Error:")

    def test_replay_reproduces_outputs(self):
        script = EXPERIMENT_CONFIG + ["*seed=11"] + TRIAL * 10
        _, first = run(script)
        _, second = run(script)
        assert first == second

    def test_directive_order_irrelevant(self):
        states = set()
        for perm in itertools.permutations(EXPERIMENT_CONFIG):
            s, _ = run(list(perm) + ["*seed=3"] + TRIAL * 3)
            states.add(repr(snapshot(s)))
        assert len(states) == 1


def test_repl():
    stdin = io.StringIO("\n".join(EXPERIMENT_CONFIG + INTERACTION) + "\n")
    stdout = io.StringIO()
    assert repl(stdin, stdout) == 0
    assert "Derived: <(<A1 --> [left]> &/ ^left) =/> G>." in stdout.getvalue()
