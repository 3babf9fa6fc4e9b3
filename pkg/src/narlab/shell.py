"""Line-protocol front end for one engine session.

Every input line is one of: a Narsese sentence, a ``*key=value`` directive,
a bare integer (advance the clock) or a ``//`` comment. Output lines are

    ^left executed
    Derived: <(<A1 --> [left]> &/ ^left) =/> G>. {1.00 0.50}
    Error: expected '>' (column 7)

``Derived:`` lines are only printed at volume >= DERIVED_VOLUME.
"""
from __future__ import annotations

import sys
from dataclasses import dataclass, field

from .core import Engine, EngineConfig, UnknownOperation
from .narsese import (
    DIRECTIVES,
    Comment,
    ConfigDirective,
    NarseseError,
    Sentence,
    StepCount,
    parse_line,
    serialize_term,
)

DERIVED_VOLUME = 50

# directive key -> EngineConfig field
_ENGINE_KEYS = {
    "babblingops": "babbling_ops",
    "motorbabbling": "motor_babbling",
    "seed": "seed",
    "decay": "decay",
    "threshold": "threshold",
    "deadline": "deadline",
    "horizon": "horizon",
    "window": "window",
    "queue": "queue",
    "memory": "memory",
    "maxevidence": "max_evidence",
    "anticipationconf": "anticipation_confidence",
}

# the configuration block every experiment starts from
EXPERIMENT_CONFIG = [
    "*babblingops=2",
    "*motorbabbling=0.9",
    "*setopname 1 ^left",
    "*setopname 2 ^right",
    "*volume=100",
]


@dataclass
class SessionConfig:
    op_names: dict[int, str] = field(default_factory=dict)
    volume: int = 100
    engine: EngineConfig = field(default_factory=EngineConfig)

    def validate(self) -> None:
        e = self.engine
        if not 0.0 <= e.motor_babbling <= 1.0:
            raise ValueError("motorbabbling must be in [0, 1]")
        if not 0 <= self.volume <= 100:
            raise ValueError("volume must be in [0, 100]")
        if e.babbling_ops is not None:
            if e.babbling_ops < 1:
                raise ValueError("babblingops must be >= 1")
            if self.op_names and e.babbling_ops > len(self.op_names):
                raise ValueError("babblingops exceeds the number of registered operations")
        for name in ("deadline", "horizon", "window", "queue", "memory"):
            if getattr(e, name) < 1:
                raise ValueError(f"{name} must be >= 1")

    def apply(self, key: str, value) -> None:
        """Apply one directive (or ``--config`` override) to this config."""
        if key == "setopname":
            idx, name = value
            self.op_names[idx] = name
        elif key == "volume":
            self.volume = int(value)
            if not 0 <= self.volume <= 100:
                raise ValueError("volume must be in [0, 100]")
        elif key in _ENGINE_KEYS:
            kind, ok = DIRECTIVES[key]
            value = kind(value)
            if not ok(value):
                raise ValueError(f"value out of range for {key}: {value!r}")
            setattr(self.engine, _ENGINE_KEYS[key], value)
        else:
            raise KeyError(key)


def format_update(term, truth) -> str:
    return f"Derived: {serialize_term(term)}. {truth}"


class Session:
    """One interactive session. The engine is built lazily on first use so
    that configuration directives given up front may arrive in any order."""

    def __init__(self, config: SessionConfig | None = None):
        self.config = config or SessionConfig()
        self.engine: Engine | None = None

    def _ensure_engine(self) -> Engine:
        if self.engine is None:
            self.config.validate()
            self.engine = Engine(self.config.engine, dict(self.config.op_names))
        return self.engine

    @property
    def clock(self) -> int:
        return self.engine.clock if self.engine else 0

    @property
    def operations(self) -> list[str]:
        if self.engine:
            return self.engine.operations
        return [self.config.op_names[i] for i in sorted(self.config.op_names)]

    def exec_line(self, text: str) -> list[str]:
        try:
            parsed = parse_line(text)
        except NarseseError as exc:
            return [f"Error: {exc}"]
        try:
            return self._apply(parsed)
        except (ValueError, UnknownOperation) as exc:
            return [f"Error: {exc}"]

    def _apply(self, parsed) -> list[str]:
        if isinstance(parsed, Comment):
            return []
        if isinstance(parsed, ConfigDirective):
            self.config.apply(parsed.key, parsed.value)
            if self.engine is not None:
                self._apply_live(parsed)
            return []
        engine = self._ensure_engine()
        out = []
        if isinstance(parsed, StepCount):
            engine.step(parsed.n)
        elif isinstance(parsed, Sentence):
            for op in engine.ingest(parsed):
                out.append(f"^{op} executed")
        out.extend(self._updates())
        return out

    def _apply_live(self, d: ConfigDirective) -> None:
        if d.key == "setopname":
            self.engine.register_operation(*d.value)
        elif d.key == "memory":
            self.engine.memory.capacity = d.value
        elif d.key == "maxevidence":
            self.engine.memory.max_evidence = d.value
        elif d.key == "seed":
            self.engine.rng.seed(d.value)
        # window and queue sizes are fixed once the engine exists; the other
        # knobs are read from the shared config on use

    def _updates(self) -> list[str]:
        updates = self.engine.drain_updates()
        if self.config.volume < DERIVED_VOLUME:
            return []
        return [format_update(term, truth) for term, truth in updates]


def repl(stdin=sys.stdin, stdout=sys.stdout, session: Session | None = None) -> int:
    session = session or Session()
    for line in stdin:
        for out in session.exec_line(line):
            print(out, file=stdout, flush=True)
    return 0
