"""Temporal Narsese: terms, sentences and the input line protocol.

Only the sensorimotor subset is supported: atoms, property inheritance
``<S --> [p]>``, operations ``^op``, sequences ``(a &/ b)`` and temporal
implications ``<a =/> b>``. See ``docs/grammar.md`` for the EBNF.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Union

from .truth import TruthValue

__all__ = [
    "Atom",
    "Comment",
    "ConfigDirective",
    "DIRECTIVES",
    "NarseseError",
    "NarseseSyntaxError",
    "Occurrence",
    "Operation",
    "ParsedInput",
    "Property",
    "Punctuation",
    "Sentence",
    "Sequence",
    "StepCount",
    "TemporalImplication",
    "Term",
    "UnknownDirective",
    "format_truth",
    "parse_line",
    "parse_term",
    "serialize",
    "serialize_term",
]

_NAME = re.compile(r"\w+")


class NarseseError(ValueError):
    pass


class NarseseSyntaxError(NarseseError):
    def __init__(self, message: str, column: int):
        super().__init__(f"{message} (column {column})")
        self.column = column


class UnknownDirective(NarseseError):
    pass


def _check_name(name: str) -> None:
    if not isinstance(name, str) or not _NAME.fullmatch(name):
        raise ValueError(f"invalid name: {name!r}")


# -- terms ------------------------------------------------------------------


@dataclass(frozen=True)
class Atom:
    name: str

    def __post_init__(self):
        _check_name(self.name)


@dataclass(frozen=True)
class Property:
    """``<subject --> [prop]>``"""

    subject: str
    prop: str

    def __post_init__(self):
        _check_name(self.subject)
        _check_name(self.prop)


@dataclass(frozen=True)
class Operation:
    name: str

    def __post_init__(self):
        _check_name(self.name)


@dataclass(frozen=True)
class Sequence:
    left: "Term"
    right: "Term"

    def __post_init__(self):
        for part in (self.left, self.right):
            if isinstance(part, TemporalImplication):
                raise ValueError("implications cannot appear inside a sequence")

    def flatten(self) -> list["Term"]:
        """Components in temporal order; left-nested sequences are unrolled."""
        left = self.left.flatten() if isinstance(self.left, Sequence) else [self.left]
        return left + [self.right]


@dataclass(frozen=True)
class TemporalImplication:
    antecedent: "Term"
    consequent: "Term"

    def __post_init__(self):
        if isinstance(self.antecedent, TemporalImplication) or isinstance(
            self.consequent, TemporalImplication
        ):
            raise ValueError("nested implications are not supported")
        if len(operations_in(self.antecedent)) > 1:
            raise ValueError("antecedent holds more than one operation")

    @property
    def operation(self) -> Operation | None:
        ops = operations_in(self.antecedent)
        return ops[0] if ops else None

    @property
    def preconditions(self) -> list["Term"]:
        """Non-operation antecedent components, oldest first."""
        parts = (
            self.antecedent.flatten()
            if isinstance(self.antecedent, Sequence)
            else [self.antecedent]
        )
        return [p for p in parts if not isinstance(p, Operation)]


Term = Union[Atom, Property, Operation, Sequence, TemporalImplication]


def operations_in(term: Term) -> list[Operation]:
    if isinstance(term, Operation):
        return [term]
    if isinstance(term, Sequence):
        return operations_in(term.left) + operations_in(term.right)
    return []


# -- sentences and inputs ---------------------------------------------------


class Punctuation(Enum):
    JUDGMENT = "."
    GOAL = "!"


class Occurrence(Enum):
    NOW = ":|:"
    ETERNAL = ""


DEFAULT_TRUTH = TruthValue(1.0, 0.9)


@dataclass(frozen=True)
class Sentence:
    term: Term
    punctuation: Punctuation = Punctuation.JUDGMENT
    truth: TruthValue = DEFAULT_TRUTH
    occurrence: Occurrence = Occurrence.NOW

    @property
    def is_goal(self) -> bool:
        return self.punctuation is Punctuation.GOAL

    @property
    def is_event(self) -> bool:
        return self.occurrence is Occurrence.NOW


@dataclass(frozen=True)
class ConfigDirective:
    key: str
    value: object


@dataclass(frozen=True)
class StepCount:
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("step count must be positive")


@dataclass(frozen=True)
class Comment:
    text: str = ""


ParsedInput = Union[Sentence, ConfigDirective, StepCount, Comment]

# key -> (value type, validator). setopname is handled separately.
DIRECTIVES = {
    "babblingops": (int, lambda v: v >= 1),
    "motorbabbling": (float, lambda v: 0.0 <= v <= 1.0),
    "volume": (int, lambda v: 0 <= v <= 100),
    "seed": (int, lambda v: True),
    "decay": (float, lambda v: 0.0 < v < 1.0),
    "threshold": (float, lambda v: 0.0 <= v <= 1.0),
    "deadline": (int, lambda v: v >= 1),
    "horizon": (int, lambda v: v >= 1),
    "window": (int, lambda v: v >= 1),
    "queue": (int, lambda v: v >= 1),
    "memory": (int, lambda v: v >= 1),
    "maxevidence": (float, lambda v: v > 0),
    "anticipationconf": (float, lambda v: 0.0 <= v < 1.0),
}


# -- parsing ----------------------------------------------------------------

_NUMBER = re.compile(r"[0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?")


class _Parser:
    def __init__(self, text: str, offset: int = 0):
        self.text = text
        self.pos = 0
        self.offset = offset

    def error(self, msg: str, pos: int | None = None):
        col = (self.pos if pos is None else pos) + self.offset + 1
        return NarseseSyntaxError(msg, col)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)

    def peek(self, lit: str) -> bool:
        self.skip_ws()
        return self.text.startswith(lit, self.pos)

    def expect(self, lit: str):
        if not self.peek(lit):
            raise self.error(f"expected {lit!r}")
        self.pos += len(lit)

    def name(self) -> str:
        self.skip_ws()
        m = _NAME.match(self.text, self.pos)
        if not m:
            raise self.error("expected a name")
        self.pos = m.end()
        return m.group(0)

    def term(self) -> Term:
        self.skip_ws()
        start = self.pos
        if self.peek("<"):
            self.pos += 1
            left = self.term()
            if self.peek("-->"):
                self.pos += 3
                if not isinstance(left, Atom):
                    raise self.error("property subject must be an atom", start)
                self.expect("[")
                prop = self.name()
                self.expect("]")
                self.expect(">")
                return Property(left.name, prop)
            if self.peek("=/>"):
                self.pos += 3
                right = self.term()
                self.expect(">")
                try:
                    return TemporalImplication(left, right)
                except ValueError as exc:
                    raise self.error(str(exc), start) from None
            raise self.error("expected '-->' or '=/>'")
        if self.peek("("):
            self.pos += 1
            left = self.term()
            self.expect("&/")
            right = self.term()
            self.expect(")")
            try:
                return Sequence(left, right)
            except ValueError as exc:
                raise self.error(str(exc), start) from None
        if self.peek("^"):
            self.pos += 1
            return Operation(self.name())
        return Atom(self.name())

    def number(self) -> float:
        self.skip_ws()
        m = _NUMBER.match(self.text, self.pos)
        if not m:
            raise self.error("expected a number")
        self.pos = m.end()
        return float(m.group(0))

    def truth(self) -> TruthValue:
        start = self.pos
        self.expect("{")
        f = self.number()
        if self.peek(","):
            self.pos += 1
        c = self.number()
        self.expect("}")
        try:
            return TruthValue(f, c)
        except ValueError as exc:
            raise self.error(str(exc), start) from None

    def sentence(self) -> Sentence:
        term = self.term()
        punct = Punctuation.JUDGMENT
        if self.peek("."):
            self.pos += 1
        elif self.peek("!"):
            self.pos += 1
            punct = Punctuation.GOAL
        elif not (self.at_end() or self.peek("{") or self.peek(":|:")):
            raise self.error("expected '.' or '!'")
        occ = Occurrence.ETERNAL
        truth = DEFAULT_TRUTH
        if self.peek(":|:"):
            self.pos += 3
            occ = Occurrence.NOW
        if self.peek("{"):
            truth = self.truth()
        if not self.at_end():
            raise self.error("unexpected trailing input")
        return Sentence(term, punct, truth, occ)


def _strip_comment(text: str) -> tuple[str, str | None]:
    idx = text.find("//")
    if idx < 0:
        return text, None
    return text[:idx], text[idx + 2 :].strip()


def _parse_directive(body: str, offset: int) -> ConfigDirective:
    col = offset + 1
    if body.startswith("setopname"):
        m = re.fullmatch(r"setopname\s+(\d+)\s+\^(\w+)\s*", body)
        if not m:
            raise NarseseSyntaxError("expected '*setopname <index> ^<name>'", col)
        idx = int(m.group(1))
        if idx < 1:
            raise NarseseSyntaxError("operation index must be >= 1", col)
        return ConfigDirective("setopname", (idx, m.group(2)))
    m = re.fullmatch(r"(\w+)\s*=\s*(\S+)\s*", body)
    if not m:
        key = re.match(r"\w*", body).group(0)
        if key and key not in DIRECTIVES:
            raise UnknownDirective(f"unknown directive *{key}")
        raise NarseseSyntaxError("expected '*key=value'", col)
    key, raw = m.groups()
    if key not in DIRECTIVES:
        raise UnknownDirective(f"unknown directive *{key}")
    kind, ok = DIRECTIVES[key]
    try:
        value = kind(raw)
    except ValueError:
        raise NarseseSyntaxError(f"bad value for *{key}: {raw!r}", col) from None
    if not ok(value):
        raise NarseseSyntaxError(f"value out of range for *{key}: {raw!r}", col)
    return ConfigDirective(key, value)


def parse_line(text: str) -> ParsedInput:
    """Parse one protocol line into a sentence, directive, step count or comment."""
    if "\n" in text.rstrip("\r\n"):
        raise NarseseSyntaxError("input must be a single line", text.index("\n") + 1)
    body, comment = _strip_comment(text.rstrip("\r\n"))
    stripped = body.strip()
    if not stripped:
        return Comment(comment or "")
    lead = len(body) - len(body.lstrip())
    if stripped.startswith("*"):
        return _parse_directive(stripped[1:], lead + 1)
    if re.fullmatch(r"[-+]?\d+", stripped):
        n = int(stripped)
        if n < 1:
            raise NarseseSyntaxError("step count must be positive", lead + 1)
        return StepCount(n)
    parser = _Parser(body)
    return parser.sentence()


def parse_term(text: str) -> Term:
    parser = _Parser(text)
    term = parser.term()
    if not parser.at_end():
        raise parser.error("unexpected trailing input")
    return term


# -- printing ---------------------------------------------------------------


def serialize_term(term: Term) -> str:
    if isinstance(term, Atom):
        return term.name
    if isinstance(term, Operation):
        return "^" + term.name
    if isinstance(term, Property):
        return f"<{term.subject} --> [{term.prop}]>"
    if isinstance(term, Sequence):
        return f"({serialize_term(term.left)} &/ {serialize_term(term.right)})"
    if isinstance(term, TemporalImplication):
        return f"<{serialize_term(term.antecedent)} =/> {serialize_term(term.consequent)}>"
    raise TypeError(f"not a term: {term!r}")


def _num(x: float) -> str:
    # shortest round-tripping repr: "0.9", "1.0", "0.735..."
    return repr(float(x))


def format_truth(t: TruthValue) -> str:
    return f"{{{_num(t.frequency)} {_num(t.confidence)}}}"


def serialize(sentence: Sentence) -> str:
    out = serialize_term(sentence.term) + sentence.punctuation.value
    if sentence.occurrence is Occurrence.NOW:
        out += " :|:"
    if sentence.truth != DEFAULT_TRUTH:
        out += " " + format_truth(sentence.truth)
    return out
