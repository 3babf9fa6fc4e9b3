"""Bounded event buffers: the FIFO sequencer window and the cycling queue."""
from __future__ import annotations

import bisect
import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Generic, Iterator, TypeVar

from ..narsese import Operation, Term
from ..truth import TruthValue

T = TypeVar("T")


@dataclass(frozen=True)
class Event:
    """A judgment event as held by the window."""

    id: int
    term: Term
    truth: TruthValue
    time: int

    @property
    def is_operation(self) -> bool:
        return isinstance(self.term, Operation)


class EventWindow:
    """Sliding window over the most recent events, oldest evicted first."""

    def __init__(self, capacity: int = 20):
        if capacity < 1:
            raise ValueError("capacity must be positive")
        self.capacity = capacity
        self._events: deque[Event] = deque(maxlen=capacity)

    def push(self, event: Event) -> None:
        if self._events and event.time < self._events[-1].time:
            raise ValueError("events must arrive in time order")
        self._events.append(event)

    def __len__(self) -> int:
        return len(self._events)

    def __iter__(self) -> Iterator[Event]:
        return iter(self._events)

    def __reversed__(self) -> Iterator[Event]:
        return reversed(self._events)

    def recent(self, now: int, horizon: int) -> list[Event]:
        """Events no older than ``horizon`` steps, in arrival order."""
        return [e for e in self._events if now - e.time <= horizon]

    def latest_operation(self, before: Event, horizon: int) -> Event | None:
        for e in reversed(self._events):
            if e.id >= before.id:
                continue
            if before.time - e.time > horizon:
                return None
            if e.is_operation:
                return e
        return None


@dataclass(order=True)
class _Entry(Generic[T]):
    key: float
    order: int
    item: T = field(compare=False)


class CyclingQueue(Generic[T]):
    """Bounded priority queue with age decay.

    Priorities decay by ``decay`` per time step since insertion. Because
    every entry decays at the same rate the relative order never changes,
    so entries are ranked once, by log-priority shifted to a common epoch.
    """

    def __init__(self, capacity: int = 512, decay: float = 0.9):
        if capacity < 1:
            raise ValueError("capacity must be positive")
        self.capacity = capacity
        self.decay = decay
        self._entries: list[_Entry[T]] = []  # ascending key
        self._counter = itertools.count()
        self.evicted = 0

    def _key(self, priority: float, time: int) -> float:
        if priority <= 0:
            return -math.inf
        return math.log(priority) - time * math.log(self.decay)

    def push(self, item: T, priority: float, time: int) -> T | None:
        """Insert ``item``; returns whatever was evicted, if anything."""
        # earlier insertions win ties (FIFO among equals), so negate the counter
        entry = _Entry(self._key(priority, time), -next(self._counter), item)
        bisect.insort(self._entries, entry)
        if len(self._entries) > self.capacity:
            self.evicted += 1
            return self._entries.pop(0).item
        return None

    def pop(self) -> T:
        if not self._entries:
            raise IndexError("pop from empty queue")
        return self._entries.pop().item

    def priority(self, index: int, now: int) -> float:
        """Current priority of the entry ranked ``index`` (0 = highest)."""
        key = self._entries[-1 - index].key
        return math.exp(key + now * math.log(self.decay))

    def __len__(self) -> int:
        return len(self._entries)

    def __bool__(self) -> bool:
        return bool(self._entries)
