from .buffers import CyclingQueue, Event, EventWindow
from .engine import (
    Anticipation,
    Babble,
    Candidate,
    Decision,
    Engine,
    EngineConfig,
    Execute,
    Induction,
    NoAction,
    UnknownOperation,
    induce,
)
from .memory import CapacityEviction, ConceptMemory, Hypothesis, StampOverlap

__all__ = [
    "Anticipation",
    "Babble",
    "Candidate",
    "CapacityEviction",
    "ConceptMemory",
    "CyclingQueue",
    "Decision",
    "Engine",
    "EngineConfig",
    "Event",
    "EventWindow",
    "Execute",
    "Hypothesis",
    "Induction",
    "NoAction",
    "StampOverlap",
    "UnknownOperation",
    "induce",
]
