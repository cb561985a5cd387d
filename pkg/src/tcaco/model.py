"""Core domain objects: sensor nodes and routable packets."""

from __future__ import annotations

from typing import Optional


# Terminal packet fates; a packet leaves IN_FLIGHT exactly once.
IN_FLIGHT = "in_flight"
DELIVERED = "delivered"
DROPPED_OVERFLOW = "dropped_overflow"
DROPPED_TIMEOUT = "dropped_timeout"
DROPPED_MALICIOUS = "dropped_malicious"

TERMINAL_FATES = (DELIVERED, DROPPED_OVERFLOW, DROPPED_TIMEOUT, DROPPED_MALICIOUS)


class Packet:
    """A routable data unit: origin, hop trail, wait counter, and fate.

    ``fake`` marks traffic that must never earn delivery credit (flood
    injections and duplicate clones); it still loads queues and radios.
    """

    __slots__ = ("id", "origin", "hop_trail", "wait_cycles", "hold_cycles",
                 "created_cycle", "fate", "fake", "transfer_failures")

    def __init__(self, pid: int, origin: int, created_cycle: int, fake: bool = False):
        self.id = pid
        self.origin = origin
        self.hop_trail: list[int] = [origin]
        self.wait_cycles = 0
        self.hold_cycles = 0
        self.created_cycle = created_cycle
        self.fate = IN_FLIGHT
        self.fake = fake
        self.transfer_failures = 0

    @property
    def current_holder(self) -> int:
        return self.hop_trail[-1]

    def record_hop(self, node_id: int) -> None:
        self.hop_trail.append(node_id)
        self.wait_cycles = 0

    def resolve(self, fate: str) -> None:
        """Move to a terminal fate; transitions are monotone (exactly one)."""
        if self.fate != IN_FLIGHT:
            raise RuntimeError(f"packet {self.id} already resolved to {self.fate}")
        if fate not in TERMINAL_FATES:
            raise ValueError(f"not a terminal fate: {fate}")
        self.fate = fate

    def __repr__(self) -> str:
        return (f"Packet(id={self.id}, origin={self.origin}, "
                f"holder={self.current_holder}, fate={self.fate})")


class NodeState:
    """Mutable per-node simulation state.

    ``alive`` means the node holds at least the transmission threshold of
    energy. A node below threshold no longer transmits but may keep
    receiving until its battery reaches zero.
    """

    __slots__ = ("id", "position", "energy", "energy_threshold", "is_malicious",
                 "behavior")

    def __init__(self, node_id: int, position: tuple[float, float],
                 energy: float, energy_threshold: float,
                 behavior: Optional[object] = None):
        self.id = node_id
        self.position = position
        self.energy = energy
        self.energy_threshold = energy_threshold
        self.behavior = behavior
        self.is_malicious = behavior is not None and getattr(behavior, "behavior", "honest") != "honest"

    @property
    def alive(self) -> bool:
        return self.energy >= self.energy_threshold
