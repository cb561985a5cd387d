"""Per-link interaction evidence and the trust value derived from it.

Trust of node i upon node j blends three observables, each normalized to
[0,1]: the average remaining energy of the pair, the acknowledgement ratio
of the link, and a latency score comparing j against i's other candidates.
The blend is a weighted mean, so scaling all weights together changes
nothing.
"""

from __future__ import annotations

import math
from collections import defaultdict
from typing import Iterable

TRUSTWORTHY = "trustworthy"
UNTRUSTED = "untrusted"
TRUSTED_NODE = "trusted"
MALICIOUS_NODE = "malicious"


class ZeroWeights(ValueError):
    """All three trust weights are zero; the weighted mean is undefined."""


class LinkStats:
    """Evidence accumulated for one directed link."""

    __slots__ = ("packets_sent", "acks_received", "latency_samples", "latency_sum")

    def __init__(self):
        self.packets_sent = 0
        self.acks_received = 0
        self.latency_samples: list[float] = []
        self.latency_sum = 0.0

    def add_latency(self, value: float) -> None:
        if value < 0:
            raise ValueError("latency samples must be non-negative")
        self.latency_samples.append(value)
        self.latency_sum += value

    def mean_latency(self) -> float | None:
        if not self.latency_samples:
            return None
        return self.latency_sum / len(self.latency_samples)


class TrustStats:
    """All per-link evidence for one simulation instance (single writer)."""

    def __init__(self):
        self._links: dict[tuple[int, int], LinkStats] = defaultdict(LinkStats)

    def link(self, i: int, j: int) -> LinkStats:
        return self._links[(i, j)]

    def record_send(self, i: int, j: int) -> None:
        s = self._links[(i, j)]
        s.packets_sent += 1

    def record_ack(self, i: int, j: int) -> None:
        s = self._links[(i, j)]
        s.acks_received += 1
        if s.acks_received > s.packets_sent:
            raise RuntimeError(f"more acks than sends on link {i}->{j}")

    def record_latency(self, i: int, j: int, value: float) -> None:
        self._links[(i, j)].add_latency(value)


def packet_transmission_ratio(stats: TrustStats, i: int, j: int) -> float:
    """Acknowledged fraction of packets sent on i->j; 1.0 before any send."""
    s = stats.link(i, j)
    if s.packets_sent == 0:
        return 1.0
    return s.acks_received / s.packets_sent


def latency_score(stats: TrustStats, i: int, j: int, peers: Iterable[int],
                  polarity: str = "normalized",
                  reference: float | None = None) -> float:
    """Latency of j relative to the mean latency of i's other candidates.

    Normalized polarity rewards nodes faster than their peers, capped at 1;
    literal polarity returns the raw slow/fast ratio clamped to [0,1].
    Without samples for j there is no evidence and the score stays at the
    neutral 1.0. When j has samples but no peer does, ``reference`` (a
    nominal comparison latency, e.g. the queue timeout horizon) stands in
    for the peer mean; with no reference the score is again neutral.
    An unbounded mean latency (transfers that never completed) scores 0
    outright: no peer comparison can redeem it.
    """
    lat_j = stats.link(i, j).mean_latency()
    if lat_j is None:
        return 1.0
    if polarity != "literal" and lat_j == math.inf:
        return 0.0
    peer_means = [m for m in (stats.link(i, k).mean_latency() for k in peers if k != j)
                  if m is not None]
    if peer_means:
        mean_others = sum(peer_means) / len(peer_means)
    elif reference is not None:
        mean_others = reference
    else:
        return 1.0
    if polarity == "literal":
        if lat_j == math.inf or mean_others == 0.0:
            return 1.0
        return min(1.0, max(0.0, lat_j / mean_others))
    if lat_j == 0.0:
        return 1.0
    return min(1.0, mean_others / lat_j)


def energy_metric(e_i: float, e_j: float, e_init: float) -> float:
    """Average remaining energy of the pair, as a fraction of the initial charge."""
    if e_init <= 0:
        raise ValueError("initial energy must be positive")
    return ((e_i + e_j) / 2.0) / e_init


def compute_trust(ne: float, ptr: float, pl: float,
                  a1: float, a2: float, a3: float) -> float:
    """Weighted mean of the three trust metrics."""
    total = a1 + a2 + a3
    if total == 0:
        raise ZeroWeights("a1 + a2 + a3 must be positive")
    return (a1 * ne + a2 * ptr + a3 * pl) / total


def classify(trust_table: dict[tuple[int, int], float], t_th: float,
             nodes: Iterable[int] | None = None):
    """Split links into trustworthy/untrusted and nodes into trusted/malicious.

    A link is trustworthy only strictly above the threshold; a node with no
    trustworthy incoming link is malicious and must not be routed through.
    """
    link_class = {
        link: (TRUSTWORTHY if value > t_th else UNTRUSTED)
        for link, value in trust_table.items()
    }
    if nodes is None:
        seen: set[int] = set()
        for i, j in trust_table:
            seen.add(i)
            seen.add(j)
        nodes = sorted(seen)
    has_trustworthy_in: set[int] = {
        j for (i, j), cls in link_class.items() if cls == TRUSTWORTHY
    }
    node_class = {
        n: (TRUSTED_NODE if n in has_trustworthy_in else MALICIOUS_NODE)
        for n in nodes
    }
    return link_class, node_class
