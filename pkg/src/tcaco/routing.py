"""Routing decision core: level structure, candidate scoring, hop selection,
and pheromone bookkeeping.

Nodes are organized into levels by hop distance from the traffic source;
packets move strictly from level L to level L+1, with the sink always a
legal next hop for its direct neighbors. Candidate attractiveness combines
the trust-congestion metric, inverse distance, and pheromone concentration,
each raised to its configured exponent and normalized over the candidate
set.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

from .topology import DisconnectedNetwork, Topology


class NoValidCandidates(RuntimeError):
    """A forwarding decision was requested with an empty candidate set."""


@dataclass(frozen=True)
class LevelAssignment:
    """Hop distance of every node from the source; None marks unreachable."""

    levels: tuple[Optional[int], ...]  # indexed by node id, bs excluded
    bs_level: int                      # r: the sink's level on the delivery path

    def level(self, node_id: int) -> Optional[int]:
        return self.levels[node_id]


def assign_levels(topology: Topology, source: int,
                  alive: Optional[Sequence[bool]] = None) -> LevelAssignment:
    """Breadth-first hop counts from the source over transmitting nodes.

    Dead nodes neither relay nor get a level. The sink's level is one past
    its nearest labeled neighbor; if no neighbor of the sink is reachable
    the network is disconnected for this source.
    """
    n = topology.node_count
    bs = topology.bs_id
    if alive is None:
        alive = [True] * n
    if not alive[source]:
        raise DisconnectedNetwork(f"source {source} is not alive")
    levels: list[Optional[int]] = [None] * n
    levels[source] = 0
    frontier = [source]
    depth = 0
    while frontier:
        depth += 1
        nxt = []
        for i in frontier:
            for j in topology.adjacency[i]:
                if j == bs or not alive[j] or levels[j] is not None:
                    continue
                levels[j] = depth
                nxt.append(j)
        frontier = nxt
    bs_neighbor_levels = [
        levels[j] for j in topology.adjacency[bs]
        if j != bs and alive[j] and levels[j] is not None
    ]
    if not bs_neighbor_levels:
        raise DisconnectedNetwork("base station unreachable from the source")
    return LevelAssignment(levels=tuple(levels), bs_level=min(bs_neighbor_levels) + 1)


def trust_congestion_metric(t_ij: float, ci_j: float, alpha: float,
                            polarity: str = "inverted") -> float:
    """Blend trust and congestion into one [0,1] score.

    Inverted polarity (default) credits uncongested candidates so that a
    higher score always means a more attractive next hop; literal polarity
    feeds the congestion index in raw.
    """
    if polarity == "literal":
        return alpha * ci_j + (1.0 - alpha) * t_ij
    return alpha * (1.0 - ci_j) + (1.0 - alpha) * t_ij


def transition_probabilities(candidates: Sequence[tuple[int, float, float, float]],
                             beta1: float, beta2: float, beta3: float,
                             ) -> dict[int, float]:
    """Normalized selection probability per candidate.

    ``candidates`` holds (node_id, tc, distance, pheromone) tuples. When
    every raw weight degenerates to zero the distribution falls back to
    uniform so a decision can still be made.
    """
    if not candidates:
        raise NoValidCandidates("empty candidate set")
    weights = []
    for _, tc, d, tau in candidates:
        if d <= 0:
            raise ValueError("candidate distance must be positive")
        if tau <= 0:
            raise ValueError("candidate pheromone must be positive")
        weights.append((tc ** beta1) * ((1.0 / d) ** beta2) * (tau ** beta3))
    total = sum(weights)
    if total <= 0.0:
        uniform = 1.0 / len(candidates)
        return {cid: uniform for cid, _, _, _ in candidates}
    return {cand[0]: w / total for cand, w in zip(candidates, weights)}


def rank_by_probability(probabilities: dict[int, float]) -> list[int]:
    """Candidate ids by descending probability, ties broken by ascending id."""
    return [cid for cid, _ in sorted(probabilities.items(), key=lambda kv: (-kv[1], kv[0]))]


def select_next_hop(ranked: Sequence[int],
                    admissible: Callable[[int], bool],
                    mode: str = "deterministic_rank",
                    probabilities: Optional[dict[int, float]] = None,
                    rng=None) -> Optional[int]:
    """Pick the next hop, or None when every candidate is inadmissible.

    Rank mode walks the descending-probability list and returns the first
    candidate whose queue has room and whose battery clears the threshold.
    Roulette mode samples proportionally to probability, discarding
    inadmissible draws without replacement.
    """
    if mode == "deterministic_rank":
        for cid in ranked:
            if admissible(cid):
                return cid
        return None
    if mode != "stochastic_roulette":
        raise ValueError(f"unknown forwarding mode {mode!r}")
    if probabilities is None or rng is None:
        raise ValueError("roulette selection needs probabilities and an rng")
    pool = [cid for cid in ranked]
    weights = [probabilities[cid] for cid in pool]
    while pool:
        total = sum(weights)
        if total <= 0.0:
            idx = 0
        else:
            cum = []
            acc = 0.0
            for w in weights:
                acc += w
                cum.append(acc)
            idx = bisect.bisect_left(cum, rng.random() * total)
            idx = min(idx, len(pool) - 1)
        cid = pool.pop(idx)
        weights.pop(idx)
        if admissible(cid):
            return cid
    return None


def update_pheromone(tau_prev: float, rho: float, n_ij: int, d_ij: float,
                     deposit_scale: float = 1.0, tau_floor: float = 1e-6) -> float:
    """Evaporate one cycle and deposit in proportion to traffic per meter."""
    if d_ij <= 0:
        raise ValueError("link distance must be positive")
    tau = (1.0 - rho) * tau_prev + deposit_scale * (n_ij / d_ij)
    return max(tau_floor, tau)


class PheromoneTable:
    """Pheromone concentration per directed link, floored above zero."""

    def __init__(self, links: Iterable[tuple[int, int]], tau_init: float,
                 tau_floor: float = 1e-6):
        self.tau_floor = tau_floor
        self.values: dict[tuple[int, int], float] = {
            link: tau_init for link in links
        }

    def get(self, i: int, j: int) -> float:
        return self.values[(i, j)]

    def update_cycle(self, counts: dict[tuple[int, int], int],
                     distance: Callable[[int, int], float],
                     rho: float, deposit_scale: float = 1.0) -> None:
        """Apply evaporation to every link and deposits where traffic flowed."""
        decay = 1.0 - rho
        floor = self.tau_floor
        values = self.values
        for link, tau in values.items():
            n = counts.get(link, 0)
            if n:
                tau = decay * tau + deposit_scale * (n / distance(link[0], link[1]))
            else:
                tau = decay * tau
            values[link] = tau if tau > floor else floor
