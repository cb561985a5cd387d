"""Machine-readable result emission: per-cycle CSV, milestone summary JSON,
trust table dumps, and route dumps.

The CSV column order is frozen; counters are cumulative so that every row
satisfies generated = delivered + drops + in-flight. Floats are written with
repr for byte-stable round-tripping.
"""

from __future__ import annotations

import json
from typing import Optional, Sequence

from .engine import MILESTONE_PERCENTAGES, SimMetrics, Simulation
from .trust import (TRUSTWORTHY, UNTRUSTED, compute_trust, latency_score,
                    packet_transmission_ratio)

CSV_HEADER = ("cycle,generated,delivered,dropped_overflow,dropped_timeout,"
              "dropped_malicious,dead_nodes,total_energy_j")


def per_cycle_csv_text(metrics: SimMetrics) -> str:
    """Render the frozen-format per-cycle CSV with cumulative counters."""
    lines = [CSV_HEADER]
    gen = delivered = d_over = d_time = d_mal = 0
    for row in metrics.cycles:
        gen += row.generated
        delivered += row.delivered
        d_over += row.dropped_overflow
        d_time += row.dropped_timeout
        d_mal += row.dropped_malicious
        lines.append(
            f"{row.cycle},{gen},{delivered},{d_over},{d_time},{d_mal},"
            f"{row.dead_nodes},{row.total_energy_j!r}"
        )
    return "\n".join(lines) + "\n"


def lower_median(values: Sequence) -> Optional[float]:
    """Exact order statistic: middle element, or the lower of the two middles.

    None values sort last (treated as never-reached); a None median is
    returned as None.
    """
    if not values:
        return None
    ordered = sorted(values, key=lambda v: (1, 0.0) if v is None else (0, v))
    return ordered[(len(ordered) - 1) // 2]


def milestone_key(pct: int) -> str:
    return f"p{pct}"


def summary_payload(results: dict[str, list[SimMetrics]]) -> dict:
    """Milestone grid per protocol and replicate, with replicate medians."""
    protocols = {}
    node_count = None
    for protocol, runs in results.items():
        replicates = []
        for m in runs:
            node_count = m.node_count
            replicates.append({
                "seed": m.seed,
                "cycles_run": len(m.cycles),
                "termination": m.termination,
                "milestones": {
                    milestone_key(p): m.milestones.get(p) for p in MILESTONE_PERCENTAGES
                },
            })
        medians = {
            milestone_key(p): lower_median([m.milestones.get(p) for m in runs])
            for p in MILESTONE_PERCENTAGES
        }
        protocols[protocol] = {
            "replicates": replicates,
            "median_milestones": medians,
        }
    return {
        "node_count": node_count,
        "milestone_percentages": list(MILESTONE_PERCENTAGES),
        "protocols": protocols,
    }


def summary_json_text(results: dict[str, list[SimMetrics]]) -> str:
    return json.dumps(summary_payload(results), indent=2, sort_keys=True) + "\n"


def trust_dump_text(sim: Simulation) -> str:
    """Per-link trust components CSV for debugging: i,j,ne,ptr,pl,t_ij,classification."""
    cfg = sim.cfg
    lines = ["i,j,ne,ptr,pl,t_ij,classification"]
    levels = sim.levels.levels if sim.levels is not None else (None,) * cfg.node_count
    bs_level = sim.levels.bs_level if sim.levels is not None else None
    for i, j in sim.links:
        e_i = sim.nodes[i].energy
        e_j = cfg.initial_energy if j == sim.bs else sim.nodes[j].energy
        ne = ((e_i + e_j) / 2.0) / cfg.initial_energy
        ptr = packet_transmission_ratio(sim.stats, i, j)
        lvl_j = bs_level if j == sim.bs else levels[j]
        peers = [
            k for k in sim.topology.adjacency[i]
            if k != j and (bs_level if k == sim.bs else levels[k]) == lvl_j
        ]
        pl = latency_score(sim.stats, i, j, peers, cfg.latency_polarity,
                           reference=float(cfg.wc_max))
        t_ij = compute_trust(ne, ptr, pl, cfg.a1, cfg.a2, cfg.a3)
        cls = TRUSTWORTHY if t_ij > cfg.trust_threshold else UNTRUSTED
        lines.append(f"{i},{j},{ne!r},{ptr!r},{pl!r},{t_ij!r},{cls}")
    return "\n".join(lines) + "\n"


def route_dump_text(sim: Simulation) -> str:
    """One line per packet that reached a terminal fate: cycle, id, fate, trail."""
    lines = []
    for cycle, packet in sim.route_log:
        trail = ">".join(str(h) for h in packet.hop_trail)
        lines.append(f"{cycle}\t{packet.id}\t{packet.fate}\t{trail}")
    return "\n".join(lines) + ("\n" if lines else "")
