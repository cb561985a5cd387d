#!/usr/bin/env python3
"""Run the four-protocol lifetime comparison and print the milestone grid.

Uses configs/lifetime_experiment.json (50 nodes, rotating sources, 20%
drop-faults, 20 replicates per protocol) and writes per-cycle CSVs plus
summary.json under --out. Pass --workers to parallelize replicates.
"""

import argparse
import json
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), os.pardir, "src"))

from tcaco.cli import build_parser, load_experiment, run_experiment  # noqa: E402

CONFIG = os.path.join(os.path.dirname(__file__), os.pardir,
                      "configs", "lifetime_experiment.json")


def print_grid(summary_path: str) -> None:
    with open(summary_path, "r", encoding="utf-8") as fh:
        summary = json.load(fh)
    percentages = summary["milestone_percentages"]
    print(f"\nmedian rounds per dead-node percentage "
          f"(node count {summary['node_count']}):")
    print("protocol        " + "".join(f"{f'{p}%':>8}" for p in percentages))
    for protocol, block in summary["protocols"].items():
        meds = block["median_milestones"]
        cells = "".join(
            f"{meds[f'p{p}'] if meds[f'p{p}'] is not None else '-':>8}"
            for p in percentages
        )
        print(f"{protocol:<16}{cells}")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results/lifetime")
    parser.add_argument("--replicates", type=int)
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--max-cycles", type=int, dest="max_cycles")
    local = parser.parse_args()

    argv = ["--config", CONFIG, "--out", local.out, "--workers", str(local.workers)]
    if local.replicates is not None:
        argv += ["--replicates", str(local.replicates)]
    if local.max_cycles is not None:
        argv += ["--max-cycles", str(local.max_cycles)]
    spec = load_experiment(CONFIG, build_parser().parse_args(argv))
    code = run_experiment(spec)
    if code != 0:
        return code
    print_grid(os.path.join(local.out, "summary.json"))
    return 0


if __name__ == "__main__":
    sys.exit(main())
