"""Command-line front end: experiment orchestration and output emission.

An experiment file is one JSON object mixing simulation keys with the
experiment-level keys ``protocols``, ``replicates``, ``seeds``,
``base_seed``, ``out_dir``, and ``emit``. Command-line flags override file
values. Replicate seeds derive as base_seed + replicate index unless an
explicit seed list is given.

Exit codes: 0 success, 1 configuration error, 2 runtime error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

from .config import (ConfigError, ParseError, SimConfig, config_from_dict,
                     validate_config)
from .engine import PROTOCOLS, SimMetrics, Simulation
from .output import (per_cycle_csv_text, route_dump_text, summary_json_text,
                     trust_dump_text)

EMIT_CHOICES = ("per-cycle", "summary", "trust", "routes")
DEFAULT_EMIT = ("per-cycle", "summary")

_EXPERIMENT_KEYS = ("protocols", "replicates", "seeds", "base_seed", "out_dir", "emit")


@dataclass(frozen=True)
class ExperimentSpec:
    config: SimConfig
    protocols: tuple[str, ...]
    seeds: tuple[int, ...]
    out_dir: str
    emit: tuple[str, ...]
    workers: int = 1


def _default_out_dir() -> str:
    return os.environ.get("TCACO_OUT", "tcaco_out")


def load_experiment(path: str | None, args: argparse.Namespace | None = None,
                    ) -> ExperimentSpec:
    """Build an ExperimentSpec from a JSON file plus flag overrides."""
    raw: dict = {}
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
        except OSError as exc:
            raise ParseError(f"{path}: {exc.strerror}") from exc
        if not isinstance(raw, dict):
            raise ParseError(f"{path}: top-level value must be an object")

    exp = {key: raw.pop(key) for key in list(_EXPERIMENT_KEYS) if key in raw}
    cfg = config_from_dict(raw)

    protocols = exp.get("protocols", ["tc_aco"])
    replicates = exp.get("replicates", cfg.replicate_count)
    base_seed = exp.get("base_seed", cfg.rng_seed)
    seeds = exp.get("seeds")
    out_dir = exp.get("out_dir", _default_out_dir())
    emit = exp.get("emit", list(DEFAULT_EMIT))
    workers = 1

    if args is not None:
        if args.protocol:
            protocols = [p.strip() for p in args.protocol.split(",") if p.strip()]
        if args.replicates is not None:
            replicates = args.replicates
        if args.seed is not None:
            base_seed = args.seed
            seeds = None
        if args.max_cycles is not None:
            cfg = replace(cfg, max_cycles=args.max_cycles)
        if args.out is not None:
            out_dir = args.out
        if args.emit:
            emit = [e.strip() for e in args.emit.split(",") if e.strip()]
        workers = args.workers or 1

    cfg = validate_config(cfg)
    problems = []
    if not protocols:
        problems.append("protocol list is empty")
    for p in protocols:
        if p not in PROTOCOLS:
            problems.append(f"unknown protocol {p!r}")
    if replicates < 1:
        problems.append("replicates must be >= 1")
    if seeds is None:
        seeds = [base_seed + k for k in range(replicates)]
    if len(set(seeds)) != len(seeds):
        problems.append("seeds must be distinct")
    for e in emit:
        if e not in EMIT_CHOICES:
            problems.append(f"unknown emit flag {e!r}")
    if problems:
        raise ConfigError(problems)

    return ExperimentSpec(
        config=cfg,
        protocols=tuple(protocols),
        seeds=tuple(seeds),
        out_dir=out_dir,
        emit=tuple(emit),
        workers=workers,
    )


def _run_one(job: tuple[SimConfig, str, int, bool, bool]):
    """Worker entry: run one replicate, return rendered artifacts."""
    cfg, protocol, seed, want_trust, want_routes = job
    sim = Simulation(cfg, protocol=protocol, seed=seed, log_routes=want_routes)
    metrics = sim.run()
    trust_text = trust_dump_text(sim) if want_trust else None
    route_text = route_dump_text(sim) if want_routes else None
    return metrics, trust_text, route_text


def run_experiment(spec: ExperimentSpec) -> int:
    """Run every protocol x replicate, write outputs, return an exit code."""
    try:
        os.makedirs(spec.out_dir, exist_ok=True)
        probe = os.path.join(spec.out_dir, ".write_probe")
        with open(probe, "w", encoding="utf-8") as fh:
            fh.write("")
        os.remove(probe)
    except OSError as exc:
        print(f"error: output directory unusable: {exc}", file=sys.stderr)
        return 3

    want_trust = "trust" in spec.emit
    want_routes = "routes" in spec.emit
    jobs = [
        (spec.config, protocol, seed, want_trust, want_routes)
        for protocol in spec.protocols
        for seed in spec.seeds
    ]

    try:
        if spec.workers > 1:
            with ProcessPoolExecutor(max_workers=spec.workers) as pool:
                outcomes = list(pool.map(_run_one, jobs))
        else:
            outcomes = [_run_one(job) for job in jobs]
    except Exception as exc:  # noqa: BLE001 - report the first failed run
        job = jobs[0]
        print(f"error: run failed ({job[1]}, seed {job[2]}): {exc}", file=sys.stderr)
        return 2

    results: dict[str, list[SimMetrics]] = {p: [] for p in spec.protocols}
    try:
        for job, (metrics, trust_text, route_text) in zip(jobs, outcomes):
            _, protocol, seed, _, _ = job
            rep_idx = spec.seeds.index(seed)
            results[protocol].append(metrics)
            stem = os.path.join(spec.out_dir, f"{protocol}_rep{rep_idx}")
            if "per-cycle" in spec.emit:
                with open(f"{stem}.csv", "w", encoding="utf-8", newline="") as fh:
                    fh.write(per_cycle_csv_text(metrics))
            if trust_text is not None:
                with open(f"{stem}_trust.csv", "w", encoding="utf-8", newline="") as fh:
                    fh.write(trust_text)
            if route_text is not None:
                with open(f"{stem}_routes.txt", "w", encoding="utf-8", newline="") as fh:
                    fh.write(route_text)
        if "summary" in spec.emit:
            path = os.path.join(spec.out_dir, "summary.json")
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(summary_json_text(results))
    except OSError as exc:
        print(f"error: writing outputs failed: {exc}", file=sys.stderr)
        return 3
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tcaco",
        description="Trust and congestion aware ant-routing lifetime simulator.",
    )
    parser.add_argument("--config", metavar="PATH", help="experiment JSON file")
    parser.add_argument("--protocol", metavar="NAME[,NAME...]",
                        help=f"protocols to run (choices: {', '.join(PROTOCOLS)})")
    parser.add_argument("--replicates", type=int, metavar="N")
    parser.add_argument("--seed", type=int, metavar="N", help="base seed")
    parser.add_argument("--max-cycles", type=int, metavar="N", dest="max_cycles")
    parser.add_argument("--out", metavar="DIR",
                        help="output directory (default: $TCACO_OUT or ./tcaco_out)")
    parser.add_argument("--emit", metavar="LIST",
                        help=f"comma list from: {', '.join(EMIT_CHOICES)}")
    parser.add_argument("--workers", type=int, default=1, metavar="N",
                        help="parallel replicate workers (default 1)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = load_experiment(args.config, args)
    except (ParseError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        return run_experiment(spec)
    except Exception as exc:  # noqa: BLE001
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
