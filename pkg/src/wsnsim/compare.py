"""Paired LEACH vs MONCH runs on shared deployments, with seed sweeps."""

from __future__ import annotations

import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .engine import SimulationResult, run_simulation
from .model import Protocol, SensorNode, SimConfig, deploy_nodes, make_rng, validate_config

ROW_FIELDS = (
    "seed",
    "leach_first_death",
    "monch_first_death",
    "leach_half_death",
    "monch_half_death",
    "leach_last_death",
    "monch_last_death",
    "common_round",
    "leach_packets_at_common",
    "monch_packets_at_common",
)


@dataclass
class PairedRun:
    seed: int
    leach: SimulationResult
    monch: SimulationResult


def deployment(config: SimConfig) -> list[SensorNode]:
    """The node layout both protocols see for ``config.seed``."""
    return deploy_nodes(config, make_rng(config.seed))


def run_pair(config: SimConfig, seed: int) -> PairedRun:
    base = config.with_overrides(seed=seed)
    validate_config(base)
    leach = run_simulation(base.with_overrides(protocol=Protocol.LEACH))
    monch = run_simulation(base.with_overrides(protocol=Protocol.MONCH))
    return PairedRun(seed, leach, monch)


def _run_pair_args(args):
    return run_pair(*args)


def sweep_seeds(base_seed: int, count: int) -> list[int]:
    return [(base_seed + i) % 2**64 for i in range(count)]


def run_pairs(config: SimConfig, seeds: list[int], jobs: int = 1) -> list[PairedRun]:
    """Run one pair per seed; instances share nothing, so ``jobs > 1`` fans out to processes."""
    if jobs <= 1 or len(seeds) <= 1:
        return [run_pair(config, s) for s in seeds]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_pair_args, [(config, s) for s in seeds]))


def final_common_round(a: SimulationResult, b: SimulationResult) -> int | None:
    """Last round index present in both per-round series."""
    n = min(len(a.per_round), len(b.per_round))
    return n - 1 if n else None


def pair_row(pair: PairedRun) -> dict:
    common = final_common_round(pair.leach, pair.monch)
    ls, ms = pair.leach.summary, pair.monch.summary
    return {
        "seed": pair.seed,
        "leach_first_death": ls.first_node_death_round,
        "monch_first_death": ms.first_node_death_round,
        "leach_half_death": ls.half_nodes_death_round,
        "monch_half_death": ms.half_nodes_death_round,
        "leach_last_death": ls.last_node_death_round,
        "monch_last_death": ms.last_node_death_round,
        "common_round": common,
        "leach_packets_at_common": None if common is None else pair.leach.per_round[common].cumulative_packets_to_bs,
        "monch_packets_at_common": None if common is None else pair.monch.per_round[common].cumulative_packets_to_bs,
    }


def median_row(rows: list[dict]) -> dict:
    """Per-column median over the rows that have a value (None if none do)."""
    out = {"seed": "median"}
    for key in ROW_FIELDS[1:]:
        values = [r[key] for r in rows if r[key] is not None]
        out[key] = statistics.median(values) if values else None
    return out
