"""Command line entry point: ``wsnsim run`` and ``wsnsim compare``."""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

from . import compare
from .engine import run_simulation
from .metrics import export_csv, render_plots, write_summary_json
from .model import ConfigError, SimConfig, load_config, validate_config

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2

log = logging.getLogger("wsnsim")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; 2 is reserved for runtime/I-O errors here
    def error(self, message):
        raise UsageError(message)


@dataclass(frozen=True)
class RunSpec:
    config_path: Path
    seed: int | None = None
    seed_count: int = 1
    out_dir: Path = Path("out")
    max_rounds: int | None = None
    jobs: int = 1

    def __post_init__(self):
        if self.seed_count < 1:
            raise UsageError("--seeds must be at least 1")


def _load(spec: RunSpec) -> SimConfig:
    if not spec.config_path.is_file():
        raise ConfigError(f"config file not found: {spec.config_path}")
    config = load_config(spec.config_path)
    if spec.seed is not None:
        config = config.with_overrides(seed=spec.seed)
    if spec.max_rounds is not None:
        config = config.with_overrides(max_rounds=spec.max_rounds)
    return validate_config(config)


def _run_dir(spec: RunSpec, seed: int) -> Path:
    return spec.out_dir if spec.seed_count == 1 else spec.out_dir / f"seed_{seed}"


def cmd_run(spec: RunSpec) -> int:
    config = _load(spec)
    for seed in compare.sweep_seeds(config.seed, spec.seed_count):
        result = run_simulation(config.with_overrides(seed=seed))
        out = _run_dir(spec, seed)
        out.mkdir(parents=True, exist_ok=True)
        export_csv(result, out / "metrics.csv")
        write_summary_json(result, out / "summary.json")
        render_plots([result], [config.protocol.value.upper()], out)
        s = result.summary
        print(
            f"seed={seed} protocol={config.protocol.value} rounds={s.rounds_executed} "
            f"FND={s.first_node_death_round} HND={s.half_nodes_death_round} "
            f"LND={s.last_node_death_round} packets={s.total_packets_to_bs}"
        )
    return EXIT_OK


def _write_deployment(config: SimConfig, path: Path) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("id", "x", "y"))
        for n in compare.deployment(config):
            writer.writerow((n.id, f"{n.position.x:.16e}", f"{n.position.y:.16e}"))


def _fmt(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return f"{value:g}"
    return str(value)


def cmd_compare(spec: RunSpec) -> int:
    config = _load(spec)
    seeds = compare.sweep_seeds(config.seed, spec.seed_count)
    pairs = compare.run_pairs(config, seeds, jobs=spec.jobs)

    rows = []
    for pair in pairs:
        out = spec.out_dir / f"seed_{pair.seed}"
        out.mkdir(parents=True, exist_ok=True)
        _write_deployment(config.with_overrides(seed=pair.seed), out / "deployment.csv")
        for name, result in (("leach", pair.leach), ("monch", pair.monch)):
            export_csv(result, out / f"{name}.csv")
            write_summary_json(result, out / f"{name}_summary.json")
        render_plots([pair.leach, pair.monch], ["LEACH", "MONCH"], out)
        rows.append(compare.pair_row(pair))
    if len(rows) > 1:
        rows.append(compare.median_row(rows))

    spec.out_dir.mkdir(parents=True, exist_ok=True)
    with (spec.out_dir / "comparison.csv").open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=compare.ROW_FIELDS, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: "" if v is None else v for k, v in row.items()})

    widths = [max(len(f), 8) for f in compare.ROW_FIELDS]
    print("  ".join(f.rjust(w) for f, w in zip(compare.ROW_FIELDS, widths)))
    for row in rows:
        print("  ".join(_fmt(row[f]).rjust(w) for f, w in zip(compare.ROW_FIELDS, widths)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wsnsim", description="LEACH / MONCH wireless sensor network simulator")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, help_text in (("run", "simulate the protocol named in the config"), ("compare", "run LEACH and MONCH on shared deployments")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("config", type=Path, help="YAML key/value config file")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--seeds", type=int, default=1, help="number of consecutive seeds to sweep")
        p.add_argument("--out", type=Path, default=Path("out"), help="output directory")
        p.add_argument("--max-rounds", type=int, help="override max_rounds")
        p.add_argument("--jobs", type=int, default=1, help="parallel processes for seed sweeps")
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        spec = RunSpec(
            config_path=args.config,
            seed=args.seed,
            seed_count=args.seeds,
            out_dir=args.out,
            max_rounds=args.max_rounds,
            jobs=args.jobs,
        )
    except UsageError as exc:
        print(f"wsnsim: usage error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    command = cmd_run if args.command == "run" else cmd_compare
    try:
        return command(spec)
    except ConfigError as exc:
        print(f"wsnsim: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"wsnsim: I/O error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
