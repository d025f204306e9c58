"""Per-round metrics, lifetime summaries, CSV/JSON export and plots."""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import TYPE_CHECKING, Sequence

if TYPE_CHECKING:
    from .engine import SimulationResult

CSV_HEADER = ("round", "alive", "residual_energy_j", "packets_to_bs", "heads")


@dataclass(frozen=True)
class RoundMetrics:
    round: int
    alive_count: int
    total_residual_energy: float
    cumulative_packets_to_bs: int
    head_count: int


@dataclass(frozen=True)
class Summary:
    first_node_death_round: int | None
    half_nodes_death_round: int | None
    last_node_death_round: int | None
    total_packets_to_bs: int
    rounds_executed: int


def summarize_series(per_round: Sequence[RoundMetrics], node_count: int) -> Summary:
    """Lifetime statistics from the alive-count series.

    First death: first round with alive < N. Half: alive <= floor(N/2).
    Last: alive == 0. A crossing that never happens is None.
    """
    first = half = last = None
    for m in per_round:
        if first is None and m.alive_count < node_count:
            first = m.round
        if half is None and m.alive_count <= node_count // 2:
            half = m.round
        if last is None and m.alive_count == 0:
            last = m.round
            break
    packets = per_round[-1].cumulative_packets_to_bs if per_round else 0
    return Summary(first, half, last, packets, len(per_round))


def summarize(result: SimulationResult) -> Summary:
    return summarize_series(result.per_round, result.config_echo.node_count)


def _energy(x: float) -> str:
    return f"{x:.16e}"


def export_csv(result: SimulationResult, path: str | Path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for m in result.per_round:
            writer.writerow(
                [m.round, m.alive_count, _energy(m.total_residual_energy), m.cumulative_packets_to_bs, m.head_count]
            )
    return path


def read_csv(path: str | Path) -> list[RoundMetrics]:
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != CSV_HEADER:
            raise ValueError(f"unexpected CSV header {header}")
        return [RoundMetrics(int(r), int(a), float(e), int(p), int(h)) for r, a, e, p, h in reader]


def summary_dict(result: SimulationResult) -> dict:
    return {**asdict(result.summary), "seed": result.seed}


def write_summary_json(result: SimulationResult, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(summary_dict(result), indent=2) + "\n")
    return path


PLOT_FILES = {
    "alive": ("nodes_alive.svg", "Nodes alive", "alive nodes"),
    "energy": ("residual_energy.svg", "Residual energy", "residual energy (J)"),
    "packets": ("packets_to_bs.svg", "Packets sent to base station", "cumulative packets"),
}


def _series(result: SimulationResult, kind: str) -> tuple[list[int], list[float]]:
    rounds = [m.round for m in result.per_round]
    if kind == "alive":
        ys = [m.alive_count for m in result.per_round]
    elif kind == "energy":
        ys = [m.total_residual_energy for m in result.per_round]
    else:
        ys = [m.cumulative_packets_to_bs for m in result.per_round]
    return rounds, ys


def _plot_one(results, labels, kind: str, title: str, ylabel: str, path: Path) -> None:
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 4.5))
    for result, label in zip(results, labels):
        xs, ys = _series(result, kind)
        ax.plot(xs, ys, label=label, linewidth=1.2)
    ax.set_title(title)
    ax.set_xlabel("round")
    ax.set_ylabel(ylabel)
    ax.grid(alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def render_plots(results: Sequence[SimulationResult], labels: Sequence[str], out_dir: str | Path) -> list[Path]:
    """Write the three line charts as SVG plus ``plot_data.csv`` with the raw series."""
    import matplotlib

    matplotlib.use("Agg")

    if not results:
        raise ValueError("render_plots needs at least one result")
    if len(labels) != len(results):
        raise ValueError("one label per result is required")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    written = []
    for kind, (name, title, ylabel) in PLOT_FILES.items():
        path = out_dir / name
        # svg element ids are salted hashes; a fixed salt keeps files reproducible
        with matplotlib.rc_context({"svg.hashsalt": "wsnsim"}):
            _plot_one(results, labels, kind, title, ylabel, path)
        written.append(path)

    data_path = out_dir / "plot_data.csv"
    with data_path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("label", *CSV_HEADER))
        for result, label in zip(results, labels):
            for m in result.per_round:
                writer.writerow(
                    [label, m.round, m.alive_count, _energy(m.total_residual_energy), m.cumulative_packets_to_bs, m.head_count]
                )
    written.append(data_path)
    return written
