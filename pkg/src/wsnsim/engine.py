"""Round loop shared by LEACH and MONCH."""

from __future__ import annotations

import copy
import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import leach, monch
from .energy import EnergyLedger, aggregation_energy, rx_energy, tx_energy
from .leach import ClusterAssignment
from .metrics import RoundMetrics, Summary, summarize_series
from .model import Protocol, SensorNode, SimConfig, deploy_nodes, make_rng, validate_config

log = logging.getLogger(__name__)


class PopulationExtinct(RuntimeError):
    """A round was requested with no alive node left."""


@dataclass
class SimulationState:
    nodes: list[SensorNode]
    ledger: EnergyLedger
    rng: np.random.Generator
    round: int = 0
    cumulative_packets_to_bs: int = 0
    # node positions never change, so distances are computed once
    xy: np.ndarray = field(init=False, repr=False)
    bs_dist: np.ndarray = field(init=False, repr=False)
    bs_xy: np.ndarray = field(init=False, repr=False)

    @classmethod
    def initial(cls, config: SimConfig, nodes: list[SensorNode], rng: np.random.Generator) -> SimulationState:
        state = cls(nodes=nodes, ledger=EnergyLedger(len(nodes)), rng=rng)
        state.xy = np.array([[n.position.x, n.position.y] for n in nodes], dtype=float).reshape(-1, 2)
        bs = config.field.bs_position
        state.bs_xy = np.array([bs.x, bs.y])
        state.bs_dist = np.hypot(state.xy[:, 0] - bs.x, state.xy[:, 1] - bs.y)
        return state

    def alive_nodes(self) -> list[SensorNode]:
        return [n for n in self.nodes if n.alive]

    def total_residual(self) -> float:
        return float(sum(n.residual_energy for n in self.nodes))


@dataclass
class SimulationResult:
    per_round: list[RoundMetrics]
    summary: Summary
    config_echo: SimConfig
    seed: int


@dataclass(frozen=True)
class FrameDelta:
    consumed: float
    packets_to_bs: int
    deaths: tuple[int, ...]


class _FramePlan:
    """Per-round cost vectors; every frame of a round reuses them."""

    def __init__(self, state: SimulationState, assignment: ClusterAssignment, config: SimConfig):
        radio = config.radio
        k = radio.node_packet_len

        members = np.array(sorted(assignment.membership), dtype=np.int64)
        member_head = np.array([assignment.membership[m] for m in members], dtype=np.int64)
        unassigned = np.array(sorted(assignment.unassigned), dtype=np.int64)
        self.heads = np.array(sorted(assignment.heads), dtype=np.int64)

        d_member = np.hypot(*(state.xy[members] - state.xy[member_head]).T) if members.size else np.zeros(0)

        self.senders = np.concatenate([members, unassigned])
        self.sender_cost = np.concatenate(
            [
                np.atleast_1d(tx_energy(radio, k, d_member)),
                np.atleast_1d(tx_energy(radio, k, state.bs_dist[unassigned])),
            ]
        )
        self.sender_is_direct = np.concatenate([np.zeros(members.size, bool), np.ones(unassigned.size, bool)])
        self.sender_slot = np.concatenate(
            [np.searchsorted(self.heads, member_head), np.full(unassigned.size, -1, dtype=np.int64)]
        )

        self.rx_per_packet = rx_energy(radio, k)
        self.agg_per_packet = aggregation_energy(radio, k)
        self.head_tx = np.atleast_1d(tx_energy(radio, radio.packet_len, state.bs_dist[self.heads]))

        # frame cost when every member reports; used by the unchecked path
        n_full = np.bincount(self.sender_slot[self.sender_slot >= 0], minlength=self.heads.size)
        self.head_full_cost = n_full * self.rx_per_packet + (n_full + 1) * self.agg_per_packet + self.head_tx
        self.direct_count = int(unassigned.size)

    def affordable(self, energy: np.ndarray, alive: np.ndarray, frames: int) -> bool:
        """True if all participants are alive and can pay ``frames`` full frames."""
        margin = frames * (1 + 1e-9)
        return bool(
            alive[self.senders].all()
            and alive[self.heads].all()
            and (energy[self.senders] > margin * self.sender_cost).all()
            and (energy[self.heads] > margin * self.head_full_cost).all()
        )

    def charge_unchecked(self, energy: np.ndarray, ledger: EnergyLedger) -> int:
        """One frame with no possible death; same arithmetic as _run_frame."""
        energy[self.senders] -= self.sender_cost
        ledger.record(self.senders, self.sender_cost)
        if self.heads.size:
            energy[self.heads] -= self.head_full_cost
            ledger.record(self.heads, self.head_full_cost)
        return self.direct_count + int(self.heads.size)


def _run_frame(energy: np.ndarray, alive: np.ndarray, plan: _FramePlan, ledger: EnergyLedger) -> tuple[float, int]:
    """One data frame on the energy/alive arrays. Returns (consumed, packets)."""
    consumed = 0.0
    packets = 0

    # members and headless nodes transmit
    active = alive[plan.senders]
    s = plan.senders[active]
    cost = plan.sender_cost[active]
    e = energy[s]
    drawn = np.minimum(cost, e)
    energy[s] = e - drawn
    alive[s] = energy[s] > 0
    consumed += ledger.record(s, drawn, float((cost - drawn).sum()))
    packets += int(np.count_nonzero(plan.sender_is_direct[active]))

    if plan.heads.size:
        slots = plan.sender_slot[active]
        received = np.bincount(slots[slots >= 0], minlength=plan.heads.size)
        live = alive[plan.heads]
        h = plan.heads[live]
        n = received[live]
        e = energy[h]
        # a head pays per received packet, then aggregation, then the BS uplink,
        # and dies at the first charge that empties it
        rx_total = n * plan.rx_per_packet
        before_tx = rx_total + (n + 1) * plan.agg_per_packet
        total = before_tx + plan.head_tx[live]
        sends = e > before_tx
        drawn = np.minimum(total, e)
        with np.errstate(divide="ignore", invalid="ignore"):
            fatal_rx = np.ceil(e / plan.rx_per_packet) * plan.rx_per_packet
        attempted = np.where(sends, total, np.where(e <= rx_total, fatal_rx, before_tx))
        energy[h] = e - drawn
        alive[h] = energy[h] > 0
        consumed += ledger.record(h, drawn, float(np.maximum(attempted - e, 0.0).sum()))
        packets += int(np.count_nonzero(sends))

    return consumed, packets


def _load_arrays(state: SimulationState) -> tuple[np.ndarray, np.ndarray]:
    energy = np.array([n.residual_energy for n in state.nodes], dtype=float)
    alive = np.array([n.alive for n in state.nodes], dtype=bool)
    return energy, alive


def _store_arrays(state: SimulationState, energy: np.ndarray, alive: np.ndarray) -> list[int]:
    died = []
    for node, e, a in zip(state.nodes, energy.tolist(), alive.tolist()):
        if node.alive and not a:
            died.append(node.id)
            e = 0.0
        node.residual_energy = e
        node.alive = a
    return died


def steady_state_frame(state: SimulationState, assignment: ClusterAssignment, config: SimConfig) -> FrameDelta:
    """Run a single data frame for ``assignment`` and apply it to ``state``."""
    plan = _FramePlan(state, assignment, config)
    energy, alive = _load_arrays(state)
    consumed, packets = _run_frame(energy, alive, plan, state.ledger)
    deaths = _store_arrays(state, energy, alive)
    state.cumulative_packets_to_bs += packets
    return FrameDelta(consumed, packets, tuple(deaths))


def form_round(state: SimulationState, config: SimConfig) -> ClusterAssignment:
    """Setup phase: build this round's clusters from the alive nodes."""
    alive = state.alive_nodes()
    for node in state.nodes:
        node.is_ch_this_round = False
    if config.protocol is Protocol.LEACH:
        heads = leach.elect_heads(alive, config.ch_probability, state.round, state.rng)
        # with no heads every node becomes unassigned and reports to the BS
        return leach.join_nearest(alive, heads)
    plan = monch.plan_round(alive, config.field, config.radio, config.pt)
    by_id = {n.id: n for n in alive}
    for h in plan.head_order:
        by_id[h].is_ch_this_round = True
    return plan.assignment


def run_round(state: SimulationState, config: SimConfig, assignment: ClusterAssignment | None = None) -> RoundMetrics:
    """Formation plus ``frames_per_round`` data frames.

    ``assignment`` replaces the protocol's own formation when given.
    """
    if not any(n.alive for n in state.nodes):
        raise PopulationExtinct(f"no alive node at round {state.round}")
    if assignment is None:
        assignment = form_round(state, config)

    plan = _FramePlan(state, assignment, config)
    energy, alive = _load_arrays(state)
    frames = config.frames_per_round
    if plan.affordable(energy, alive, frames):
        for _ in range(frames):
            state.cumulative_packets_to_bs += plan.charge_unchecked(energy, state.ledger)
    else:
        for _ in range(frames):
            _, packets = _run_frame(energy, alive, plan, state.ledger)
            state.cumulative_packets_to_bs += packets
    _store_arrays(state, energy, alive)

    metrics = RoundMetrics(
        round=state.round,
        alive_count=int(np.count_nonzero(alive)),
        total_residual_energy=float(np.sum(energy)),
        cumulative_packets_to_bs=state.cumulative_packets_to_bs,
        head_count=len(assignment.heads),
    )
    state.round += 1
    return metrics


def run_simulation(
    config: SimConfig,
    nodes: list[SensorNode] | None = None,
    on_round: Callable[[SimulationState, RoundMetrics], None] | None = None,
) -> SimulationResult:
    """Deploy (unless ``nodes`` is given) and run until extinction or max_rounds.

    The deployment always consumes the first draws of the seeded generator,
    so two protocols run with one seed share node positions. ``on_round`` is
    called after every round with the live state.
    """
    validate_config(config)
    rng = make_rng(config.seed)
    deployed = deploy_nodes(config, rng)
    if nodes is not None:
        if len(nodes) != config.node_count:
            raise ValueError("nodes must match config.node_count")
        deployed = copy.deepcopy(nodes)
    state = SimulationState.initial(config, deployed, rng)

    per_round: list[RoundMetrics] = []
    while state.round < config.max_rounds and any(n.alive for n in state.nodes):
        metrics = run_round(state, config)
        per_round.append(metrics)
        if on_round is not None:
            on_round(state, metrics)
    log.debug("%s seed=%d stopped after %d rounds", config.protocol.value, config.seed, state.round)

    summary = summarize_series(per_round, config.node_count)
    return SimulationResult(per_round=per_round, summary=summary, config_echo=config, seed=config.seed)
