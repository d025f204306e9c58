"""MONCH cluster formation.

Each round the head count is fixed from the radio and field constants, heads
are picked in order of proximity to the base station among nodes holding at
least the mean residual energy, and each new head takes the nearest still
unassigned nodes up to the cluster capacity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .energy import head_unit_energy, node_unit_energy
from .leach import ClusterAssignment, nearest_heads
from .model import FieldGeometry, RadioParams, SensorNode


@dataclass(frozen=True)
class MonchPlan:
    kopt: int
    capacity: int
    head_order: tuple[int, ...]
    assignment: ClusterAssignment


def bs_distance(field: FieldGeometry) -> float:
    """Distance of the base station from the field origin (not its centre)."""
    return math.hypot(field.bs_position.x, field.bs_position.y)


def field_diagonal(field: FieldGeometry) -> float:
    return math.hypot(field.yard_length, field.yard_width)


def optimal_head_count_raw(radio: RadioParams, field: FieldGeometry, alive: int, pt: float) -> float:
    ratio = head_unit_energy(radio) / node_unit_energy(radio)
    return math.sqrt(ratio * 2 * pt * field_diagonal(field) / bs_distance(field) ** 2 * alive)


def optimal_head_count(radio: RadioParams, field: FieldGeometry, alive: int, pt: float) -> int:
    """Rounded (half up) head count, clamped to [1, alive]."""
    raw = optimal_head_count_raw(radio, field, alive, pt)
    return max(1, min(alive, math.floor(raw + 0.5)))


def cluster_capacity(alive: int, kopt: int) -> int:
    """Target cluster size, head included."""
    return -(-alive // kopt)


def _arrays(nodes: list[SensorNode]):
    ids = np.array([n.id for n in nodes], dtype=np.int64)
    xy = np.array([[n.position.x, n.position.y] for n in nodes], dtype=float).reshape(-1, 2)
    energy = np.array([n.residual_energy for n in nodes], dtype=float)
    return ids, xy, energy


def _rank(ids: np.ndarray, xy: np.ndarray, energy: np.ndarray, bs: np.ndarray) -> np.ndarray:
    """Indices of candidate heads in selection order."""
    # fsum keeps the mean independent of input order
    mean = math.fsum(energy.tolist()) / len(energy)
    pool = np.flatnonzero(energy >= mean)
    if pool.size == 0:
        pool = np.arange(len(ids))
    d = np.hypot(xy[pool, 0] - bs[0], xy[pool, 1] - bs[1])
    # lexsort: last key is primary
    order = np.lexsort((ids[pool], -energy[pool], d))
    return pool[order]


def rank_head_candidates(nodes: list[SensorNode], field: FieldGeometry) -> list[int]:
    """Alive nodes at or above mean residual energy, nearest to the BS first.

    Ties on distance go to the higher-energy node, then the lower id. If no
    node passes the energy filter every alive node is ranked.
    """
    alive = [n for n in nodes if n.alive]
    ids, xy, energy = _arrays(alive)
    bs = np.array([field.bs_position.x, field.bs_position.y])
    return [int(ids[i]) for i in _rank(ids, xy, energy, bs)]


def form_clusters_arrays(
    ids: np.ndarray,
    xy: np.ndarray,
    energy: np.ndarray,
    bs: np.ndarray,
    kopt: int,
    capacity: int,
) -> MonchPlan:
    """Array form of :func:`form_clusters`; rows describe alive nodes."""
    pool = np.ones(len(ids), dtype=bool)
    heads: list[int] = []
    head_rows: list[int] = []
    membership: dict[int, int] = {}

    while len(heads) < kopt and pool.any():
        rows = np.flatnonzero(pool)
        h = rows[_rank(ids[rows], xy[rows], energy[rows], bs)[0]]
        pool[h] = False
        heads.append(int(ids[h]))
        head_rows.append(h)

        rest = np.flatnonzero(pool)
        if rest.size and capacity > 1:
            d2 = np.sum((xy[rest] - xy[h]) ** 2, axis=1)
            take = rest[np.lexsort((ids[rest], d2))[: capacity - 1]]
            pool[take] = False
            for m in take:
                membership[int(ids[m])] = int(ids[h])

    overflow: list[int] = []
    rest = np.flatnonzero(pool)
    if rest.size:
        # capacity waived: remaining nodes join their nearest head
        order = np.argsort(ids[head_rows], kind="stable")
        sorted_rows = np.asarray(head_rows)[order]
        nearest = nearest_heads(xy[rest], xy[sorted_rows])
        for m, k in zip(rest, nearest):
            membership[int(ids[m])] = int(ids[sorted_rows[k]])
            overflow.append(int(ids[m]))

    assignment = ClusterAssignment(frozenset(heads), membership, frozenset(), frozenset(overflow))
    return MonchPlan(kopt=kopt, capacity=capacity, head_order=tuple(heads), assignment=assignment)


def form_clusters(nodes: list[SensorNode], field: FieldGeometry, kopt: int, capacity: int) -> MonchPlan:
    """Greedy capacity-bounded clustering of the alive nodes.

    Repeatedly takes the top-ranked remaining candidate as a head and gives
    it the ``capacity - 1`` nearest unassigned nodes (ties: lower id). Nodes
    still unassigned once ``kopt`` heads exist join their nearest head and
    are listed in ``assignment.overflow``.
    """
    alive = [n for n in nodes if n.alive]
    ids, xy, energy = _arrays(alive)
    bs = np.array([field.bs_position.x, field.bs_position.y])
    return form_clusters_arrays(ids, xy, energy, bs, kopt, capacity)


def plan_round(nodes: list[SensorNode], field: FieldGeometry, radio: RadioParams, pt: float) -> MonchPlan:
    alive = [n for n in nodes if n.alive]
    kopt = optimal_head_count(radio, field, len(alive), pt)
    return form_clusters(alive, field, kopt, cluster_capacity(len(alive), kopt))
