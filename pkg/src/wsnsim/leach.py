"""LEACH baseline: randomized head election and nearest-head joining."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .model import SensorNode


@dataclass(frozen=True)
class ClusterAssignment:
    heads: frozenset[int]
    membership: dict[int, int]
    # alive non-heads that had no head to join; they report straight to the BS
    unassigned: frozenset[int] = frozenset()
    # members attached after capacity was exhausted (MONCH leftovers)
    overflow: frozenset[int] = field(default=frozenset())

    def members_of(self, head: int) -> list[int]:
        return sorted(m for m, h in self.membership.items() if h == head)

    def covered(self) -> list[int]:
        return sorted([*self.heads, *self.membership, *self.unassigned])


def epoch_length(p: float) -> int:
    return math.floor(1 / p)


def election_threshold(p: float, round: int, eligible: bool) -> float:
    """Canonical LEACH threshold T(n) for a node in the given round."""
    if not eligible:
        return 0.0
    return p / (1 - p * (round % epoch_length(p)))


def is_eligible(node: SensorNode, p: float, round: int) -> bool:
    """True if the node has not been head yet in the current epoch.

    Epochs are aligned blocks of floor(1/p) rounds starting at round 0.
    """
    if node.last_ch_round is None:
        return True
    epoch = epoch_length(p)
    return node.last_ch_round // epoch < round // epoch


def elect_heads(nodes: list[SensorNode], p: float, round: int, rng: np.random.Generator) -> set[int]:
    """Run one LEACH election over ``nodes`` (all alive).

    One uniform draw is consumed per node, in list order, whether or not the
    node is eligible. Winners record ``round`` as their last head round.
    """
    draws = rng.random(len(nodes)).tolist()
    threshold = election_threshold(p, round, True)
    epoch = epoch_length(p)
    current = round // epoch
    heads = set()
    for node, u in zip(nodes, draws):
        eligible = node.last_ch_round is None or node.last_ch_round // epoch < current
        node.is_ch_this_round = eligible and u < threshold
        if node.is_ch_this_round:
            heads.add(node.id)
            node.last_ch_round = round
    return heads


def nearest_heads(member_xy: np.ndarray, head_xy: np.ndarray) -> np.ndarray:
    """Index into ``head_xy`` of the nearest head for each member row.

    ``np.argmin`` keeps the first minimum, so ties go to the earlier head.
    """
    diff = member_xy[:, None, :] - head_xy[None, :, :]
    d2 = np.einsum("ijk,ijk->ij", diff, diff)
    return np.argmin(d2, axis=1)


def join_nearest(nodes: list[SensorNode], heads: Iterable[int]) -> ClusterAssignment:
    """Attach every alive non-head to its closest head (ties: lower head id)."""
    head_set = set(heads)
    head_ids = sorted(head_set)
    alive = [n for n in nodes if n.alive]
    members = [n for n in alive if n.id not in head_set]
    if not head_ids:
        return ClusterAssignment(frozenset(), {}, frozenset(n.id for n in members))
    if not members:
        return ClusterAssignment(frozenset(head_ids), {})

    by_id = {n.id: n for n in alive}
    head_xy = np.array([[by_id[h].position.x, by_id[h].position.y] for h in head_ids])
    member_xy = np.array([[n.position.x, n.position.y] for n in members])
    idx = nearest_heads(member_xy, head_xy)
    membership = {n.id: head_ids[i] for n, i in zip(members, idx)}
    return ClusterAssignment(frozenset(head_ids), membership)
