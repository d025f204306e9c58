"""Radio energy dissipation model and per-round energy bookkeeping."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import RadioParams


def distance_threshold(radio: RadioParams) -> float:
    """Distance at which the amplifier switches from the d^2 to the d^4 term."""
    return math.sqrt(radio.e_amp / radio.e_fs)


def tx_energy(radio: RadioParams, bits, distance):
    """Energy to transmit ``bits`` over ``distance`` metres.

    Below the threshold the amplifier cost grows with d^2 (``e_amp``), at or
    above it with d^4 (``e_fs``). Both branches agree at the threshold.
    ``distance`` may be a scalar or an ndarray.
    """
    d0 = distance_threshold(radio)
    d = np.asarray(distance, dtype=float)
    amp = np.where(d < d0, radio.e_amp * d**2, radio.e_fs * d**4)
    out = bits * (radio.e_elec + amp)
    return float(out) if out.ndim == 0 else out


def rx_energy(radio: RadioParams, bits) -> float:
    return radio.e_elec * bits


def aggregation_energy(radio: RadioParams, bits) -> float:
    return radio.e_da * bits


def head_unit_energy(radio: RadioParams) -> float:
    # The e_fs term carries no distance factor. It is kept as written because
    # this value only feeds the optimal head count, never the energy ledger.
    return (radio.e_elec + radio.e_da) * radio.packet_len + radio.e_fs * radio.packet_len


def node_unit_energy(radio: RadioParams) -> float:
    return radio.e_elec * radio.node_packet_len + radio.e_fs * radio.packet_len


@dataclass
class EnergyLedger:
    """Energy drawn from each node's battery over a simulation.

    ``overdraft`` counts the part of a fatal charge the node could not pay.
    It is kept out of ``total_consumed`` so residual + consumed stays equal
    to the initial budget.
    """

    node_count: int
    per_node: np.ndarray = field(init=False)
    total_consumed: float = 0.0
    overdraft: float = 0.0

    def __post_init__(self):
        self.per_node = np.zeros(self.node_count)

    def record(self, ids: np.ndarray, drawn: np.ndarray, overdraft: float = 0.0) -> float:
        """Charge ``drawn[i]`` to node ``ids[i]`` (ids unique); returns the sum."""
        self.per_node[ids] += drawn
        total = float(drawn.sum())
        self.total_consumed += total
        self.overdraft += overdraft
        return total

    @property
    def per_node_consumed(self) -> dict[int, float]:
        return {i: float(e) for i, e in enumerate(self.per_node)}
