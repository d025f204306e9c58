"""Shared domain types, config validation/loading and node deployment."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path

import numpy as np
import yaml


class ConfigError(ValueError):
    """Raised when a configuration violates one of its invariants."""


class Protocol(str, Enum):
    LEACH = "leach"
    MONCH = "monch"


@dataclass(frozen=True)
class Position:
    x: float
    y: float

    def distance_to(self, other: Position) -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True)
class FieldGeometry:
    yard_length: float = 100.0
    yard_width: float = 100.0
    bs_position: Position = Position(50.0, 100.0)


@dataclass(frozen=True)
class RadioParams:
    """Radio energy constants, in joules per bit (per m^2 / m^4 for amplifiers).

    ``e_amp`` multiplies d^2 (short range) and ``e_fs`` multiplies d^4 (long
    range). This is the reverse of the usual first-order radio naming, where
    the free-space term is the d^2 one; the names here follow the MONCH
    formulation so its head-count arithmetic can be reproduced verbatim.
    """

    e_elec: float = 50e-9
    e_da: float = 5e-9
    e_amp: float = 100e-12
    e_fs: float = 0.013e-12
    packet_len: int = 6400
    node_packet_len: int = 200


@dataclass
class SensorNode:
    id: int
    position: Position
    residual_energy: float
    alive: bool = True
    # round in which the node last served as cluster head, None if never
    last_ch_round: int | None = None
    is_ch_this_round: bool = False


@dataclass(frozen=True)
class SimConfig:
    node_count: int = 100
    field: FieldGeometry = FieldGeometry()
    radio: RadioParams = RadioParams()
    initial_energy: float = 2.0
    protocol: Protocol = Protocol.MONCH
    ch_probability: float = 0.05
    frames_per_round: int = 4
    max_rounds: int = 10_000
    seed: int = 0
    pt: float = math.pi

    def with_overrides(self, **changes) -> SimConfig:
        return replace(self, **changes)


def _is_count(value) -> bool:
    return isinstance(value, (int, np.integer)) and not isinstance(value, bool)


def _positive(value) -> bool:
    return math.isfinite(value) and value > 0


def validate_config(config: SimConfig) -> SimConfig:
    """Return ``config`` unchanged if every invariant holds.

    Raises ConfigError naming the first violated invariant.
    """
    f = config.field
    bs = f.bs_position
    if not all(math.isfinite(v) for v in (f.yard_length, f.yard_width, bs.x, bs.y)):
        raise ConfigError("nonfinite coordinate")
    if f.yard_length <= 0 or f.yard_width <= 0:
        raise ConfigError("nonpositive yard")
    if math.hypot(bs.x, bs.y) <= 0:
        raise ConfigError("bs at origin")

    r = config.radio
    if not all(_positive(e) for e in (r.e_elec, r.e_da, r.e_amp, r.e_fs)):
        raise ConfigError("nonpositive radio energy")
    if not (_is_count(r.packet_len) and r.packet_len > 0):
        raise ConfigError("invalid packet_len")
    if not (_is_count(r.node_packet_len) and r.node_packet_len > 0):
        raise ConfigError("invalid node_packet_len")

    if not (_is_count(config.node_count) and config.node_count > 0):
        raise ConfigError("nonpositive node_count")
    if not _positive(config.initial_energy):
        raise ConfigError("nonpositive initial_energy")
    if not isinstance(config.protocol, Protocol):
        raise ConfigError("unknown protocol")
    if not (0 < config.ch_probability < 1):
        raise ConfigError("ch_probability out of range")
    if not (_is_count(config.frames_per_round) and config.frames_per_round >= 1):
        raise ConfigError("frames_per_round below 1")
    # zero is allowed: it yields an empty run
    if not (_is_count(config.max_rounds) and config.max_rounds >= 0):
        raise ConfigError("negative max_rounds")
    if not (_is_count(config.seed) and 0 <= config.seed < 2**64):
        raise ConfigError("seed out of range")
    if not _positive(config.pt):
        raise ConfigError("nonpositive pt")
    return config


CONFIG_KEYS = (
    "node_count",
    "yard_length",
    "yard_width",
    "bs_x",
    "bs_y",
    "e_elec",
    "e_da",
    "e_amp",
    "e_fs",
    "packet_len",
    "node_packet_len",
    "initial_energy",
    "protocol",
    "ch_probability",
    "frames_per_round",
    "max_rounds",
    "seed",
    "pt",
)

_INT_KEYS = {"node_count", "packet_len", "node_packet_len", "frames_per_round", "max_rounds", "seed"}


def config_from_mapping(data: dict) -> SimConfig:
    """Build and validate a SimConfig from a flat key/value mapping."""
    if not isinstance(data, dict):
        raise ConfigError("config must be a key/value mapping")
    unknown = sorted(set(data) - set(CONFIG_KEYS))
    if unknown:
        raise ConfigError(f"unknown key {unknown[0]!r}")
    missing = [k for k in CONFIG_KEYS if k not in data]
    if missing:
        raise ConfigError(f"missing key {missing[0]!r}")

    values = {}
    for key in CONFIG_KEYS:
        raw = data[key]
        try:
            if key == "protocol":
                values[key] = Protocol(str(raw).lower())
            elif key in _INT_KEYS:
                if isinstance(raw, bool) or (isinstance(raw, float) and not raw.is_integer()):
                    raise ValueError
                values[key] = int(raw)
            else:
                values[key] = float(raw)
        except (TypeError, ValueError):
            raise ConfigError(f"bad value for {key!r}: {raw!r}") from None

    config = SimConfig(
        node_count=values["node_count"],
        field=FieldGeometry(
            yard_length=values["yard_length"],
            yard_width=values["yard_width"],
            bs_position=Position(values["bs_x"], values["bs_y"]),
        ),
        radio=RadioParams(
            e_elec=values["e_elec"],
            e_da=values["e_da"],
            e_amp=values["e_amp"],
            e_fs=values["e_fs"],
            packet_len=values["packet_len"],
            node_packet_len=values["node_packet_len"],
        ),
        initial_energy=values["initial_energy"],
        protocol=values["protocol"],
        ch_probability=values["ch_probability"],
        frames_per_round=values["frames_per_round"],
        max_rounds=values["max_rounds"],
        seed=values["seed"],
        pt=values["pt"],
    )
    return validate_config(config)


def config_to_mapping(config: SimConfig) -> dict:
    f, r = config.field, config.radio
    return {
        "node_count": config.node_count,
        "yard_length": f.yard_length,
        "yard_width": f.yard_width,
        "bs_x": f.bs_position.x,
        "bs_y": f.bs_position.y,
        "e_elec": r.e_elec,
        "e_da": r.e_da,
        "e_amp": r.e_amp,
        "e_fs": r.e_fs,
        "packet_len": r.packet_len,
        "node_packet_len": r.node_packet_len,
        "initial_energy": config.initial_energy,
        "protocol": config.protocol.value,
        "ch_probability": config.ch_probability,
        "frames_per_round": config.frames_per_round,
        "max_rounds": config.max_rounds,
        "seed": config.seed,
        "pt": config.pt,
    }


def load_config(path: str | Path) -> SimConfig:
    """Read a YAML key/value config file. OSError propagates for missing files."""
    text = Path(path).read_text()
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"unparseable config: {exc}") from None
    return config_from_mapping(data)


def make_rng(seed: int) -> np.random.Generator:
    """Seeded generator backed by PCG64 (named explicitly, not numpy's default)."""
    return np.random.Generator(np.random.PCG64(seed))


def deploy_nodes(config: SimConfig, rng: np.random.Generator) -> list[SensorNode]:
    """Place ``node_count`` nodes uniformly on the field, all at full energy.

    Draws x for every node, then y for every node.
    """
    n = config.node_count
    xs = rng.uniform(0.0, config.field.yard_length, size=n)
    ys = rng.uniform(0.0, config.field.yard_width, size=n)
    return [
        SensorNode(id=i, position=Position(float(x), float(y)), residual_energy=config.initial_energy)
        for i, (x, y) in enumerate(zip(xs, ys))
    ]
