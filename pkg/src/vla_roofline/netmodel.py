"""Network links, payloads, and transfer-time arithmetic.

A transfer costs a fixed one-way base latency plus serialization at the
effective (efficiency-scaled) bandwidth of the payload's direction.  Paths of
one or two hops (device -> edge, or device -> edge -> cloud) sum per hop.
"""

from __future__ import annotations

from dataclasses import dataclass

from .workload import TransformerConfig, VlaModelSpec, kv_bytes_per_token

UPLOAD = "upload"
DOWNLOAD = "download"
DIRECTIONS = (UPLOAD, DOWNLOAD)

OBSERVATION_COMPRESSED = "compressed"
OBSERVATION_RAW = "raw"

# Calibrated wire size of one compressed multi-camera observation (JPEG-class
# compression of three 224x224 RGB frames plus proprioception).
COMPRESSED_OBSERVATION_BYTES = 46_500

# Raw observations ship unencoded 224x224 RGB frames.
RAW_IMAGE_HEIGHT = 224
RAW_IMAGE_WIDTH = 224
RAW_IMAGE_CHANNELS = 3

# Actions travel as float32 values.
ACTION_VALUE_BYTES = 4


@dataclass(frozen=True)
class NetworkConfig:
    """One link: asymmetric bandwidth (bits/s), one-way base latency (s),
    and a (0, 1] protocol-efficiency factor applied to bandwidth."""

    name: str
    upload_bw: float
    download_bw: float
    base_latency: float
    efficiency: float = 1.0

    def __post_init__(self) -> None:
        if self.upload_bw <= 0 or self.download_bw <= 0:
            raise ValueError(f"{self.name}: bandwidths must be positive")
        if self.base_latency < 0:
            raise ValueError(f"{self.name}: base latency must be >= 0")
        if not 0 < self.efficiency <= 1:
            raise ValueError(f"{self.name}: efficiency must be in (0, 1]")

    def bandwidth(self, direction: str) -> float:
        if direction == UPLOAD:
            return self.upload_bw
        if direction == DOWNLOAD:
            return self.download_bw
        raise ValueError(f"direction must be one of {DIRECTIONS}")


@dataclass(frozen=True)
class NetworkPath:
    """One or two links crossed in sequence."""

    hops: tuple[NetworkConfig, ...]

    def __post_init__(self) -> None:
        if not 1 <= len(self.hops) <= 2:
            raise ValueError("a path has one or two hops")


@dataclass(frozen=True)
class Payload:
    """Bytes moving in one direction."""

    bytes: int
    direction: str

    def __post_init__(self) -> None:
        if self.bytes < 0:
            raise ValueError("payload bytes must be >= 0")
        if self.direction not in DIRECTIONS:
            raise ValueError(f"direction must be one of {DIRECTIONS}")


def transfer_time(payload: Payload, net: NetworkConfig) -> float:
    """Seconds to move a payload across one link."""
    bw = net.bandwidth(payload.direction) * net.efficiency
    return net.base_latency + payload.bytes * 8 / bw


def path_time(payload: Payload, path: NetworkPath) -> float:
    """Seconds to move a payload across every hop of a path."""
    return sum(transfer_time(payload, hop) for hop in path.hops)


def observation_payload(spec: VlaModelSpec,
                        mode: str = OBSERVATION_COMPRESSED,
                        compressed_bytes: int | None = None) -> Payload:
    """The per-step observation upload (camera frames + proprioception)."""
    if mode == OBSERVATION_COMPRESSED:
        size = COMPRESSED_OBSERVATION_BYTES if compressed_bytes is None else compressed_bytes
    elif mode == OBSERVATION_RAW:
        size = (spec.num_cameras * RAW_IMAGE_HEIGHT * RAW_IMAGE_WIDTH
                * RAW_IMAGE_CHANNELS)
    else:
        raise ValueError(
            f"mode must be {OBSERVATION_COMPRESSED!r} or {OBSERVATION_RAW!r}")
    return Payload(size, UPLOAD)


def action_payload(spec: VlaModelSpec) -> Payload:
    """The per-step action download: one chunk of DoF values."""
    return Payload(spec.chunk_size * spec.action_dof * ACTION_VALUE_BYTES,
                   DOWNLOAD)


def kv_payload(tokens: int, cfg: TransformerConfig) -> Payload:
    """A KV-cache shipment for ``tokens`` tokens of one stack's cache."""
    if tokens < 0:
        raise ValueError("tokens must be >= 0")
    return Payload(tokens * kv_bytes_per_token(cfg), DOWNLOAD)
