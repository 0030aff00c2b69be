"""Deployment scenarios: placements, control-rate models, and sweeps.

A *placement* says where the policy's phases execute and which links connect
the robot to that compute.  Scenario functions combine the operator-graph
roofline times with network transfer times into end-to-end control rates:

* synchronous serving waits for the full observation -> action round trip,
* asynchronous (pipelined) serving overlaps network and GPU work, so the
  sustained rate is the slowest pipeline stage,
* collaborative serving splits the stacks: vision and VLM run on a server
  that streams the resulting KV cache down to the robot, which runs the
  action expert locally,
* dual-system serving runs the action loop (System 1) at high rate while the
  VLM (System 2) refreshes context at a capped rate on the same compute.

Memory-capacity violations are first-class results (``feasible=False`` with
latencies/rates of ``None``), never exceptions.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Sequence

from . import netmodel, opgraph, roofline
from .netmodel import NetworkConfig, NetworkPath, Payload
from .roofline import AcceleratorConfig
from .workload import (
    AUTOREGRESSIVE,
    AUTOREGRESSIVE_PARALLEL,
    DIFFUSION,
    PresetCatalog,
    VlaModelSpec,
    kv_bytes_per_token,
    scaled_family,
    weight_bytes,
)

ON_DEVICE = "on-device"
EDGE_SERVER = "edge-server"
CLOUD_SERVER = "cloud-server"
COLLABORATIVE = "collaborative"
PLACEMENT_KINDS = (ON_DEVICE, EDGE_SERVER, CLOUD_SERVER, COLLABORATIVE)


@dataclass(frozen=True)
class Placement:
    """Where the policy runs and how the robot reaches it."""

    kind: str
    hw: AcceleratorConfig
    device_hw: Optional[AcceleratorConfig] = None
    access_net: Optional[NetworkConfig] = None
    cloud_net: Optional[NetworkConfig] = None

    @classmethod
    def on_device(cls, hw: AcceleratorConfig) -> "Placement":
        return cls(ON_DEVICE, hw)

    @classmethod
    def edge_server(cls, hw: AcceleratorConfig,
                    net: NetworkConfig) -> "Placement":
        return cls(EDGE_SERVER, hw, access_net=net)

    @classmethod
    def cloud_server(cls, hw: AcceleratorConfig, access_net: NetworkConfig,
                     cloud_net: NetworkConfig) -> "Placement":
        return cls(CLOUD_SERVER, hw, access_net=access_net,
                   cloud_net=cloud_net)

    @classmethod
    def collaborative(cls, device_hw: AcceleratorConfig,
                      server_hw: AcceleratorConfig,
                      net: NetworkConfig) -> "Placement":
        return cls(COLLABORATIVE, server_hw, device_hw=device_hw,
                   access_net=net)

    def __post_init__(self) -> None:
        if self.kind not in PLACEMENT_KINDS:
            raise ValueError(f"kind must be one of {PLACEMENT_KINDS}")
        if self.kind in (EDGE_SERVER, COLLABORATIVE) and self.access_net is None:
            raise ValueError(f"{self.kind} placement needs a network")
        if self.kind == CLOUD_SERVER and (self.access_net is None
                                          or self.cloud_net is None):
            raise ValueError("cloud-server placement needs access and cloud links")
        if self.kind == COLLABORATIVE and self.device_hw is None:
            raise ValueError("collaborative placement needs a device accelerator")

    def network_path(self) -> Optional[NetworkPath]:
        if self.kind == ON_DEVICE:
            return None
        if self.kind == CLOUD_SERVER:
            return NetworkPath((self.access_net, self.cloud_net))
        return NetworkPath((self.access_net,))

    def describe(self) -> str:
        if self.kind == ON_DEVICE:
            return f"on-device ({self.hw.name})"
        if self.kind == EDGE_SERVER:
            return f"edge server ({self.hw.name} via {self.access_net.name})"
        if self.kind == CLOUD_SERVER:
            return (f"cloud server ({self.hw.name} via {self.access_net.name} "
                    f"+ {self.cloud_net.name})")
        return (f"collaborative ({self.device_hw.name} device, {self.hw.name} "
                f"server via {self.access_net.name})")


@dataclass(frozen=True)
class ScenarioResult:
    """One evaluated deployment: latencies, rates, boundedness, footprint."""

    placement: str
    phase_latencies: dict[str, float]
    network_latencies: dict[str, float]
    e2e_latency: Optional[float]
    sync_frequency: Optional[float]
    async_frequency: Optional[float]
    boundedness: dict[str, str]
    operational_intensity: dict[str, float]
    footprint_bytes: int
    feasible: bool
    notes: tuple[str, ...] = ()


def _infeasible(spec: VlaModelSpec, placement: Placement, footprint: int,
                capacity_hw: AcceleratorConfig,
                extra_notes: tuple[str, ...] = ()) -> ScenarioResult:
    note = (f"{spec.name} needs {footprint / roofline.GIB:.2f} GB but "
            f"{capacity_hw.name} has {capacity_hw.mem_capacity / roofline.GIB:.2f} GB")
    return ScenarioResult(
        placement=placement.describe(),
        phase_latencies={},
        network_latencies={},
        e2e_latency=None,
        sync_frequency=None,
        async_frequency=None,
        boundedness={},
        operational_intensity={},
        footprint_bytes=footprint,
        feasible=False,
        notes=(note,) + extra_notes,
    )


def sync_scenario(spec: VlaModelSpec, placement: Placement,
                  context_timestep: Optional[int] = None) -> ScenarioResult:
    """Synchronous serving: one full round trip per control step."""
    if placement.kind == COLLABORATIVE:
        return collaborative_scenario(spec, placement)
    hw = placement.hw
    footprint = roofline.memory_footprint(spec, context_timestep)
    if footprint > hw.mem_capacity:
        return _infeasible(spec, placement, footprint, hw)

    latencies, intensity, labels = roofline.phase_breakdown(
        spec, hw, context_timestep)
    gpu_time = sum(latencies.values())

    network: dict[str, float] = {}
    path = placement.network_path()
    if path is not None:
        network["observation_upload"] = netmodel.path_time(
            netmodel.observation_payload(spec), path)
        network["action_download"] = netmodel.path_time(
            netmodel.action_payload(spec), path)
    e2e = gpu_time + sum(network.values())

    return ScenarioResult(
        placement=placement.describe(),
        phase_latencies=latencies,
        network_latencies=network,
        e2e_latency=e2e,
        sync_frequency=1.0 / e2e,
        async_frequency=None,
        boundedness=labels,
        operational_intensity=intensity,
        footprint_bytes=footprint,
        feasible=True,
    )


def async_scenario(spec: VlaModelSpec, placement: Placement,
                   context_timestep: Optional[int] = None) -> ScenarioResult:
    """Pipelined serving: rate of the slowest stage, not the round trip.

    Observation uploads, GPU execution of consecutive steps, and action
    downloads all overlap, so the sustained rate is the minimum of the GPU
    rate and each hop's serialization rate in each direction.  Base latency
    still shapes reaction time but no longer limits throughput.  Requires a
    networked placement.
    """
    if placement.kind == ON_DEVICE:
        raise ValueError("asynchronous serving needs a networked placement")
    if placement.kind == COLLABORATIVE:
        raise ValueError("asynchronous serving is not defined for "
                         "collaborative placements")
    result = sync_scenario(spec, placement, context_timestep)
    if not result.feasible:
        return result

    gpu_time = sum(result.phase_latencies.values())
    rates = [1.0 / gpu_time]
    obs = netmodel.observation_payload(spec)
    act = netmodel.action_payload(spec)
    for hop in placement.network_path().hops:
        rates.append(hop.upload_bw * hop.efficiency / (8 * obs.bytes))
        rates.append(hop.download_bw * hop.efficiency / (8 * act.bytes))
    return replace(result, async_frequency=min(rates))


def collaborative_scenario(spec: VlaModelSpec,
                           placement: Placement) -> ScenarioResult:
    """Split serving: vision+VLM on the server, action expert on the robot.

    The server uploads nothing back but the VLM KV cache of the fresh prefix,
    which the robot's action expert then attends locally.  Requires diffusion
    decoding (the action expert is the on-robot half).
    """
    if placement.kind != COLLABORATIVE:
        raise ValueError("placement must be collaborative")
    if spec.decoding_mode != DIFFUSION:
        raise ValueError("collaborative serving requires a diffusion action expert")
    server, device = placement.hw, placement.device_hw

    prefix_kv = spec.prefix_tokens() * kv_bytes_per_token(spec.vlm)
    server_bytes = (weight_bytes(spec.vision_encoder)
                    + weight_bytes(spec.vlm) + prefix_kv)
    device_bytes = weight_bytes(spec.action_expert) + prefix_kv
    footprint = server_bytes + device_bytes
    split_note = (f"server holds {server_bytes / roofline.GIB:.2f} GB, "
                  f"device {device_bytes / roofline.GIB:.2f} GB")
    if server_bytes > server.mem_capacity:
        return _infeasible(spec, placement, server_bytes, server, (split_note,))
    if device_bytes > device.mem_capacity:
        return _infeasible(spec, placement, device_bytes, device, (split_note,))

    graph = opgraph.pipeline_graph(spec)
    latencies: dict[str, float] = {}
    intensity: dict[str, float] = {}
    labels: dict[str, str] = {}
    for phase, hw in ((opgraph.VISION, server), (opgraph.VLM, server),
                      (opgraph.ACTION, device)):
        sub = graph.subgraph(phase)
        latencies[phase] = roofline.graph_time(sub, hw).total
        intensity[phase] = roofline.graph_oi(sub)
        labels[phase] = roofline.boundedness(sub, hw)

    path = placement.network_path()
    network = {
        "observation_upload": netmodel.path_time(
            netmodel.observation_payload(spec), path),
        "kv_download": netmodel.path_time(
            netmodel.kv_payload(spec.prefix_tokens(), spec.vlm), path),
    }
    e2e = sum(latencies.values()) + sum(network.values())
    return ScenarioResult(
        placement=placement.describe(),
        phase_latencies=latencies,
        network_latencies=network,
        e2e_latency=e2e,
        sync_frequency=1.0 / e2e,
        async_frequency=None,
        boundedness=labels,
        operational_intensity=intensity,
        footprint_bytes=footprint,
        feasible=True,
        notes=(split_note,),
    )


# ---------------------------------------------------------------------------
# Dual-system serving
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DualSystemResult:
    """Rates for a fast action loop (S1) paired with a capped VLM loop (S2)."""

    placement: str
    t_s1: Optional[float]
    t_s2: Optional[float]
    sync_frequency: Optional[float]
    async_frequency: Optional[float]
    s2_cap: float
    feasible: bool
    notes: tuple[str, ...] = ()


def dual_system_scenario(spec: VlaModelSpec, placement: Placement,
                         s2_cap: float) -> DualSystemResult:
    """Split the pipeline into System 1 (vision + action) and System 2 (VLM).

    Synchronously the two systems alternate (rate ``1/(T_s1 + T_s2)``).
    Asynchronously System 2 refreshes context at most ``s2_cap`` times per
    second and System 1 fills the remaining compute, giving
    ``f1 = (1 - s2_cap * T_s2) / T_s1``.  Requires ``s2_cap * T_s2 < 1``;
    a cap above the resulting ``f1`` is flagged in the notes (context would
    refresh faster than actions are produced).
    """
    if s2_cap <= 0:
        raise ValueError("s2_cap must be positive")
    if placement.kind == COLLABORATIVE:
        raise ValueError("dual-system serving is not defined for "
                         "collaborative placements")
    hw = placement.hw
    footprint = roofline.memory_footprint(spec)
    desc = placement.describe()
    if footprint > hw.mem_capacity:
        note = (f"{spec.name} needs {footprint / roofline.GIB:.2f} GB but "
                f"{hw.name} has {hw.mem_capacity / roofline.GIB:.2f} GB")
        return DualSystemResult(desc, None, None, None, None, s2_cap,
                                False, (note,))

    latencies, _, _ = roofline.phase_breakdown(spec, hw)
    t_s2 = latencies[opgraph.VLM]
    t_s1 = sum(t for phase, t in latencies.items() if phase != opgraph.VLM)
    path = placement.network_path()
    if path is not None:
        t_s1 += netmodel.path_time(netmodel.observation_payload(spec), path)
        t_s1 += netmodel.path_time(netmodel.action_payload(spec), path)

    notes: tuple[str, ...] = ()
    if s2_cap * t_s2 >= 1.0:
        note = (f"System 2 cannot sustain {s2_cap:g} Hz: refresh alone takes "
                f"{t_s2 * 1e3:.2f} ms")
        return DualSystemResult(desc, t_s1, t_s2, 1.0 / (t_s1 + t_s2), None,
                                s2_cap, False, (note,))
    f1 = (1.0 - s2_cap * t_s2) / t_s1
    if f1 < s2_cap:
        notes = (f"requested System-2 rate {s2_cap:g} Hz exceeds the achieved "
                 f"System-1 rate {f1:.1f} Hz",)
    return DualSystemResult(desc, t_s1, t_s2, 1.0 / (t_s1 + t_s2), f1,
                            s2_cap, True, notes)


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LongContextRow:
    timestep: int
    kv_bytes: int
    footprint_bytes: int
    result: ScenarioResult


def long_context_sweep(spec: VlaModelSpec, placement: Placement,
                       timesteps: Sequence[int]) -> tuple[LongContextRow, ...]:
    """Latency and memory growth as camera history accumulates in cache."""
    rows = []
    for t in timesteps:
        rows.append(LongContextRow(
            timestep=t,
            kv_bytes=roofline.kv_cache_bytes(spec, t),
            footprint_bytes=roofline.memory_footprint(spec, t),
            result=sync_scenario(spec, placement, context_timestep=t),
        ))
    return tuple(rows)


DIFFUSION_LARGE = "diffusion_large"
DECODING_VARIANTS = (DIFFUSION, DIFFUSION_LARGE, AUTOREGRESSIVE,
                     AUTOREGRESSIVE_PARALLEL)


@dataclass(frozen=True)
class DecodingRow:
    variant: str
    chunk_size: int
    action_dof: int
    action_latency: float
    e2e_latency: float
    action_oi: float


def decoding_variant_spec(spec: VlaModelSpec, variant: str, chunk: int,
                           dof: int) -> VlaModelSpec:
    base = replace(spec, chunk_size=chunk, action_dof=dof)
    if variant == DIFFUSION:
        return base
    if variant == DIFFUSION_LARGE:
        big = replace(spec.vlm, name=f"{spec.vlm.name}-expert",
                      patch_input_dim=None)
        return replace(base, name=f"{spec.name}-large-expert",
                       action_expert=big)
    if variant in (AUTOREGRESSIVE, AUTOREGRESSIVE_PARALLEL):
        return replace(base, name=f"{spec.name}-{variant}",
                       decoding_mode=variant, action_expert=None)
    raise ValueError(f"unknown decoding variant {variant!r}")


def decoding_comparison(spec: VlaModelSpec, hw: AcceleratorConfig,
                        chunk_sizes: Sequence[int] = (50,),
                        dofs: Sequence[int] = (14,),
                        variants: Sequence[str] = DECODING_VARIANTS,
                        ) -> tuple[DecodingRow, ...]:
    """Action-phase cost of each decoding strategy on one accelerator."""
    rows = []
    for chunk in chunk_sizes:
        for dof in dofs:
            for variant in variants:
                variant_spec = decoding_variant_spec(spec, variant, chunk, dof)
                graph = opgraph.pipeline_graph(variant_spec)
                timing = roofline.graph_time(graph, hw)
                action = graph.subgraph(opgraph.ACTION)
                rows.append(DecodingRow(
                    variant=variant,
                    chunk_size=chunk,
                    action_dof=dof,
                    action_latency=timing.phase(opgraph.ACTION),
                    e2e_latency=timing.total,
                    action_oi=roofline.graph_oi(action),
                ))
    return tuple(rows)


@dataclass(frozen=True)
class DenoiseChunkRow:
    denoise_steps: int
    chunk_size: int
    action_latency: float
    e2e_latency: float


def denoise_chunk_sweep(spec: VlaModelSpec, hw: AcceleratorConfig,
                        steps: Sequence[int] = (10,),
                        chunks: Sequence[int] = (50,),
                        ) -> tuple[DenoiseChunkRow, ...]:
    """Diffusion cost across denoising-step and chunk-size settings."""
    rows = []
    for n_steps in steps:
        for chunk in chunks:
            variant = replace(spec, denoise_steps=n_steps, chunk_size=chunk)
            timing = roofline.graph_time(opgraph.pipeline_graph(variant), hw)
            rows.append(DenoiseChunkRow(
                denoise_steps=n_steps,
                chunk_size=chunk,
                action_latency=timing.phase(opgraph.ACTION),
                e2e_latency=timing.total,
            ))
    return tuple(rows)


@dataclass(frozen=True)
class ScalingRow:
    model: str
    hardware: str
    total_params: int
    footprint_bytes: int
    feasible: bool
    frequency: Optional[float]
    phase_latencies: dict[str, float]


def scaling_sweep(catalog: PresetCatalog,
                  hardware: Sequence[AcceleratorConfig],
                  ) -> tuple[ScalingRow, ...]:
    """On-device control rate of the scaled model family on each accelerator."""
    rows = []
    for spec in scaled_family(catalog):
        for hw in hardware:
            result = sync_scenario(spec, Placement.on_device(hw))
            rows.append(ScalingRow(
                model=spec.name,
                hardware=hw.name,
                total_params=spec.total_params(),
                footprint_bytes=result.footprint_bytes,
                feasible=result.feasible,
                frequency=result.sync_frequency,
                phase_latencies=result.phase_latencies,
            ))
    return tuple(rows)
