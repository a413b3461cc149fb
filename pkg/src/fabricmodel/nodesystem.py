"""Node, device, system and storage capability arithmetic.

Models a compute node as CPU and GPU device specs plus power and memory
constants, then scales node figures to system aggregates and checks them
against the published values. Peak flops come from ops/clock times clock;
measured GEMM and STREAM figures from the reference dataset feed
efficiency and roofline calculations.

Units are SI throughout: bytes, bytes/s, flop/s, watts. Decimal prefixes
only (1 TB = 1e12 bytes).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import reference
from .errors import ConfigError, UnsupportedPrecision

PRECISIONS = ("fp64", "fp32", "tf32", "bf16", "fp16", "int8")

# One Xe-core: 8 vector engines, each co-issuing two 8-wide FP64 FMA
# pipes, 2 flops per FMA lane.
VECTOR_ENGINES_PER_XE_CORE = 8
FP64_LANES_PER_ENGINE = 8
FMA_ISSUE_PER_ENGINE = 2
FLOPS_PER_FMA = 2


def xe_core_fp64_ops_per_clock() -> int:
    return (
        VECTOR_ENGINES_PER_XE_CORE
        * FMA_ISSUE_PER_ENGINE
        * FP64_LANES_PER_ENGINE
        * FLOPS_PER_FMA
    )


@dataclass(frozen=True)
class DeviceSpec:
    """A socket-level device: compute units, clocks, and memory tiers.

    ops_per_clock_per_unit maps precision to flops per clock in one
    compute unit; whole-device ops/clock is that times units. Memory
    bandwidths are measured STREAM figures, used as roofline denominators.
    """

    name: str
    kind: str  # "cpu" or "gpu"
    units: int
    ops_per_clock_per_unit: dict[str, int]
    max_clock_ghz: float
    hbm_capacity_bytes: float
    hbm_bandwidth_bytes_per_s: float
    ddr_capacity_bytes: float = 0.0
    ddr_bandwidth_bytes_per_s: float = 0.0
    measured_gemm_flops: dict[str, float] = field(default_factory=dict)

    def ops_per_clock(self, precision: str) -> int:
        if precision not in self.ops_per_clock_per_unit:
            raise UnsupportedPrecision(
                f"{self.name} defines no theoretical ops/clock for {precision!r}"
            )
        return self.units * self.ops_per_clock_per_unit[precision]


def peak_flops(device: DeviceSpec, precision: str, clock_ghz: float | None = None) -> float:
    """Theoretical peak flop/s at the given clock (device max by default)."""
    if clock_ghz is None:
        clock_ghz = device.max_clock_ghz
    if clock_ghz < 0:
        raise ConfigError(f"clock must be >= 0, got {clock_ghz}")
    return device.ops_per_clock(precision) * clock_ghz * 1e9


def measured_efficiency(device: DeviceSpec, precision: str) -> float:
    """Measured GEMM throughput as a fraction of theoretical peak."""
    if precision not in device.measured_gemm_flops:
        raise UnsupportedPrecision(
            f"{device.name} has no measured GEMM figure for {precision!r}"
        )
    return device.measured_gemm_flops[precision] / peak_flops(device, precision)


def roofline_threshold(device: DeviceSpec, precision: str, tier: str = "hbm") -> float:
    """Arithmetic intensity (flop/byte) where the roofline leaves the slope.

    Uses theoretical peak when the device defines one for the precision,
    otherwise the measured GEMM figure. The denominator is the measured
    bandwidth of the chosen memory tier.
    """
    if tier == "hbm":
        bw = device.hbm_bandwidth_bytes_per_s
    elif tier == "ddr":
        bw = device.ddr_bandwidth_bytes_per_s
    else:
        raise ConfigError(f"unknown memory tier {tier!r}")
    if bw <= 0:
        raise ConfigError(f"{device.name} has no bandwidth for tier {tier!r}")
    if precision in device.ops_per_clock_per_unit:
        flops = peak_flops(device, precision)
    elif precision in device.measured_gemm_flops:
        flops = device.measured_gemm_flops[precision]
    else:
        raise UnsupportedPrecision(
            f"{device.name} defines neither peak nor measured flops for {precision!r}"
        )
    return flops / bw


@dataclass(frozen=True)
class NodeSpec:
    """One compute node: device counts, fabric ports, memory and power.

    Memory capacities compose from the device specs. The two node-level
    bandwidth fields are nameplate figures derived from the published
    system aggregates divided by the node count; the measured STREAM
    numbers on the devices are lower and serve the roofline calculations.
    """

    cpu: DeviceSpec
    gpu: DeviceSpec
    cpus: int = 2
    gpus: int = 6
    nics: int = 8
    xe_link_bytes_per_s: float = 28e9
    pcie_bytes_per_s: float = 64e9
    hbm_bandwidth_bytes_per_s: float = 13.88e12
    ddr_bandwidth_bytes_per_s: float = 0.5e12
    cpu_active_draw_w: float = 350.0
    gpu_active_draw_w: float = 500.0
    idle_overhead_w: float = 100.0
    sustained_power_w: float = 4000.0
    peak_power_w: float = 4600.0
    voltage_converters: int = 8

    def __post_init__(self) -> None:
        if min(self.cpus, self.gpus, self.nics) < 0:
            raise ConfigError("device counts must be >= 0")
        if self.sustained_power_w > self.peak_power_w:
            raise ConfigError("sustained power cap cannot exceed the peak cap")
        if self.voltage_converters < self.cpus + self.gpus:
            raise ConfigError("each CPU and GPU needs its own voltage converter")

    @property
    def hbm_capacity_bytes(self) -> float:
        return self.gpus * self.gpu.hbm_capacity_bytes + self.cpus * self.cpu.hbm_capacity_bytes

    @property
    def ddr_capacity_bytes(self) -> float:
        return self.cpus * self.cpu.ddr_capacity_bytes

    @property
    def nominal_active_power_w(self) -> float:
        return (
            self.cpus * self.cpu_active_draw_w
            + self.gpus * self.gpu_active_draw_w
            + self.idle_overhead_w
        )


@dataclass(frozen=True)
class PowerReport:
    total_w: float
    sustained_ok: bool
    peak_ok: bool
    per_converter_w: tuple[tuple[str, float], ...]


def power_check(
    node: NodeSpec,
    cpu_draw_w: float | None = None,
    gpu_draw_w: float | None = None,
) -> PowerReport:
    """Total draw for the given per-device loads against both power caps.

    Each CPU and GPU sits behind its own voltage converter; the fixed
    overhead covers everything else on the blade.
    """
    cpu_w = node.cpu_active_draw_w if cpu_draw_w is None else cpu_draw_w
    gpu_w = node.gpu_active_draw_w if gpu_draw_w is None else gpu_draw_w
    if cpu_w < 0 or gpu_w < 0:
        raise ConfigError("per-device draws must be >= 0")
    converters = tuple(
        [(f"cpu{i}", cpu_w) for i in range(node.cpus)]
        + [(f"gpu{i}", gpu_w) for i in range(node.gpus)]
    )
    total = node.cpus * cpu_w + node.gpus * gpu_w + node.idle_overhead_w
    return PowerReport(
        total_w=total,
        sustained_ok=total <= node.sustained_power_w,
        peak_ok=total <= node.peak_power_w,
        per_converter_w=converters,
    )


@dataclass(frozen=True)
class SystemSpec:
    """Node figures scaled to a full system."""

    node_count: int
    cpus: int
    gpus: int
    nics: int
    ddr_capacity_bytes: float
    ddr_bandwidth_bytes_per_s: float
    hbm_capacity_bytes: float
    hbm_bandwidth_bytes_per_s: float
    gpu_peak_fp64_flops: float
    storage: StorageSpec | None = None


def aggregate_system(
    node: NodeSpec, node_count: int, storage: StorageSpec | None = None
) -> SystemSpec:
    """Scale per-node figures linearly to node_count nodes."""
    if node_count < 1:
        raise ConfigError(f"node_count must be >= 1, got {node_count}")
    return SystemSpec(
        node_count=node_count,
        cpus=node_count * node.cpus,
        gpus=node_count * node.gpus,
        nics=node_count * node.nics,
        ddr_capacity_bytes=node_count * node.ddr_capacity_bytes,
        ddr_bandwidth_bytes_per_s=node_count * node.ddr_bandwidth_bytes_per_s,
        hbm_capacity_bytes=node_count * node.hbm_capacity_bytes,
        hbm_bandwidth_bytes_per_s=node_count * node.hbm_bandwidth_bytes_per_s,
        gpu_peak_fp64_flops=node_count * node.gpus * peak_flops(node.gpu, "fp64"),
        storage=storage,
    )


@dataclass(frozen=True)
class StorageSpec:
    """Primary object store plus the supporting parallel file system."""

    daos_servers: int = 1024
    drives_per_server: int = 16
    drive_capacity_bytes: float = 15.3e12
    nics_per_server: int = 2
    engines_per_server: int = 2
    ec_data: int = 16
    ec_parity: int = 2
    peak_bandwidth_target: float = 31e12
    lustre_capacity_bytes: float = 100e15
    lustre_peak_bandwidth: float = 650e9

    def __post_init__(self) -> None:
        if min(self.daos_servers, self.drives_per_server) < 1:
            raise ConfigError("server and drive counts must be >= 1")
        if self.ec_data < 1 or self.ec_parity < 0:
            raise ConfigError("erasure coding needs ec_data >= 1 and ec_parity >= 0")

    @property
    def engines(self) -> int:
        return self.daos_servers * self.engines_per_server


@dataclass(frozen=True)
class DaosCapacity:
    raw_bytes: float
    usable_bytes: float
    engines: int


def daos_capacity(storage: StorageSpec) -> DaosCapacity:
    """Raw and erasure-coded usable capacity of the object store."""
    raw = storage.daos_servers * storage.drives_per_server * storage.drive_capacity_bytes
    usable = raw * storage.ec_data / (storage.ec_data + storage.ec_parity)
    return DaosCapacity(raw_bytes=raw, usable_bytes=usable, engines=storage.engines)


def aurora_cpu() -> DeviceSpec:
    """Sapphire Rapids socket with on-package HBM."""
    pv = reference.paper_si
    return DeviceSpec(
        name="xeon-max-9470c",
        kind="cpu",
        units=int(pv("cpu_cores")),
        ops_per_clock_per_unit={},
        max_clock_ghz=0.0,
        hbm_capacity_bytes=pv("cpu_hbm_capacity"),
        hbm_bandwidth_bytes_per_s=pv("cpu_stream_hbm"),
        ddr_capacity_bytes=500e9,
        ddr_bandwidth_bytes_per_s=pv("cpu_stream_ddr"),
        measured_gemm_flops={
            "fp64": pv("cpu_dgemm"),
            "fp32": pv("cpu_sgemm"),
            "bf16": pv("cpu_bf16_gemm"),
            "fp16": pv("cpu_fp16_gemm"),
            "int8": pv("cpu_int8_gemm"),
        },
    )


def aurora_gpu() -> DeviceSpec:
    """Ponte Vecchio GPU: 128 Xe-cores at up to 1.6 GHz with 128 GB HBM."""
    pv = reference.paper_si
    per_xe = xe_core_fp64_ops_per_clock()
    return DeviceSpec(
        name="max-1550",
        kind="gpu",
        units=int(pv("xe_cores_per_gpu")),
        ops_per_clock_per_unit={"fp64": per_xe, "fp32": per_xe},
        max_clock_ghz=pv("gpu_max_clock") / 1e9,
        hbm_capacity_bytes=128e9,
        hbm_bandwidth_bytes_per_s=pv("gpu_stream_hbm"),
        measured_gemm_flops={
            "fp64": pv("gpu_dgemm"),
            "fp32": pv("gpu_sgemm"),
            "tf32": pv("gpu_tf32_gemm"),
            "bf16": pv("gpu_bf16_gemm"),
            "fp16": pv("gpu_fp16_gemm"),
            "int8": pv("gpu_int8_gemm"),
        },
    )


def aurora_node() -> NodeSpec:
    return NodeSpec(cpu=aurora_cpu(), gpu=aurora_gpu())


def aurora_storage() -> StorageSpec:
    return StorageSpec()
