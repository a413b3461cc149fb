"""Latency-bandwidth cost model for point-to-point transfers.

A transfer of n bytes over k NICs costs

    t = alpha + n * beta / (k * eff(k))

with eff(1) = 1 and eff(k) the measured aggregation efficiency for
striping across k NICs. alpha and beta are calibrated from published
microbenchmarks: beta from the single-NIC large-message bandwidth, alpha
from the smallest-message latency after subtracting its bandwidth share.
A gamma term (seconds per reduced byte) rides along for collectives that
combine payloads; it defaults to zero.

Calibration presets exist for host-resident (cpu) and device-resident
(gpu) buffers. The host set pins alpha at the zero-byte latency exactly;
the device set has no zero-byte row, so alpha extrapolates from the
smallest measured message. Efficiencies above 1.0 (measurement noise)
clamp to 1.0.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from . import reference
from .errors import ConfigError, InsufficientCalibrationData

KIB = 1024  # message sizes quoted in KiB are binary


@dataclass(frozen=True)
class CostParams:
    """Calibrated alpha-beta-gamma parameters for one buffer location."""

    alpha_s: float
    beta_s_per_byte: float
    gamma_s_per_byte: float = 0.0
    nics_per_node: int = 1
    nic_aggregation_efficiency: float = 1.0
    location: str = "cpu"

    def __post_init__(self) -> None:
        if self.alpha_s < 0 or self.beta_s_per_byte < 0 or self.gamma_s_per_byte < 0:
            raise ConfigError("cost parameters must be >= 0")
        if self.nics_per_node < 1:
            raise ConfigError("nics_per_node must be >= 1")
        if not 0.0 < self.nic_aggregation_efficiency <= 1.0:
            raise ConfigError("nic_aggregation_efficiency must be in (0, 1]")

    def efficiency(self, nics: int) -> float:
        return 1.0 if nics == 1 else self.nic_aggregation_efficiency

    def node_beta_s_per_byte(self) -> float:
        """Effective per-byte cost with all NICs of the node striped."""
        return self.beta_s_per_byte / (self.nics_per_node * self.efficiency(self.nics_per_node))


def p2p_time(params: CostParams, message_bytes: float, nics: int = 1) -> float:
    """Predicted one-way transfer time for message_bytes over nics NICs."""
    if message_bytes < 0:
        raise ConfigError(f"message_bytes must be >= 0, got {message_bytes}")
    if not 1 <= nics <= params.nics_per_node:
        raise ConfigError(
            f"nics must be in 1..{params.nics_per_node}, got {nics}"
        )
    return params.alpha_s + message_bytes * params.beta_s_per_byte / (
        nics * params.efficiency(nics)
    )


def predicted_bandwidth(params: CostParams, nics: int = 1) -> float:
    """Asymptotic striped bandwidth in bytes/s (alpha amortized away)."""
    if not 1 <= nics <= params.nics_per_node:
        raise ConfigError(f"nics must be in 1..{params.nics_per_node}, got {nics}")
    return nics * params.efficiency(nics) / params.beta_s_per_byte


@dataclass(frozen=True)
class Measurement:
    """One calibration point.

    kind "latency" carries seconds for a message of message_bytes; kind
    "bandwidth" carries bytes/s sustained over nics NICs.
    """

    kind: str
    location: str
    message_bytes: float
    value: float
    nics: int = 1

    def __post_init__(self) -> None:
        if self.kind not in ("latency", "bandwidth"):
            raise ConfigError(f"unknown measurement kind {self.kind!r}")
        if self.value < 0 or self.message_bytes < 0 or self.nics < 1:
            raise ConfigError("measurement values must be non-negative, nics >= 1")


def calibrate_cost_params(
    measurements: list[Measurement],
    location: str = "cpu",
    gamma_s_per_byte: float = 0.0,
) -> CostParams:
    """Fit CostParams to the measurements taken at the given location.

    Requires at least one single-NIC bandwidth point (defines beta) and
    one latency point (defines alpha at the smallest message size). The
    widest multi-NIC bandwidth point sets the aggregation efficiency and
    the striping width recorded in nics_per_node.
    """
    mine = [m for m in measurements if m.location == location]
    lat = sorted(
        (m for m in mine if m.kind == "latency"), key=lambda m: m.message_bytes
    )
    bw = [m for m in mine if m.kind == "bandwidth"]
    single = sorted((m for m in bw if m.nics == 1), key=lambda m: m.message_bytes)
    if not lat or not single:
        raise InsufficientCalibrationData(
            f"need a latency point and a single-NIC bandwidth point for {location!r}"
        )
    beta = 1.0 / single[-1].value
    base = lat[0]
    alpha = base.value - base.message_bytes * beta
    if alpha < 0:
        raise InsufficientCalibrationData(
            "bandwidth share exceeds the smallest-message latency"
        )
    multi = sorted((m for m in bw if m.nics > 1), key=lambda m: m.nics)
    if multi:
        widest = multi[-1]
        eff = min(1.0, widest.value / (widest.nics * single[-1].value))
        nics = widest.nics
    else:
        eff = 1.0
        nics = 1
    return CostParams(
        alpha_s=alpha,
        beta_s_per_byte=beta,
        gamma_s_per_byte=gamma_s_per_byte,
        nics_per_node=nics,
        nic_aggregation_efficiency=eff,
        location=location,
    )


def reference_measurements(location: str) -> list[Measurement]:
    """Published microbenchmark points for one buffer location."""
    pv = reference.paper_si
    if location == "cpu":
        return [
            Measurement("latency", "cpu", 0, pv("pingpong_cpu_0b")),
            Measurement("latency", "cpu", 4 * KIB, pv("pingpong_cpu_4kib")),
            Measurement("latency", "cpu", 64 * KIB, pv("pingpong_cpu_64kib")),
            Measurement("bandwidth", "cpu", 512 * KIB, pv("bandwidth_cpu_1nic"), nics=1),
            Measurement("bandwidth", "cpu", 512 * KIB, pv("bandwidth_cpu_4nic"), nics=4),
        ]
    if location == "gpu":
        return [
            Measurement("latency", "gpu", 4 * KIB, pv("pingpong_gpu_4kib")),
            Measurement("latency", "gpu", 64 * KIB, pv("pingpong_gpu_64kib")),
            Measurement("bandwidth", "gpu", 512 * KIB, pv("bandwidth_gpu_1nic"), nics=1),
            Measurement("bandwidth", "gpu", 512 * KIB, pv("bandwidth_gpu_4nic"), nics=4),
        ]
    raise ConfigError(f"unknown buffer location {location!r}")


@lru_cache(maxsize=None)
def aurora_cpu_params() -> CostParams:
    return calibrate_cost_params(reference_measurements("cpu"), "cpu")


@lru_cache(maxsize=None)
def aurora_gpu_params() -> CostParams:
    return calibrate_cost_params(reference_measurements("gpu"), "gpu")


def xe_link_params() -> CostParams:
    """In-node scale-up port: one dedicated link per peer pair.

    No published in-node launch latency exists, so alpha is zero;
    override via dataclasses.replace when a better figure is available.
    """
    return CostParams(
        alpha_s=0.0,
        beta_s_per_byte=1.0 / reference.paper_si("xe_link_bandwidth"),
        location="gpu",
    )
