"""Closed-form allreduce cost models and scaling-trend classification.

All formulas cost a p-participant allreduce of n bytes with latency
alpha, effective per-node byte cost beta' (point-to-point beta divided by
the calibrated NIC striping) and reduction cost gamma per byte:

    ring                2(p-1) a + 2((p-1)/p) n b' + ((p-1)/p) n g
    recursive_doubling  ceil(log2 p) (a + n b' + n g)
    rabenseifner        2 ceil(log2 p) a + 2((p-1)/p) n b' + ((p-1)/p) n g
    direct              costed like recursive_doubling, any p

One participant costs zero for every algorithm. recursive_doubling and
rabenseifner require a power-of-two count at the fabric level.

The hierarchical variant splits a node-dense job into an in-node
reduce-scatter over dedicated per-pair links, one concurrent inter-node
allreduce per rank slot on 1/ranks_per_node of the payload, and an
in-node allgather.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .costmodel import CostParams
from .errors import ConfigError, NonFactorableParticipants, NonPowerOfTwo

RING = "ring"
RECURSIVE_DOUBLING = "recursive_doubling"
RABENSEIFNER = "rabenseifner"
DIRECT = "direct"
HIERARCHICAL = "hierarchical"

ALGORITHMS = (RING, RECURSIVE_DOUBLING, RABENSEIFNER, DIRECT, HIERARCHICAL)
_POWER_OF_TWO_ALGOS = (RECURSIVE_DOUBLING, RABENSEIFNER)

# Flat-vs-linear decision thresholds for sweep classification: flat if the
# fitted change per participant doubling stays under 5% of the mean, linear
# if a straight line in p explains over 99% of the variance.
FLAT_SLOPE_FRACTION = 0.05
LINEAR_R2_THRESHOLD = 0.99


def _ceil_log2(p: int) -> int:
    return (p - 1).bit_length()


@dataclass(frozen=True)
class CollectiveSpec:
    """One allreduce instance.

    participants counts every rank; ranks_per_node > 1 marks a
    hierarchical job whose fabric-level width is participants divided by
    ranks_per_node. location tags which calibration set applies.
    """

    algorithm: str
    participants: int
    message_bytes: float
    location: str = "cpu"
    ranks_per_node: int = 1

    def __post_init__(self) -> None:
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}")
        if self.participants < 1:
            raise ConfigError(f"participants must be >= 1, got {self.participants}")
        if self.message_bytes < 0:
            raise ConfigError("message_bytes must be >= 0")
        if self.ranks_per_node < 1:
            raise ConfigError("ranks_per_node must be >= 1")
        if self.location not in ("cpu", "gpu"):
            raise ConfigError(f"unknown buffer location {self.location!r}")
        if self.participants % self.ranks_per_node:
            raise NonFactorableParticipants(
                f"{self.participants} ranks do not split into nodes of "
                f"{self.ranks_per_node}"
            )
        nodes = self.nodes
        if self.algorithm in _POWER_OF_TWO_ALGOS and nodes & (nodes - 1):
            raise NonPowerOfTwo(
                f"{self.algorithm} requires a power-of-two count, got {nodes}"
            )

    @property
    def nodes(self) -> int:
        return self.participants // self.ranks_per_node


def _closed_form(
    algorithm: str, p: int, n: float, alpha: float, beta: float, gamma: float
) -> float:
    if p == 1:
        return 0.0
    frac = (p - 1) / p
    if algorithm == RING:
        return 2 * (p - 1) * alpha + 2 * frac * n * beta + frac * n * gamma
    if algorithm in (RECURSIVE_DOUBLING, DIRECT):
        return _ceil_log2(p) * (alpha + n * beta + n * gamma)
    if algorithm == RABENSEIFNER:
        return 2 * _ceil_log2(p) * alpha + 2 * frac * n * beta + frac * n * gamma
    raise ConfigError(f"no closed form for algorithm {algorithm!r}")


def allreduce_time(spec: CollectiveSpec, params: CostParams) -> float:
    """Predicted seconds for a flat (single-level) allreduce."""
    if spec.algorithm == HIERARCHICAL or spec.ranks_per_node > 1:
        raise ConfigError("node-dense jobs go through hierarchical_allreduce_time")
    return _closed_form(
        spec.algorithm,
        spec.participants,
        spec.message_bytes,
        params.alpha_s,
        params.node_beta_s_per_byte(),
        params.gamma_s_per_byte,
    )


def hierarchical_allreduce_time(
    spec: CollectiveSpec,
    scaleup_params: CostParams,
    scaleout_params: CostParams,
) -> float:
    """Predicted seconds for the three-phase hierarchical allreduce.

    spec.algorithm names the inter-node stage; the literal value
    "hierarchical" delegates it to the direct exchange. With
    ranks_per_node == 1 this degenerates to allreduce_time of the
    inter-node algorithm, exactly.
    """
    algo = DIRECT if spec.algorithm == HIERARCHICAL else spec.algorithm
    r = spec.ranks_per_node
    n = spec.message_bytes
    nodes = spec.nodes
    beta_node = scaleout_params.node_beta_s_per_byte()
    if r == 1:
        return _closed_form(
            algo, nodes, n, scaleout_params.alpha_s, beta_node, scaleout_params.gamma_s_per_byte
        )
    shard = n / r
    up = scaleup_params.alpha_s + shard * scaleup_params.beta_s_per_byte
    up += (n - shard) * scaleup_params.gamma_s_per_byte
    # r concurrent inter-node allreduces share the node's NICs.
    out = _closed_form(
        algo,
        nodes,
        shard,
        scaleout_params.alpha_s,
        beta_node * r,
        scaleout_params.gamma_s_per_byte,
    )
    gather = scaleup_params.alpha_s + shard * scaleup_params.beta_s_per_byte
    return up + out + gather


@dataclass(frozen=True)
class TrendResult:
    """A node-count sweep with its scaling classification."""

    algorithm: str
    message_bytes: float
    ranks_per_node: int
    points: tuple[tuple[int, float], ...]  # (nodes, predicted seconds)
    classification: str  # "flat", "linear" or "other"
    flat_fraction_per_doubling: float
    linear_r_squared: float


def _classify(nodes: np.ndarray, times: np.ndarray) -> tuple[str, float, float]:
    mean = float(times.mean())
    if mean == 0.0:
        return "flat", 0.0, 1.0
    log_slope = float(np.polyfit(np.log2(nodes), times, 1)[0])
    flat_frac = abs(log_slope) / mean
    coeffs = np.polyfit(nodes, times, 1)
    residuals = times - np.polyval(coeffs, nodes)
    ss_tot = float(((times - mean) ** 2).sum())
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - float((residuals**2).sum()) / ss_tot
    if flat_frac < FLAT_SLOPE_FRACTION:
        return "flat", flat_frac, r2
    if r2 > LINEAR_R2_THRESHOLD:
        return "linear", flat_frac, r2
    return "other", flat_frac, r2


def sweep_trend(
    algorithm: str,
    node_counts: list[int],
    message_bytes: float,
    params: CostParams,
    ranks_per_node: int = 1,
) -> TrendResult:
    """Cost a node-count sweep and classify its growth.

    The ring chains every rank, so its participant count is nodes times
    ranks_per_node and its latency term grows with the full rank count.
    The power-of-two and direct exchanges run at node granularity: ranks
    first combine inside the node, one slot per rank then crosses the
    fabric, which leaves their sweep cost a function of nodes alone.
    """
    if not node_counts:
        raise ConfigError("node_counts must be non-empty")
    if len(set(node_counts)) != len(node_counts):
        raise ConfigError("node_counts must not repeat")
    if algorithm not in ALGORITHMS or algorithm == HIERARCHICAL:
        raise ConfigError(f"sweep_trend needs a concrete algorithm, got {algorithm!r}")
    pts = []
    for nodes in sorted(node_counts):
        p = nodes * ranks_per_node if algorithm == RING else nodes
        spec = CollectiveSpec(
            algorithm=algorithm,
            participants=p,
            message_bytes=message_bytes,
            location=params.location,
        )
        pts.append((nodes, allreduce_time(spec, params)))
    arr_n = np.array([float(n) for n, _ in pts])
    arr_t = np.array([t for _, t in pts])
    if len(pts) >= 2:
        classification, flat_frac, r2 = _classify(arr_n, arr_t)
    else:
        classification, flat_frac, r2 = "flat", 0.0, 1.0
    return TrendResult(
        algorithm=algorithm,
        message_bytes=message_bytes,
        ranks_per_node=ranks_per_node,
        points=tuple(pts),
        classification=classification,
        flat_fraction_per_doubling=flat_frac,
        linear_r_squared=r2,
    )
