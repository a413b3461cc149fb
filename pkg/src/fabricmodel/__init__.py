"""Dragonfly fabric and system-capability modeling toolkit.

Builds deterministic two-tier direct-fabric topologies, computes their
aggregate bandwidth metrics, routes over them, predicts collective costs
from published microbenchmark calibrations, and reproduces the published
aggregate figures of the Aurora system, which ships as the default
preset.
"""

from .collectives import (
    ALGORITHMS,
    CollectiveSpec,
    TrendResult,
    allreduce_time,
    hierarchical_allreduce_time,
    sweep_trend,
)
from .config import FabricConfig, ModelConfig, aurora_preset, load_model_config
from .costmodel import (
    CostParams,
    Measurement,
    aurora_cpu_params,
    aurora_gpu_params,
    calibrate_cost_params,
    p2p_time,
    predicted_bandwidth,
    xe_link_params,
)
from .errors import (
    BadIntermediate,
    ConfigError,
    FabricModelError,
    InfeasibleGlobalPlan,
    InsufficientCalibrationData,
    NonFactorableParticipants,
    NonPowerOfTwo,
    NonUniformGlobalPlan,
    OddGroupCount,
    OracleTooLarge,
    PortBudgetExceeded,
    Unreachable,
    UnsupportedPrecision,
)
from .metrics import (
    FULL_DUPLEX_DOUBLED,
    UNIDIRECTIONAL,
    BandwidthSummary,
    MinCutResult,
    bandwidth_summary,
    bisection_bandwidth,
    global_bandwidth,
    injection_bandwidth,
    min_cut_oracle,
)
from .nodesystem import (
    DaosCapacity,
    DeviceSpec,
    NodeSpec,
    PowerReport,
    StorageSpec,
    SystemSpec,
    aggregate_system,
    aurora_cpu,
    aurora_gpu,
    aurora_node,
    aurora_storage,
    daos_capacity,
    measured_efficiency,
    peak_flops,
    power_check,
    roofline_threshold,
    xe_core_fp64_ops_per_clock,
)
from .routing import HopStats, Route, diameter, min_switch_hops, minimal_routes, valiant_route
from .topology import (
    EntityCounts,
    Group,
    IngestedTopology,
    Link,
    Topology,
    ValidationReport,
    build_topology,
    entity_census,
    export_topology_csv,
    ingest_topology_csv,
    total_switch_ports,
    validate_topology,
)

__version__ = "0.1.0"
