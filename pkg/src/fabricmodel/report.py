"""Reproduction checks and the table/CSV emitters behind the CLI.

Each check recomputes one figure from the model and compares it with the
published value from the reference dataset. Check kinds:

    rel          relative error within a pinned tolerance
    abs          absolute difference within a pinned tolerance
    exact        integer equality
    lower_bound  computed value at least the published floor
    factor       computed and published within a bounded ratio
    qualitative  string classification equality

All output is deterministic: fixed check order, fixed float formatting,
no timestamps, so identical inputs render byte-identical reports.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import collectives, costmodel, metrics, nodesystem, reference, routing, topology
from .costmodel import aurora_cpu_params, aurora_gpu_params, p2p_time, predicted_bandwidth
from .nodesystem import (
    NodeSpec,
    StorageSpec,
    daos_capacity,
    measured_efficiency,
    peak_flops,
    power_check,
    roofline_threshold,
    xe_core_fp64_ops_per_clock,
)

KIB = costmodel.KIB

FIG7_NODE_COUNTS = [16, 32, 64, 128, 256, 512]
FIG7_MESSAGE_BYTES = 1_000_000_000
FIG7_RANKS_PER_NODE = 12


@dataclass(frozen=True)
class CheckResult:
    quantity: str
    kind: str
    computed: str
    expected: str
    unit: str
    error: str  # relative error, absolute difference or ratio, per kind
    tolerance: str
    passed: bool
    citation: str

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "FAIL"


def _num(x: float) -> str:
    return f"{x:.6g}"


def _rel_check(
    quantity: str, computed: float, pv: reference.PaperValue, tol: float, scale: float = 1.0
) -> CheckResult:
    """Relative-error check against a published value; scale converts the
    computed SI figure into the published unit for display."""
    expected = pv.si_value
    rel = abs(computed - expected) / abs(expected)
    return CheckResult(
        quantity=quantity,
        kind="rel",
        computed=_num(computed * scale),
        expected=_num(pv.value),
        unit=pv.unit,
        error=f"{rel:.6f}",
        tolerance=f"<= {tol:g}",
        passed=rel <= tol,
        citation=pv.citation,
    )


def _derived_rel(
    quantity: str, computed: float, expected: float, unit: str, tol: float, citation: str
) -> CheckResult:
    rel = abs(computed - expected) / abs(expected)
    return CheckResult(
        quantity=quantity,
        kind="rel",
        computed=_num(computed),
        expected=_num(expected),
        unit=unit,
        error=f"{rel:.6f}",
        tolerance=f"<= {tol:g}",
        passed=rel <= tol,
        citation=citation,
    )


def _exact_check(quantity: str, computed: int, pv: reference.PaperValue) -> CheckResult:
    expected = int(pv.si_value)
    return CheckResult(
        quantity=quantity,
        kind="exact",
        computed=str(computed),
        expected=str(expected),
        unit=pv.unit,
        error=str(abs(computed - expected)),
        tolerance="== expected",
        passed=computed == expected,
        citation=pv.citation,
    )


def _abs_check(
    quantity: str, computed: float, expected: float, unit: str, tol: float, citation: str
) -> CheckResult:
    diff = abs(computed - expected)
    return CheckResult(
        quantity=quantity,
        kind="abs",
        computed=_num(computed),
        expected=_num(expected),
        unit=unit,
        error=_num(diff),
        tolerance=f"<= {tol:g}",
        passed=diff <= tol,
        citation=citation,
    )


def _lower_bound_check(quantity: str, computed: float, pv: reference.PaperValue) -> CheckResult:
    return CheckResult(
        quantity=quantity,
        kind="lower_bound",
        computed=_num(computed),
        expected=_num(pv.value),
        unit=pv.unit,
        error="-",
        tolerance=">= expected",
        passed=computed >= pv.si_value,
        citation=pv.citation,
    )


def _factor_check(
    quantity: str, computed: float, pv: reference.PaperValue, bound: float, scale: float = 1.0
) -> CheckResult:
    expected = pv.si_value
    ratio = max(computed / expected, expected / computed)
    return CheckResult(
        quantity=quantity,
        kind="factor",
        computed=_num(computed * scale),
        expected=_num(pv.value),
        unit=pv.unit,
        error=f"{ratio:.4f}x",
        tolerance=f"<= {bound:g}x",
        passed=ratio <= bound,
        citation=pv.citation,
    )


def _qualitative_check(
    quantity: str, computed: str, expected: str, citation: str
) -> CheckResult:
    return CheckResult(
        quantity=quantity,
        kind="qualitative",
        computed=computed,
        expected=expected,
        unit="-",
        error="-",
        tolerance="== expected",
        passed=computed == expected,
        citation=citation,
    )


def repro_checks(
    topo: topology.Topology,
    node: NodeSpec | None = None,
    storage: StorageSpec | None = None,
) -> tuple[CheckResult, ...]:
    """Run every reproduction check against the published figures."""
    pv = reference.paper_value
    node = node or nodesystem.aurora_node()
    storage = storage or nodesystem.aurora_storage()
    census = topology.entity_census(topo, cpus_per_node=node.cpus, gpus_per_node=node.gpus)
    bw = metrics.bandwidth_summary(topo)
    system = nodesystem.aggregate_system(node, census.compute_nodes, storage)
    checks: list[CheckResult] = []

    # Entity census against the published counts.
    checks.append(_exact_check("nodes", census.compute_nodes, pv("nodes")))
    checks.append(_exact_check("cpus", census.cpus, pv("cpus")))
    checks.append(_exact_check("gpus", census.gpus, pv("gpus")))
    checks.append(
        _exact_check(
            "network_endpoints", census.endpoints_by_kind.get("compute", 0), pv("endpoints")
        )
    )
    checks.append(
        _exact_check("total_groups", sum(census.groups_by_kind.values()), pv("total_groups"))
    )
    checks.append(
        _exact_check(
            "compute_groups", census.groups_by_kind.get("compute", 0), pv("compute_groups")
        )
    )
    checks.append(
        _exact_check(
            "storage_groups", census.groups_by_kind.get("storage", 0), pv("storage_groups")
        )
    )
    checks.append(
        _exact_check(
            "service_groups", census.groups_by_kind.get("service", 0), pv("service_groups")
        )
    )
    compute_groups = census.groups_by_kind.get("compute", 0)
    per_group = (
        2 * census.links_by_class.get(topology.GLOBAL_COMPUTE, 0) // compute_groups
        if compute_groups
        else 0
    )
    checks.append(
        _exact_check("global_links_per_group", per_group, pv("global_links_per_group"))
    )
    checks.append(
        _lower_bound_check(
            "fabric_ports", topology.total_switch_ports(topo), pv("fabric_ports_floor")
        )
    )

    # Aggregate bandwidths; values print in PB/s.
    scale = 1e-15
    checks.append(
        _rel_check(
            "injection_bandwidth", bw.injection_bytes_per_s, pv("injection_bandwidth"), 0.01, scale
        )
    )
    checks.append(
        _rel_check(
            "global_bandwidth", bw.global_bytes_per_s, pv("global_bandwidth"), 0.01, scale
        )
    )
    checks.append(
        _rel_check(
            "global_bandwidth_text",
            bw.global_bytes_per_s,
            pv("global_bandwidth_text"),
            0.01,
            scale,
        )
    )
    checks.append(
        _rel_check(
            "bisection_bandwidth", bw.bisection_bytes_per_s, pv("bisection_bandwidth"), 0.01, scale
        )
    )

    # Memory aggregates.
    checks.append(
        _rel_check("ddr_capacity", system.ddr_capacity_bytes, pv("ddr_capacity"), 0.01, scale)
    )
    checks.append(
        _rel_check(
            "ddr_bandwidth", system.ddr_bandwidth_bytes_per_s, pv("ddr_bandwidth"), 0.01, scale
        )
    )
    checks.append(
        _rel_check("hbm_capacity", system.hbm_capacity_bytes, pv("hbm_capacity"), 0.01, scale)
    )
    checks.append(
        _rel_check(
            "hbm_bandwidth", system.hbm_bandwidth_bytes_per_s, pv("hbm_bandwidth"), 0.01, scale
        )
    )

    # Node arithmetic.
    per_xe = xe_core_fp64_ops_per_clock()
    checks.append(
        _exact_check("xe_core_fp64_ops_per_clock", per_xe, pv("xe_core_fp64_ops_per_clock"))
    )
    checks.append(
        _exact_check(
            "gpu_fp64_ops_per_clock",
            node.gpu.ops_per_clock("fp64"),
            pv("gpu_fp64_ops_per_clock"),
        )
    )
    gpu_peak = peak_flops(node.gpu, "fp64")
    checks.append(
        _derived_rel(
            "gpu_peak_fp64_tflops",
            gpu_peak / 1e12,
            52.4288,
            "TF/s",
            1e-9,
            "node: GPU FP64 ops per clock x GPU max clock",
        )
    )
    checks.append(
        _abs_check(
            "gpu_dgemm_efficiency",
            measured_efficiency(node.gpu, "fp64"),
            0.557,
            "fraction",
            0.001,
            "table4: FP64 GEMM GPU / theoretical peak",
        )
    )
    hpl_per_node = reference.paper_si("hpl_performance") / reference.paper_si("hpl_nodes")
    checks.append(
        _derived_rel(
            "hpl_per_node_tflops",
            hpl_per_node / 1e12,
            109.6,
            "TF/s",
            0.01,
            "table3: HPL / HPL nodes",
        )
    )
    checks.append(
        _rel_check("node_nominal_power", node.nominal_active_power_w, pv("nominal_power"), 0.03)
    )
    checks.append(
        _derived_rel(
            "gpu_fp64_hbm_roofline",
            roofline_threshold(node.gpu, "fp64", "hbm"),
            24.97,
            "flop/byte",
            0.01,
            "node constants / table4: STREAM HBM2e GPU",
        )
    )
    checks.append(
        _derived_rel(
            "cpu_fp64_ddr_roofline",
            roofline_threshold(node.cpu, "fp64", "ddr"),
            12.08,
            "flop/byte",
            0.01,
            "table4: FP64 GEMM CPU / STREAM DDR5 CPU",
        )
    )

    # Storage arithmetic.
    cap = daos_capacity(storage)
    checks.append(
        _rel_check("daos_raw_capacity", cap.raw_bytes, pv("daos_raw_capacity"), 0.04, scale)
    )
    checks.append(
        _rel_check(
            "daos_usable_capacity", cap.usable_bytes, pv("daos_usable_capacity"), 0.02, scale
        )
    )
    checks.append(_exact_check("daos_engines", cap.engines, pv("daos_engines")))

    # Cost-model calibration fidelity.
    cpu = aurora_cpu_params()
    gpu = aurora_gpu_params()
    checks.append(_rel_check("cpu_alpha", cpu.alpha_s, pv("pingpong_cpu_0b"), 0.01, 1e6))
    checks.append(
        _rel_check(
            "cpu_bandwidth_1nic", predicted_bandwidth(cpu, 1), pv("bandwidth_cpu_1nic"), 0.01, 1e-9
        )
    )
    checks.append(
        _rel_check(
            "cpu_bandwidth_4nic", predicted_bandwidth(cpu, 4), pv("bandwidth_cpu_4nic"), 0.01, 1e-9
        )
    )
    checks.append(
        _rel_check(
            "gpu_bandwidth_1nic", predicted_bandwidth(gpu, 1), pv("bandwidth_gpu_1nic"), 0.01, 1e-9
        )
    )
    checks.append(
        _rel_check(
            "gpu_bandwidth_4nic", predicted_bandwidth(gpu, 4), pv("bandwidth_gpu_4nic"), 0.01, 1e-9
        )
    )
    checks.append(
        _rel_check(
            "cpu_pingpong_4kib", p2p_time(cpu, 4 * KIB), pv("pingpong_cpu_4kib"), 0.5, 1e6
        )
    )
    checks.append(
        _rel_check(
            "cpu_pingpong_64kib", p2p_time(cpu, 64 * KIB), pv("pingpong_cpu_64kib"), 0.5, 1e6
        )
    )
    checks.append(
        _rel_check(
            "gpu_pingpong_64kib", p2p_time(gpu, 64 * KIB), pv("pingpong_gpu_64kib"), 0.5, 1e6
        )
    )
    for loc, params in (("cpu", cpu), ("gpu", gpu)):
        for algo in (collectives.RECURSIVE_DOUBLING, collectives.RABENSEIFNER):
            spec = collectives.CollectiveSpec(
                algorithm=algo, participants=8192, message_bytes=8, location=loc
            )
            t = collectives.allreduce_time(spec, params)
            checks.append(
                _factor_check(
                    f"allreduce_8192x8B_{algo}_{loc}",
                    t,
                    pv(f"allreduce_8192_{loc}"),
                    5.0,
                    1e6,
                )
            )

    # Published scaling shapes for the 1 GB sweeps.
    gpu_params = aurora_gpu_params()
    ring = collectives.sweep_trend(
        collectives.RING,
        FIG7_NODE_COUNTS,
        FIG7_MESSAGE_BYTES,
        gpu_params,
        ranks_per_node=FIG7_RANKS_PER_NODE,
    )
    rab = collectives.sweep_trend(
        collectives.RABENSEIFNER, FIG7_NODE_COUNTS, FIG7_MESSAGE_BYTES, gpu_params
    )
    checks.append(
        _qualitative_check(
            "ring_1gb_trend", ring.classification, "linear", "scaling: ring overhead grows with node count"
        )
    )
    checks.append(
        _qualitative_check(
            "rabenseifner_1gb_trend",
            rab.classification,
            "flat",
            "scaling: rabenseifner stays almost constant",
        )
    )

    return tuple(checks)


def render_table(headers: list[str], rows: list[list[str]]) -> str:
    widths = [len(h) for h in headers]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    lines = [
        "  ".join(h.ljust(widths[i]) for i, h in enumerate(headers)).rstrip(),
        "  ".join("-" * w for w in widths),
    ]
    for row in rows:
        lines.append("  ".join(c.ljust(widths[i]) for i, c in enumerate(row)).rstrip())
    return "\n".join(lines) + "\n"


def render_csv(headers: list[str], rows: list[list[str]]) -> str:
    import csv as _csv
    import io

    buf = io.StringIO()
    writer = _csv.writer(buf, lineterminator="\n")
    writer.writerow(headers)
    writer.writerows(rows)
    return buf.getvalue()


CHECK_HEADERS = [
    "quantity",
    "kind",
    "computed",
    "expected",
    "unit",
    "error",
    "tolerance",
    "verdict",
    "citation",
]


def checks_rows(checks: tuple[CheckResult, ...]) -> list[list[str]]:
    return [
        [c.quantity, c.kind, c.computed, c.expected, c.unit, c.error, c.tolerance, c.verdict, c.citation]
        for c in checks
    ]


METRIC_HEADERS = ["metric", "value_bytes_per_s", "convention", "paper_value", "relative_error"]


def metrics_rows(topo) -> list[list[str]]:
    """The three aggregate metrics against their published counterparts."""
    bw = metrics.bandwidth_summary(topo)
    pv = reference.paper_value
    out = []
    for name, value, convention, quantity in (
        ("injection", bw.injection_bytes_per_s, bw.injection_convention, "injection_bandwidth"),
        ("global", bw.global_bytes_per_s, bw.global_convention, "global_bandwidth"),
        ("bisection", bw.bisection_bytes_per_s, bw.bisection_convention, "bisection_bandwidth"),
    ):
        ref = pv(quantity)
        rel = abs(value - ref.si_value) / ref.si_value
        out.append([name, _num(value), convention, _num(ref.si_value), f"{rel:.6f}"])
    return out


SWEEP_HEADERS = ["algo", "nodes", "ranks_per_node", "bytes", "predicted_seconds"]


def sweep_rows(trend: collectives.TrendResult) -> list[list[str]]:
    return [
        [
            trend.algorithm,
            str(nodes),
            str(trend.ranks_per_node),
            str(int(trend.message_bytes)),
            f"{seconds:.9e}",
        ]
        for nodes, seconds in trend.points
    ]


HOP_HEADERS = ["switch_hops", "pairs"]


def hop_rows(stats: routing.HopStats) -> list[list[str]]:
    return [[str(h), str(n)] for h, n in stats.histogram.items()]
