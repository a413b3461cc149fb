"""Command-line interface.

Exit codes: 0 on success, 1 when a validation or reproduction check
fails, 2 on usage or configuration errors. Output format is chosen with
--format {table,csv}. The FABRICMODEL_SEED environment variable seeds the
sampled hop-distribution command.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import collectives, report
from .config import ModelConfig, aurora_preset, load_model_config
from .costmodel import aurora_cpu_params, aurora_gpu_params, xe_link_params
from .errors import ConfigError, FabricModelError
from .nodesystem import (
    aurora_node,
    aurora_storage,
    daos_capacity,
    measured_efficiency,
    peak_flops,
    power_check,
    roofline_threshold,
    xe_core_fp64_ops_per_clock,
)
from .routing import diameter, minimal_routes, valiant_route
from .topology import build_topology, export_topology_csv, validate_topology

_BYTE_SUFFIXES = {
    "kib": 1024,
    "mib": 1024**2,
    "gib": 1024**3,
    "kb": 10**3,
    "mb": 10**6,
    "gb": 10**9,
    "b": 1,
}


def parse_bytes(text: str) -> int:
    """Parse a byte count like 8, 512KiB or 1GB (KiB binary, KB decimal)."""
    s = text.strip().lower()
    try:
        for suffix, mult in sorted(_BYTE_SUFFIXES.items(), key=lambda kv: -len(kv[0])):
            if s.endswith(suffix):
                body = s[: -len(suffix)].strip()
                return int(float(body) * mult) if body else mult
        return int(s)
    except ValueError:
        raise ConfigError(f"cannot parse byte count {text!r}") from None


def _load(args) -> ModelConfig:
    if getattr(args, "config", None):
        return load_model_config(args.config)
    return ModelConfig(fabric=aurora_preset(), node=aurora_node(), storage=aurora_storage())


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="INI config file; defaults to the aurora preset")
    p.add_argument(
        "--preset",
        choices=("aurora",),
        default="aurora",
        help="built-in defaults used when no --config is given",
    )
    p.add_argument(
        "--format", choices=("table", "csv"), default="table", help="output format"
    )


def _emit(args, headers: list[str], rows: list[list[str]]) -> None:
    if args.format == "csv":
        sys.stdout.write(report.render_csv(headers, rows))
    else:
        sys.stdout.write(report.render_table(headers, rows))


def _cmd_generate(args) -> int:
    model = _load(args)
    text = export_topology_csv(build_topology(model.fabric))
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    return 0


def _cmd_validate(args) -> int:
    model = _load(args)
    topo = build_topology(model.fabric, strict=False)
    result = validate_topology(topo)
    rows = [[v.kind, v.subject, v.message] for v in result.violations]
    _emit(args, ["kind", "subject", "message"], rows)
    summary = (
        f"checked {len(topo.switches)} switches, {len(topo.links)} links: "
        f"{len(result.violations)} violations\n"
    )
    sys.stdout.write(summary if args.format == "table" else "")
    return 0 if result.ok else 1


def _cmd_metrics(args) -> int:
    model = _load(args)
    topo = build_topology(model.fabric)
    _emit(args, report.METRIC_HEADERS, report.metrics_rows(topo))
    return 0


def _cmd_route(args) -> int:
    model = _load(args)
    topo = build_topology(model.fabric)
    if args.valiant:
        routes = [valiant_route(topo, args.src, args.dst, args.valiant)]
    else:
        routes = list(minimal_routes(topo, args.src, args.dst))
    rows = [
        [
            r.src,
            r.dst,
            r.kind,
            str(r.switch_hops),
            ">".join(str(l.link_id) for l in r.links),
        ]
        for r in routes
    ]
    _emit(args, ["src", "dst", "kind", "switch_hops", "links"], rows)
    return 0


def _cost_params(args, model: ModelConfig):
    if model.cost is not None:
        return model.cost
    return aurora_gpu_params() if args.location == "gpu" else aurora_cpu_params()


def _cmd_collective(args) -> int:
    model = _load(args)
    params = _cost_params(args, model)
    n = parse_bytes(args.bytes)
    if args.sweep:
        lo, _, hi = args.sweep.partition(":")
        lo_n, hi_n = int(lo), int(hi)
        if lo_n < 1 or hi_n < lo_n:
            raise FabricModelError(f"bad sweep range {args.sweep!r}")
        counts = []
        c = lo_n
        while c <= hi_n:
            counts.append(c)
            c *= 2
        trend = collectives.sweep_trend(
            args.algo, counts, n, params, ranks_per_node=args.ranks_per_node
        )
        _emit(args, report.SWEEP_HEADERS, report.sweep_rows(trend))
        trend_line = (
            f"trend: {trend.classification} "
            f"(flat fraction {trend.flat_fraction_per_doubling:.4f}, "
            f"linear r2 {trend.linear_r_squared:.6f})\n"
        )
        if args.format == "table":
            sys.stdout.write(trend_line)
        else:
            sys.stderr.write(trend_line)
        return 0
    if args.nodes is None:
        raise FabricModelError("provide --nodes or --sweep")
    spec = collectives.CollectiveSpec(
        algorithm=args.algo,
        participants=args.nodes * args.ranks_per_node,
        message_bytes=n,
        location=args.location,
        ranks_per_node=args.ranks_per_node,
    )
    if args.ranks_per_node > 1:
        seconds = collectives.hierarchical_allreduce_time(spec, xe_link_params(), params)
    else:
        seconds = collectives.allreduce_time(spec, params)
    rows = [
        [args.algo, str(args.nodes), str(args.ranks_per_node), str(n), f"{seconds:.9e}"]
    ]
    _emit(args, report.SWEEP_HEADERS, rows)
    return 0


def _cmd_nodespec(args) -> int:
    model = _load(args)
    node = model.node
    power = power_check(node)
    rows = [
        ["gpu_xe_cores", str(node.gpu.units), "count"],
        ["xe_core_fp64_ops_per_clock", str(xe_core_fp64_ops_per_clock()), "ops"],
        ["gpu_fp64_ops_per_clock", str(node.gpu.ops_per_clock("fp64")), "ops"],
        ["gpu_peak_fp64", f"{peak_flops(node.gpu, 'fp64') / 1e12:.4f}", "TF/s"],
        ["gpu_peak_fp32", f"{peak_flops(node.gpu, 'fp32') / 1e12:.4f}", "TF/s"],
        ["gpu_dgemm_efficiency", f"{measured_efficiency(node.gpu, 'fp64'):.4f}", "fraction"],
        ["gpu_fp64_hbm_roofline", f"{roofline_threshold(node.gpu, 'fp64', 'hbm'):.3f}", "flop/byte"],
        ["cpu_fp64_ddr_roofline", f"{roofline_threshold(node.cpu, 'fp64', 'ddr'):.3f}", "flop/byte"],
        ["cpu_fp64_hbm_roofline", f"{roofline_threshold(node.cpu, 'fp64', 'hbm'):.3f}", "flop/byte"],
        ["node_hbm_capacity", f"{node.hbm_capacity_bytes / 1e9:.0f}", "GB"],
        ["node_ddr_capacity", f"{node.ddr_capacity_bytes / 1e12:.1f}", "TB"],
        ["node_hbm_bandwidth", f"{node.hbm_bandwidth_bytes_per_s / 1e12:.2f}", "TB/s"],
        ["node_ddr_bandwidth", f"{node.ddr_bandwidth_bytes_per_s / 1e12:.2f}", "TB/s"],
        ["node_nominal_power", f"{power.total_w:.0f}", "W"],
        ["node_sustained_cap", f"{node.sustained_power_w:.0f}", "W"],
        ["node_peak_cap", f"{node.peak_power_w:.0f}", "W"],
        ["power_within_sustained", str(power.sustained_ok).lower(), "-"],
        ["power_within_peak", str(power.peak_ok).lower(), "-"],
    ]
    _emit(args, ["quantity", "value", "unit"], rows)
    return 0


def _cmd_storage(args) -> int:
    model = _load(args)
    st = model.storage
    cap = daos_capacity(st)
    rows = [
        ["daos_servers", str(st.daos_servers), "count"],
        ["daos_drives_per_server", str(st.drives_per_server), "count"],
        ["daos_drive_capacity", f"{st.drive_capacity_bytes / 1e12:.1f}", "TB"],
        ["daos_engines", str(cap.engines), "count"],
        ["daos_raw_capacity", f"{cap.raw_bytes / 1e15:.4f}", "PB"],
        ["daos_usable_capacity", f"{cap.usable_bytes / 1e15:.4f}", "PB"],
        ["daos_ec_scheme", f"{st.ec_data}+{st.ec_parity}", "-"],
        ["daos_peak_bandwidth_target", f"{st.peak_bandwidth_target / 1e12:.0f}", "TB/s"],
        ["lustre_capacity", f"{st.lustre_capacity_bytes / 1e15:.0f}", "PB"],
        ["lustre_peak_bandwidth", f"{st.lustre_peak_bandwidth / 1e9:.0f}", "GB/s"],
    ]
    _emit(args, ["quantity", "value", "unit"], rows)
    return 0


def _cmd_reproduce(args) -> int:
    model = _load(args)
    topo = build_topology(model.fabric)
    checks = report.repro_checks(topo, model.node, model.storage)
    _emit(args, report.CHECK_HEADERS, report.checks_rows(checks))
    failed = [c for c in checks if not c.passed]
    if args.format == "table":
        sys.stdout.write(f"{len(checks) - len(failed)}/{len(checks)} checks passed\n")
    return 1 if failed else 0


def _cmd_diameter(args) -> int:
    model = _load(args)
    topo = build_topology(model.fabric)
    try:
        seed = int(os.environ.get("FABRICMODEL_SEED", "0"))
    except ValueError:
        raise FabricModelError("FABRICMODEL_SEED must be an integer") from None
    stats = diameter(topo, sample_pairs=args.pairs, seed=seed)
    _emit(args, report.HOP_HEADERS, report.hop_rows(stats))
    if args.format == "table":
        sys.stdout.write(
            f"max {stats.max_hops} hops over {stats.pairs_counted} "
            f"{'exhaustive' if stats.exhaustive else 'sampled'} pairs\n"
        )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fabricmodel",
        description="Dragonfly fabric and system-capability modeling toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    common = _add_common

    p = sub.add_parser("generate", help="build a topology and emit its link CSV")
    common(p)
    p.add_argument("--out", help="output path, - for stdout (default)")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("validate", help="recount structural rules over the built links")
    common(p)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("metrics", help="aggregate bandwidths vs the published figures")
    common(p)
    p.set_defaults(func=_cmd_metrics)

    p = sub.add_parser("route", help="minimal or detour routes between two endpoints")
    common(p)
    p.add_argument("src", help="endpoint name, e.g. c0.n0.e0")
    p.add_argument("dst", help="endpoint name, e.g. c1.n0.e0")
    p.add_argument("--valiant", metavar="GROUP", help="detour through this group")
    p.set_defaults(func=_cmd_route)

    p = sub.add_parser("collective", help="predict allreduce cost or sweep node counts")
    common(p)
    p.add_argument(
        "--algo",
        choices=("ring", "recursive_doubling", "rabenseifner", "direct"),
        required=True,
    )
    p.add_argument("--nodes", type=int, help="node count for a single prediction")
    p.add_argument("--sweep", metavar="LO:HI", help="doubling node counts from LO to HI")
    p.add_argument("--bytes", required=True, help="message size, e.g. 8, 512KiB, 1GB")
    p.add_argument("--ranks-per-node", type=int, default=1)
    p.add_argument("--location", choices=("cpu", "gpu"), default="cpu")
    p.set_defaults(func=_cmd_collective)

    p = sub.add_parser("nodespec", help="node capability arithmetic")
    common(p)
    p.set_defaults(func=_cmd_nodespec)

    p = sub.add_parser("storage", help="storage capacity arithmetic")
    common(p)
    p.set_defaults(func=_cmd_storage)

    p = sub.add_parser("reproduce", help="run every reproduction check")
    common(p)
    p.set_defaults(func=_cmd_reproduce)

    p = sub.add_parser("diameter", help="minimal hop distribution over endpoint pairs")
    common(p)
    p.add_argument("--pairs", type=int, default=100_000, help="sample size cap")
    p.set_defaults(func=_cmd_diameter)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FabricModelError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
