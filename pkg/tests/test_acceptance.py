"""Acceptance gate: the twelve headline reproduction criteria.

Each test records exactly one PASS/FAIL line; the conftest terminal
hook prints the scorecard after the run. Every tolerance is pinned
here, not read from configuration.
"""

import itertools
import math
import random
import subprocess
import sys

from fabricmodel import collectives as cl
from fabricmodel import reference
from fabricmodel import schedulesim as sim
from fabricmodel import topology as tp
from fabricmodel.collectives import CollectiveSpec, allreduce_time, sweep_trend
from fabricmodel.costmodel import (
    KIB,
    CostParams,
    aurora_cpu_params,
    aurora_gpu_params,
    p2p_time,
    predicted_bandwidth,
)
from fabricmodel.metrics import bisection_bandwidth, global_bandwidth, injection_bandwidth, min_cut_oracle
from fabricmodel.nodesystem import (
    aurora_gpu,
    aurora_node,
    aurora_storage,
    daos_capacity,
    measured_efficiency,
    peak_flops,
    power_check,
    xe_core_fp64_ops_per_clock,
)
from fabricmodel.routing import min_switch_hops, minimal_routes, valiant_route
from fabricmodel.topology import build_topology, entity_census, total_switch_ports, validate_topology

import oracles
from conftest import random_feasible_config, small_config


SCORECARD: list[str] = []


def _verdict(ok: bool, name: str, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} {name}: {detail}"
    SCORECARD.append(line)
    print(line)
    assert ok, line


def _within(value: float, target: float, tol: float) -> bool:
    return abs(value / target - 1.0) <= tol


def test_criterion_01_census_closure(aurora_topology):
    census = entity_census(aurora_topology)
    ports = total_switch_ports(aurora_topology)
    ok = (
        census.compute_nodes == 10624
        and census.cpus == 21248
        and census.gpus == 63744
        and census.endpoints_by_kind.get("compute") == 84992
        and census.switches == 5600
        and ports == 358400
        and ports > 300000
    )
    _verdict(
        ok,
        "criterion 1 census closure",
        f"nodes={census.compute_nodes} cpus={census.cpus} gpus={census.gpus} "
        f"endpoints={census.endpoints_by_kind.get('compute')} "
        f"switches={census.switches} ports={ports}",
    )


def test_criterion_02_bandwidth_closure(aurora_topology):
    inj = injection_bandwidth(aurora_topology)
    glob = global_bandwidth(aurora_topology)
    bisect = bisection_bandwidth(aurora_topology)
    ok = (
        _within(inj, 2.12e15, 0.01)
        and _within(glob, 1.37e15, 0.01)
        and _within(bisect, 0.69e15, 0.01)
    )
    _verdict(
        ok,
        "criterion 2 bandwidth closure",
        f"injection={inj / 1e15:.4f} PB/s global={glob / 1e15:.4f} PB/s "
        f"bisection={bisect / 1e15:.4f} PB/s, all within 1%",
    )


def test_criterion_03_memory_closure():
    node = aurora_node()
    count = 10624
    ok = (
        _within(count * node.hbm_capacity_bytes, 9.52e15, 0.01)
        and _within(count * node.ddr_capacity_bytes, 10.62e15, 0.01)
        and _within(count * node.hbm_bandwidth_bytes_per_s, 147.46e15, 0.01)
        and _within(count * node.ddr_bandwidth_bytes_per_s, 5.31e15, 0.01)
    )
    _verdict(
        ok,
        "criterion 3 memory closure",
        f"hbm={count * node.hbm_capacity_bytes / 1e15:.3f} PB "
        f"ddr={count * node.ddr_capacity_bytes / 1e15:.3f} PB "
        f"hbm_bw={count * node.hbm_bandwidth_bytes_per_s / 1e15:.2f} PB/s "
        f"ddr_bw={count * node.ddr_bandwidth_bytes_per_s / 1e15:.2f} PB/s, all within 1%",
    )


def test_criterion_04_port_budget_property(aurora_topology):
    usage = oracles.port_counts(aurora_topology)
    per_class = tp.switch_port_usage(aurora_topology)
    compute_ok = True
    for sw, classes in per_class.items():
        if not sw.startswith("c"):
            continue
        injection = classes.get(tp.INJECTION, 0)
        local = classes.get(tp.LOCAL_INTRA_CHASSIS, 0) + classes.get(tp.LOCAL_INTER_CHASSIS, 0)
        global_ = classes.get(tp.GLOBAL_COMPUTE, 0)
        uplink = classes.get(tp.GLOBAL_SERVICE, 0) + classes.get(tp.GLOBAL_STORAGE, 0)
        if not (injection == 16 and local == 32 and 10 <= global_ <= 12 and uplink <= 2):
            compute_ok = False
            break
    radix_ok = max(usage.values()) <= 64
    rng = random.Random(2024)
    clean = 0
    for _ in range(100):
        cfg = random_feasible_config(rng)
        topo = build_topology(cfg)
        counts = oracles.global_pair_counts(topo)
        expected_pairs = cfg.compute_groups * (cfg.compute_groups - 1) // 2
        if (
            validate_topology(topo).ok
            and len(counts) == expected_pairs
            and set(counts.values()) == {cfg.global_links_per_compute_pair}
        ):
            clean += 1
    ok = compute_ok and radix_ok and clean == 100
    _verdict(
        ok,
        "criterion 4 port budget property",
        f"max ports={max(usage.values())} <= 64, compute breakdown 16/32/10-12/0-2, "
        f"{clean}/100 random configs clean",
    )


def test_criterion_05_min_cut_equivalence():
    cases = 0
    exact = 0
    for groups in (2, 4, 6, 8, 10, 12):
        for k in (1, 2):
            topo = build_topology(
                small_config(
                    compute_groups=groups,
                    global_links_per_compute_pair=k,
                    global_base_ports=6,
                    switch_radix=64,
                )
            )
            cases += 1
            if min_cut_oracle(topo).bytes_per_s == bisection_bandwidth(topo):
                exact += 1
    _verdict(
        exact == cases,
        "criterion 5 min-cut equivalence",
        f"exhaustive oracle equals analytic bisection on {exact}/{cases} "
        "uniform configs up to 12 groups",
    )


def test_criterion_06_routing(small_topology):
    topo = small_topology
    eps = [e.name for e in topo.endpoints if tp.group_kind_of(e.group) == tp.COMPUTE]
    max_hops = 0
    bfs_ok = True
    symmetric = True
    for a, b in itertools.combinations(eps, 2):
        hops = min_switch_hops(topo, a, b)
        max_hops = max(max_hops, hops)
        if hops != oracles.bfs_min_hops(topo, a, b):
            bfs_ok = False
        if hops != min_switch_hops(topo, b, a):
            symmetric = False
    valiant_ok = True
    for dst in ("c1.n0.e0", "c1.n1.e1", "c2.n3.e1"):
        for via in ("c2", "c3"):
            if via == tp.group_name_of(dst):
                continue
            route = valiant_route(topo, "c0.n0.e0", dst, via)
            globals_used = sum(1 for c in route.hop_classes if c in tp.GLOBAL_CLASSES)
            if globals_used != 2:
                valiant_ok = False
    parallel_ok = all(
        len(minimal_routes(topo, "c0.n0.e0", f"{g}.n0.e0")) >= 2 for g in ("c1", "c2", "c3")
    )
    ok = max_hops == 3 and bfs_ok and symmetric and valiant_ok and parallel_ok
    _verdict(
        ok,
        "criterion 6 routing",
        f"exhaustive {len(eps) * (len(eps) - 1) // 2} pairs: max hops={max_hops}, "
        f"BFS oracle agreement={bfs_ok}, symmetry={symmetric}, "
        f"valiant 2 globals={valiant_ok}, parallel routes={parallel_ok}",
    )


def test_criterion_07_collective_oracle_equality():
    params = [
        (1.9e-6, 1 / 23.5e9, 0.0),
        (3.821913e-6, 1 / 35.9e9, 1e-10),
    ]
    worst = 0.0
    checked = 0
    for alpha, beta, gamma in params:
        cost = CostParams(alpha_s=alpha, beta_s_per_byte=beta, gamma_s_per_byte=gamma)
        for p in range(2, 33):
            algos = [cl.RING, cl.DIRECT]
            if p & (p - 1) == 0:
                algos += [cl.RECURSIVE_DOUBLING, cl.RABENSEIFNER]
            for algo in algos:
                for n in (0.0, 8.0, 1e6):
                    spec = CollectiveSpec(algorithm=algo, participants=p, message_bytes=n)
                    closed = allreduce_time(spec, cost)
                    simulated = sim.simulate_allreduce(algo, p, n, alpha, beta, gamma)
                    worst = max(worst, abs(closed - simulated))
                    checked += 1
    singles = all(
        allreduce_time(
            CollectiveSpec(algorithm=a, participants=1, message_bytes=1e6), aurora_cpu_params()
        )
        == 0.0
        for a in (cl.RING, cl.RECURSIVE_DOUBLING, cl.RABENSEIFNER, cl.DIRECT)
    )
    ok = worst <= 1e-9 and singles
    _verdict(
        ok,
        "criterion 7 collective oracle equality",
        f"{checked} closed-form points vs event simulation, worst gap {worst:.2e} s "
        f"<= 1e-9; p=1 costs zero={singles}",
    )


def test_criterion_08_sweep_trends():
    gpu = aurora_gpu_params()
    counts = [16, 32, 64, 128, 256, 512]
    ring = sweep_trend(cl.RING, counts, 1e9, gpu, ranks_per_node=12)
    rab = sweep_trend(cl.RABENSEIFNER, counts, 1e9, gpu, ranks_per_node=12)
    times = [t for _, t in rab.points]
    variation = (max(times) - min(times)) / min(times)
    ok = (
        ring.classification == "linear"
        and ring.linear_r_squared > 0.99
        and rab.classification == "flat"
        and variation < 0.10
    )
    _verdict(
        ok,
        "criterion 8 sweep trends",
        f"1 GB, 12 ranks/node, 16..512 nodes: ring {ring.classification} "
        f"(r2={ring.linear_r_squared:.5f}), rabenseifner {rab.classification} "
        f"(variation={variation:.3%})",
    )


def test_criterion_09_calibration_fidelity():
    cpu = aurora_cpu_params()
    gpu = aurora_gpu_params()
    zero_exact = (
        p2p_time(cpu, 0) == reference.paper_si("pingpong_cpu_0b")
        and math.isclose(p2p_time(cpu, 0), 1.9e-6)
    )
    bw_ok = (
        _within(predicted_bandwidth(cpu, 1), 23.5e9, 0.01)
        and _within(predicted_bandwidth(cpu, 4), 94.7e9, 0.01)
        and _within(predicted_bandwidth(gpu, 1), 23.0e9, 0.01)
        and _within(predicted_bandwidth(gpu, 4), 35.9e9, 0.01)
    )
    honesty = abs(p2p_time(cpu, 64 * KIB) / 5.9e-6 - 1) <= 0.5
    sanity = []
    for algo in (cl.RECURSIVE_DOUBLING, cl.RABENSEIFNER):
        spec = CollectiveSpec(algorithm=algo, participants=8192, message_bytes=8.0)
        t = allreduce_time(spec, cpu)
        ratio = max(t / 53.8e-6, 53.8e-6 / t)
        sanity.append(ratio <= 5.0)
    ok = zero_exact and bw_ok and honesty and all(sanity)
    _verdict(
        ok,
        "criterion 9 calibration fidelity",
        f"0B latency exact={zero_exact}, bandwidth points within 1%={bw_ok}, "
        f"64KiB within 50%={honesty}, 8192-node 8B within 5x={all(sanity)}",
    )


def test_criterion_10_node_arithmetic():
    gpu = aurora_gpu()
    node = aurora_node()
    peak = peak_flops(gpu, "fp64")
    ops_ok = gpu.ops_per_clock("fp64") == 32768 == 128 * xe_core_fp64_ops_per_clock()
    peak_ok = math.isclose(peak, 32768 * 1.6e9) and _within(peak, 52.43e12, 0.001)
    eff = measured_efficiency(gpu, "fp64")
    hpl_per_node = 1.012e18 / 9234
    power = power_check(node)
    ok = (
        ops_ok
        and peak_ok
        and abs(eff - 0.557) <= 0.001
        and _within(hpl_per_node, 109.6e12, 0.001)
        and _within(power.total_w, 3800.0, 0.03)
        and power.sustained_ok
    )
    _verdict(
        ok,
        "criterion 10 node arithmetic",
        f"peak={peak / 1e12:.4f} TF/s, dgemm eff={eff:.4f}, "
        f"hpl/node={hpl_per_node / 1e12:.1f} TF/s, power={power.total_w:.0f} W",
    )


def test_criterion_11_storage_arithmetic():
    cap = daos_capacity(aurora_storage())
    ok = (
        _within(cap.raw_bytes, 260e15, 0.04)
        and _within(cap.usable_bytes, 220e15, 0.02)
        and cap.engines == 2048
    )
    _verdict(
        ok,
        "criterion 11 storage arithmetic",
        f"raw={cap.raw_bytes / 1e15:.4f} PB (within 4% of 260), "
        f"usable={cap.usable_bytes / 1e15:.4f} PB (within 2% of 220), "
        f"engines={cap.engines}",
    )


def test_criterion_12_determinism():
    cmd = [sys.executable, "-m", "fabricmodel.cli", "reproduce", "--preset", "aurora"]
    first = subprocess.run(cmd, capture_output=True, timeout=300)
    second = subprocess.run(cmd, capture_output=True, timeout=300)
    ok = (
        first.returncode == 0
        and second.returncode == 0
        and first.stdout == second.stdout
        and len(first.stdout) > 0
    )
    _verdict(
        ok,
        "criterion 12 determinism",
        f"two reproduce runs: exit codes {first.returncode}/{second.returncode}, "
        f"byte-identical={first.stdout == second.stdout} ({len(first.stdout)} bytes)",
    )
