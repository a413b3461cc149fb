"""Shared fixtures. The full preset topology is expensive; build it once."""

import random

import pytest

from fabricmodel.config import FabricConfig, aurora_preset
from fabricmodel.topology import Topology, build_topology


def small_config(**overrides) -> FabricConfig:
    """Four compute groups, small enough for exhaustive route checks."""
    base = dict(
        compute_groups=4,
        storage_groups=1,
        service_groups=1,
        switches_per_group=4,
        chassis_per_group=2,
        switches_per_chassis=2,
        nodes_per_chassis=2,
        nics_per_node=2,
        switch_radix=24,
        global_links_per_compute_pair=2,
        storage_endpoints_per_group=4,
        intra_chassis_port_budget=1,
        global_base_ports=2,
        global_extra_ports=0,
    )
    base.update(overrides)
    return FabricConfig(**base)


def random_feasible_config(rng: random.Random) -> FabricConfig:
    """Draw a structurally valid config; rejection-samples the couplings."""
    while True:
        chassis = rng.randint(1, 3)
        spc = rng.randint(1, 4)
        swg = chassis * spc
        budget = spc - 1
        if spc % 2 == 0:
            budget += rng.randint(0, 2)
        storage = rng.randint(0, 2)
        if storage and 1 + storage > swg:
            continue
        compute = rng.randint(2, 6)
        k = rng.randint(1, 3)
        base = rng.randint(1, 6)
        extra = rng.randint(0, 2)
        first = rng.randint(1, swg)
        last = rng.randint(first, swg)
        ports = swg * base + extra * (last - first + 1)
        if ports < (compute - 1) * k:
            continue
        return FabricConfig(
            compute_groups=compute,
            storage_groups=storage,
            service_groups=rng.randint(0, 1),
            switches_per_group=swg,
            chassis_per_group=chassis,
            switches_per_chassis=spc,
            nodes_per_chassis=rng.randint(1, 3),
            nics_per_node=rng.randint(1, 3),
            switch_radix=256,
            global_links_per_compute_pair=k,
            service_uplinks_per_compute_group=rng.randint(0, 2),
            storage_uplinks_per_io_group=rng.randint(0, 2),
            storage_endpoints_per_group=rng.randint(0, 4),
            service_endpoints_per_group=rng.randint(0, 2),
            intra_chassis_port_budget=budget,
            global_base_ports=base,
            global_extra_ports=extra,
            global_extra_switch_first=first,
            global_extra_switch_last=last,
        )


@pytest.fixture(scope="session")
def aurora_topology() -> Topology:
    return build_topology(aurora_preset())


@pytest.fixture(scope="session")
def small_topology() -> Topology:
    return build_topology(small_config())


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Print the acceptance scorecard, one line per criterion."""
    try:
        from test_acceptance import SCORECARD
    except ImportError:
        return
    if SCORECARD:
        terminalreporter.write_line("")
        terminalreporter.write_line("acceptance scorecard:")
        for line in SCORECARD:
            terminalreporter.write_line(line)
