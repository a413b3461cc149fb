"""Fabric configuration and the INI-style model config loader.

A FabricConfig fully determines a topology build: group counts, chassis
geometry, per-switch port budgets, and the global link plan. Defaults
reproduce the Aurora fabric exactly; aurora_preset() returns them
unchanged.

Config files use INI sections [fabric], [node], [storage] and [cost].
Every key must belong to the section's schema; unknown keys or sections
are rejected rather than ignored. Each section accepts an optional
``preset`` key (``aurora``, or ``aurora_cpu``/``aurora_gpu`` for [cost])
selecting the baseline that the remaining keys override.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, fields, replace

from .costmodel import CostParams, aurora_cpu_params, aurora_gpu_params
from .errors import ConfigError
from .nodesystem import NodeSpec, StorageSpec, aurora_node, aurora_storage


@dataclass(frozen=True)
class FabricConfig:
    """Structural constants of a two-tier direct fabric.

    Local topology: each group holds chassis_per_group chassis of
    switches_per_chassis switches; chassis switches are all-to-all wired
    inside the chassis (with doubled pairs up to intra_chassis_port_budget
    ports per switch) and singly wired to every switch in other chassis of
    the same group. Storage and service groups are flat all-to-all over
    switches_per_group switches.

    Global topology: every compute-group pair gets
    global_links_per_compute_pair links, drawn from a per-switch port plan
    of global_base_ports each plus global_extra_ports on the 1-based
    switch range [global_extra_switch_first, global_extra_switch_last].
    Compute switch 1 (1-based) sources the service uplinks and switches
    2..storage_groups+1 source the storage uplinks.
    """

    compute_groups: int = 166
    storage_groups: int = 8
    service_groups: int = 1
    switches_per_group: int = 32
    chassis_per_group: int = 8
    switches_per_chassis: int = 4
    nodes_per_chassis: int = 8
    nics_per_node: int = 8
    link_rate_gbps: float = 200.0
    switch_radix: int = 64
    global_links_per_compute_pair: int = 2
    service_uplinks_per_compute_group: int = 2
    storage_uplinks_per_io_group: int = 2
    storage_endpoints_per_group: int = 256
    service_endpoints_per_group: int = 0
    intra_chassis_port_budget: int = 4
    global_base_ports: int = 10
    global_extra_ports: int = 2
    global_extra_switch_first: int = 11
    global_extra_switch_last: int = 15

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        positive = (
            "compute_groups",
            "switches_per_group",
            "chassis_per_group",
            "switches_per_chassis",
            "nodes_per_chassis",
            "nics_per_node",
            "switch_radix",
            "global_links_per_compute_pair",
        )
        for name in positive:
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1, got {getattr(self, name)}")
        nonneg = (
            "storage_groups",
            "service_groups",
            "service_uplinks_per_compute_group",
            "storage_uplinks_per_io_group",
            "storage_endpoints_per_group",
            "service_endpoints_per_group",
            "global_base_ports",
            "global_extra_ports",
        )
        for name in nonneg:
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0, got {getattr(self, name)}")
        if self.link_rate_gbps <= 0:
            raise ConfigError(f"link_rate_gbps must be > 0, got {self.link_rate_gbps}")
        if self.switches_per_group != self.chassis_per_group * self.switches_per_chassis:
            raise ConfigError(
                "switches_per_group must equal chassis_per_group * switches_per_chassis "
                f"({self.switches_per_group} != "
                f"{self.chassis_per_group} * {self.switches_per_chassis})"
            )
        base_local = self.switches_per_chassis - 1
        if self.intra_chassis_port_budget < base_local:
            raise ConfigError(
                "intra_chassis_port_budget must cover the in-chassis all-to-all "
                f"({self.intra_chassis_port_budget} < {base_local})"
            )
        if self.intra_chassis_port_budget > base_local and self.switches_per_chassis % 2:
            raise ConfigError(
                "doubled in-chassis links require an even switches_per_chassis"
            )
        if self.storage_groups and 1 + self.storage_groups > self.switches_per_group:
            raise ConfigError(
                "storage uplinks need switches 2..storage_groups+1 to exist "
                f"(storage_groups={self.storage_groups}, "
                f"switches_per_group={self.switches_per_group})"
            )
        if self.global_extra_ports and not (
            1 <= self.global_extra_switch_first <= self.global_extra_switch_last
        ):
            raise ConfigError("global extra-port switch range must be 1-based and ordered")

    def global_port_capacity(self, switch_index: int) -> int:
        """Global ports available on a 0-based switch index within any group."""
        cap = self.global_base_ports
        if self.global_extra_ports:
            lo = self.global_extra_switch_first - 1
            hi = self.global_extra_switch_last - 1
            if lo <= switch_index <= hi:
                cap += self.global_extra_ports
        return cap

    @property
    def global_ports_per_group(self) -> int:
        return sum(self.global_port_capacity(i) for i in range(self.switches_per_group))

    @property
    def link_rate_bytes_per_s(self) -> float:
        """Per-direction payload rate of one link in bytes per second."""
        return self.link_rate_gbps * 1e9 / 8.0

    @property
    def total_groups(self) -> int:
        return self.compute_groups + self.storage_groups + self.service_groups

    @property
    def nodes_per_group(self) -> int:
        return self.chassis_per_group * self.nodes_per_chassis


def aurora_preset() -> FabricConfig:
    """The Aurora fabric: 166 compute, 8 storage and 1 service group."""
    return FabricConfig()


@dataclass(frozen=True)
class ModelConfig:
    """Bundle of the four configurable model sections."""

    fabric: FabricConfig
    node: NodeSpec
    storage: StorageSpec
    cost: CostParams | None = None  # None means pick a preset by location


_FABRIC_KEYS = {f.name: f.type for f in fields(FabricConfig)}

_NODE_KEYS = (
    "cpus",
    "gpus",
    "nics",
    "cpu_active_draw_w",
    "gpu_active_draw_w",
    "idle_overhead_w",
    "sustained_power_w",
    "peak_power_w",
)

_STORAGE_KEYS = (
    "daos_servers",
    "drives_per_server",
    "drive_capacity_bytes",
    "nics_per_server",
    "engines_per_server",
    "ec_data",
    "ec_parity",
    "peak_bandwidth_target",
    "lustre_capacity_bytes",
    "lustre_peak_bandwidth",
)

_COST_KEYS = (
    "alpha_s",
    "beta_s_per_byte",
    "gamma_s_per_byte",
    "nics_per_node",
    "nic_aggregation_efficiency",
)

_COST_PRESETS = {
    "aurora_cpu": aurora_cpu_params,
    "aurora_gpu": aurora_gpu_params,
}


def _parse_number(section: str, key: str, raw: str, want_int: bool) -> float | int:
    try:
        if want_int:
            return int(raw)
        return float(raw)
    except ValueError:
        kind = "an integer" if want_int else "a number"
        raise ConfigError(f"[{section}] {key} must be {kind}, got {raw!r}") from None


def _section_overrides(
    section: configparser.SectionProxy, name: str, allowed: tuple[str, ...], int_keys: set[str]
) -> dict:
    out = {}
    for key, raw in section.items():
        if key == "preset":
            continue
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r} in section [{name}]")
        out[key] = _parse_number(name, key, raw, key in int_keys)
    return out


def load_model_config(path: str) -> ModelConfig:
    """Parse an INI-style config file into a ModelConfig.

    Unknown sections or keys raise ConfigError. Sections are optional;
    missing ones fall back to the Aurora preset.
    """
    parser = configparser.ConfigParser(interpolation=None, delimiters=("=",))
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"malformed config file {path}: {exc}") from exc

    known = {"fabric", "node", "storage", "cost"}
    unknown = set(parser.sections()) - known
    if unknown:
        raise ConfigError(f"unknown config sections: {sorted(unknown)}")

    fabric = aurora_preset()
    if parser.has_section("fabric"):
        sec = parser["fabric"]
        preset = sec.get("preset", "aurora")
        if preset != "aurora":
            raise ConfigError(f"unknown fabric preset {preset!r}")
        int_keys = {k for k, t in _FABRIC_KEYS.items() if "int" in str(t)}
        overrides = _section_overrides(sec, "fabric", tuple(_FABRIC_KEYS), int_keys)
        fabric = replace(fabric, **overrides)

    node = aurora_node()
    if parser.has_section("node"):
        sec = parser["node"]
        preset = sec.get("preset", "aurora")
        if preset != "aurora":
            raise ConfigError(f"unknown node preset {preset!r}")
        overrides = _section_overrides(sec, "node", _NODE_KEYS, {"cpus", "gpus", "nics"})
        node = replace(node, **overrides)

    storage = aurora_storage()
    if parser.has_section("storage"):
        sec = parser["storage"]
        preset = sec.get("preset", "aurora")
        if preset != "aurora":
            raise ConfigError(f"unknown storage preset {preset!r}")
        int_keys = {
            "daos_servers",
            "drives_per_server",
            "nics_per_server",
            "engines_per_server",
            "ec_data",
            "ec_parity",
        }
        overrides = _section_overrides(sec, "storage", _STORAGE_KEYS, int_keys)
        storage = replace(storage, **overrides)

    cost: CostParams | None = None
    if parser.has_section("cost"):
        sec = parser["cost"]
        preset = sec.get("preset", "aurora_cpu")
        if preset not in _COST_PRESETS:
            raise ConfigError(f"unknown cost preset {preset!r}")
        cost = _COST_PRESETS[preset]()
        overrides = _section_overrides(sec, "cost", _COST_KEYS, {"nics_per_node"})
        if overrides:
            cost = replace(cost, **overrides)

    return ModelConfig(fabric=fabric, node=node, storage=storage, cost=cost)
