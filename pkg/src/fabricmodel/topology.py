"""Deterministic construction of the two-tier direct fabric.

Naming encodes structure so a serialized topology can be re-ingested
without side tables:

    c12          compute group 12         s3 / v0   storage / service group
    c12.sw5      switch 5 of group c12
    c12.n37      node 37 of group c12 (chassis index 37 // nodes_per_chassis)
    c12.n37.e4   NIC endpoint 4 of that node
    s3.x100      storage endpoint 100 of group s3

Link classes: injection (switch to endpoint), local_intra_chassis,
local_inter_chassis (any in-group switch pair spanning chassis, including
the flat all-to-all inside storage and service groups), global_compute
(compute pair), global_service and global_storage (uplinks). In-group
cabling is electrical, everything between groups is optical; storage
groups mix media in the installed system but are tagged electrical here
since the model does not track cable runs.

Build order is fixed (injection, local, global, uplinks; groups in index
order) so identical configs serialize byte-identically.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field

from .config import FabricConfig
from .errors import InfeasibleGlobalPlan, PortBudgetExceeded

INJECTION = "injection"
LOCAL_INTRA_CHASSIS = "local_intra_chassis"
LOCAL_INTER_CHASSIS = "local_inter_chassis"
GLOBAL_COMPUTE = "global_compute"
GLOBAL_SERVICE = "global_service"
GLOBAL_STORAGE = "global_storage"

LINK_CLASSES = (
    INJECTION,
    LOCAL_INTRA_CHASSIS,
    LOCAL_INTER_CHASSIS,
    GLOBAL_COMPUTE,
    GLOBAL_SERVICE,
    GLOBAL_STORAGE,
)
LOCAL_CLASSES = (LOCAL_INTRA_CHASSIS, LOCAL_INTER_CHASSIS)
GLOBAL_CLASSES = (GLOBAL_COMPUTE, GLOBAL_SERVICE, GLOBAL_STORAGE)

ELECTRICAL = "electrical"
OPTICAL = "optical"

COMPUTE = "compute"
STORAGE = "storage"
SERVICE = "service"

_KIND_PREFIX = {COMPUTE: "c", STORAGE: "s", SERVICE: "v"}
_PREFIX_KIND = {v: k for k, v in _KIND_PREFIX.items()}


@dataclass(frozen=True)
class Link:
    link_id: int
    end_a: str
    end_b: str
    link_class: str
    medium: str
    rate_gbps: float

    @property
    def rate_bytes_per_s(self) -> float:
        """Per-direction payload rate in bytes per second."""
        return self.rate_gbps * 1e9 / 8.0


@dataclass(frozen=True)
class Endpoint:
    name: str
    switch: str
    group: str
    node: str | None  # None for storage and service endpoints


@dataclass(frozen=True)
class Group:
    name: str
    kind: str
    switches: tuple[str, ...]
    chassis: tuple[tuple[str, ...], ...]  # empty for storage/service groups
    nodes: tuple[str, ...]


@dataclass(frozen=True, eq=False)
class Topology:
    """An immutable built fabric with lookup indexes.

    The index dicts are derived from links/groups/endpoints at
    construction and must be treated as read-only.
    """

    config: FabricConfig
    groups: tuple[Group, ...]
    endpoints: tuple[Endpoint, ...]
    links: tuple[Link, ...]
    group_by_name: dict[str, Group] = field(default_factory=dict)
    endpoint_by_name: dict[str, Endpoint] = field(default_factory=dict)
    switch_group: dict[str, str] = field(default_factory=dict)
    injection_link: dict[str, Link] = field(default_factory=dict)
    switch_pair_links: dict[tuple[str, str], tuple[Link, ...]] = field(default_factory=dict)
    group_pair_links: dict[tuple[str, str], tuple[Link, ...]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.group_by_name.update({g.name: g for g in self.groups})
        self.endpoint_by_name.update({e.name: e for e in self.endpoints})
        for g in self.groups:
            for sw in g.switches:
                self.switch_group[sw] = g.name
        sw_pairs: defaultdict[tuple[str, str], list[Link]] = defaultdict(list)
        grp_pairs: defaultdict[tuple[str, str], list[Link]] = defaultdict(list)
        for link in self.links:
            if link.link_class == INJECTION:
                ep = link.end_b if ".sw" in link.end_a else link.end_a
                self.injection_link[ep] = link
            elif link.link_class in LOCAL_CLASSES:
                key = _sorted_pair(link.end_a, link.end_b)
                sw_pairs[key].append(link)
            else:
                ga = group_name_of(link.end_a)
                gb = group_name_of(link.end_b)
                grp_pairs[_sorted_pair(ga, gb)].append(link)
        self.switch_pair_links.update({k: tuple(v) for k, v in sw_pairs.items()})
        self.group_pair_links.update({k: tuple(v) for k, v in grp_pairs.items()})

    @property
    def switches(self) -> tuple[str, ...]:
        return tuple(sw for g in self.groups for sw in g.switches)

    def compute_group_names(self) -> tuple[str, ...]:
        return tuple(g.name for g in self.groups if g.kind == COMPUTE)


def _sorted_pair(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a <= b else (b, a)


def group_name_of(entity: str) -> str:
    """Group prefix of any switch, node or endpoint name."""
    return entity.split(".", 1)[0]


def group_kind_of(entity: str) -> str:
    return _PREFIX_KIND[entity[0]]


def build_topology(config: FabricConfig, strict: bool = True) -> Topology:
    """Build the fabric for a config.

    With strict=True (the default) a per-switch port count above the
    switch radix raises PortBudgetExceeded; strict=False leaves the
    over-budget topology to be inspected via validate_topology. A global
    port plan too small for the compute pair links always raises
    InfeasibleGlobalPlan.
    """
    cfg = config
    cfg.validate()
    needed = (cfg.compute_groups - 1) * cfg.global_links_per_compute_pair
    if cfg.compute_groups > 1 and cfg.global_ports_per_group < needed:
        raise InfeasibleGlobalPlan(
            f"each compute group needs {needed} global ports but the plan "
            f"provides {cfg.global_ports_per_group}"
        )

    groups: list[Group] = []
    endpoints: list[Endpoint] = []
    links: list[Link] = []
    next_id = 0

    def add_link(end_a: str, end_b: str, link_class: str, medium: str) -> None:
        nonlocal next_id
        links.append(Link(next_id, end_a, end_b, link_class, medium, cfg.link_rate_gbps))
        next_id += 1

    def make_group(kind: str, index: int) -> Group:
        name = f"{_KIND_PREFIX[kind]}{index}"
        switches = tuple(f"{name}.sw{i}" for i in range(cfg.switches_per_group))
        chassis: tuple[tuple[str, ...], ...] = ()
        nodes: tuple[str, ...] = ()
        if kind == COMPUTE:
            chassis = tuple(
                switches[ci * cfg.switches_per_chassis : (ci + 1) * cfg.switches_per_chassis]
                for ci in range(cfg.chassis_per_group)
            )
            nodes = tuple(
                f"{name}.n{i}" for i in range(cfg.chassis_per_group * cfg.nodes_per_chassis)
            )
        return Group(name=name, kind=kind, switches=switches, chassis=chassis, nodes=nodes)

    compute = [make_group(COMPUTE, i) for i in range(cfg.compute_groups)]
    storage = [make_group(STORAGE, i) for i in range(cfg.storage_groups)]
    service = [make_group(SERVICE, i) for i in range(cfg.service_groups)]
    groups = compute + storage + service

    # Injection: NICs of a node spread round-robin over its chassis
    # switches, offset per node so uneven NIC counts stay balanced.
    for grp in compute:
        for ci in range(cfg.chassis_per_group):
            for ni in range(cfg.nodes_per_chassis):
                node = grp.nodes[ci * cfg.nodes_per_chassis + ni]
                for k in range(cfg.nics_per_node):
                    sw = grp.chassis[ci][
                        (ni * cfg.nics_per_node + k) % cfg.switches_per_chassis
                    ]
                    ep = f"{node}.e{k}"
                    endpoints.append(Endpoint(name=ep, switch=sw, group=grp.name, node=node))
                    add_link(sw, ep, INJECTION, ELECTRICAL)
    for grp in storage + service:
        count = (
            cfg.storage_endpoints_per_group
            if grp.kind == STORAGE
            else cfg.service_endpoints_per_group
        )
        for e in range(count):
            sw = grp.switches[e % cfg.switches_per_group]
            ep = f"{grp.name}.x{e}"
            endpoints.append(Endpoint(name=ep, switch=sw, group=grp.name, node=None))
            add_link(sw, ep, INJECTION, ELECTRICAL)

    # Local links. Compute chassis: all-to-all singles, then the port
    # budget left over doubles disjoint neighbor pairs round by round.
    extra_rounds = cfg.intra_chassis_port_budget - (cfg.switches_per_chassis - 1)
    for grp in compute:
        for chassis in grp.chassis:
            spc = len(chassis)
            for i in range(spc):
                for j in range(i + 1, spc):
                    add_link(chassis[i], chassis[j], LOCAL_INTRA_CHASSIS, ELECTRICAL)
            for _ in range(extra_rounds):
                for i in range(0, spc - 1, 2):
                    add_link(chassis[i], chassis[i + 1], LOCAL_INTRA_CHASSIS, ELECTRICAL)
        for ci in range(cfg.chassis_per_group):
            for cj in range(ci + 1, cfg.chassis_per_group):
                for a in grp.chassis[ci]:
                    for b in grp.chassis[cj]:
                        add_link(a, b, LOCAL_INTER_CHASSIS, ELECTRICAL)
    for grp in storage + service:
        for i in range(cfg.switches_per_group):
            for j in range(i + 1, cfg.switches_per_group):
                add_link(grp.switches[i], grp.switches[j], LOCAL_INTER_CHASSIS, ELECTRICAL)

    # Global compute links: walk each group's global port slots (switches
    # in index order, each contributing its planned port count) and pull
    # one slot from both groups per link, pairs in lexicographic index
    # order. Even per-switch plans keep a pair's parallel links on the
    # same switch at both ends.
    slot_sequence = [
        si
        for si in range(cfg.switches_per_group)
        for _ in range(cfg.global_port_capacity(si))
    ]
    cursor = [0] * cfg.compute_groups
    for i in range(cfg.compute_groups):
        for j in range(i + 1, cfg.compute_groups):
            for _ in range(cfg.global_links_per_compute_pair):
                sa = compute[i].switches[slot_sequence[cursor[i]]]
                sb = compute[j].switches[slot_sequence[cursor[j]]]
                cursor[i] += 1
                cursor[j] += 1
                add_link(sa, sb, GLOBAL_COMPUTE, OPTICAL)

    # Uplinks: compute switch 0 feeds service groups, switches 1..S feed
    # the S storage groups; landings round-robin over the target group.
    landing = Counter()
    for grp in compute:
        for sv in service:
            for _ in range(cfg.service_uplinks_per_compute_group):
                dst = sv.switches[landing[sv.name] % cfg.switches_per_group]
                landing[sv.name] += 1
                add_link(grp.switches[0], dst, GLOBAL_SERVICE, OPTICAL)
    for grp in compute:
        for gi, st in enumerate(storage):
            for _ in range(cfg.storage_uplinks_per_io_group):
                dst = st.switches[landing[st.name] % cfg.switches_per_group]
                landing[st.name] += 1
                add_link(grp.switches[1 + gi], dst, GLOBAL_STORAGE, OPTICAL)

    topo = Topology(
        config=cfg,
        groups=tuple(groups),
        endpoints=tuple(endpoints),
        links=tuple(links),
    )
    if strict:
        used = switch_port_usage(topo)
        over = {
            sw: total
            for sw, classes in used.items()
            if (total := sum(classes.values())) > cfg.switch_radix
        }
        if over:
            worst = max(over, key=over.get)
            raise PortBudgetExceeded(
                f"{len(over)} switches exceed the radix of {cfg.switch_radix}, "
                f"worst is {worst} with {over[worst]} ports"
            )
    return topo


def switch_port_usage(topo: Topology) -> dict[str, dict[str, int]]:
    """Ports in use per switch per link class, recounted from the links."""
    usage: dict[str, dict[str, int]] = {sw: {} for sw in topo.switches}
    for link in topo.links:
        for end in (link.end_a, link.end_b):
            if end in usage:
                cls = usage[end]
                cls[link.link_class] = cls.get(link.link_class, 0) + 1
    return usage


@dataclass(frozen=True)
class Violation:
    kind: str
    subject: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]
    per_switch_ports: dict[str, dict[str, int]]

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_topology(topo: Topology) -> ValidationReport:
    """Recount the built links against every structural rule.

    Checks are independent of the builder's bookkeeping: port budgets,
    in-group all-to-all reachability, the intra-chassis port budget,
    exact global pair coverage, and one injection link per NIC.
    """
    cfg = topo.config
    usage = switch_port_usage(topo)
    violations: list[Violation] = []

    for sw in topo.switches:
        total = sum(usage[sw].values())
        if total > cfg.switch_radix:
            violations.append(
                Violation(
                    kind="port_budget",
                    subject=sw,
                    message=f"{total} ports used, radix is {cfg.switch_radix}",
                )
            )

    for grp in topo.groups:
        for i, a in enumerate(grp.switches):
            for b in grp.switches[i + 1 :]:
                if _sorted_pair(a, b) not in topo.switch_pair_links:
                    violations.append(
                        Violation(
                            kind="group_all_to_all",
                            subject=grp.name,
                            message=f"no local link between {a} and {b}",
                        )
                    )

    for grp in topo.groups:
        if grp.kind != COMPUTE:
            continue
        for sw in grp.switches:
            intra = usage[sw].get(LOCAL_INTRA_CHASSIS, 0)
            if intra != cfg.intra_chassis_port_budget:
                violations.append(
                    Violation(
                        kind="intra_chassis_budget",
                        subject=sw,
                        message=(
                            f"{intra} intra-chassis ports used, budget is "
                            f"{cfg.intra_chassis_port_budget}"
                        ),
                    )
                )

    names = topo.compute_group_names()
    for i, ga in enumerate(names):
        for gb in names[i + 1 :]:
            got = sum(
                1
                for link in topo.group_pair_links.get(_sorted_pair(ga, gb), ())
                if link.link_class == GLOBAL_COMPUTE
            )
            if got != cfg.global_links_per_compute_pair:
                violations.append(
                    Violation(
                        kind="pair_coverage",
                        subject=f"{ga}-{gb}",
                        message=(
                            f"{got} global links, expected "
                            f"{cfg.global_links_per_compute_pair}"
                        ),
                    )
                )

    per_node = Counter()
    for ep, link in topo.injection_link.items():
        node = topo.endpoint_by_name[ep].node
        if node is not None:
            per_node[node] += 1
    for grp in topo.groups:
        for node in grp.nodes:
            if per_node[node] != cfg.nics_per_node:
                violations.append(
                    Violation(
                        kind="injection",
                        subject=node,
                        message=(
                            f"{per_node[node]} injection links, expected "
                            f"{cfg.nics_per_node}"
                        ),
                    )
                )

    return ValidationReport(violations=tuple(violations), per_switch_ports=usage)


@dataclass(frozen=True)
class EntityCounts:
    groups_by_kind: dict[str, int]
    switches: int
    compute_nodes: int
    endpoints_by_kind: dict[str, int]
    links_by_class: dict[str, int]
    cpus: int
    gpus: int


def entity_census(topo, cpus_per_node: int = 2, gpus_per_node: int = 6) -> EntityCounts:
    """Count every modeled entity; device totals scale from node counts."""
    groups_by_kind = Counter(g.kind for g in topo.groups)
    nodes = len({e.node for e in topo.endpoints if e.node is not None})
    endpoints_by_kind = Counter(group_kind_of(e.group) for e in topo.endpoints)
    links_by_class = Counter(l.link_class for l in topo.links)
    return EntityCounts(
        groups_by_kind=dict(groups_by_kind),
        switches=sum(len(g.switches) for g in topo.groups),
        compute_nodes=nodes,
        endpoints_by_kind=dict(endpoints_by_kind),
        links_by_class=dict(links_by_class),
        cpus=nodes * cpus_per_node,
        gpus=nodes * gpus_per_node,
    )


def total_switch_ports(topo: Topology) -> int:
    return len(topo.switches) * topo.config.switch_radix


CSV_HEADER = "link_id,class,medium,rate_gbps,end_a,end_b"


def export_topology_csv(topo) -> str:
    """Serialize the link table; byte-identical for identical configs."""
    rows = [CSV_HEADER]
    rows.extend(
        f"{l.link_id},{l.link_class},{l.medium},{l.rate_gbps:g},{l.end_a},{l.end_b}"
        for l in topo.links
    )
    return "\n".join(rows) + "\n"


@dataclass(frozen=True, eq=False)
class IngestedTopology:
    """A topology reconstructed from its CSV link table.

    Chassis membership is not encoded in the CSV, so groups come back
    without chassis partitions; census and bandwidth metrics are fully
    recoverable.
    """

    groups: tuple[Group, ...]
    endpoints: tuple[Endpoint, ...]
    links: tuple[Link, ...]

    def compute_group_names(self) -> tuple[str, ...]:
        return tuple(g.name for g in self.groups if g.kind == COMPUTE)


def ingest_topology_csv(text: str) -> IngestedTopology:
    import csv as _csv

    links: list[Link] = []
    switches: defaultdict[str, set[str]] = defaultdict(set)
    nodes: defaultdict[str, set[str]] = defaultdict(set)
    endpoints: list[Endpoint] = []
    for rec in _csv.DictReader(text.splitlines()):
        link = Link(
            link_id=int(rec["link_id"]),
            end_a=rec["end_a"],
            end_b=rec["end_b"],
            link_class=rec["class"],
            medium=rec["medium"],
            rate_gbps=float(rec["rate_gbps"]),
        )
        links.append(link)
        for end in (link.end_a, link.end_b):
            if ".sw" in end:
                switches[group_name_of(end)].add(end)
        if link.link_class == INJECTION:
            sw, ep = (
                (link.end_a, link.end_b) if ".sw" in link.end_a else (link.end_b, link.end_a)
            )
            grp = group_name_of(ep)
            parts = ep.split(".")
            node = ".".join(parts[:2]) if len(parts) == 3 else None
            if node is not None:
                nodes[grp].add(node)
            endpoints.append(Endpoint(name=ep, switch=sw, group=grp, node=node))
    groups = tuple(
        Group(
            name=name,
            kind=group_kind_of(name),
            switches=tuple(sorted(switches[name])),
            chassis=(),
            nodes=tuple(sorted(nodes.get(name, ()))),
        )
        for name in sorted(switches)
    )
    return IngestedTopology(groups=groups, endpoints=tuple(endpoints), links=tuple(links))
