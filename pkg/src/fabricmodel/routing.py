"""Minimal and detour (Valiant-style) routing over the fabric.

A minimal route takes at most one global link: up to one local hop to a
switch sourcing a global link toward the destination group, the global
hop, and up to one local hop to the destination switch. In-group traffic
needs at most one local hop thanks to the all-to-all guarantee, so no
minimal route exceeds three switch hops.

A detour route concatenates two such segments through an explicitly
chosen intermediate group and therefore crosses exactly two global
links.

Routes include the injection links on both ends; switch_hops counts only
switch-to-switch links.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import BadIntermediate, Unreachable
from .topology import (
    COMPUTE,
    INJECTION,
    Topology,
    _sorted_pair,
    group_name_of,
)


@dataclass(frozen=True)
class Route:
    src: str
    dst: str
    kind: str  # "minimal" or "valiant"
    links: tuple
    switch_hops: int
    intermediate_group: str | None = None

    @property
    def hop_classes(self) -> tuple[str, ...]:
        return tuple(
            l.link_class for l in self.links if l.link_class != INJECTION
        )


def _endpoint(topo: Topology, name: str):
    try:
        return topo.endpoint_by_name[name]
    except KeyError:
        raise Unreachable(f"unknown endpoint {name!r}") from None


def _local_options(topo: Topology, a: str, b: str) -> tuple[tuple, ...]:
    """All single-link local segments between two in-group switches."""
    if a == b:
        return ((),)
    links = topo.switch_pair_links.get(_sorted_pair(a, b))
    if not links:
        raise Unreachable(f"no local link between {a} and {b}")
    return tuple((l,) for l in links)


def _oriented(topo: Topology, link, first_group: str):
    """Link ends ordered so the first lies in first_group."""
    if group_name_of(link.end_a) == first_group:
        return link.end_a, link.end_b
    return link.end_b, link.end_a


def minimal_routes(topo: Topology, src: str, dst: str) -> tuple[Route, ...]:
    """Every minimal route between two endpoints, at the minimum hop count.

    Parallel links produce distinct routes. Raises Unreachable when the
    two groups share no direct global link (which for an intact topology
    only happens between two non-compute groups).
    """
    if src == dst:
        raise Unreachable("source and destination endpoints must differ")
    ep_s = _endpoint(topo, src)
    ep_d = _endpoint(topo, dst)
    inj_s = topo.injection_link[src]
    inj_d = topo.injection_link[dst]

    if ep_s.group == ep_d.group:
        if ep_s.switch == ep_d.switch:
            return (
                Route(src=src, dst=dst, kind="minimal", links=(inj_s, inj_d), switch_hops=0),
            )
        return tuple(
            Route(
                src=src,
                dst=dst,
                kind="minimal",
                links=(inj_s,) + seg + (inj_d,),
                switch_hops=1,
            )
            for seg in _local_options(topo, ep_s.switch, ep_d.switch)
        )

    pair = topo.group_pair_links.get(_sorted_pair(ep_s.group, ep_d.group))
    if not pair:
        raise Unreachable(f"no global link between {ep_s.group} and {ep_d.group}")
    scored = []
    for link in pair:
        u, v = _oriented(topo, link, ep_s.group)
        hops = (ep_s.switch != u) + 1 + (v != ep_d.switch)
        scored.append((hops, link, u, v))
    best = min(hops for hops, *_ in scored)
    routes = []
    for hops, link, u, v in scored:
        if hops != best:
            continue
        for seg_a in _local_options(topo, ep_s.switch, u):
            for seg_b in _local_options(topo, v, ep_d.switch):
                routes.append(
                    Route(
                        src=src,
                        dst=dst,
                        kind="minimal",
                        links=(inj_s,) + seg_a + (link,) + seg_b + (inj_d,),
                        switch_hops=best,
                    )
                )
    return tuple(routes)


def min_switch_hops(topo: Topology, src: str, dst: str) -> int:
    """Minimal switch hop count without materializing the routes."""
    ep_s = _endpoint(topo, src)
    ep_d = _endpoint(topo, dst)
    if ep_s.group == ep_d.group:
        return 0 if ep_s.switch == ep_d.switch else 1
    pair = topo.group_pair_links.get(_sorted_pair(ep_s.group, ep_d.group))
    if not pair:
        raise Unreachable(f"no global link between {ep_s.group} and {ep_d.group}")
    best = 3
    for link in pair:
        u, v = _oriented(topo, link, ep_s.group)
        hops = (ep_s.switch != u) + 1 + (v != ep_d.switch)
        if hops < best:
            best = hops
            if best == 1:
                break
    return best


def valiant_route(topo: Topology, src: str, dst: str, intermediate_group: str) -> Route:
    """Shortest detour route through the chosen intermediate group.

    The intermediate group must differ from both endpoint groups; the
    route always crosses exactly two global links. Ties break on link
    ids, so the choice is deterministic.
    """
    if src == dst:
        raise Unreachable("source and destination endpoints must differ")
    ep_s = _endpoint(topo, src)
    ep_d = _endpoint(topo, dst)
    if intermediate_group not in topo.group_by_name:
        raise BadIntermediate(f"unknown group {intermediate_group!r}")
    if intermediate_group in (ep_s.group, ep_d.group):
        raise BadIntermediate(
            "intermediate group must differ from both endpoint groups"
        )
    leg_a = topo.group_pair_links.get(_sorted_pair(ep_s.group, intermediate_group))
    leg_b = topo.group_pair_links.get(_sorted_pair(intermediate_group, ep_d.group))
    if not leg_a or not leg_b:
        raise Unreachable(
            f"group {intermediate_group} has no links to both endpoint groups"
        )
    best = None
    for l1 in leg_a:
        u1, v1 = _oriented(topo, l1, ep_s.group)
        for l2 in leg_b:
            u2, v2 = _oriented(topo, l2, intermediate_group)
            hops = (
                (ep_s.switch != u1)
                + 1
                + (v1 != u2)
                + 1
                + (v2 != ep_d.switch)
            )
            key = (hops, l1.link_id, l2.link_id)
            if best is None or key < best[0]:
                best = (key, l1, l2, u1, v1, u2, v2)
    (hops, _, _), l1, l2, u1, v1, u2, v2 = best
    links = (topo.injection_link[src],)
    links += _local_options(topo, ep_s.switch, u1)[0]
    links += (l1,)
    links += _local_options(topo, v1, u2)[0]
    links += (l2,)
    links += _local_options(topo, v2, ep_d.switch)[0]
    links += (topo.injection_link[dst],)
    return Route(
        src=src,
        dst=dst,
        kind="valiant",
        links=links,
        switch_hops=hops,
        intermediate_group=intermediate_group,
    )


@dataclass(frozen=True)
class HopStats:
    histogram: dict[int, int]
    max_hops: int
    pairs_counted: int
    exhaustive: bool


def diameter(topo: Topology, sample_pairs: int = 100_000, seed: int = 0) -> HopStats:
    """Minimal hop distribution over compute endpoint pairs.

    Enumerates all pairs when there are at most sample_pairs of them,
    otherwise draws sample_pairs random pairs from the seeded generator,
    so results are reproducible for a given seed.
    """
    eps = [
        e.name
        for e in topo.endpoints
        if topo.group_by_name[e.group].kind == COMPUTE
    ]
    m = len(eps)
    total = m * (m - 1) // 2
    histogram: dict[int, int] = {}
    if total <= sample_pairs:
        for i in range(m):
            for j in range(i + 1, m):
                h = min_switch_hops(topo, eps[i], eps[j])
                histogram[h] = histogram.get(h, 0) + 1
        counted = total
        exhaustive = True
    else:
        rng = random.Random(seed)
        for _ in range(sample_pairs):
            i = rng.randrange(m)
            j = rng.randrange(m - 1)
            if j >= i:
                j += 1
            h = min_switch_hops(topo, eps[i], eps[j])
            histogram[h] = histogram.get(h, 0) + 1
        counted = sample_pairs
        exhaustive = False
    return HopStats(
        histogram=dict(sorted(histogram.items())),
        max_hops=max(histogram) if histogram else 0,
        pairs_counted=counted,
        exhaustive=exhaustive,
    )
