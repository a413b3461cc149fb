"""Independent re-derivations used to cross-check the implementation.

Nothing here calls the code paths under test: hop counts come from a
plain BFS over the link table, cut values from explicit pair recounts.
"""

from collections import defaultdict, deque

from fabricmodel import topology as tp


def bfs_min_hops(topo, src_name: str, dst_name: str):
    """Switch hops of the shortest path confined to the endpoints' groups.

    The subgraph keeps every non-injection link whose both ends lie in
    the two endpoint groups: all their local wiring plus the global links
    between them. Returns None when no such path exists.
    """
    src = topo.endpoint_by_name[src_name]
    dst = topo.endpoint_by_name[dst_name]
    groups = {src.group, dst.group}
    adj = defaultdict(set)
    for link in topo.links:
        if link.link_class == tp.INJECTION:
            continue
        ga = tp.group_name_of(link.end_a)
        gb = tp.group_name_of(link.end_b)
        if ga in groups and gb in groups:
            adj[link.end_a].add(link.end_b)
            adj[link.end_b].add(link.end_a)
    if src.switch == dst.switch:
        return 0
    seen = {src.switch}
    frontier = deque([(src.switch, 0)])
    while frontier:
        sw, hops = frontier.popleft()
        for nxt in adj[sw]:
            if nxt == dst.switch:
                return hops + 1
            if nxt not in seen:
                seen.add(nxt)
                frontier.append((nxt, hops + 1))
    return None


def walk_is_connected(topo, route) -> bool:
    """A route's links must chain src -> switches -> dst without gaps."""
    at = route.src
    for link in route.links:
        if link.end_a == at:
            at = link.end_b
        elif link.end_b == at:
            at = link.end_a
        else:
            return False
    return at == route.dst


def global_pair_counts(topo) -> dict[tuple[str, str], int]:
    """Compute-pair global link counts recounted straight off the links."""
    counts: dict[tuple[str, str], int] = defaultdict(int)
    for link in topo.links:
        if link.link_class != tp.GLOBAL_COMPUTE:
            continue
        ga = tp.group_name_of(link.end_a)
        gb = tp.group_name_of(link.end_b)
        counts[tuple(sorted((ga, gb)))] += 1
    return dict(counts)


def port_counts(topo) -> dict[str, int]:
    """Ports per switch recounted straight off the links."""
    counts: dict[str, int] = defaultdict(int)
    switches = set(topo.switches)
    for link in topo.links:
        for end in (link.end_a, link.end_b):
            if end in switches:
                counts[end] += 1
    return dict(counts)
