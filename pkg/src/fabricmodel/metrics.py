"""Aggregate bandwidth metrics over a built or ingested topology.

Counting conventions matter more than the arithmetic here:

  - injection is reported per direction (traffic entering the fabric),
    matching how the published figure counts one NIC link once;
  - global and bisection default to full_duplex_doubled, counting both
    directions of every full-duplex link, which is the only convention
    that reproduces the published global and bisection figures.

Every value is a plain sum or product over the link table, recounted
from the links rather than read back from the builder's config, so the
same functions work on re-ingested CSV topologies.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .errors import NonUniformGlobalPlan, OddGroupCount, OracleTooLarge
from .topology import (
    COMPUTE,
    GLOBAL_COMPUTE,
    INJECTION,
    _sorted_pair,
    group_kind_of,
    group_name_of,
)

UNIDIRECTIONAL = "unidirectional"
FULL_DUPLEX_DOUBLED = "full_duplex_doubled"
CONVENTIONS = (UNIDIRECTIONAL, FULL_DUPLEX_DOUBLED)


def _multiplier(convention: str) -> float:
    if convention == UNIDIRECTIONAL:
        return 1.0
    if convention == FULL_DUPLEX_DOUBLED:
        return 2.0
    raise ValueError(f"unknown counting convention {convention!r}")


def injection_bandwidth(topo, convention: str = UNIDIRECTIONAL) -> float:
    """Sum of compute-node injection link rates in bytes/s."""
    total = 0.0
    for link in topo.links:
        if link.link_class != INJECTION:
            continue
        ep = link.end_b if ".sw" in link.end_a else link.end_a
        if group_kind_of(group_name_of(ep)) == COMPUTE:
            total += link.rate_bytes_per_s
    return total * _multiplier(convention)


def global_bandwidth(topo, convention: str = FULL_DUPLEX_DOUBLED) -> float:
    """Sum of compute-to-compute global link rates in bytes/s."""
    total = sum(
        link.rate_bytes_per_s for link in topo.links if link.link_class == GLOBAL_COMPUTE
    )
    return total * _multiplier(convention)


def _compute_pair_capacity(topo) -> dict[tuple[str, str], float]:
    """Per-direction global capacity between each compute group pair."""
    caps: dict[tuple[str, str], float] = {}
    for link in topo.links:
        if link.link_class != GLOBAL_COMPUTE:
            continue
        key = _sorted_pair(group_name_of(link.end_a), group_name_of(link.end_b))
        caps[key] = caps.get(key, 0.0) + link.rate_bytes_per_s
    return caps


def bisection_bandwidth(topo, convention: str = FULL_DUPLEX_DOUBLED) -> float:
    """Analytic balanced group-partition cut in bytes/s.

    With a uniform global plan every balanced bipartition of the G
    compute groups cuts (G/2)^2 pair capacities, so the cut value needs
    no search. Requires an even G and the same capacity on every pair;
    use min_cut_oracle for irregular plans.
    """
    names = topo.compute_group_names()
    if len(names) % 2:
        raise OddGroupCount(f"{len(names)} compute groups cannot split evenly")
    caps = _compute_pair_capacity(topo)
    if len(names) < 2:
        return 0.0
    expected = len(names) * (len(names) - 1) // 2
    values = set(caps.values())
    if len(caps) != expected or len(values) != 1:
        raise NonUniformGlobalPlan(
            "per-pair global capacity is not uniform; use min_cut_oracle"
        )
    per_pair = values.pop()
    half = len(names) // 2
    return half * half * per_pair * _multiplier(convention)


@dataclass(frozen=True)
class MinCutResult:
    bytes_per_s: float
    side_a: tuple[str, ...]
    side_b: tuple[str, ...]
    convention: str


def min_cut_oracle(
    topo, convention: str = FULL_DUPLEX_DOUBLED, max_groups: int = 12
) -> MinCutResult:
    """Exhaustive minimum balanced bipartition of the compute groups.

    Enumerates every balanced split (group 0 pinned to side A to halve
    the work) and sums the cut pair capacities from the link table, so it
    is valid for irregular plans. Exponential in the group count; refuses
    more than max_groups groups.
    """
    names = topo.compute_group_names()
    g = len(names)
    if g % 2:
        raise OddGroupCount(f"{g} compute groups cannot split evenly")
    if g > max_groups:
        raise OracleTooLarge(f"{g} compute groups exceed the exhaustive bound {max_groups}")
    if g < 2:
        return MinCutResult(0.0, names, (), convention)
    caps = _compute_pair_capacity(topo)
    rest = names[1:]
    best: tuple[float, tuple[str, ...]] | None = None
    for chosen in combinations(rest, g // 2 - 1):
        side_a = (names[0],) + chosen
        in_a = set(side_a)
        side_b = tuple(n for n in names if n not in in_a)
        cut = sum(
            caps.get(_sorted_pair(a, b), 0.0) for a in side_a for b in side_b
        )
        if best is None or cut < best[0]:
            best = (cut, side_a)
    cut, side_a = best
    in_a = set(side_a)
    side_b = tuple(n for n in names if n not in in_a)
    return MinCutResult(
        bytes_per_s=cut * _multiplier(convention),
        side_a=side_a,
        side_b=side_b,
        convention=convention,
    )


@dataclass(frozen=True)
class BandwidthSummary:
    """The three aggregate metrics with their reporting conventions."""

    injection_bytes_per_s: float
    injection_convention: str
    global_bytes_per_s: float
    global_convention: str
    bisection_bytes_per_s: float
    bisection_convention: str


def bandwidth_summary(topo) -> BandwidthSummary:
    return BandwidthSummary(
        injection_bytes_per_s=injection_bandwidth(topo),
        injection_convention=UNIDIRECTIONAL,
        global_bytes_per_s=global_bandwidth(topo),
        global_convention=FULL_DUPLEX_DOUBLED,
        bisection_bytes_per_s=bisection_bandwidth(topo),
        bisection_convention=FULL_DUPLEX_DOUBLED,
    )
