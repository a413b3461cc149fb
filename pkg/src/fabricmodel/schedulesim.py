"""Discrete-event simulation of collective communication schedules.

Builds explicit per-process round lists for each collective algorithm and
propagates completion times event by event: a process starts round r once
it has finished round r-1 and the process it receives from has finished
round r-1. Round cost is alpha + transferred bytes * beta plus gamma per
byte reduced locally. This gives an independent route to the collective
cost that the closed forms in collectives.py must reproduce.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Round:
    """One communication step of one process.

    send_to / recv_from are process ranks (None for no transfer that
    direction). bytes_moved is the per-direction payload; reduce_bytes is
    the payload combined locally after the transfer.
    """

    send_to: int | None
    recv_from: int | None
    bytes_moved: float
    reduce_bytes: float = 0.0


Schedule = list[list[Round]]


def ring_schedule(p: int, n: float) -> Schedule:
    """Reduce-scatter then allgather around a ring of p processes."""
    if p == 1:
        return [[]]
    chunk = n / p
    rounds = 2 * (p - 1)
    return [
        [
            Round(
                send_to=(i + 1) % p,
                recv_from=(i - 1) % p,
                bytes_moved=chunk,
                reduce_bytes=chunk if r < p - 1 else 0.0,
            )
            for r in range(rounds)
        ]
        for i in range(p)
    ]


def recursive_doubling_schedule(p: int, n: float) -> Schedule:
    """Full-payload pairwise exchanges over log2(p) rounds; p a power of two."""
    if p & (p - 1):
        raise ValueError(f"recursive doubling needs a power-of-two count, got {p}")
    q = (p - 1).bit_length()
    return [
        [
            Round(send_to=i ^ (1 << r), recv_from=i ^ (1 << r), bytes_moved=n, reduce_bytes=n)
            for r in range(q)
        ]
        for i in range(p)
    ]


def rabenseifner_schedule(p: int, n: float) -> Schedule:
    """Vector-halving reduce-scatter plus mirrored allgather; p a power of two."""
    if p & (p - 1):
        raise ValueError(f"this schedule needs a power-of-two count, got {p}")
    q = (p - 1).bit_length()
    sched: Schedule = []
    for i in range(p):
        rounds = []
        for r in range(q):  # reduce-scatter, halving payloads
            share = n / (1 << (r + 1))
            partner = i ^ (p >> (r + 1))
            rounds.append(
                Round(send_to=partner, recv_from=partner, bytes_moved=share, reduce_bytes=share)
            )
        for r in range(q):  # allgather, doubling payloads
            share = n / (1 << (q - r))
            partner = i ^ (1 << r)
            rounds.append(Round(send_to=partner, recv_from=partner, bytes_moved=share))
        sched.append(rounds)
    return sched


def direct_exchange_schedule(p: int, n: float) -> Schedule:
    """Full-payload shifted exchanges over ceil(log2(p)) rounds, any p."""
    if p == 1:
        return [[]]
    q = (p - 1).bit_length()
    return [
        [
            Round(
                send_to=(i + (1 << r)) % p,
                recv_from=(i - (1 << r)) % p,
                bytes_moved=n,
                reduce_bytes=n,
            )
            for r in range(q)
        ]
        for i in range(p)
    ]


SCHEDULE_BUILDERS = {
    "ring": ring_schedule,
    "recursive_doubling": recursive_doubling_schedule,
    "rabenseifner": rabenseifner_schedule,
    "direct": direct_exchange_schedule,
}


def simulate_schedule(
    schedule: Schedule,
    alpha_s: float,
    beta_s_per_byte: float,
    gamma_s_per_byte: float = 0.0,
    start_s: float = 0.0,
) -> float:
    """Completion time of the slowest process under the round semantics."""
    if not schedule:
        return start_s
    rounds = len(schedule[0])
    if any(len(r) != rounds for r in schedule):
        raise ValueError("all processes must run the same number of rounds")
    clocks = [start_s] * len(schedule)
    for r in range(rounds):
        nxt = []
        for i, rounds_i in enumerate(schedule):
            step = rounds_i[r]
            ready = clocks[i]
            if step.recv_from is not None:
                ready = max(ready, clocks[step.recv_from])
            cost = 0.0
            if step.send_to is not None or step.recv_from is not None:
                cost += alpha_s + step.bytes_moved * beta_s_per_byte
            cost += step.reduce_bytes * gamma_s_per_byte
            nxt.append(ready + cost)
        clocks = nxt
    return max(clocks)


def simulate_allreduce(
    algorithm: str,
    participants: int,
    message_bytes: float,
    alpha_s: float,
    beta_s_per_byte: float,
    gamma_s_per_byte: float = 0.0,
    start_s: float = 0.0,
) -> float:
    """Build and run the schedule for one flat allreduce."""
    try:
        builder = SCHEDULE_BUILDERS[algorithm]
    except KeyError:
        raise ValueError(f"no schedule builder for algorithm {algorithm!r}") from None
    return simulate_schedule(
        builder(participants, message_bytes),
        alpha_s,
        beta_s_per_byte,
        gamma_s_per_byte,
        start_s,
    )


def simulate_hierarchical_allreduce(
    ranks_per_node: int,
    nodes: int,
    message_bytes: float,
    scaleout_algorithm: str,
    scaleup_alpha_s: float,
    scaleup_beta_s_per_byte: float,
    scaleup_gamma_s_per_byte: float,
    scaleout_alpha_s: float,
    scaleout_node_beta_s_per_byte: float,
    scaleout_gamma_s_per_byte: float,
) -> float:
    """Three-phase hierarchical allreduce as an event simulation.

    Phase 1: in-node reduce-scatter, one all-to-all round over dedicated
    per-pair links carrying message/ranks bytes each. Phase 2: one
    inter-node allreduce per rank slot, concurrent, so the per-node byte
    cost scales by ranks_per_node. Phase 3: in-node allgather mirroring
    phase 1 without the reduction.
    """
    r = ranks_per_node
    n = message_bytes
    if r == 1:
        return simulate_allreduce(
            scaleout_algorithm,
            nodes,
            n,
            scaleout_alpha_s,
            scaleout_node_beta_s_per_byte,
            scaleout_gamma_s_per_byte,
        )
    shard = n / r
    t = scaleup_alpha_s + shard * scaleup_beta_s_per_byte
    t += (n - shard) * scaleup_gamma_s_per_byte
    t = simulate_allreduce(
        scaleout_algorithm,
        nodes,
        shard,
        scaleout_alpha_s,
        scaleout_node_beta_s_per_byte * r,
        scaleout_gamma_s_per_byte,
        start_s=t,
    )
    t += scaleup_alpha_s + shard * scaleup_beta_s_per_byte
    return t
