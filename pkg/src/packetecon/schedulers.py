"""Baseline and optimal single-machine schedulers for unit-size packets.

The objective is the total wealth ``sum of w_i * max(d_i - c_i, 0)`` over
jobs with release dates, deadlines, and per-round weights.  Without
deadlines a greedy highest-weight rule is optimal (even online); with
deadlines the optimum is found by assigning jobs to time slots with a
linear assignment solver.  FIFO and worst-case-fair weighted fair queueing
round out the comparison baselines.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from .types import ConfigError, Money


@dataclass(frozen=True)
class Job:
    """Unit-time job: released at ``release``, worthless from ``deadline``
    on, earning ``weight`` per round of slack at completion.
    """

    id: int
    release: int = 0
    deadline: int = 10**9
    weight: Money = 1

    def __post_init__(self):
        if self.release < 0:
            raise ConfigError(f"job {self.id}: release must be >= 0")
        if self.deadline <= self.release:
            raise ConfigError(f"job {self.id}: deadline must exceed release")
        if self.weight < 0:
            raise ConfigError(f"job {self.id}: weight must be >= 0")


@dataclass
class Schedule:
    """Completion time per job id; slots are unit length, so a job finishing
    at time t occupied the slot (t-1, t].
    """

    completion: Dict[int, int]

    def wealth(self, jobs: Sequence[Job]) -> Money:
        return total_wealth(jobs, self)


def total_wealth(jobs: Sequence[Job], schedule: Schedule) -> Money:
    """Realized wealth of a schedule."""
    total: Money = 0
    seen_slots = set()
    for job in jobs:
        c = schedule.completion[job.id]
        if c in seen_slots:
            raise ConfigError(f"two jobs share completion slot {c}")
        seen_slots.add(c)
        if c < job.release + 1:
            raise ConfigError(f"job {job.id} completes at {c} before release {job.release}")
        total += job.weight * max(job.deadline - c, 0)
    return total


def mtw_greedy(jobs: Sequence[Job]) -> Schedule:
    """Serve, each round, the released job with the largest weight (ties by
    id).  Optimal whenever no deadline truncates a served job's value.
    """
    remaining = sorted(jobs, key=lambda j: (j.release, j.id))
    completion: Dict[int, int] = {}
    heap: List[Tuple[Money, int]] = []  # (-weight, id)
    i = 0
    t = 0
    while i < len(remaining) or heap:
        t += 1
        while i < len(remaining) and remaining[i].release <= t - 1:
            heapq.heappush(heap, (-remaining[i].weight, remaining[i].id))
            i += 1
        if not heap:
            # idle until the next release
            t = remaining[i].release
            continue
        _, jid = heapq.heappop(heap)
        completion[jid] = t
    return Schedule(completion=completion)


def mtw_optimal(jobs: Sequence[Job]) -> Schedule:
    """Optimal schedule via linear assignment of jobs to unit time slots.

    Slots run from 1 to ``len(jobs) + max release``; a slot earlier than a
    job's release is forbidden, and profits are ``w * max(d - t, 0)``.  The
    assignment is then compacted to run work-preserving, which cannot lower
    the wealth of any job.
    """
    if not jobs:
        return Schedule(completion={})
    n = len(jobs)
    max_release = max(j.release for j in jobs)
    horizon = n + max_release
    profit = np.zeros((n, horizon), dtype=float)
    feasible = np.zeros((n, horizon), dtype=bool)
    for r, job in enumerate(jobs):
        for t in range(job.release + 1, horizon + 1):
            profit[r, t - 1] = float(job.weight * max(job.deadline - t, 0))
            feasible[r, t - 1] = True
    # forbid pre-release slots with a large negative entry
    penalty = profit.sum() + 1.0
    cost = np.where(feasible, -profit, penalty)
    rows, cols = linear_sum_assignment(cost)
    completion = {}
    for r, c in zip(rows, cols):
        if not feasible[r, c]:
            raise ConfigError("no feasible assignment for the given releases")
        completion[jobs[r].id] = int(c) + 1
    return _compact(jobs, completion)


def _compact(jobs: Sequence[Job], completion: Dict[int, int]) -> Schedule:
    """Pull assigned jobs forward into the earliest free feasible slots.
    Earlier completion never reduces a job's wealth, and the assignment was
    already optimal, so the wealth is unchanged.
    """
    order = sorted(jobs, key=lambda j: completion[j.id])
    compacted: Dict[int, int] = {}
    t = 0
    for job in order:
        t = max(t + 1, job.release + 1)
        compacted[job.id] = t
    return Schedule(completion=compacted)


def brute_force_optimal(jobs: Sequence[Job]) -> Money:
    """Exhaustive maximum wealth over all service orders (oracle for small
    instances only).
    """
    from itertools import permutations

    best: Money = 0
    for order in permutations(jobs):
        t = 0
        w: Money = 0
        for job in order:
            t = max(t + 1, job.release + 1)
            w += job.weight * max(job.deadline - t, 0)
        if w > best:
            best = w
    return best


# ---------------------------------------------------------------------------
# FIFO and worst-case-fair weighted fair queueing

@dataclass(frozen=True)
class Arrival:
    """One packet arriving at the server: which flow, and when."""

    flow: str
    time: int
    index: int = 0  # arrival order tie break


def fifo_schedule(arrivals: Sequence[Arrival]) -> List[Arrival]:
    """Service order under FIFO: arrival time, then arrival index."""
    return sorted(arrivals, key=lambda a: (a.time, a.index))


class Wf2qServer:
    """Worst-case-fair weighted fair queueing over unit-size packets.

    Packets get virtual start/finish stamps against a fluid reference; each
    round the server picks, among eligible packets (virtual start not ahead
    of the virtual clock), the smallest virtual finish, breaking ties by
    flow id.  The virtual clock advances by the served packet's inverse
    total weight share and never falls behind the smallest start in the
    backlog, which keeps every flow within one packet of its fluid share.
    """

    def __init__(self, weights: Dict[str, Money]):
        if not weights or any(w <= 0 for w in weights.values()):
            raise ConfigError("flow weights must be positive")
        self.weights = {f: Fraction(w) for f, w in weights.items()}
        self.vtime = Fraction(0)
        self._last_finish: Dict[str, Fraction] = {f: Fraction(0) for f in weights}
        self._queues: Dict[str, List[Tuple[Fraction, Fraction, Arrival]]] = {
            f: [] for f in weights
        }

    def enqueue(self, arrival: Arrival) -> None:
        f = arrival.flow
        start = max(self.vtime, self._last_finish[f])
        finish = start + 1 / self.weights[f]
        self._last_finish[f] = finish
        self._queues[f].append((start, finish, arrival))

    def backlog(self) -> int:
        return sum(len(q) for q in self._queues.values())

    def serve(self) -> Optional[Arrival]:
        """Pick and remove the next packet; None when idle."""
        heads = [(q[0], f) for f, q in self._queues.items() if q]
        if not heads:
            return None
        eligible = [(h, f) for h, f in heads if h[0] <= self.vtime]
        if not eligible:
            # jump the clock to the earliest start rather than idle
            self.vtime = min(h[0] for h, _ in heads)
            eligible = [(h, f) for h, f in heads if h[0] <= self.vtime]
        (start, finish, arrival), flow = min(eligible, key=lambda e: (e[0][1], e[1]))
        self._queues[flow].pop(0)
        active = sum(self.weights[f] for f, q in self._queues.items() if q or f == flow)
        self.vtime = max(self.vtime + 1 / active, start)
        return arrival


def wf2q_schedule(weights: Dict[str, Money], arrivals: Sequence[Arrival]) -> List[Arrival]:
    """Service order of a fixed arrival list under weighted fair queueing."""
    server = Wf2qServer(weights)
    pending = sorted(arrivals, key=lambda a: (a.time, a.index))
    out: List[Arrival] = []
    i = 0
    t = 0
    while i < len(pending) or server.backlog():
        t += 1
        while i < len(pending) and pending[i].time <= t - 1:
            server.enqueue(pending[i])
            i += 1
        nxt = server.serve()
        if nxt is not None:
            out.append(nxt)
        elif i < len(pending):
            t = pending[i].time
    return out
