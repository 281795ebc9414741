"""Random permutations and the trading pairs derived from them.

``fisher_yates`` is the single-pass shuffle; ``PipelineState`` emulates, one
lane-step per trading period, a pipeline of staggered shuffle instances that
emits one finished permutation per period once warm.  The emulation is
sequential: the point is the schedule and the output distribution, not
wall-clock parallelism.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional


def fisher_yates(rng, n: int) -> List[int]:
    """Uniformly random permutation of ``range(n)``.

    Consumes exactly ``n - 1`` draws; the final loop iteration would swap an
    element with itself and is skipped.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    a = list(range(n))
    for i in range(n - 1):
        j = rng.integers(i, n - 1)
        a[i], a[j] = a[j], a[i]
    return a


@dataclass
class _Lane:
    array: List[int]
    step: int = 0


@dataclass
class PipelineState:
    """Staggered shuffle lanes over arrays of size ``size``.

    Lane ``k`` starts ``k`` periods late, so from period ``size - 1`` onward
    exactly one lane finishes per period.  A finished lane keeps reshuffling
    its own array in place, which preserves uniformity of each emission.
    """

    size: int
    periods: int = 0
    lanes: List[_Lane] = field(default_factory=list)

    def __post_init__(self):
        if self.size < 1:
            raise ValueError(f"size must be >= 1, got {self.size}")
        if not self.lanes:
            self.lanes = [_Lane(list(range(self.size))) for _ in range(self.size)]


def pipeline_step(state: PipelineState, rng) -> Optional[List[int]]:
    """Advance every active lane by one shuffle step; return the permutation
    of the lane that completed this period, if any.
    """
    q = state.size
    t = state.periods
    emitted = None
    for k, lane in enumerate(state.lanes):
        if t < k:
            continue  # lane k waits k periods before starting
        i = lane.step
        if i < q - 1:
            j = rng.integers(i, q - 1)
            lane.array[i], lane.array[j] = lane.array[j], lane.array[i]
            lane.step = i + 1
        else:
            # dummy final iteration: the shuffle is complete
            emitted = list(lane.array)
            lane.step = 0
    state.periods = t + 1
    return emitted


@dataclass
class Pairing:
    """Partner map: ``partner[i] == j`` iff positions i and j trade this
    period; the leftover position of an odd-sized draw maps to None.
    """

    partner: List[Optional[int]]

    def pairs(self):
        """Each unordered pair exactly once, in first-member order."""
        seen = set()
        for i, j in enumerate(self.partner):
            if j is None or i in seen:
                continue
            seen.add(j)
            yield (i, j)

    @property
    def unpaired(self) -> Optional[int]:
        for i, j in enumerate(self.partner):
            if j is None:
                return i
        return None


def pairing_from_permutation(perm: List[int]) -> Pairing:
    """Pair consecutive entries of a permutation: entry 2i with entry 2i+1.

    Odd length leaves the last entry unpaired.  The result is a fixed-point
    free involution on the paired positions.
    """
    n = len(perm)
    partner: List[Optional[int]] = [None] * n
    for k in range(0, n - 1, 2):
        a, b = perm[k], perm[k + 1]
        partner[a] = b
        partner[b] = a
    return Pairing(partner)
