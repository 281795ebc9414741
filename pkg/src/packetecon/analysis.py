"""Closed-form delay and wealth-rate evaluators, plus small-instance oracles.

The delay quantities describe a maximum-priority packet that buys every
favourable trade while everyone else is willing to sell: an exact series for
its expected delay, and simpler upper/lower bounds, including the variants
for more trading periods per round and for thinner seller participation.
The wealth-rate models bracket a two-class economy (no trades / ideal
trades), and the schedule-invariance check brute-forces the fact that with
equal maximum values every feasible steady schedule yields the same wealth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Tuple

from .types import ConfigError, Money


def exact_expected_delay(q: int, exact: bool = False):
    """Expected delay of the always-buying packet in a full queue of size
    ``q``: sum over s of ``s * (s-1) * (q-2)! / ((q-s-1)! * (q-2)^s)``.

    The summand is defined for s = 1..q-1 (the falling factorial runs out
    beyond that).  Terms are accumulated with compensated summation; pass
    ``exact=True`` for big-integer rationals instead of floats.
    """
    if q < 3:
        raise ConfigError(f"queue size must be >= 3, got {q}")
    if exact:
        total = Fraction(0)
        falling = 1  # (q-2)! / (q-s-1)!  == product of (s-1) factors
        for s in range(1, q):
            if s >= 2:
                falling *= q - s
            total += Fraction(s * (s - 1) * falling, (q - 2) ** s)
        return total
    terms = []
    ratio = 1.0  # falling factorial scaled by (q-2)^(s-1)
    for s in range(1, q):
        if s >= 2:
            ratio *= (q - s) / (q - 2)
        terms.append(s * (s - 1) * ratio / (q - 2))
    return math.fsum(terms)


def delay_upper_bound(q: int, b: int = 1) -> float:
    """Upper bound on the always-buying packet's expected delay with ``b``
    trading periods per round.
    """
    if q < 3:
        raise ConfigError(f"queue size must be >= 3, got {q}")
    if b < 1:
        raise ConfigError(f"trading periods must be >= 1, got {b}")
    return (-1 + 2 * b + 2 * math.sqrt(2 * b * (q - 2))) / (2 * b)


def delay_upper_bound_c(q: int, c: float = 1.0) -> float:
    """Upper-bound variant when only one packet in every ``c`` is willing to
    sell its position.
    """
    if q < 3:
        raise ConfigError(f"queue size must be >= 3, got {q}")
    if c < 1:
        raise ConfigError(f"participation ratio must be >= 1, got {c}")
    return 1 - c / 2 + math.sqrt(2 * c * (q - 2))


def delay_lower_bound(q: int, b: int = 1) -> float:
    """Lower bound on the always-buying packet's expected delay."""
    if b < 1:
        raise ConfigError(f"trading periods must be >= 1, got {b}")
    disc = 1 - 8 * b + 4 * b * q
    if disc < 0:
        raise ConfigError(f"bound undefined for q={q}, b={b}")
    return (-1 + 2 * b + math.sqrt(disc)) / (2 * b)


def delay_lower_bound_c(q: int, c: float = 1.0) -> float:
    """Lower-bound variant for one-in-``c`` seller participation."""
    if c < 1:
        raise ConfigError(f"participation ratio must be >= 1, got {c}")
    disc = c * c - 8 * c + 4 * q * c
    if disc < 0:
        raise ConfigError(f"bound undefined for q={q}, c={c}")
    return (2 - c) / 2 + math.sqrt(disc) / 2


def expected_min_uniform(k: int, upper: float) -> float:
    """Expected minimum of ``k`` continuous uniform draws on ``[0, upper]``."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if upper <= 0:
        raise ValueError(f"upper must be positive, got {upper}")
    return upper / (k + 1)


@dataclass(frozen=True)
class WealthScenarioParams:
    """Two-class economy: counts, maximum values, and delay costs for the
    economy and business packets, with ``delay_cap`` the hard delay limit
    the economy packets may sell up to (defaults to four queue lengths).
    """

    n_economy: int
    n_business: int
    v_economy: Money
    v_business: Money
    c_economy: Money
    c_business: Money
    delay_cap: Optional[int] = None

    def __post_init__(self):
        if self.n_economy < 0 or self.n_business < 0 or self.queue_size < 1:
            raise ConfigError("packet counts must be non-negative and sum to >= 1")
        if self.delay_cap is None:
            object.__setattr__(self, "delay_cap", 4 * self.queue_size)
        if self.delay_cap < self.queue_size:
            raise ConfigError(f"delay_cap {self.delay_cap} below queue size {self.queue_size}")

    @property
    def queue_size(self) -> int:
        return self.n_economy + self.n_business


def wealth_no_trades(p: WealthScenarioParams) -> Fraction:
    """Wealth rate when nobody trades: every packet is delivered with delay
    equal to the queue size.
    """
    q = p.queue_size
    return (
        Fraction(p.n_economy, q) * (p.v_economy - p.c_economy * q)
        + Fraction(p.n_business, q) * (p.v_business - p.c_business * q)
    )


def wealth_ideal(p: WealthScenarioParams) -> Fraction:
    """Wealth rate when the economy packets consume their whole delay budget
    and the freed bandwidth goes to the business packets.
    """
    cap = p.delay_cap
    if cap <= p.n_economy:
        raise ConfigError(f"delay_cap {cap} leaves no bandwidth for {p.n_economy} economy packets")
    r_e = Fraction(p.n_economy, cap)
    r_b = 1 - r_e
    d_b = Fraction(p.n_business, r_b) if p.n_business else Fraction(0)
    return r_e * (p.v_economy - p.c_economy * cap) + r_b * (p.v_business - p.c_business * d_b)


def wealth_ideal_feasible(p: WealthScenarioParams, business_delay: int = 2) -> Fraction:
    """Ideal-trades wealth under the feasibility floor: a packet needs one
    round to enter and one to be served, so the business delay is pinned at
    ``business_delay`` and the economy absorbs the rest.
    """
    if business_delay < 2:
        raise ConfigError(f"business delay below the feasible minimum: {business_delay}")
    r_b = Fraction(p.n_business, business_delay)
    r_e = 1 - r_b
    if r_e <= 0:
        raise ConfigError(
            f"{p.n_business} business packets cannot all be served with delay {business_delay}"
        )
    d_e = Fraction(p.n_economy, r_e)
    if d_e > p.delay_cap:
        raise ConfigError(f"economy delay {float(d_e):.1f} would exceed the cap {p.delay_cap}")
    return r_e * (p.v_economy - p.c_economy * d_e) + r_b * (p.v_business - p.c_business * business_delay)


# ---------------------------------------------------------------------------
# Schedule invariance under equal maximum values

@dataclass(frozen=True)
class SteadyFlowInstance:
    """Window-1 flows competing for one service per round: each flow i has a
    maximum value, a delay cost per round, and a deadline on its steady
    per-packet delay.
    """

    max_values: Tuple[Money, ...]
    costs: Tuple[Money, ...]
    deadlines: Tuple[int, ...]

    def __post_init__(self):
        if not (len(self.max_values) == len(self.costs) == len(self.deadlines)):
            raise ConfigError("per-flow field lengths differ")


def enumerate_feasible_delays(deadlines: Tuple[int, ...], min_delay: int = 1) -> Iterator[Tuple[int, ...]]:
    """All integer per-flow delay vectors whose service rates 1/d sum to
    exactly one (the router is never idle) with each d within its deadline.
    """
    n = len(deadlines)

    def rec(i: int, remaining: Fraction, acc: List[int]):
        if i == n:
            if remaining == 0:
                yield tuple(acc)
            return
        if remaining <= 0:
            return
        # the n-i flows left can contribute at most (n-i) * 1/min_delay
        for d in range(min_delay, deadlines[i] + 1):
            r = Fraction(1, d)
            if r > remaining:
                continue
            if remaining - r > Fraction(n - i - 1, min_delay):
                continue
            acc.append(d)
            yield from rec(i + 1, remaining - r, acc)
            acc.pop()

    yield from rec(0, Fraction(1), [])


def steady_wealth(inst: SteadyFlowInstance, delays: Tuple[int, ...]) -> Fraction:
    """Wealth rate of a steady schedule: each flow contributes its benefit
    per round-trip times its service rate.
    """
    total = Fraction(0)
    for v, c, d in zip(inst.max_values, inst.costs, delays):
        total += Fraction(max(v - c * d, 0), d)
    return total


def equal_vmax_schedule_invariance(inst: SteadyFlowInstance, min_delay: int = 1) -> bool:
    """Brute-force check that all feasible steady schedules of the instance
    yield the same wealth rate (exact arithmetic).  True whenever all
    maximum values are equal; witnesses exist when they differ.
    """
    wealths = set()
    for delays in enumerate_feasible_delays(inst.deadlines, min_delay):
        wealths.add(steady_wealth(inst, delays))
        if len(wealths) > 1:
            return False
    return True


def bandwidth_share_rates(
    n_economy: int,
    economy_deadline: int,
    n_business: int,
) -> Dict[str, Tuple[Fraction, Optional[Fraction]]]:
    """Per-class (rate, delay) when economy packets are pinned at their
    deadline rate and business packets split the residual bandwidth equally.
    """
    if economy_deadline < 1:
        raise ConfigError(f"economy deadline must be >= 1, got {economy_deadline}")
    if n_economy < 0 or n_business < 0 or n_economy + n_business == 0:
        raise ConfigError("need a non-empty mix of packets")
    r_e = Fraction(1, economy_deadline) if n_economy else Fraction(0)
    residual = 1 - n_economy * r_e
    if n_business and residual <= 0:
        raise ConfigError(
            f"no bandwidth left for business packets: {n_economy} economy packets "
            f"at deadline {economy_deadline} use the full service rate"
        )
    out: Dict[str, Tuple[Fraction, Optional[Fraction]]] = {}
    out["economy"] = (r_e, Fraction(economy_deadline) if n_economy else None)
    if n_business:
        r_b = residual / n_business
        out["business"] = (r_b, 1 / r_b)
    else:
        out["business"] = (Fraction(0), None)
    return out
