"""The round engine: shift, serve, replace, fail, trade.

Scenario 1 is a closed window-based economy with intrinsic money: every
served packet is immediately replaced by a fresh one from the same flow, and
packets trade queue positions for money during the trading periods of each
round.  Scenario 2 replaces money with a fixed stock of fiat tokens: each
player runs a business/economy flow pair sharing a deposit at their common
source, economy packets liquidate earned fiat into the deposit, business
packets withdraw it to buy better positions, and team failures hand the
team's fiat to the router for random redistribution.

A one-shot drain variant serves a fixed set of packets to completion and is
the engine behind the scheduling comparison.

All account arithmetic is exact; identical (config, seed) pairs produce
identical reports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .pairing import fisher_yates
from .pricing import negotiate, execute_trade, comp_price_window_based, NotWilling
from .rng import SimRng
from .types import (
    BookkeepingError,
    ConfigError,
    FlowKind,
    FlowSpec,
    Money,
    RouterQueueState,
    TradeMode,
    TradeRecord,
    TradingPolicy,
    ValueFunction,
    packet_value,
)

_CONSERVATION_CHECK_EVERY = 1024

_SELL_ONLY = TradingPolicy(mode=TradeMode.SELL_ONLY)
_BUY_ONLY = TradingPolicy(mode=TradeMode.BUY_ONLY)


class Packet:
    """One in-flight packet.  Flow attributes are aliased onto the packet so
    the negotiation hot path reads plain attributes.
    """

    __slots__ = (
        "id", "flow", "kind", "value_fn", "policy", "entry_round", "entry_pos",
        "account", "benefit", "rounds_sold", "rounds_bought", "sell_ok",
        "fiat", "team",
    )

    def __init__(self, flow: FlowSpec, uid: int, entry_round: int, entry_pos: int,
                 fiat: int = 0, team: Optional[int] = None, quote_unit: Optional[Fraction] = None):
        self.id = f"{flow.id}.{uid}"
        self.flow = flow
        self.kind = flow.kind
        self.value_fn = flow.value_fn
        self.policy = flow.policy
        self.entry_round = entry_round
        self.entry_pos = entry_pos
        self.account: Money = 0
        self.rounds_sold = 0
        self.rounds_bought = 0
        self.sell_ok = True
        self.fiat = fiat
        self.team = team
        if quote_unit is None:
            self.benefit = flow.value_fn.max_value
        else:
            self.benefit = flow.value_fn.max_value + fiat * quote_unit

    def projected_delay(self, round_: int, position: int) -> int:
        return round_ + position - self.entry_round + 1


def inject_failure(rng: SimRng, failure_prob: float, queue_size: int) -> Optional[int]:
    """With probability ``failure_prob``, an extra delay drawn uniformly from
    1..queue_size-1; None otherwise.
    """
    if failure_prob <= 0:
        return None
    if queue_size < 2:
        raise ConfigError("failure delays need a queue size of at least 2")
    if rng.random() < failure_prob:
        return rng.integers(1, queue_size - 1)
    return None


@dataclass
class EconomyConfig:
    """Closed window-based economy (scenario 1)."""

    queue_size: int
    flows: List[FlowSpec]
    trading_periods: int = 1
    failure_prob: float = 0.0
    rounds: Optional[int] = None
    deliveries: Optional[int] = None
    seed: int = 0
    warmup_rounds: int = 0
    account_min: Optional[Money] = None   # accounts stay >= -account_min
    account_max: Optional[Money] = None   # accounts stay <= account_max
    record_series: bool = False

    def validate(self) -> None:
        if self.queue_size < 1:
            raise ConfigError(f"queue_size must be >= 1, got {self.queue_size}")
        if self.trading_periods < 1:
            raise ConfigError(f"trading_periods must be >= 1, got {self.trading_periods}")
        if not 0 <= self.failure_prob <= 1:
            raise ConfigError(f"failure_prob must be in [0, 1], got {self.failure_prob}")
        if self.failure_prob > 0 and self.queue_size < 2:
            raise ConfigError("failures need queue_size >= 2")
        if (self.rounds is None) == (self.deliveries is None):
            raise ConfigError("exactly one of rounds/deliveries must be set")
        if (self.rounds or self.deliveries) <= 0:
            raise ConfigError("run length must be positive")
        if self.warmup_rounds < 0:
            raise ConfigError("warmup_rounds must be >= 0")
        if not self.flows:
            raise ConfigError("at least one flow is required")
        seen = set()
        for f in self.flows:
            if f.id in seen:
                raise ConfigError(f"duplicate flow id {f.id!r}")
            seen.add(f.id)
            if f.kind is not FlowKind.WINDOW_BASED:
                raise ConfigError(f"flow {f.id}: scenario 1 uses window-based flows")
            if f.value_fn.max_delay is not None and f.value_fn.max_delay < self.queue_size:
                raise ConfigError(
                    f"flow {f.id}: max_delay {f.value_fn.max_delay} below queue size "
                    f"{self.queue_size}; packets would enter inadmissible"
                )
        if sum(f.window for f in self.flows) != self.queue_size:
            raise ConfigError(
                f"window sizes must sum to the queue size {self.queue_size}, "
                f"got {sum(f.window for f in self.flows)}"
            )


@dataclass
class FlowStats:
    flow_id: str
    delivered: int = 0
    mean_delay: float = 0.0
    delay_std: float = 0.0
    sold: int = 0
    bought: int = 0


@dataclass
class SimulationReport:
    """Outcome of one run: per-flow delay statistics and delivery counts,
    the realized wealth rate, and trade totals.
    """

    rounds: int
    deliveries: int
    wealth_rate: float
    per_flow: List[FlowStats]
    trade_count: int
    seed: int
    zero_state_visits: int = 0
    team_failures: int = 0
    redistributions: int = 0
    wealth_series: Optional[List[float]] = None

    def flow(self, flow_id: str) -> FlowStats:
        for fs in self.per_flow:
            if fs.flow_id == flow_id:
                return fs
        raise KeyError(flow_id)


class _Stats:
    """Streaming mean/std per flow, windowed past the warm-up."""

    __slots__ = ("n", "total", "sq")

    def __init__(self):
        self.n = 0
        self.total = 0.0
        self.sq = 0.0

    def add(self, x: float):
        self.n += 1
        self.total += x
        self.sq += x * x

    def mean(self) -> float:
        return self.total / self.n if self.n else 0.0

    def std(self) -> float:
        if not self.n:
            return 0.0
        m = self.mean()
        return math.sqrt(max(self.sq / self.n - m * m, 0.0))


class ScenarioOneEngine:
    """Round loop for the closed window-based economy.

    Round structure: replacements scheduled for this round enter at the tail
    (in uniformly random relative order when several arrive together), the
    idle packets run the configured trading periods, and at the end of the
    round the head packet reaches its destination, realizing its utility for
    its flow and scheduling its successor (possibly late, on failure).
    """

    def __init__(self, config: EconomyConfig):
        config.validate()
        self.config = config
        self.rng = SimRng(config.seed)
        self.state = RouterQueueState(slots=[], round=0)
        self._uid = 0
        self._pending: List[Tuple[int, FlowSpec]] = []  # (ready_round, flow)
        self._stats: Dict[str, _Stats] = {f.id: _Stats() for f in config.flows}
        self._sold: Dict[str, int] = {f.id: 0 for f in config.flows}
        self._bought: Dict[str, int] = {f.id: 0 for f in config.flows}
        self.deliveries = 0
        self.trade_count = 0
        self.zero_state_visits = 0
        self._wealth = Fraction(0)          # windowed, past warm-up
        self._realized_money = Fraction(0)  # accounts of all delivered packets
        self._series: Optional[List[float]] = [] if config.record_series else None
        self._one_in_c = any(f.policy.sell_one_in_c > 1 for f in config.flows)
        # the period-skip shortcut may drop deadline-capped sellers only when
        # no policy both buys and sells (sellers then never move forward
        # within a round, so a capped seller stays capped)
        self._partitioned = not any(
            f.policy.may_buy and f.policy.may_sell for f in config.flows
        )
        self._seed_initial_queue()
        self._initial_money = self._money_total()

    # -- setup ------------------------------------------------------------

    def _new_packet(self, flow: FlowSpec, entry_round: int, entry_pos: int) -> Packet:
        self._uid += 1
        return Packet(flow, self._uid, entry_round, entry_pos)

    def _seed_initial_queue(self):
        """Start mid-steady-state: the initial cohort is backdated so that a
        trade-free packet at position p is delivered with delay exactly equal
        to the queue size, like every later packet.
        """
        q = self.config.queue_size
        pos = 0
        for flow in self.config.flows:
            for _ in range(flow.window):
                pkt = self._new_packet(flow, entry_round=pos + 2 - q, entry_pos=q - 1)
                self.state.slots.append(pkt)
                pos += 1

    # -- invariants --------------------------------------------------------

    def _money_total(self) -> Fraction:
        return sum((p.account for p in self.state.slots), Fraction(0)) + self._realized_money

    def _check_conservation(self):
        if self._money_total() != self._initial_money:
            raise BookkeepingError(
                f"money not conserved: started with {self._initial_money}, "
                f"now {self._money_total()}"
            )

    # -- round phases -------------------------------------------------------

    def _admit_arrivals(self, t: int):
        ready = [item for item in self._pending if item[0] <= t]
        if not ready:
            return 0
        self._pending = [item for item in self._pending if item[0] > t]
        if len(ready) > 1:
            order = fisher_yates(self.rng, len(ready))
            ready = [ready[i] for i in order]
        was_empty = not self.state.slots
        for _, flow in ready:
            pos = len(self.state.slots)
            self.state.slots.append(self._new_packet(flow, t, pos))
        if was_empty and len(self.state.slots) == self.config.queue_size:
            self.zero_state_visits += 1  # full simultaneous re-entry, all fresh
        return len(ready)

    def _draw_sell_participation(self, slots):
        for pkt in slots:
            c = pkt.policy.sell_one_in_c
            pkt.sell_ok = c == 1 or self.rng.random() * c < 1

    def _no_trade_possible(self, t: int) -> bool:
        """True when no policy-compatible (seller ahead, buyer behind) pair
        exists, so the remaining periods of this round cannot trade.
        """
        slots = self.state.slots
        min_sell = None
        max_buy = None
        for pos in range(1, len(slots)):
            pkt = slots[pos]
            if min_sell is None and pkt.policy.may_sell:
                if not self._partitioned:
                    min_sell = pos
                else:
                    md = pkt.value_fn.max_delay
                    if md is None or pkt.projected_delay(t, pos) + 1 <= md:
                        min_sell = pos
            if pkt.policy.may_buy:
                max_buy = pos
        return min_sell is None or max_buy is None or min_sell >= max_buy

    def _run_trading_periods(self, t: int):
        slots = self.state.slots
        n_idle = len(slots) - 1
        if n_idle < 2:
            return
        cfg = self.config
        for period in range(cfg.trading_periods):
            if period > 0 and self._no_trade_possible(t):
                break
            if self._one_in_c:
                self._draw_sell_participation(slots[1:])
            perm = fisher_yates(self.rng, n_idle)
            for k in range(0, n_idle - 1, 2):
                pa = perm[k] + 1
                pb = perm[k + 1] + 1
                if pa > pb:
                    pa, pb = pb, pa
                seller = slots[pa]
                buyer = slots[pb]
                trade = negotiate(
                    seller, buyer,
                    seller_pos=pa, buyer_pos=pb,
                    seller_delay=seller.projected_delay(t, pa),
                    buyer_delay=buyer.projected_delay(t, pb),
                    round=t, period=period,
                    account_min=cfg.account_min, account_max=cfg.account_max,
                )
                if trade is not None:
                    execute_trade(self.state, trade, cfg.account_min, cfg.account_max)
                    self.trade_count += 1
                    self._sold[seller.flow.id] += 1
                    self._bought[buyer.flow.id] += 1

    def _deliver(self, t: int):
        pkt = self.state.slots.pop(0)
        delay = t - pkt.entry_round + 1
        if delay != pkt.entry_pos + 1 + pkt.rounds_sold - pkt.rounds_bought:
            raise BookkeepingError(
                f"delay identity violated for {pkt.id}: aged {delay}, "
                f"entry {pkt.entry_pos} sold {pkt.rounds_sold} bought {pkt.rounds_bought}"
            )
        md = pkt.value_fn.max_delay
        if md is not None and delay > md:
            raise BookkeepingError(f"{pkt.id} traded past its deadline: {delay} > {md}")
        extra = inject_failure(self.rng, self.config.failure_prob, self.config.queue_size)
        ready = t + 1
        if extra is not None:
            delay += extra  # charged to the packet just served
            ready += extra
        self._pending.append((ready, pkt.flow))
        self._realized_money += pkt.account
        self.deliveries += 1
        benefit = packet_value(pkt.value_fn, delay) + pkt.account
        in_window = t > self.config.warmup_rounds
        if in_window:
            self._wealth += benefit
            st = self._stats[pkt.flow.id]
            st.add(delay)
        if self._series is not None:
            self._series.append(float(benefit))

    def step(self) -> int:
        """Run one full round; returns the new round counter."""
        self.state.round += 1
        t = self.state.round
        self._admit_arrivals(t)
        if len(self.state.slots) > self.config.queue_size:
            raise BookkeepingError("queue exceeded its capacity")
        self._run_trading_periods(t)
        if self.state.slots:
            self._deliver(t)
        if t % _CONSERVATION_CHECK_EVERY == 0:
            self._check_conservation()
        return t

    def run(self) -> SimulationReport:
        cfg = self.config
        if cfg.rounds is not None:
            for _ in range(cfg.rounds):
                self.step()
        else:
            while self.deliveries < cfg.deliveries:
                self.step()
        self._check_conservation()
        return self._report()

    def _report(self) -> SimulationReport:
        t = self.state.round
        window = max(t - self.config.warmup_rounds, 1)
        per_flow = [
            FlowStats(
                flow_id=f.id,
                delivered=self._stats[f.id].n,
                mean_delay=self._stats[f.id].mean(),
                delay_std=self._stats[f.id].std(),
                sold=self._sold[f.id],
                bought=self._bought[f.id],
            )
            for f in self.config.flows
        ]
        return SimulationReport(
            rounds=t,
            deliveries=self.deliveries,
            wealth_rate=float(self._wealth) / window,
            per_flow=per_flow,
            trade_count=self.trade_count,
            seed=self.config.seed,
            zero_state_visits=self.zero_state_visits,
            wealth_series=self._series,
        )


def run_round(engine: ScenarioOneEngine) -> int:
    """Advance a scenario engine by one round."""
    return engine.step()


def run_scenario1(config: EconomyConfig) -> SimulationReport:
    """Run the closed window-based economy to its configured length."""
    return ScenarioOneEngine(config).run()


# ---------------------------------------------------------------------------
# Scenario 2: fiat money, flow-pair deposits, team failures

@dataclass(frozen=True)
class TeamSpec:
    """One player: a business flow and an economy flow sharing a deposit."""

    id: str
    economy_value: ValueFunction
    business_value: ValueFunction


@dataclass
class FiatEconomyConfig:
    """Adapted economy (scenario 2): window-1 flow pairs trading fiat."""

    teams: List[TeamSpec]
    fiat_total: int
    trading_periods: int = 1
    failure_prob: float = 0.0
    rounds: Optional[int] = None
    seed: int = 0
    warmup_rounds: int = 0
    deposit_bound: Optional[int] = None   # fiat a deposit can hold
    packet_fiat_bound: Optional[int] = None

    def validate(self):
        if not self.teams:
            raise ConfigError("at least one team is required")
        if self.fiat_total < 0:
            raise ConfigError("fiat_total must be >= 0")
        if self.trading_periods < 1:
            raise ConfigError("trading_periods must be >= 1")
        if not 0 <= self.failure_prob <= 1:
            raise ConfigError("failure_prob must be in [0, 1]")
        if self.rounds is None or self.rounds <= 0:
            raise ConfigError("rounds must be positive")
        q = 2 * len(self.teams)
        for team in self.teams:
            for vf in (team.economy_value, team.business_value):
                if vf.max_delay is not None and vf.max_delay < q:
                    raise ConfigError(
                        f"team {team.id}: max_delay {vf.max_delay} below queue size {q}"
                    )

    @property
    def queue_size(self) -> int:
        return 2 * len(self.teams)


class ScenarioTwoEngine:
    """Round loop for the fiat economy.

    Fiat is integral, never negative, and conserved: every unit is in a
    packet account, a pending replacement, a team deposit, or the router
    escrow awaiting redistribution.  Trades settle in whole fiat units; both
    sides value fiat at the configured per-team rate (the mean of the two
    delay costs) when quoting, but delivered utility never includes it.
    """

    def __init__(self, config: FiatEconomyConfig):
        config.validate()
        self.config = config
        self.rng = SimRng(config.seed)
        self.state = RouterQueueState(slots=[], round=0)
        self._uid = 0
        q = config.queue_size
        self.flows: List[FlowSpec] = []
        self._team_of_flow: Dict[str, int] = {}
        self._unit: List[Fraction] = []
        for i, team in enumerate(config.teams):
            econ = FlowSpec(
                id=f"{team.id}.economy", kind=FlowKind.WINDOW_BASED,
                value_fn=team.economy_value,
                policy=_SELL_ONLY, window=1,
            )
            biz = FlowSpec(
                id=f"{team.id}.business", kind=FlowKind.WINDOW_BASED,
                value_fn=team.business_value,
                policy=_BUY_ONLY, window=1,
            )
            self.flows += [econ, biz]
            self._team_of_flow[econ.id] = i
            self._team_of_flow[biz.id] = i
            self._unit.append(
                Fraction(team.economy_value.cost_per_round + team.business_value.cost_per_round, 2)
            )
        n = len(config.teams)
        base, rem = divmod(config.fiat_total, n)
        self.deposits: List[int] = [base + (1 if i < rem else 0) for i in range(n)]
        self.escrow = 0
        self._escrow_ready = 0  # round from which escrow may be redistributed
        self._pending: List[Tuple[int, FlowSpec, int]] = []  # ready, flow, fiat carried
        self._failed_teams: set = set()
        self.team_failures = 0
        self.redistributions = 0
        self.deliveries = 0
        self.trade_count = 0
        self._wealth = Fraction(0)
        self._stats: Dict[str, _Stats] = {f.id: _Stats() for f in self.flows}
        # initial cohort, backdated like scenario 1
        for pos, flow in enumerate(self.flows):
            self.state.slots.append(self._new_packet(flow, pos + 2 - q, q - 1, fiat=0))

    def _new_packet(self, flow: FlowSpec, entry_round: int, entry_pos: int, fiat: int) -> Packet:
        self._uid += 1
        team = self._team_of_flow[flow.id]
        return Packet(flow, self._uid, entry_round, entry_pos,
                      fiat=fiat, team=team, quote_unit=self._unit[team])

    # -- conservation -------------------------------------------------------

    def fiat_in_system(self) -> int:
        return (
            sum(p.fiat for p in self.state.slots)
            + sum(f for _, _, f in self._pending)
            + sum(self.deposits)
            + self.escrow
        )

    def _check_fiat(self):
        total = self.fiat_in_system()
        if total != self.config.fiat_total:
            raise BookkeepingError(
                f"fiat not conserved: {total} in system, expected {self.config.fiat_total}"
            )

    # -- trading ------------------------------------------------------------

    def _negotiate_fiat(self, seller: Packet, buyer: Packet,
                        pa: int, pb: int, t: int) -> Optional[int]:
        """Integral fiat price strictly between the seller's ask and the
        buyer's maximum, both measured through each side's fiat valuation;
        None when no such unit price exists or the buyer cannot pay.
        """
        if buyer.fiat < 1:
            return None
        dist = pb - pa
        d1s = seller.projected_delay(t, pa)
        d1b = buyer.projected_delay(t, pb)
        u_s = self._unit[seller.team]
        u_b = self._unit[buyer.team]
        try:
            ask = comp_price_window_based(
                seller.value_fn.max_value, seller.fiat * u_s, d1s, dist,
                seller.value_fn.max_delay,
            )
        except NotWilling:
            return None
        bid = -comp_price_window_based(
            buyer.value_fn.max_value, buyer.fiat * u_b, d1b, -dist,
            buyer.value_fn.max_delay,
        )
        min_fiat = ask / u_s
        max_fiat = bid / u_b
        if min_fiat >= max_fiat:
            return None
        phi = math.floor((min_fiat + max_fiat) / 2 + Fraction(1, 2))
        phi = min(phi, buyer.fiat)
        bound = self.config.packet_fiat_bound
        if bound is not None:
            phi = min(phi, bound - seller.fiat)
        if phi < 1 or not (min_fiat < phi < max_fiat):
            return None
        return phi

    def _run_trading_periods(self, t: int):
        slots = self.state.slots
        n_idle = len(slots) - 1
        if n_idle < 2:
            return
        for period in range(self.config.trading_periods):
            perm = fisher_yates(self.rng, n_idle)
            for k in range(0, n_idle - 1, 2):
                pa = perm[k] + 1
                pb = perm[k + 1] + 1
                if pa > pb:
                    pa, pb = pb, pa
                seller, buyer = slots[pa], slots[pb]
                if not (seller.policy.may_sell and buyer.policy.may_buy):
                    continue
                phi = self._negotiate_fiat(seller, buyer, pa, pb, t)
                if phi is None:
                    continue
                seller.fiat += phi
                seller.benefit = seller.value_fn.max_value + seller.fiat * self._unit[seller.team]
                buyer.fiat -= phi
                buyer.benefit = buyer.value_fn.max_value + buyer.fiat * self._unit[buyer.team]
                dist = pb - pa
                seller.rounds_sold += dist
                buyer.rounds_bought += dist
                slots[pa], slots[pb] = buyer, seller
                self.trade_count += 1

    # -- deposits, failures, escrow ------------------------------------------

    def _deposit_interaction(self, pkt: Packet) -> int:
        """Served packet settles with its team deposit; returns the fiat its
        successor will carry.
        """
        i = pkt.team
        if pkt.policy.may_sell:  # economy: liquidate everything the bound allows
            room = None if self.config.deposit_bound is None else self.config.deposit_bound - self.deposits[i]
            moved = pkt.fiat if room is None else min(pkt.fiat, max(room, 0))
            self.deposits[i] += moved
            return pkt.fiat - moved
        # business: withdraw as much as fits
        room = None if self.config.packet_fiat_bound is None else self.config.packet_fiat_bound - pkt.fiat
        take = self.deposits[i] if room is None else min(self.deposits[i], max(room, 0))
        self.deposits[i] -= take
        return pkt.fiat + take

    def _handle_team_failures(self, t: int):
        pending_flows = {flow.id for _, flow, _ in self._pending}
        for i, team in enumerate(self.config.teams):
            both_out = (f"{team.id}.economy" in pending_flows
                        and f"{team.id}.business" in pending_flows)
            if not both_out:
                self._failed_teams.discard(i)
                continue
            if i in self._failed_teams:
                continue
            self._failed_teams.add(i)
            self.team_failures += 1
            seized = self.deposits[i]
            self.deposits[i] = 0
            new_pending = []
            for ready, flow, fiat in self._pending:
                if self._team_of_flow[flow.id] == i:
                    seized += fiat
                    fiat = 0
                new_pending.append((ready, flow, fiat))
            self._pending = new_pending
            self.escrow += seized
            self._escrow_ready = t + 1

    def _redistribute_escrow(self, t: int):
        if self.escrow == 0 or t < self._escrow_ready or not self.state.slots:
            return
        bound = self.config.packet_fiat_bound
        targets = self.state.slots
        moved = False
        while self.escrow > 0:
            with_room = (
                targets if bound is None
                else [p for p in targets if p.fiat < bound]
            )
            if not with_room:
                break
            pkt = with_room[self.rng.integers(0, len(with_room) - 1)]
            pkt.fiat += 1
            pkt.benefit = pkt.value_fn.max_value + pkt.fiat * self._unit[pkt.team]
            self.escrow -= 1
            moved = True
        if moved:
            self.redistributions += 1

    # -- round loop -----------------------------------------------------------

    def step(self) -> int:
        self.state.round += 1
        t = self.state.round
        ready = [item for item in self._pending if item[0] <= t]
        if ready:
            self._pending = [item for item in self._pending if item[0] > t]
            if len(ready) > 1:
                order = fisher_yates(self.rng, len(ready))
                ready = [ready[i] for i in order]
            for _, flow, fiat in ready:
                pos = len(self.state.slots)
                self.state.slots.append(self._new_packet(flow, t, pos, fiat))
        self._redistribute_escrow(t)
        self._run_trading_periods(t)
        if self.state.slots:
            pkt = self.state.slots.pop(0)
            delay = t - pkt.entry_round + 1
            extra = inject_failure(self.rng, self.config.failure_prob, self.config.queue_size)
            ready_round = t + 1
            if extra is not None:
                delay += extra
                ready_round += extra
            carry = self._deposit_interaction(pkt)
            self._pending.append((ready_round, pkt.flow, carry))
            self.deliveries += 1
            if t > self.config.warmup_rounds:
                self._wealth += packet_value(pkt.value_fn, delay)  # fiat excluded
                self._stats[pkt.flow.id].add(delay)
        self._handle_team_failures(t)
        self._check_fiat()
        return t

    def run(self) -> SimulationReport:
        for _ in range(self.config.rounds):
            self.step()
        t = self.state.round
        window = max(t - self.config.warmup_rounds, 1)
        per_flow = [
            FlowStats(
                flow_id=f.id,
                delivered=self._stats[f.id].n,
                mean_delay=self._stats[f.id].mean(),
                delay_std=self._stats[f.id].std(),
            )
            for f in self.flows
        ]
        return SimulationReport(
            rounds=t,
            deliveries=self.deliveries,
            wealth_rate=float(self._wealth) / window,
            per_flow=per_flow,
            trade_count=self.trade_count,
            seed=self.config.seed,
            team_failures=self.team_failures,
            redistributions=self.redistributions,
        )


def run_scenario2(config: FiatEconomyConfig) -> SimulationReport:
    """Run the adapted fiat economy to its configured length."""
    return ScenarioTwoEngine(config).run()


# ---------------------------------------------------------------------------
# One-shot drain for the scheduling comparison

@dataclass
class DrainResult:
    completion: List[int]       # completion round per packet, in input order
    total_value: Money          # sum of realized packet values
    trade_count: int


def run_drain(value_fns: Sequence[ValueFunction], trading_periods: int, rng: SimRng,
              kind: FlowKind = FlowKind.RATE_BASED) -> DrainResult:
    """Serve a fixed set of packets to completion, trading between rounds.

    The packets start queued in input order (index 0 at the head) and no
    replacements arrive.  Utility here is the absolute packet value, so
    every executed trade strictly raises the realized total.
    """
    policy = TradingPolicy(mode=TradeMode.ALWAYS_TRADE)
    n = len(value_fns)
    packets = []
    for i, vf in enumerate(value_fns):
        flow = FlowSpec(id=str(i), kind=kind, value_fn=vf, policy=policy,
                        rate=Fraction(1) if kind is FlowKind.RATE_BASED else None)
        packets.append(Packet(flow, i, entry_round=1, entry_pos=i))
    state = RouterQueueState(slots=list(packets), round=0)
    completion = [0] * n
    total: Money = 0
    trades = 0
    for t in range(1, n + 1):
        state.round = t
        n_idle = len(state.slots) - 1
        for period in range(trading_periods):
            if n_idle < 2:
                break
            perm = fisher_yates(rng, n_idle)
            for k in range(0, n_idle - 1, 2):
                pa, pb = perm[k] + 1, perm[k + 1] + 1
                if pa > pb:
                    pa, pb = pb, pa
                seller, buyer = state.slots[pa], state.slots[pb]
                trade = negotiate(
                    seller, buyer,
                    seller_pos=pa, buyer_pos=pb,
                    seller_delay=seller.projected_delay(t, pa),
                    buyer_delay=buyer.projected_delay(t, pb),
                    round=t, period=period,
                )
                if trade is not None:
                    execute_trade(state, trade)
                    trades += 1
        pkt = state.slots.pop(0)
        idx = int(pkt.flow.id)
        completion[idx] = t
        total += packet_value(pkt.value_fn, t)
    return DrainResult(completion=completion, total_value=total, trade_count=trades)
