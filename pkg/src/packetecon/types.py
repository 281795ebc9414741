"""Domain types and elementary packet arithmetic shared by all other modules.

Money is kept as exact rationals (``fractions.Fraction`` or ``int``) so that
conservation checks are bit-exact; floating point is reserved for the
closed-form analysis helpers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional, Union

Money = Union[int, Fraction]

#: Position value marking a packet that has reached its destination.
DELIVERED = None


class PacketEconError(Exception):
    """Base class for domain errors."""


class BookkeepingError(PacketEconError):
    """An internal invariant was violated (bug signal, not user error)."""


class ConfigError(PacketEconError):
    """Invalid configuration or instance description."""


@dataclass(frozen=True)
class ValueFunction:
    """Linear decreasing packet value: worth ``max_value - cost_per_round * d``,
    floored at zero, with trades refused beyond ``max_delay``.
    """

    max_value: Money
    cost_per_round: Money
    max_delay: Optional[int] = None  # defaults to the zero-value point

    def __post_init__(self):
        if self.max_value <= 0:
            raise ConfigError(f"max_value must be positive, got {self.max_value}")
        if self.cost_per_round < 0:
            raise ConfigError(f"cost_per_round must be >= 0, got {self.cost_per_round}")
        if self.max_delay is None:
            if self.cost_per_round > 0:
                object.__setattr__(self, "max_delay", int(self.max_value // self.cost_per_round))
            # cost 0: value never decays, no implicit deadline
        elif self.cost_per_round > 0 and self.max_delay > self.max_value // self.cost_per_round:
            raise ConfigError(
                f"max_delay {self.max_delay} leaves negative value at the deadline "
                f"(value reaches zero at delay {self.max_value // self.cost_per_round})"
            )

    def value(self, delay: int) -> Money:
        return packet_value(self, delay)


def packet_value(vf: ValueFunction, delay: int) -> Money:
    """Value of a packet delivered after ``delay`` rounds."""
    if delay < 0:
        raise ValueError(f"delay must be >= 0, got {delay}")
    v = vf.max_value - vf.cost_per_round * delay
    return v if v > 0 else 0


def packet_delay(start_position: int, rounds_sold: int, rounds_bought: int) -> int:
    """Total delay of a packet entering at ``start_position`` that sold
    ``rounds_sold`` and bought ``rounds_bought`` queue rounds.
    """
    if start_position < 0:
        raise ValueError(f"start_position must be >= 0, got {start_position}")
    d = start_position + 1 + rounds_sold - rounds_bought
    if d < 1:
        raise BookkeepingError(
            f"computed delay {d} < 1 for start={start_position}, "
            f"sold={rounds_sold}, bought={rounds_bought}"
        )
    return d


class FlowKind(Enum):
    WINDOW_BASED = "window"
    RATE_BASED = "rate"


class TradeMode(Enum):
    ALWAYS_TRADE = "always"
    NEVER_TRADE = "never"
    SELL_ONLY = "sell_only"
    BUY_ONLY = "buy_only"


@dataclass(frozen=True)
class TradingPolicy:
    """What trades a flow's packets are willing to enter.

    ``sell_one_in_c`` thins the seller side: only one packet in every ``c``
    is willing to sell in a given trading period (decided per period).
    """

    mode: TradeMode = TradeMode.ALWAYS_TRADE
    sell_one_in_c: int = 1

    def __post_init__(self):
        if self.sell_one_in_c < 1:
            raise ConfigError(f"sell_one_in_c must be >= 1, got {self.sell_one_in_c}")

    @property
    def may_sell(self) -> bool:
        return self.mode in (TradeMode.ALWAYS_TRADE, TradeMode.SELL_ONLY)

    @property
    def may_buy(self) -> bool:
        return self.mode in (TradeMode.ALWAYS_TRADE, TradeMode.BUY_ONLY)


@dataclass(frozen=True)
class FlowSpec:
    """One traffic flow: window- or rate-based, with its value function and
    trading policy.  Window-based flows keep ``window`` packets in flight;
    rate-based flows submit ``rate`` packets per round.
    """

    id: str
    kind: FlowKind
    value_fn: ValueFunction
    policy: TradingPolicy = field(default_factory=TradingPolicy)
    window: int = 1                      # window-based only
    rate: Optional[Fraction] = None      # rate-based only

    def __post_init__(self):
        if self.kind is FlowKind.WINDOW_BASED and self.window < 1:
            raise ConfigError(f"flow {self.id}: window must be >= 1, got {self.window}")
        if self.kind is FlowKind.RATE_BASED and (self.rate is None or self.rate <= 0):
            raise ConfigError(f"flow {self.id}: rate-based flow needs a positive rate")


@dataclass
class Inventory:
    """Per-packet carried state: money account, delay so far, queue position
    (``DELIVERED`` once served), and the running trade tallies.

    ``delay`` counts rounds spent in the system so far (the entry round
    counts as the first), so ``delay + position`` is the delay the packet
    will have accumulated when it is served, absent further trades.
    """

    account: Money = 0
    delay: int = 1
    position: Optional[int] = 0
    rounds_sold: int = 0
    rounds_bought: int = 0

    @property
    def projected_delay(self) -> int:
        """Delay at delivery if no further trades occur."""
        if self.position is DELIVERED:
            return self.delay
        return self.delay + self.position


def utility(inv: Inventory, vf: ValueFunction, kind: FlowKind) -> Union[Money, Fraction]:
    """Utility of a packet with inventory ``inv``: benefit (value plus account)
    for rate-based flows, benefit per round for window-based flows.
    """
    d = inv.delay
    benefit = packet_value(vf, d) + inv.account
    if kind is FlowKind.RATE_BASED:
        return benefit
    if d < 1:
        raise ValueError(f"window-based utility needs delay >= 1, got {d}")
    return Fraction(benefit, d) if isinstance(benefit, int) else benefit / d


def is_admissible(
    inv: Inventory,
    vf: ValueFunction,
    account_min: Optional[Money] = None,
    account_max: Optional[Money] = None,
) -> bool:
    """Whether the packet can still be served within its deadline and its
    account is within the configured bounds (unbounded by default).
    """
    if vf.max_delay is not None and inv.projected_delay > vf.max_delay:
        return False
    if account_min is not None and inv.account < -account_min:
        return False
    if account_max is not None and inv.account > account_max:
        return False
    return True


@dataclass
class TradeRecord:
    """One executed bilateral trade: the buyer (further back) takes the
    seller's better position at the agreed price.
    """

    round: int
    period: int
    buyer_id: str
    seller_id: str
    buyer_pos_before: int
    seller_pos_before: int
    price: Money

    def __post_init__(self):
        if self.buyer_pos_before <= self.seller_pos_before:
            raise BookkeepingError(
                f"buyer must sit behind seller: buyer at {self.buyer_pos_before}, "
                f"seller at {self.seller_pos_before}"
            )

    @property
    def distance(self) -> int:
        return self.buyer_pos_before - self.seller_pos_before


@dataclass
class RouterQueueState:
    """Ordered router queue (index 0 = the packet being served) plus the
    round counter.  Slot objects are owned by the simulation engine; this
    container only fixes the ordering/counting contract.
    """

    slots: list
    round: int = 0

    def __len__(self) -> int:
        return len(self.slots)

    @property
    def idle_count(self) -> int:
        """Packets eligible to trade (everything except the serving slot)."""
        return max(len(self.slots) - 1, 0)
