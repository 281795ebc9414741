"""Compensatory prices and bilateral trade negotiation.

A packet's compensatory price is the payment at which a position trade
leaves its utility unchanged: the plain value difference for rate-based
packets, and ``(max_value + account) * d_eps / delay`` for window-based
packets, whose utility is the benefit rate.  A pair trades only when the
buyer's maximum offer strictly exceeds the seller's minimum ask; the agreed
price is the midpoint, so both sides strictly improve.

All price arithmetic is exact (ints and ``Fraction``); the midpoint rule is
deterministic, so runs are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional

from .types import (
    BookkeepingError,
    FlowKind,
    Money,
    RouterQueueState,
    TradeRecord,
    TradingPolicy,
    ValueFunction,
    packet_value,
)


class NotWilling(Exception):
    """The quoted trade would push the packet past its deadline."""


class Side(Enum):
    SELL = "sell"
    BUY = "buy"


@dataclass(frozen=True)
class Quote:
    """One side of a potential trade over a position distance.

    ``compensatory_price`` is signed: positive when selling (minimum ask),
    negative when buying (its magnitude is the maximum the buyer will pay).
    """

    compensatory_price: Money
    willing: bool
    side: Side
    d_epsilon: int


def comp_price_rate_based(vf: ValueFunction, delay: int, d_eps: int) -> Money:
    """Compensatory price for a rate-based packet changing its delay by
    ``d_eps``: the value difference between the two delays.  Selling past
    the deadline is refused rather than priced.
    """
    if d_eps > 0 and vf.max_delay is not None and delay + d_eps > vf.max_delay:
        raise NotWilling(f"delay {delay}+{d_eps} exceeds deadline {vf.max_delay}")
    if delay + d_eps < 0:
        raise ValueError("resulting delay would be negative")
    return packet_value(vf, delay) - packet_value(vf, delay + d_eps)


def comp_price_window_based(
    max_value: Money,
    account: Money,
    delay: int,
    d_eps: int,
    max_delay: Optional[int] = None,
) -> Money:
    """Compensatory price keeping a window-based packet's benefit rate fixed:
    ``(max_value + account) * d_eps / delay``.

    Negative ``d_eps`` (buying) yields a negative price whose magnitude is
    the buyer's maximum offer.
    """
    if delay < 1:
        raise ValueError(f"delay must be >= 1, got {delay}")
    if delay + d_eps < 1:
        raise ValueError(f"resulting delay {delay + d_eps} < 1")
    if d_eps > 0 and max_delay is not None and delay + d_eps > max_delay:
        raise NotWilling(f"delay {delay}+{d_eps} exceeds deadline {max_delay}")
    return Fraction(max_value + account) * d_eps / delay


@dataclass
class TradeSide:
    """A packet as seen by the negotiation: identity, flow kind, value
    function, policy, exact account, and the per-period seller-participation
    draw.  ``benefit`` caches ``max_value + account``.
    """

    id: str
    kind: FlowKind
    value_fn: ValueFunction
    policy: TradingPolicy
    account: Money = 0
    sell_ok: bool = True
    benefit: Money = None

    def __post_init__(self):
        if self.benefit is None:
            self.benefit = self.value_fn.max_value + self.account


def quote(side, delay: int, d_eps: int) -> Quote:
    """Quote for one packet over a signed position distance ``d_eps``."""
    selling = d_eps > 0
    policy: TradingPolicy = side.policy
    if selling and not (policy.may_sell and side.sell_ok):
        return Quote(0, False, Side.SELL, d_eps)
    if not selling and not policy.may_buy:
        return Quote(0, False, Side.BUY, d_eps)
    try:
        if side.kind is FlowKind.WINDOW_BASED:
            price = comp_price_window_based(
                side.value_fn.max_value, side.account, delay, d_eps, side.value_fn.max_delay
            )
        else:
            price = comp_price_rate_based(side.value_fn, delay, d_eps)
    except NotWilling:
        return Quote(0, False, Side.SELL if selling else Side.BUY, d_eps)
    return Quote(price, True, Side.SELL if selling else Side.BUY, d_eps)


def negotiate(
    seller,
    buyer,
    *,
    seller_pos: int,
    buyer_pos: int,
    seller_delay: int,
    buyer_delay: int,
    round: int = 0,
    period: int = 0,
    account_min: Optional[Money] = None,
    account_max: Optional[Money] = None,
) -> Optional[TradeRecord]:
    """Negotiate one candidate trade: the packet further back buys the
    position of the one ahead.  Returns the trade at the midpoint price when
    the buyer's maximum strictly exceeds the seller's ask, else None.

    ``seller_delay``/``buyer_delay`` are the delays each packet projects at
    its current position.  Callers may pass the pair in either role order;
    roles are fixed by position.
    """
    if buyer_pos < seller_pos:
        seller, buyer = buyer, seller
        seller_pos, buyer_pos = buyer_pos, seller_pos
        seller_delay, buyer_delay = buyer_delay, seller_delay
    if seller_pos < 1 or buyer_pos == seller_pos:
        return None
    dist = buyer_pos - seller_pos

    if not (seller.policy.may_sell and seller.sell_ok and buyer.policy.may_buy):
        return None

    s_vf: ValueFunction = seller.value_fn
    if s_vf.max_delay is not None and seller_delay + dist > s_vf.max_delay:
        return None  # seller will not cross its deadline

    both_window = seller.kind is FlowKind.WINDOW_BASED and buyer.kind is FlowKind.WINDOW_BASED
    if both_window:
        # ask < bid  <=>  benefit_s/d_s < benefit_b/d_b, cross-multiplied
        # (same algebra as comp_price_window_based; delays are positive)
        if seller.benefit * buyer_delay >= buyer.benefit * seller_delay:
            return None

    s_quote = quote(seller, seller_delay, dist)
    b_quote = quote(buyer, buyer_delay, -dist)
    if not (s_quote.willing and b_quote.willing):
        return None
    ask = s_quote.compensatory_price
    bid = -b_quote.compensatory_price  # buyer's maximum offer
    if ask >= bid:
        return None

    price = Fraction(ask + bid, 2)
    if account_max is not None and seller.account + price > account_max:
        return None
    if account_min is not None and buyer.account - price < -account_min:
        return None
    return TradeRecord(
        round=round,
        period=period,
        buyer_id=buyer.id,
        seller_id=seller.id,
        buyer_pos_before=buyer_pos,
        seller_pos_before=seller_pos,
        price=price,
    )


def execute_trade(
    state: RouterQueueState,
    trade: TradeRecord,
    account_min: Optional[Money] = None,
    account_max: Optional[Money] = None,
) -> None:
    """Apply an agreed trade to the queue: swap the two slots, settle the
    price, and tally the rounds sold/bought.  Total money over the two
    packets is unchanged by construction.

    Raises ``BookkeepingError`` if an account would leave its bounds; a
    well-formed trade from ``negotiate`` never does.
    """
    sp, bp = trade.seller_pos_before, trade.buyer_pos_before
    seller = state.slots[sp]
    buyer = state.slots[bp]
    price = trade.price
    new_s = seller.account + price
    new_b = buyer.account - price
    if account_max is not None and new_s > account_max:
        raise BookkeepingError(f"seller account {new_s} above bound {account_max}")
    if account_min is not None and new_b < -account_min:
        raise BookkeepingError(f"buyer account {new_b} below bound {-account_min}")
    seller.account = new_s
    seller.benefit = seller.value_fn.max_value + new_s
    buyer.account = new_b
    buyer.benefit = buyer.value_fn.max_value + new_b
    dist = trade.distance
    seller.rounds_sold += dist
    buyer.rounds_bought += dist
    state.slots[sp], state.slots[bp] = buyer, seller
