"""Tests for market state, settlement, and the clearing loop."""

import copy
import csv

import numpy as np
import pytest

from gamarket.data import generate_series, load_prices, write_prices_csv
from gamarket.errors import ConfigError, EndOfDataError, TradeRejectedError
from gamarket.market import (
    DEFAULT_ROUND_CAP,
    ClearingReport,
    Market,
    Termination,
    Trade,
    advance_day,
    announce_price,
    apply_trade,
    run_clearing,
    split_endowment,
)
from gamarket.players import Player


class FixedOrder:
    """Stand-in rng whose permutation is always the same order."""

    def __init__(self, order):
        self.order = list(order)

    def permutation(self, n):
        assert n == len(self.order)
        return np.array(self.order)


def _traders(cash=1000.0, holdings=(50, 50), stocks=2):
    return [
        Player(id=i, committees=[[] for _ in range(stocks)], cash=cash, holdings=[h] * stocks)
        for i, h in enumerate(holdings)
    ]


def test_announced_prices_match_the_csv(tmp_path):
    path = tmp_path / "prices.csv"
    series = generate_series(days=60, seed=13)
    write_prices_csv(path, series)
    market = Market.from_series(load_prices(path, window=50), supply=[100, 100, 100])
    with open(path, newline="") as handle:
        rows = list(csv.reader(handle))[1:]
    for t in (0, 1, 2, 30, 59):
        market.t = t
        got = announce_price(market)
        expected = [float(cell) for cell in rows[t][1:]]
        np.testing.assert_allclose(got, expected, rtol=1e-12)


def test_announce_price_end_of_data():
    market = Market(stock_names=["A"], supply=[10], prices=np.ones((3, 1)), t=3)
    with pytest.raises(EndOfDataError):
        announce_price(market)
    market.t = 2
    announce_price(market)
    advance_day(market)
    assert market.t == 3


def test_announce_price_returns_a_copy():
    market = Market(stock_names=["A"], supply=[10], prices=np.ones((3, 1)))
    row = announce_price(market)
    row[0] = 99.0
    assert market.prices[0, 0] == 1.0


def test_market_validation():
    with pytest.raises(ConfigError):
        Market(stock_names=["A", "B"], supply=[10], prices=np.ones((3, 2)))
    with pytest.raises(ConfigError):
        Market(stock_names=["A"], supply=[0], prices=np.ones((3, 1)))
    with pytest.raises(ConfigError):
        Market(stock_names=["A"], supply=[10], prices=np.ones((3, 2)))


def test_split_endowment_exact():
    assert split_endowment(10, 4) == [3, 3, 2, 2]
    assert split_endowment(7, 3) == [3, 2, 2]
    assert split_endowment(6, 3) == [2, 2, 2]
    assert split_endowment(2, 5) == [1, 1, 0, 0, 0]
    for supply in (1, 17, 1000):
        for n in (1, 2, 7):
            shares = split_endowment(supply, n)
            assert sum(shares) == supply
            assert max(shares) - min(shares) <= 1
    with pytest.raises(ConfigError):
        split_endowment(10, 0)


def test_apply_trade_settles_exactly():
    players = _traders()
    apply_trade(players, Trade(day=0, round=1, buyer=0, seller=1, stock=0, quantity=8, price=12.5))
    assert players[0].holdings == [58, 50]
    assert players[1].holdings == [42, 50]
    assert players[0].cash == 1000.0 - 100.0
    assert players[1].cash == 1000.0 + 100.0


def test_apply_trade_rejects_without_touching_state():
    players = _traders(cash=50.0)
    before = copy.deepcopy(players)
    # Seller lacks the shares.
    with pytest.raises(TradeRejectedError):
        apply_trade(players, Trade(0, 1, buyer=0, seller=1, stock=0, quantity=51, price=1.0))
    # Buyer lacks the cash.
    with pytest.raises(TradeRejectedError):
        apply_trade(players, Trade(0, 1, buyer=0, seller=1, stock=0, quantity=10, price=10.0))
    for got, want in zip(players, before):
        assert got.cash == want.cash
        assert got.holdings == want.holdings
    with pytest.raises(ValueError):
        apply_trade(players, Trade(0, 1, buyer=0, seller=0, stock=0, quantity=1, price=1.0))
    with pytest.raises(ValueError):
        apply_trade(players, Trade(0, 1, buyer=0, seller=1, stock=0, quantity=0, price=1.0))


def _two_stock_market(prices=(10.0, 20.0), supply=(100, 100)):
    return Market(
        stock_names=["A", "B"],
        supply=list(supply),
        prices=np.array([list(prices)] * 5, dtype=float),
    )


def test_clearing_consensus_when_nobody_wants_to_trade():
    # Predictions equal to the announced price size every intent at zero.
    market = _two_stock_market()
    players = _traders()
    report = run_clearing(market, players, [[10.0, 20.0], [10.0, 20.0]], np.random.default_rng(0))
    assert report.trades == []
    assert report.rounds == 1
    assert report.terminated_by is Termination.NO_MORE_TRADES


def test_single_stock_pessimist_still_bids():
    # With one stock the max and min decision factor coincide, and the tie
    # rule resolves to a buy, so a lone pessimist never reaches the sell
    # side and two bids just rest: no trades.
    market = Market(stock_names=["A"], supply=[100], prices=np.full((5, 1), 10.0))
    players = [
        Player(id=i, committees=[[]], cash=1000.0, holdings=[50]) for i in range(2)
    ]
    report = run_clearing(market, players, [[11.0], [9.0]], np.random.default_rng(0))
    assert report.trades == []
    assert report.terminated_by is Termination.NO_MORE_TRADES


def test_clearing_buyer_first_frozen_scenario():
    # On stock A player 0 expects +10% and player 1 expects -10%; both are
    # flat on B.  Player 0 acts first each round: it rests a bid of 10 and
    # the seller fills it, capped at 40% of its shrinking holding, so the
    # fills run 10,10,10 then 8,4,3,2,1 and round 9 reaches consensus.
    market = _two_stock_market()
    players = _traders()
    preds = [[11.0, 20.0], [9.0, 20.0]]
    report = run_clearing(market, players, preds, FixedOrder([0, 1]))
    assert [t.quantity for t in report.trades] == [10, 10, 10, 8, 4, 3, 2, 1]
    assert report.rounds == 9
    assert report.terminated_by is Termination.NO_MORE_TRADES
    assert all(
        t.buyer == 0 and t.seller == 1 and t.stock == 0 and t.price == 10.0
        for t in report.trades
    )
    assert players[0].holdings == [98, 50]
    assert players[1].holdings == [2, 50]
    assert players[0].cash == 1000.0 - 480.0
    assert players[1].cash == 1000.0 + 480.0


def test_clearing_seller_first_uses_resting_volume_and_round_cap():
    # With the seller acting first, its resting ask of 10 becomes the market
    # volume, so the buyer's 10% sizing buys exactly one share per round.
    # A cap of 7 rounds cuts the session short.
    market = _two_stock_market()
    players = _traders()
    preds = [[11.0, 20.0], [9.0, 20.0]]
    report = run_clearing(market, players, preds, FixedOrder([1, 0]), round_cap=7)
    assert [t.quantity for t in report.trades] == [1] * 7
    assert report.rounds == 7
    assert report.terminated_by is Termination.ROUND_CAP
    assert players[0].holdings == [57, 50]
    assert players[1].holdings == [43, 50]
    assert players[0].cash == 1000.0 - 70.0
    assert players[1].cash == 1000.0 + 70.0


def test_clearing_conserves_shares_and_cash():
    rng = np.random.default_rng(71)
    series = generate_series(days=5, seed=2)
    supply = [120, 90, 61]
    market = Market.from_series(series, supply=supply)
    prices = announce_price(market)
    players = []
    for i in range(5):
        shares = [split_endowment(q, 5)[i] for q in supply]
        players.append(Player(id=i, committees=[[], [], []], cash=1e7, holdings=shares))
    predictions = [[float(p * rng.uniform(0.9, 1.1)) for p in prices] for _ in players]
    pristine = copy.deepcopy(players)
    report = run_clearing(market, players, predictions, np.random.default_rng(5))
    assert report.trades, "scenario should produce at least one trade"
    for m in range(3):
        assert sum(p.holdings[m] for p in players) == supply[m]
    assert sum(p.cash for p in players) == pytest.approx(5e7, rel=1e-12)
    for trade in report.trades:
        assert trade.quantity >= 1
        assert trade.buyer != trade.seller
        assert trade.price == prices[trade.stock]
        assert trade.day == market.t
    # Replaying the log from the initial portfolios reproduces the outcome.
    for trade in report.trades:
        apply_trade(pristine, trade)
    for got, want in zip(players, pristine):
        assert got.holdings == want.holdings
        assert got.cash == pytest.approx(want.cash, rel=1e-12)
    # Holdings never go negative mid-stream either; replay would have raised.


def test_clearing_same_seed_is_identical():
    def run(seed):
        market = _two_stock_market(supply=(500, 500))
        players = _traders(cash=5e4, holdings=(250, 250))
        preds = [[10.7, 20.0], [9.4, 20.0]]
        report = run_clearing(market, players, preds, np.random.default_rng(seed))
        return [
            (t.round, t.buyer, t.seller, t.stock, t.quantity, t.price) for t in report.trades
        ], [(p.cash, tuple(p.holdings)) for p in players]

    assert run(123) == run(123)


def test_run_clearing_validation():
    market = _two_stock_market()
    players = _traders()
    rng = np.random.default_rng(0)
    with pytest.raises(ConfigError):
        run_clearing(market, players, [[10.0, 20.0]], rng)
    with pytest.raises(ConfigError):
        run_clearing(market, players, [[10.0, 20.0], [10.0]], rng)
    with pytest.raises(ConfigError):
        run_clearing(market, players, [[10.0, 20.0], [-1.0, 20.0]], rng)
    with pytest.raises(ConfigError):
        run_clearing(market, players, [[10.0, 20.0], [float("nan"), 20.0]], rng)
    with pytest.raises(ConfigError):
        run_clearing(market, players, [[10.0, 20.0], [10.0, 20.0]], rng, round_cap=0)


def test_default_round_cap_value():
    assert DEFAULT_ROUND_CAP == 100
    assert ClearingReport().terminated_by is Termination.NO_MORE_TRADES
