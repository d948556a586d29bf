"""Stochastic agent-based market: N_a buyers, each seller holding N_p aging products.

Under the default ``rounds`` scheduler every buyer purchases once per round of
length tau0, in a fresh random order. A purchase draws a product uniformly
from the chosen shelf, regardless of its age, and replaces it by a new one.
Ages advance by tau0 at the end of the round.

Which satisfaction entries a purchase moves is set by :class:`UpdateRule`.
With ``all`` (default) the buyer also inspects one random product at every
other seller and updates every entry, so that the satisfaction with an
abandoned seller keeps tracking its aging, discounted stock. With ``chosen``
only the purchased seller's entry moves and the others stay frozen until
visited; at low temperature a seller abandoned this way is never revisited.

The ``poisson`` scheduler instead draws purchases as a merged Poisson stream
of rate N_a / tau0 with continuous aging; it is much slower and exists to
check that results do not hinge on the round structure.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .meanfield import stationary_avg_freshness, stationary_avg_price
from .model import (ModelParams, choice_probabilities, freshness,
                    satisfaction_source, update_satisfaction)
from .series import TimeSeries


class Scheduler(str, enum.Enum):
    ROUNDS = "rounds"
    POISSON = "poisson"


class ShelfInit(str, enum.Enum):
    STATIONARY = "stationary"
    FRESH = "fresh"


class UpdateRule(str, enum.Enum):
    ALL = "all"
    CHOSEN = "chosen"


class SatisfactionInit(str, enum.Enum):
    STATIONARY = "stationary"
    ZERO = "zero"


@dataclass(frozen=True)
class SimConfig:
    seed: int = 0
    duration: float = 2000.0
    record_interval: float = 1.0
    scheduler: Scheduler = Scheduler.ROUNDS
    init_shelves: ShelfInit = ShelfInit.STATIONARY
    init_satisfaction: SatisfactionInit = SatisfactionInit.STATIONARY
    burn_in: float | None = None
    update_rule: UpdateRule = UpdateRule.ALL

    def __post_init__(self):
        object.__setattr__(self, "update_rule", UpdateRule(self.update_rule))
        object.__setattr__(self, "scheduler", Scheduler(self.scheduler))
        object.__setattr__(self, "init_shelves", ShelfInit(self.init_shelves))
        object.__setattr__(self, "init_satisfaction", SatisfactionInit(self.init_satisfaction))
        if isinstance(self.seed, bool) or int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        object.__setattr__(self, "seed", int(self.seed))
        if not (self.duration > 0 and math.isfinite(self.duration)):
            raise ValueError(f"duration must be positive, got {self.duration!r}")
        if not 0 < self.record_interval <= self.duration:
            raise ValueError(f"record_interval must lie in (0, duration], got {self.record_interval!r}")
        if self.burn_in is None:
            object.__setattr__(self, "burn_in", self.duration / 4)
        if not 0 <= self.burn_in < self.duration:
            raise ValueError(f"burn_in must lie in [0, duration), got {self.burn_in!r}")


@dataclass
class MarketState:
    """Full microscopic state.

    ``shelves[i, k]`` is the age of product ``k`` at seller ``i``;
    ``satisfaction[n, i]`` is buyer ``n``'s satisfaction with seller ``i``.
    Under the Poisson scheduler ages are kept implicitly as ``clock - birth``.
    """

    params: ModelParams
    shelves: np.ndarray
    satisfaction: np.ndarray
    rng: np.random.Generator
    clock: float = 0.0
    rounds: int = 0
    update_rule: UpdateRule = UpdateRule.ALL

    def probabilities(self) -> np.ndarray:
        return choice_probabilities(self.satisfaction, self.params.temperature)

    def snapshot(self) -> tuple[float, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """(t, mean p, mean S, mean shelf freshness, mean shelf price) per seller."""
        p = self.probabilities().mean(axis=0)
        s = self.satisfaction.mean(axis=0)
        h = freshness(self.shelves, self.params.tau1)
        x = -np.expm1(-h / self.params.h_c)
        return self.clock, p, s, h.mean(axis=1), x.mean(axis=1)


@dataclass
class RoundRecord:
    """Purchases per seller, total replacements, and freshness/price of each bought product."""

    purchases: np.ndarray
    replacements: int
    h: np.ndarray
    x: np.ndarray


def stationary_satisfaction(params: ModelParams) -> float:
    p0 = params.p0
    return satisfaction_source(stationary_avg_freshness(p0, params.R),
                               stationary_avg_price(p0, params.R, params.h_c), params.greed)


def init_market(params: ModelParams, cfg: SimConfig) -> MarketState:
    rng = np.random.default_rng(cfg.seed)
    shape = (params.n_sellers, params.n_products)
    if cfg.init_shelves is ShelfInit.STATIONARY:
        # each seller renewed at rate N_a p0 / (N_p tau0)
        rate = float(params.purchase_rate(params.p0))
        shelves = rng.exponential(1.0 / rate, size=shape)
    else:
        shelves = np.zeros(shape)
    s0 = stationary_satisfaction(params) if cfg.init_satisfaction is SatisfactionInit.STATIONARY else 0.0
    satisfaction = np.full((params.n_buyers, params.n_sellers), s0)
    return MarketState(params, shelves, satisfaction, rng, update_rule=cfg.update_rule)


def _sample_sellers(probs: np.ndarray, u: np.ndarray) -> np.ndarray:
    # inverse-CDF draw per row; the last column absorbs round-off in the cumsum
    cdf = np.cumsum(probs, axis=1)
    return (u[:, None] >= cdf[:, :-1]).sum(axis=1)


def step_round(state: MarketState) -> RoundRecord:
    """One round of the ``rounds`` scheduler: every buyer purchases once, then ages advance by tau0."""
    prm = state.params
    rng = state.rng
    n_b, n_s, n_p = prm.n_buyers, prm.n_sellers, prm.n_products
    order = rng.permutation(n_b)
    u = rng.random(n_b)
    # one candidate product per seller and buyer; the chosen seller's one is bought
    picks = rng.integers(0, n_p, size=(n_b, n_s))

    # A buyer acts once per round, so its choice depends only on its own state
    # at the start of the round. Order only matters when a product was already
    # bought earlier in the round: later buyers then see its replacement.
    rows = np.arange(n_b)
    probs = choice_probabilities(state.satisfaction[order], prm.temperature)
    sellers = _sample_sellers(probs, u)
    bought = picks[rows, sellers]
    sold_keys, first_sale = np.unique(sellers * n_p + bought, return_index=True)

    obs_keys = np.arange(n_s)[None, :] * n_p + picks
    pos = np.minimum(np.searchsorted(sold_keys, obs_keys), len(sold_keys) - 1)
    replaced = (sold_keys[pos] == obs_keys) & (first_sale[pos] < rows[:, None])
    ages = np.where(replaced, 0.0, state.shelves[np.arange(n_s)[None, :], picks])

    h = freshness(ages, prm.tau1)
    x = -np.expm1(-h / prm.h_c)
    if state.update_rule is UpdateRule.ALL:
        state.satisfaction[order] = update_satisfaction(state.satisfaction[order], h, x,
                                                        prm.alpha, prm.greed)
    else:
        old = state.satisfaction[order, sellers]
        state.satisfaction[order, sellers] = update_satisfaction(
            old, h[rows, sellers], x[rows, sellers], prm.alpha, prm.greed)
    state.shelves[sellers, bought] = 0.0
    state.shelves += prm.tau0
    state.rounds += 1
    state.clock = state.rounds * prm.tau0

    purchases = np.bincount(sellers, minlength=n_s)
    return RoundRecord(purchases, n_b, h[rows, sellers], x[rows, sellers])


def _run_rounds(state: MarketState, cfg: SimConfig, rows: list) -> None:
    prm = state.params
    n_rounds = int(math.ceil(cfg.duration / prm.tau0 - 1e-9))
    every = cfg.record_interval / prm.tau0
    next_row = 1
    for r in range(1, n_rounds + 1):
        step_round(state)
        if r >= next_row * every - 1e-9:
            rows.append(state.snapshot())
            next_row += 1


def _run_poisson(state: MarketState, cfg: SimConfig, rows: list) -> None:
    prm = state.params
    rng = state.rng
    # ages as clock - birth; birth times of the initial stock are negative
    birth = -state.shelves
    sellers = np.arange(prm.n_sellers)
    rate = prm.n_buyers / prm.tau0
    t = state.clock
    next_row = cfg.record_interval
    batch = 4096
    while True:
        gaps = rng.exponential(1.0 / rate, size=batch)
        buyers = rng.integers(0, prm.n_buyers, size=batch)
        u = rng.random(batch)
        picks = rng.integers(0, prm.n_products, size=(batch, prm.n_sellers))
        for k in range(batch):
            t_next = t + gaps[k]
            while next_row <= cfg.duration + 1e-9 and t_next >= next_row:
                state.clock = next_row
                state.shelves = next_row - birth
                rows.append(state.snapshot())
                next_row += cfg.record_interval
            if t_next >= cfg.duration:
                state.clock = cfg.duration
                state.shelves = cfg.duration - birth
                return
            t = t_next
            n = buyers[k]
            p = choice_probabilities(state.satisfaction[n], prm.temperature)
            i = int(_sample_sellers(p[None, :], u[k:k + 1])[0])
            h = np.exp(-(t - birth[sellers, picks[k]]) / prm.tau1)
            x = -np.expm1(-h / prm.h_c)
            if state.update_rule is UpdateRule.ALL:
                state.satisfaction[n] = update_satisfaction(state.satisfaction[n], h, x,
                                                            prm.alpha, prm.greed)
            else:
                state.satisfaction[n, i] = update_satisfaction(state.satisfaction[n, i], h[i], x[i],
                                                               prm.alpha, prm.greed)
            birth[i, picks[k, i]] = t


def run(params: ModelParams, cfg: SimConfig) -> TimeSeries:
    """Simulate from :func:`init_market` for ``cfg.duration`` time units.

    A row is recorded at t = 0 and every ``record_interval`` afterwards. The
    recorded p are buyer-averaged logit probabilities, not purchase counts.
    """
    state = init_market(params, cfg)
    rows = [state.snapshot()]
    if cfg.scheduler is Scheduler.ROUNDS:
        _run_rounds(state, cfg, rows)
    else:
        _run_poisson(state, cfg, rows)
    t, p, s, h, x = (np.array(col) for col in zip(*rows))
    return TimeSeries(t, p, s, h, x)
