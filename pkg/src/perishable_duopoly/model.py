"""Freshness, price, logit choice and the satisfaction update.

All functions accept scalars or numpy arrays and are pure.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np


@dataclass(frozen=True)
class ModelParams:
    """Constants of the duopoly model.

    Defaults are the values used for the published simulations; temperature
    and greed are the control parameters and must always be given.
    """

    temperature: float
    greed: float
    n_products: int = 5000
    n_buyers: int = 100
    tau0: float = 0.1
    tau1: float = 20.0
    h_c: float = 0.05
    alpha: float = 0.99
    n_sellers: int = 2

    def __post_init__(self):
        for name in ("n_products", "n_buyers", "n_sellers"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value:
                raise ValueError(f"{name} must be an integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        if self.n_products < 1:
            raise ValueError(f"n_products must be positive, got {self.n_products}")
        if self.n_buyers < 1:
            raise ValueError(f"n_buyers must be positive, got {self.n_buyers}")
        if self.n_sellers < 2:
            raise ValueError(f"n_sellers must be at least 2, got {self.n_sellers}")
        for name in ("tau0", "tau1", "h_c"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")
        if not 0 <= self.alpha < 1:
            raise ValueError(f"alpha must lie in [0, 1), got {self.alpha!r}")
        if not 0 <= self.greed <= 1:
            raise ValueError(f"greed must lie in [0, 1], got {self.greed!r}")
        if not (self.temperature >= 0 and math.isfinite(self.temperature)):
            raise ValueError(f"temperature must be non-negative and finite, got {self.temperature!r}")

    @property
    def R(self) -> float:
        """Turnover ratio N_a tau1 / (N_p tau0)."""
        return self.n_buyers * self.tau1 / (self.n_products * self.tau0)

    @property
    def p0(self) -> float:
        return 1.0 / self.n_sellers

    def purchase_rate(self, p):
        """Fraction of a seller's stock renewed per unit time when chosen with probability ``p``."""
        return self.n_buyers * np.asarray(p) / (self.n_products * self.tau0)

    def replace(self, **changes) -> "ModelParams":
        return ModelParams(**{**asdict(self), **changes})


def freshness(tau, tau1):
    tau = np.asarray(tau, dtype=float)
    if np.any(tau < 0):
        raise ValueError("product age must be non-negative")
    out = np.exp(-tau / tau1)
    return float(out) if out.ndim == 0 else out


def price(tau, tau1, h_c):
    """Markdown price of a product of age ``tau``; 1 - exp(-h(tau)/h_c)."""
    if not h_c > 0:
        raise ValueError(f"h_c must be positive, got {h_c!r}")
    out = -np.expm1(-np.asarray(freshness(tau, tau1)) / h_c)
    return float(out) if out.ndim == 0 else out


def log_choice_probabilities(s, temperature):
    """Natural log of the logit choice probabilities along the last axis.

    Exact even where the probabilities themselves underflow (S/T gaps beyond ~745).
    """
    if not temperature > 0:
        raise ValueError("log probabilities need a positive temperature")
    z = np.asarray(s, dtype=float) / temperature
    z = z - z.max(axis=-1, keepdims=True)
    return z - np.log(np.exp(z).sum(axis=-1, keepdims=True))


def choice_probabilities(s, temperature):
    """Logit probabilities p_i = exp(S_i/T) / sum_j exp(S_j/T) along the last axis.

    Computed in max-shifted form, so no overflow occurs for any finite S/T.
    Probabilities are kept at full double precision; values below the
    smallest subnormal (~1e-323, i.e. an S/T gap beyond ~744) underflow to
    exactly 0.0. Use :func:`log_choice_probabilities` when those matter.

    ``temperature == 0`` returns the deterministic limit: probability mass
    split evenly among the maximal entries, so sampling from it is argmax with
    uniform tie-breaking.
    """
    s = np.asarray(s, dtype=float)
    if temperature < 0:
        raise ValueError("temperature must be non-negative")
    if temperature == 0:
        top = (s == s.max(axis=-1, keepdims=True)).astype(float)
        return top / top.sum(axis=-1, keepdims=True)
    w = np.exp((s - s.max(axis=-1, keepdims=True)) / temperature)
    return w / w.sum(axis=-1, keepdims=True)


def satisfaction_source(h, x, greed):
    """g (1 - x) + (1 - g) h: the value a purchase pulls satisfaction towards."""
    return greed * (1.0 - x) + (1.0 - greed) * h


def update_satisfaction(s_old, h, x, alpha, greed):
    return alpha * s_old + (1.0 - alpha) * satisfaction_source(h, x, greed)
