"""Single-average-buyer reduction of the market.

Two layers live here. The stationary averages of freshness and price over an
exponential age profile, and the offer curve Q(tau) of a shelf of uniform
age, are closed-form. :func:`integrate` couples the satisfaction ODE of the
average buyer to the transport of each seller's product-age distribution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import ModelParams, choice_probabilities, freshness, price, satisfaction_source
from .series import TimeSeries
from .special import DEFAULT_TOL, NumericalError, ToleranceConfig, scaled_lower_incomplete_gamma

NORMALIZATION_TOL = 1e-6


def stationary_avg_freshness(p: float, R: float) -> float:
    """Mean freshness of a shelf sold at probability ``p``: 1 / (1 + 1/(R p)).

    ``p = 0`` returns 0, the continuous extension (nothing is ever renewed).
    """
    if p < 0:
        raise ValueError("p must be non-negative")
    if p == 0:
        return 0.0
    return 1.0 / (1.0 + 1.0 / (R * p))


def one_minus_avg_price(p: float, R: float, h_c: float,
                        tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """1 - mean price, i.e. pR h_c^{pR} gamma(pR, 1/h_c), without cancellation."""
    if p < 0:
        raise ValueError("p must be non-negative")
    if p == 0:
        return 0.0
    s = p * R
    return s * scaled_lower_incomplete_gamma(s, 1.0 / h_c, tol)


def stationary_avg_price(p: float, R: float, h_c: float,
                         tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """Mean price over the stationary exponential age profile of a seller chosen with probability ``p``."""
    return 1.0 - one_minus_avg_price(p, R, h_c, tol)


def q_of_age(tau, greed: float, h_c: float, tau1: float):
    """Satisfaction source offered by a shelf whose whole stock has age ``tau``."""
    h = np.asarray(freshness(tau, tau1))
    out = greed * np.exp(-h / h_c) + (1.0 - greed) * h
    return float(out) if out.ndim == 0 else out


def q_zero(greed: float, R: float, h_c: float, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """Satisfaction source of a seller holding the whole market (p = 1)."""
    return (greed * one_minus_avg_price(1.0, R, h_c, tol)
            + (1.0 - greed) * stationary_avg_freshness(1.0, R))


@dataclass
class AgeDistribution:
    """Product-age density on a uniform grid plus a lumped tail beyond the grid.

    Bin ``k`` covers ages ``[k dtau, (k+1) dtau)``; ``density[k]`` is the bin
    mass divided by ``dtau``.
    """

    grid_step: float
    density: np.ndarray
    tail_mass: float = 0.0

    @property
    def masses(self) -> np.ndarray:
        return self.density * self.grid_step

    @property
    def tau_max(self) -> float:
        return self.grid_step * len(self.density)

    def total_mass(self) -> float:
        return float(self.masses.sum() + self.tail_mass)

    def midpoints(self) -> np.ndarray:
        return (np.arange(len(self.density)) + 0.5) * self.grid_step

    def average(self, fn) -> float:
        """Midpoint quadrature of ``fn(age)``; the tail is evaluated at ``tau_max``."""
        return float(self.masses @ fn(self.midpoints()) + self.tail_mass * fn(self.tau_max))

    def copy(self) -> "AgeDistribution":
        return AgeDistribution(self.grid_step, self.density.copy(), self.tail_mass)

    @classmethod
    def stationary(cls, rate: float, grid_step: float, tau_max: float) -> "AgeDistribution":
        """Exponential profile with the given renewal rate, integrated exactly over each bin."""
        n = int(round(tau_max / grid_step))
        r = math.exp(-rate * grid_step)
        masses = (1.0 - r) * r ** np.arange(n)
        return cls(grid_step, masses / grid_step, r ** n)

    @classmethod
    def fresh(cls, grid_step: float, tau_max: float) -> "AgeDistribution":
        n = int(round(tau_max / grid_step))
        density = np.zeros(n)
        density[0] = 1.0 / grid_step
        return cls(grid_step, density, 0.0)


def transport_step(phi: AgeDistribution, rate: float, dt: float) -> AgeDistribution:
    """Age every product by one bin, remove a fraction 1 - e^{-rate dt}, refill at age 0.

    The grid step must equal ``dt`` so that aging is an exact index shift.
    """
    survive = math.exp(-rate * dt)
    m = phi.masses
    new = np.empty_like(m)
    new[1:] = m[:-1] * survive
    tail = (phi.tail_mass + m[-1]) * survive
    new[0] = 1.0 - (new[1:].sum() + tail)
    return AgeDistribution(phi.grid_step, new / phi.grid_step, tail)


@dataclass
class MeanFieldState:
    s: np.ndarray
    phi: list[AgeDistribution]
    clock: float = 0.0

    def probabilities(self, temperature: float) -> np.ndarray:
        return choice_probabilities(self.s, temperature)


def tau_max_for(params: ModelParams) -> float:
    return 10.0 * params.tau1


def symmetric_state(params: ModelParams, dt: float, bias: float = 0.0) -> MeanFieldState:
    """Stationary symmetric state (every seller at p0) with ``bias`` added to seller 1's satisfaction."""
    p0 = params.p0
    rate = float(params.purchase_rate(p0))
    phi = [AgeDistribution.stationary(rate, dt, tau_max_for(params)) for _ in range(params.n_sellers)]
    s0 = satisfaction_source(stationary_avg_freshness(p0, params.R),
                             stationary_avg_price(p0, params.R, params.h_c), params.greed)
    s = np.full(params.n_sellers, s0)
    s[0] += bias
    return MeanFieldState(s, phi)


@dataclass
class _Recorder:
    rows: list = field(default_factory=list)

    def add(self, t, p, s, h, x):
        self.rows.append((t, p.copy(), s.copy(), h.copy(), x.copy()))

    def series(self) -> TimeSeries:
        t, p, s, h, x = zip(*self.rows)
        return TimeSeries(np.array(t), np.array(p), np.array(s), np.array(h), np.array(x))


def integrate(params: ModelParams, init: MeanFieldState, t_end: float, dt: float,
              record_interval: float | None = None, *, inplace: bool = False) -> TimeSeries:
    """Advance the coupled satisfaction / age-distribution system to ``t_end``.

    Each step computes p from s by the logit rule, transports every age
    distribution at rate N_a p_i / (N_p tau0), averages freshness and price
    over it, and takes an explicit Euler step of
    ``ds_i/dt = (1 - alpha)/tau0 * (Q_i - s_i)``.

    Rows are recorded every ``record_interval`` (default: every step). The
    age-grid step of ``init`` must equal ``dt``.
    """
    if not dt > 0 or dt > params.tau0 + 1e-15:
        raise ValueError(f"dt must lie in (0, tau0={params.tau0}], got {dt!r}")
    for phi in init.phi:
        if not math.isclose(phi.grid_step, dt, rel_tol=1e-12):
            raise ValueError("age grid step must equal dt")
    every = 1 if record_interval is None else max(1, int(round(record_interval / dt)))
    n_steps = int(math.ceil(t_end / dt - 1e-9))
    state = init if inplace else MeanFieldState(init.s.copy(), [p.copy() for p in init.phi], init.clock)
    start_clock = state.clock
    relax = (1.0 - params.alpha) / params.tau0

    # per-seller bin masses as one matrix; the quadrature weights are fixed
    grid = state.phi[0]
    ages = grid.midpoints()
    h_w, x_w = freshness(ages, params.tau1), price(ages, params.tau1, params.h_c)
    h_tail, x_tail = freshness(grid.tau_max, params.tau1), price(grid.tau_max, params.tau1, params.h_c)
    masses = np.array([phi.masses for phi in state.phi])
    tails = np.array([phi.tail_mass for phi in state.phi])
    s = state.s.astype(float).copy()

    def averages():
        return masses @ h_w + tails * h_tail, masses @ x_w + tails * x_tail

    rec = _Recorder()
    h, x = averages()
    rec.add(state.clock, choice_probabilities(s, params.temperature), s, h, x)
    clock = state.clock
    try:
        for step in range(1, n_steps + 1):
            p = choice_probabilities(s, params.temperature)
            survive = np.exp(-params.purchase_rate(p) * dt)
            tails = (tails + masses[:, -1]) * survive
            masses[:, 1:] = masses[:, :-1] * survive[:, None]
            masses[:, 0] = 0.0
            masses[:, 0] = 1.0 - (masses.sum(axis=1) + tails)
            h, x = averages()
            s = s + dt * relax * (satisfaction_source(h, x, params.greed) - s)
            clock = start_clock + step * dt
            if step % 1000 == 0 or step == n_steps:
                _check_normalization(masses, tails, clock)
            if step % every == 0 or step == n_steps:
                rec.add(clock, choice_probabilities(s, params.temperature), s, h, x)
    finally:
        state.s = s
        state.clock = clock
        state.phi = [AgeDistribution(dt, m / dt, float(tl)) for m, tl in zip(masses, tails)]
    return rec.series()


def _check_normalization(masses: np.ndarray, tails: np.ndarray, clock: float) -> None:
    drift = np.abs(masses.sum(axis=1) + tails - 1.0)
    if np.any(drift > NORMALIZATION_TOL) or np.any(masses < 0):
        i = int(np.argmax(drift))
        raise NumericalError(f"age distribution of seller {i + 1} lost normalization "
                             f"(|mass - 1| = {drift[i]:.3g}) at t = {clock:.6g}")
