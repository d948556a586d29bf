"""Phase boundaries, order parameters, classification and (T, g) sweeps.

The analytic boundaries are specialised to two sellers sharing the market at
p0 = 1/2 by default.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .meanfield import one_minus_avg_price, q_zero, stationary_avg_freshness
from .model import ModelParams
from .series import TimeSeries
from .special import (DEFAULT_TOL, NumericalError, ToleranceConfig, find_root,
                      richardson_derivative)

FD_STEP = 1e-5
MASK64 = (1 << 64) - 1


class PhaseLabel(str, enum.Enum):
    SYMMETRIC = "S"
    ASYMMETRIC = "A"
    OSCILLATORY = "O"
    ASYMMETRIC_OSCILLATION = "A'"


@dataclass(frozen=True)
class OrderParams:
    m_a: float
    m_o: float

    @property
    def m(self) -> float:
        return self.m_a - self.m_o


@dataclass(frozen=True)
class BoundaryCurve:
    g: np.ndarray
    t_c: np.ndarray
    g_c: float


def price_sensitivity(R: float, p0: float, h_c: float, step: float = FD_STEP,
                      tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """d/dp [p0 (1 - xbar(p))] at p = p0, by Richardson-refined central differences.

    This is the linear response of the price term of the replicator equation
    to a perturbation of p around p0.
    """
    return p0 * richardson_derivative(lambda p: one_minus_avg_price(p, R, h_c, tol), p0, step)


def freshness_sensitivity(R: float, p0: float) -> float:
    return R * p0 / (1.0 + R * p0) ** 2


def critical_temperature(g: float, R: float, p0: float = 0.5, h_c: float = 0.05) -> float:
    """Temperature below which the equal-share state is linearly unstable.

    Negative values mean the symmetric state is stable at every T >= 0.
    """
    fresh = (1.0 - g) * freshness_sensitivity(R, p0)
    if g == 0:
        return fresh
    return g * price_sensitivity(R, p0, h_c) + fresh


def stability_prefactor(params: ModelParams, p0: float | None = None) -> float:
    """Growth-rate prefactor of a perturbation of the symmetric state (negative: stable).

    The full linear rate is this value times (1 - alpha) / (tau0 T).
    """
    p0 = params.p0 if p0 is None else p0
    if not 0 < p0 < 1:
        raise ValueError("p0 must lie in (0, 1)")
    return critical_temperature(params.greed, params.R, p0, params.h_c) - params.temperature


def critical_greed(R: float, h_c: float, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """Greed above which an abandoned shelf's offer eventually beats a monopolist's.

    Solves g = Q0(g); Q0 is affine in g, so the solution is closed-form.
    """
    h1 = stationary_avg_freshness(1.0, R)
    cheap = one_minus_avg_price(1.0, R, h_c, tol)
    denom = 1.0 - cheap + h1
    if abs(denom) < 1e-15:
        raise NumericalError(f"degenerate critical-greed equation (denominator {denom!r})")
    return h1 / denom


def crossing_age(g: float, R: float, h_c: float, tau1: float,
                 tol: ToleranceConfig = DEFAULT_TOL) -> float | None:
    """Shelf age at which a uniformly aged stock offers as much as a monopolist (Q(tau) = Q0).

    Returns the largest such age, the estimate of the oscillation half-period,
    or None when no such crossing exists (g <= g_c). Solved in w = e^{-tau/tau1},
    where the residual g e^{-w/h_c} + (1-g) w - Q0 is convex.
    """
    q0 = q_zero(g, R, h_c, tol)
    if g - q0 <= tol.abs_tol:
        return None

    def residual(w):
        return g * math.exp(-w / h_c) + (1.0 - g) * w - q0

    # minimum of the convex residual; for g = 1 it is monotone and w = 1 bounds it
    if g >= 1.0:
        upper = 1.0
    else:
        w_min = h_c * math.log(g / (h_c * (1.0 - g)))
        if w_min <= 0:
            return None
        upper = min(w_min, 1.0)
    if residual(upper) > 0:
        return None
    w = find_root(residual, 0.0, upper, tol)
    if w <= 0:
        return None
    return -tau1 * math.log(w)


def boundary_curve(g_values: Iterable[float], R: float, h_c: float, p0: float = 0.5) -> BoundaryCurve:
    g = np.asarray(list(g_values), dtype=float)
    t_c = np.array([critical_temperature(gi, R, p0, h_c) for gi in g])
    return BoundaryCurve(g, t_c, critical_greed(R, h_c))


def _gap(ts: TimeSeries, burn_in: float) -> tuple[np.ndarray, np.ndarray]:
    window = ts.after(burn_in)
    if len(window) == 0:
        raise ValueError(f"no samples at or after burn_in={burn_in!r}")
    return window.t, window.p[:, 0] - window.p[:, 1]


def order_parameters(ts: TimeSeries, burn_in: float) -> OrderParams:
    _, d = _gap(ts, burn_in)
    m_a = abs(d.mean())
    m_o = max(np.abs(d).mean() - m_a, 0.0)
    return OrderParams(float(m_a), float(m_o))


def classify(op: OrderParams, threshold: float = 0.1) -> PhaseLabel:
    asym, osc = op.m_a > threshold, op.m_o > threshold
    if asym and osc:
        return PhaseLabel.ASYMMETRIC_OSCILLATION
    if asym:
        return PhaseLabel.ASYMMETRIC
    if osc:
        return PhaseLabel.OSCILLATORY
    return PhaseLabel.SYMMETRIC


def half_period(ts: TimeSeries, burn_in: float, window: int = 5) -> float | None:
    """Mean spacing between zero crossings of the smoothed, centred gap p1 - p2.

    None when fewer than four crossings are found.
    """
    t, d = _gap(ts, burn_in)
    if len(d) < window + 1:
        return None
    d = d - d.mean()
    smooth = np.convolve(d, np.ones(window) / window, mode="valid")
    ts_ = t[(window - 1) // 2: len(t) - window // 2]
    sign = np.sign(smooth)
    idx = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
    if len(idx) < 4:
        return None
    # linear interpolation of each crossing time
    d0, d1 = smooth[idx], smooth[idx + 1]
    crossings = ts_[idx] + (ts_[idx + 1] - ts_[idx]) * d0 / (d0 - d1)
    return float(np.mean(np.diff(crossings)))


def mix_seed(base_seed: int, index: int) -> int:
    """64-bit seed for sweep cell ``index``: SplitMix64 finalizer of base + (index+1) * golden gamma."""
    z = (base_seed + (index + 1) * 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


@dataclass
class SweepRow:
    temperature: float
    greed: float
    seed: int
    order: OrderParams | None
    phase: PhaseLabel | None
    half_period: float | None
    error: str | None = None


def _run_cell(runner, params: ModelParams, cfg, threshold: float, index: int,
              temperature: float, greed: float) -> SweepRow:
    seed = mix_seed(cfg.seed, index)
    try:
        cell_params = params.replace(temperature=temperature, greed=greed)
        cell_cfg = dataclasses.replace(cfg, seed=seed)
        ts = runner(cell_params, cell_cfg)
        op = order_parameters(ts, cell_cfg.burn_in)
        return SweepRow(temperature, greed, seed, op, classify(op, threshold),
                        half_period(ts, cell_cfg.burn_in))
    except Exception as exc:  # one bad cell must not sink the sweep
        return SweepRow(temperature, greed, seed, None, None, None, f"{type(exc).__name__}: {exc}")


def sweep(grid: Sequence[tuple[float, float]], params: ModelParams, cfg,
          runner: Callable | None = None, threshold: float = 0.1,
          workers: int = 1) -> list[SweepRow]:
    """Run and classify one seeded simulation per (T, g) cell.

    Cell ``k`` (row-major in ``grid``) uses ``mix_seed(cfg.seed, k)``, so the
    table does not depend on ``workers``. ``runner`` must be picklable when
    ``workers > 1``.
    """
    if not grid:
        raise ValueError("sweep grid is empty")
    if runner is None:
        from .agents import run as runner
    jobs = [(runner, params, cfg, threshold, k, float(T), float(g)) for k, (T, g) in enumerate(grid)]
    if workers <= 1:
        return [_run_cell(*job) for job in jobs]
    with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
        futures = [pool.submit(_run_cell, *job) for job in jobs]
        return [f.result() for f in futures]


def sweep_grid(t_values: Sequence[float], g_values: Sequence[float]) -> list[tuple[float, float]]:
    """Row-major (T outer, g inner) list of cells."""
    return [(T, g) for T in t_values for g in g_values]
