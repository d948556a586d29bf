"""Small numerical kernel: lower incomplete gamma, bracketed roots, finite differences.

Only what the stationary averages and phase boundaries need. Every routine
takes its tolerances from a :class:`ToleranceConfig` so that tests can tighten
or loosen them without touching the code.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from typing import Callable

_TINY = sys.float_info.min / sys.float_info.epsilon


class NumericalError(ArithmeticError):
    """Raised when an iterative routine fails to converge or is misused."""


class ConvergenceError(NumericalError):
    def __init__(self, routine: str, s: float, x: float, max_iter: int):
        super().__init__(f"{routine} did not converge for s={s!r}, x={x!r} "
                         f"within {max_iter} iterations")
        self.s = s
        self.x = x


class BracketError(NumericalError, ValueError):
    def __init__(self, lo: float, hi: float, flo: float, fhi: float):
        super().__init__(f"root is not bracketed: f({lo!r})={flo!r}, f({hi!r})={fhi!r}")
        self.lo, self.hi, self.flo, self.fhi = lo, hi, flo, fhi


@dataclass(frozen=True)
class ToleranceConfig:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-15
    max_iter: int = 200

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("abs_tol and rel_tol must be positive")
        if int(self.max_iter) < 1:
            raise ValueError("max_iter must be >= 1")


DEFAULT_TOL = ToleranceConfig()


def _gamma_series(s: float, x: float, tol: ToleranceConfig) -> float:
    # gamma(s, x) = e^-x x^s sum_n x^n / (s (s+1) ... (s+n)); returns the sum
    term = 1.0 / s
    total = term
    denom = s
    for _ in range(tol.max_iter):
        denom += 1.0
        term *= x / denom
        total += term
        if abs(term) <= abs(total) * tol.rel_tol:
            return total
    raise ConvergenceError("incomplete gamma series", s, x, tol.max_iter)


def _gamma_upper_cf(s: float, x: float, tol: ToleranceConfig) -> float:
    # Legendre continued fraction for Gamma(s, x) e^x x^-s, modified Lentz evaluation.
    b = x + 1.0 - s
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, tol.max_iter + 1):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) <= tol.rel_tol:
            return h
    raise ConvergenceError("incomplete gamma continued fraction", s, x, tol.max_iter)


def lower_incomplete_gamma(s: float, x: float, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    r"""Lower incomplete gamma function :math:`\gamma(s, x) = \int_0^x e^{-y} y^{s-1} dy`.

    The power series is used for ``x < s + 1`` and the continued fraction of
    the complement :math:`\Gamma(s, x)` otherwise.
    """
    if not s > 0:
        raise ValueError(f"s must be positive, got {s!r}")
    if not x >= 0:
        raise ValueError(f"x must be non-negative, got {x!r}")
    if x == 0:
        return 0.0
    if math.isinf(x):
        return math.gamma(s)
    try:
        if x < s + 1.0:
            return _gamma_series(s, x, tol) * math.exp(-x + s * math.log(x))
        return math.gamma(s) - _gamma_upper_cf(s, x, tol) * math.exp(-x + s * math.log(x))
    except OverflowError:
        raise NumericalError(f"gamma({s!r}, {x!r}) overflows a double") from None


def scaled_lower_incomplete_gamma(s: float, x: float, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """``x**-s * gamma(s, x)`` evaluated without forming ``x**s`` or ``Gamma(s)``.

    Stays finite for large ``s`` where :func:`lower_incomplete_gamma` overflows.
    """
    if not s > 0:
        raise ValueError(f"s must be positive, got {s!r}")
    if not x > 0 or math.isinf(x):
        raise ValueError(f"x must be positive and finite, got {x!r}")
    if x < s + 1.0:
        return _gamma_series(s, x, tol) * math.exp(-x)
    return math.exp(math.lgamma(s) - s * math.log(x)) - _gamma_upper_cf(s, x, tol) * math.exp(-x)


def find_root(f: Callable[[float], float], lo: float, hi: float,
              tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """Root of ``f`` inside ``[lo, hi]`` by safeguarded secant/bisection.

    A secant step is taken when it lands well inside the bracket and the
    bracket has been shrinking; otherwise the bracket is halved. Terminates
    when ``|f(r)| <= abs_tol`` or the bracket is narrower than ``abs_tol``.
    """
    if lo > hi:
        lo, hi = hi, lo
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if flo * fhi > 0 or math.isnan(flo) or math.isnan(fhi):
        raise BracketError(lo, hi, flo, fhi)

    width = hi - lo
    for _ in range(tol.max_iter):
        if hi - lo <= tol.abs_tol:
            break
        mid = 0.5 * (lo + hi)
        guess = hi - fhi * (hi - lo) / (fhi - flo)
        # keep secant guesses away from the endpoints; bisect if the last
        # step did not at least halve the bracket
        margin = 0.05 * (hi - lo)
        if lo + margin < guess < hi - margin and (hi - lo) <= 0.5 * width:
            r = guess
        else:
            r = mid
        width = hi - lo
        fr = f(r)
        if abs(fr) <= tol.abs_tol:
            return r
        if (fr < 0) == (flo < 0):
            lo, flo = r, fr
        else:
            hi, fhi = r, fr
    else:
        if hi - lo > tol.abs_tol:
            raise NumericalError(f"find_root did not converge on [{lo!r}, {hi!r}] "
                                 f"within {tol.max_iter} iterations")
    return lo if abs(flo) <= abs(fhi) else hi


def central_difference(f: Callable[[float], float], x0: float, step: float) -> float:
    if not step > 0:
        raise ValueError("step must be positive")
    return (f(x0 + step) - f(x0 - step)) / (2.0 * step)


def richardson_derivative(f: Callable[[float], float], x0: float, step: float) -> float:
    """Central difference refined by one Richardson extrapolation (error O(step^4))."""
    coarse = central_difference(f, x0, step)
    fine = central_difference(f, x0, 0.5 * step)
    return (4.0 * fine - coarse) / 3.0
