"""Closed-form tail bounds and multiplicity statistics of random color multisets.

A color multiset here is ``alpha_n`` i.i.d. uniform draws from a palette of
``k * n`` colors. ``m_r`` counts palette colors drawn exactly ``r`` times.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple


def _log_binom(a: int, r: int) -> float:
    return math.lgamma(a + 1) - math.lgamma(r + 1) - math.lgamma(a - r + 1)


def _check(k: int, n: int, alpha_n: int, r: int) -> int:
    kn = k * n
    if kn < 2:
        raise ValueError("palette size k*n must be at least 2")
    if alpha_n < 0 or r < 0:
        raise ValueError("alpha_n and r must be non-negative")
    return kn


def expected_m_r(k: int, n: int, alpha_n: int, r: int) -> float:
    """Expected number of palette colors drawn exactly ``r`` times.

    ``kn * C(alpha_n, r) * (kn)^-r * (1 - 1/kn)^(alpha_n - r)``, evaluated in
    log space. Zero for ``r > alpha_n``.
    """
    kn = _check(k, n, alpha_n, r)
    if r > alpha_n:
        return 0.0
    log_v = (
        math.log(kn)
        + _log_binom(alpha_n, r)
        - r * math.log(kn)
        + (alpha_n - r) * math.log1p(-1.0 / kn)
    )
    return math.exp(log_v)


def expected_m_geq_r_upper(k: int, n: int, alpha_n: int, r: int) -> float:
    """Upper bound ``kn * C(alpha_n, r) * (kn)^-r`` on the expected count of colors drawn at least ``r`` times."""
    kn = _check(k, n, alpha_n, r)
    if r > alpha_n:
        return 0.0
    return math.exp(math.log(kn) + _log_binom(alpha_n, r) - r * math.log(kn))


def expected_m_geq_r(k: int, n: int, alpha_n: int, r: int) -> float:
    """Exact expected count of colors drawn at least ``r`` times."""
    _check(k, n, alpha_n, r)
    if r == 0:
        return float(k * n)
    return math.fsum(expected_m_r(k, n, alpha_n, s) for s in range(r, alpha_n + 1))


def compute_r0(eps: float, k: int) -> int:
    """Smallest positive integer ``r`` with ``2 * k**-r <= eps**2 / 2``."""
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    if k < 2:
        raise ValueError("k must be at least 2")
    target = eps * eps / 2
    r = max(1, math.ceil(math.log(2 / target) / math.log(k)) - 1)
    # float log may be off by one in either direction
    while 2 * float(k) ** -r > target:
        r += 1
    while r > 1 and 2 * float(k) ** -(r - 1) <= target:
        r -= 1
    return r


def choose_r0(eps: float, k: int, alpha: float) -> int:
    """``r0`` with the small-density shortcut: ``1`` whenever ``alpha <= eps / 2``."""
    if alpha <= eps / 2:
        return 1
    return compute_r0(eps, k)


def chernoff_tail(mu: float, a: float, side: str = "lower") -> float:
    """Chernoff bound on ``Pr[X <= (1-a)mu]`` (lower) or ``Pr[X >= (1+a)mu]`` (upper)."""
    if mu < 0:
        raise ValueError("mu must be non-negative")
    if side == "lower":
        if a <= 0:
            raise ValueError("lower tail needs a > 0")
        return math.exp(-a * a * mu / 2)
    if side == "upper":
        if not 0 < a < 1:
            raise ValueError("upper tail needs 0 < a < 1")
        return math.exp(-a * a * mu / 3)
    raise ValueError(f"side must be 'lower' or 'upper', got {side!r}")


def talagrand_tail(expectation: float, c: float, r: float, t: float) -> float:
    """``4 exp(-t^2 / (8 c^2 r E))``, bounding ``Pr[|X - E| > t + 60 c sqrt(r E)]``."""
    if c <= 0 or r <= 0:
        raise ValueError("c and r must be positive")
    if not 0 <= t <= expectation:
        raise ValueError("t must lie in [0, expectation]")
    if t == 0:
        return 4.0
    return 4.0 * math.exp(-t * t / (8 * c * c * r * expectation))


def talagrand_deviation(expectation: float, c: float, r: float, t: float) -> float:
    """Deviation ``t + 60 c sqrt(r E)`` that :func:`talagrand_tail` refers to."""
    return t + 60 * c * math.sqrt(r * expectation)


@dataclass(frozen=True)
class MultiplicityProfile:
    """Expected multiplicity counts ``mu[r]`` for ``r = 0..alpha_n``."""

    k: int
    n: int
    alpha_n: int
    mu: Tuple[float, ...]

    @property
    def alpha(self) -> float:
        return self.alpha_n / self.n

    def mass(self, upto: int = None) -> float:
        """``sum r * mu[r]`` over ``1 <= r <= upto`` (all r by default)."""
        top = self.alpha_n if upto is None else min(upto, self.alpha_n)
        return math.fsum(r * self.mu[r] for r in range(1, top + 1))


def multiplicity_profile(k: int, n: int, alpha_n: int) -> MultiplicityProfile:
    mu = tuple(expected_m_r(k, n, alpha_n, r) for r in range(alpha_n + 1))
    return MultiplicityProfile(k, n, alpha_n, mu)


def multiplicity_counts(draws, palette: int) -> list:
    """Observed ``m_r`` for ``r = 0..len(draws)`` from a list of colors in ``1..palette``."""
    hist = [0] * (palette + 1)
    for c in draws:
        hist[c] += 1
    m = [0] * (len(draws) + 1)
    for c in range(1, palette + 1):
        m[hist[c]] += 1
    return m
