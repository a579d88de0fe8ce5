"""Closed-form outage bounds and diversity-multiplexing tradeoff curves.

Model: every link is quasi-static Rayleigh fading, so the channel power
gain is exponential with rate beta, and a link at SNR rho supports the
per-packet rate r0 iff gain > tau = (2**r0 - 1)/rho.  With N sources and
M relays the cooperative schedule fits N packets into N+M slots, giving
r0 = R*(N+M)/N for a system rate of R bits per channel use.

All formulas are evaluated with expm1/exp so they stay accurate for
tau -> 0 (rho up to 1e8 and beyond).
"""

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class LinkParams:
    """Fading/rate operating point shared by the closed-form expressions."""

    beta: float       # exponential rate of the channel power gain
    rho: float        # transmit SNR (linear)
    rate_r: float     # end-to-end system rate R in bits/channel use
    n_sources: int
    n_relays: int

    def __post_init__(self):
        if self.beta <= 0 or self.rho <= 0 or self.rate_r <= 0:
            raise ValueError("beta, rho, rate_r must all be positive")
        if self.n_sources < 1 or self.n_relays < 0:
            raise ValueError("need n_sources >= 1 and n_relays >= 0")

    @classmethod
    def from_rate_r0(cls, beta, rho, rate_r0, n_sources, n_relays):
        """Build from the per-packet rate r0 instead of the system rate R."""
        total = n_sources + n_relays
        return cls(beta, rho, rate_r0 * n_sources / total, n_sources, n_relays)

    @property
    def rate_r0(self) -> float:
        total = self.n_sources + self.n_relays
        return self.rate_r * total / self.n_sources

    @property
    def tau(self) -> float:
        return (2.0 ** self.rate_r0 - 1.0) / self.rho


def p0(lp: LinkParams) -> float:
    """Outage probability of a single link: P(gain <= tau)."""
    return -math.expm1(-lp.beta * lp.tau)


def p_relay_all(lp: LinkParams) -> float:
    """Probability one relay hears all N sources: every source link up."""
    return math.exp(-lp.n_sources * lp.beta * lp.tau)


def p_fm(lp: LinkParams, m: int) -> float:
    """Probability exactly m of the M relays fail to decode all N packets."""
    if not 0 <= m <= lp.n_relays:
        raise ValueError(f"m must be in [0, {lp.n_relays}]")
    ps = p_relay_all(lp)
    fail = -math.expm1(-lp.n_sources * lp.beta * lp.tau)  # 1 - ps, stably
    return math.comb(lp.n_relays, m) * ps ** (lp.n_relays - m) * fail ** m


def p_ekl(lp: LinkParams, k: int, l_ok: int) -> float:
    """Probability exactly l_ok of k independent links are operational."""
    if k < 0 or not 0 <= l_ok <= k:
        raise ValueError("need 0 <= l_ok <= k")
    up = math.exp(-lp.beta * lp.tau)       # 1 - p0
    down = -math.expm1(-lp.beta * lp.tau)  # p0
    return math.comb(k, l_ok) * down ** (k - l_ok) * up ** l_ok


@dataclass(frozen=True)
class OutageBounds:
    """Per-destination outage bracket plus the leading asymptotic constants.

    As tau -> 0, upper/tau**d -> k_up and lower/tau**d -> k_low where d is
    the diversity exponent implied by the code metric used.
    """

    lower: float
    upper: float
    k_low: float
    k_up: float

    def __post_init__(self):
        if not (0.0 <= self.lower <= self.upper * (1 + 1e-12) and self.upper <= 1.0 + 1e-12):
            raise ValueError(f"invalid bracket [{self.lower}, {self.upper}]")


def outage_bounds_multicast(lp: LinkParams, gamma_n: int) -> OutageBounds:
    """Bracket on P(a destination misses at least one of the N packets).

    ``gamma_n`` is the code's gamma-rank at level N: with fewer than
    N+M-(gamma_n-1) failed transmissions, decoding never fails; with at
    most gamma_n-1 survivors it always fails.
    """
    n, m_relays = lp.n_sources, lp.n_relays
    total = n + m_relays
    if not n <= gamma_n <= total:
        raise ValueError(f"gamma_n must be in [N, N+M] = [{n}, {total}]")
    beta = lp.beta
    upper = 0.0
    k_up = 0.0
    for m in range(m_relays + 1):
        k = total - m
        fm = p_fm(lp, m)
        upper += fm * sum(p_ekl(lp, k, l) for l in range(min(gamma_n - 1, k) + 1))
        if gamma_n - 1 <= k:
            k_up += (math.comb(m_relays, m) * (n * beta) ** m
                     * math.comb(k, gamma_n - 1) * beta ** (k - (gamma_n - 1)))
    d = total - (gamma_n - 1)
    lower = p_fm(lp, 0) * p0(lp) ** d * (1.0 - p0(lp)) ** (gamma_n - 1)
    return OutageBounds(lower, min(upper, 1.0), beta ** d, k_up)


def outage_bounds_unicast(lp: LinkParams, lambda_i: int) -> OutageBounds:
    """Bracket on P(destination i misses its own packet).

    ``lambda_i`` is the code's lambda-rank for coordinate i.  The upper
    bound conditions on the direct link being down (factor p0) and counts
    survivors among the other N-1+M transmissions.
    """
    n, m_relays = lp.n_sources, lp.n_relays
    total = n + m_relays
    if not 1 <= lambda_i <= total:
        raise ValueError(f"lambda_i must be in [1, N+M] = [1, {total}]")
    beta = lp.beta
    direct_down = p0(lp)
    upper = 0.0
    k_up = 0.0
    for m in range(m_relays + 1):
        k = n - 1 + m_relays - m
        fm = p_fm(lp, m)
        upper += fm * sum(p_ekl(lp, k, l) for l in range(min(lambda_i - 1, k) + 1))
        if lambda_i - 1 <= k:
            k_up += (math.comb(m_relays, m) * (n * beta) ** m
                     * math.comb(k, lambda_i - 1) * beta ** (k - (lambda_i - 1)))
    upper *= direct_down
    k_up *= beta
    d = total - (lambda_i - 1)
    lower = p_fm(lp, 0) * direct_down ** d * (1.0 - direct_down) ** (lambda_i - 1)
    return OutageBounds(lower, min(upper, 1.0), beta ** d, k_up)


def system_outage(per_dest) -> float:
    """P(any destination fails) from independent per-destination outages."""
    acc = 1.0
    for p in per_dest:
        if not 0.0 <= p <= 1.0:
            raise ValueError("probabilities must lie in [0, 1]")
        acc *= 1.0 - p
    return 1.0 - acc


def selection_cdf_approx(n: int, m: int, beta: float, tau: float) -> float:
    """Small-tau cdf of one adjacent-link gain of the best-bottleneck relay.

    With M candidate relays, each scored by the minimum of its 2N adjacent
    link gains, the chosen relay's individual link gain g satisfies
    P(g <= tau) ~= (2*N*beta)**(M-1) * beta * tau**M as tau -> 0.
    """
    if n < 1 or m < 1 or beta <= 0 or tau < 0:
        raise ValueError("need n, m >= 1, beta > 0, tau >= 0")
    return (2 * n * beta) ** (m - 1) * beta * tau ** m


# -- diversity-multiplexing tradeoff ------------------------------------------


@dataclass(frozen=True)
class DmtCurve:
    """d(r) = d0 * (1 - r/r_max) on [0, r_max], zero beyond (all curves here
    are straight lines from (0, d0) down to (r_max, 0))."""

    scheme: str
    d0: float
    r_max: float

    def __post_init__(self):
        if self.d0 < 0 or self.r_max <= 0:
            raise ValueError("need d0 >= 0 and r_max > 0")

    def at(self, r: float) -> float:
        if r < 0 or r > self.r_max:
            return 0.0
        return self.d0 * (1.0 - r / self.r_max)


def dmt_curve(scheme: str, n: int, m: int, *, gamma_n: int | None = None,
              k_select: int | None = None) -> DmtCurve:
    """Closed-form DMT line for one scheme.

    dncc/rncc: network-coded cooperation with all M relays.  ``gamma_n``
      (default N, the full-diversity case) degrades the slope to
      N+M-(gamma_n-1) for weaker codes.
    selection: only the best k_select relays transmit, shortening the
      schedule to N+k_select slots.
    ncc: best-relay XOR forwarding (needs every overheard packet), fixed
      diversity 2.
    cc: repetition-based cooperation, diversity M+1 at half multiplexing.
    """
    if n < 1 or m < 1:
        raise ValueError("need n >= 1 and m >= 1")
    if scheme in ("dncc", "rncc"):
        g = n if gamma_n is None else gamma_n
        if not n <= g <= n + m:
            raise ValueError(f"gamma_n must be in [{n}, {n + m}]")
        return DmtCurve(scheme, n + m - (g - 1), n / (n + m))
    if scheme == "selection":
        if k_select is None or not 1 <= k_select <= m:
            raise ValueError("selection needs k_select in [1, M]")
        k = k_select
        if k < n - 1:
            d0 = k + 1
        else:
            d0 = n + m * (k - (n - 1))
        return DmtCurve(scheme, d0, n / (n + k))
    if scheme == "ncc":
        return DmtCurve(scheme, 2, n / (n + 1))
    if scheme == "cc":
        return DmtCurve(scheme, m + 1, 0.5)
    raise ValueError(f"unknown scheme {scheme!r}")


def dmt(scheme: str, n: int, m: int, r: float, *, gamma_n: int | None = None,
        k_select: int | None = None) -> float:
    return dmt_curve(scheme, n, m, gamma_n=gamma_n, k_select=k_select).at(r)


def loglog_slope(xs, ys) -> float:
    """Least-squares slope of log10(ys) against log10(xs)."""
    lx = np.log10(np.asarray(xs, dtype=float))
    ly = np.log10(np.asarray(ys, dtype=float))
    return float(np.polyfit(lx, ly, 1)[0])
