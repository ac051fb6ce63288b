"""Nakagami-m links and the equivalent Gamma-distributed effective channel
power gains seen after transmit beamforming (downlink) or receive combining
(uplink)."""

import math
from dataclasses import dataclass

from .specfun import gamma_upper_int


@dataclass(frozen=True)
class NakagamiLink:
    """One multi-antenna link: integer fading figure m, antenna count, and
    per-antenna mean power gain (linear, includes path loss)."""

    m: int
    n_antennas: int
    mean_gain: float

    def __post_init__(self):
        if self.m < 1 or self.m != int(self.m):
            raise ValueError("fading figure m must be an integer >= 1")
        if self.n_antennas < 1 or self.n_antennas != int(self.n_antennas):
            raise ValueError("n_antennas must be an integer >= 1")
        if not self.mean_gain > 0:
            raise ValueError("mean_gain must be positive")


@dataclass(frozen=True)
class EffectiveChannel:
    """Gamma(shape, rate) effective power gain; shape = m * n_antennas."""

    shape: int
    rate: float

    def __post_init__(self):
        if self.shape < 1 or self.shape != int(self.shape):
            raise ValueError("shape must be an integer >= 1")
        if not self.rate > 0:
            raise ValueError("rate must be positive")


def effective(link):
    """Combine the per-antenna gains: shape m*N, rate m/mean_gain."""
    return EffectiveChannel(shape=link.m * link.n_antennas,
                            rate=link.m / link.mean_gain)


def pdf(ch, x):
    """Gamma density at x >= 0, evaluated in log space."""
    if x < 0:
        raise ValueError("x must be non-negative")
    if x == 0.0:
        return ch.rate if ch.shape == 1 else 0.0
    log_p = (ch.shape * math.log(ch.rate) + (ch.shape - 1) * math.log(x)
             - ch.rate * x - math.lgamma(ch.shape))
    return math.exp(log_p) if log_p > -745.0 else 0.0


def ccdf(ch, x):
    """P(gain > x) = e^(-rate x) sum_{k<shape} (rate x)^k / k!."""
    if x < 0:
        raise ValueError("x must be non-negative")
    z = ch.rate * x
    if not math.isfinite(z):
        return 0.0
    if z > 700.0:
        return gamma_upper_int(ch.shape, z) / math.factorial(ch.shape - 1)
    term = 1.0
    terms = [term]
    for k in range(1, ch.shape):
        term *= z / k
        terms.append(term)
    return math.exp(-z) * math.fsum(terms)


def sample(ch, rng):
    """One Gamma(shape, rate) draw as the sum of shape exponentials, each
    from the inverse CDF -ln(u) of a uniform from ``rng``."""
    total = 0.0
    for _ in range(ch.shape):
        u = rng.random()
        if u <= 0.0:
            u = 2.0 ** -53
        total -= math.log(u)
    return total / ch.rate
