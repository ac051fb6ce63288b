"""Seeded Monte Carlo estimator for the harvest-then-transmit slot.

Per trial: draw the effective downlink and uplink gains, apply the
harvesting model to the received power, form the uplink SNR, and count an
outage whenever the SNR falls below 2^rate - 1.

Reproducibility contract: sample i consumes a fixed, block-aligned window
of the counter-based (Philox) stream keyed by the seed, so a given
(seed, n_samples, batch) triple yields bit-identical results regardless of
how batches are scheduled across workers.
"""

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numpy.random import Generator, Philox

from .ehmodel import harvested_power


@dataclass(frozen=True)
class SimConfig:
    n_samples: int
    seed: int
    batch: int = 1_000_000

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        if self.batch < 1:
            raise ValueError("batch must be >= 1")
        if self.n_samples < 1000:
            warnings.warn("fewer than 1000 samples: confidence interval "
                          "is unreliable", stacklevel=2)


@dataclass(frozen=True)
class SimResult:
    outage: float
    ci95_halfwidth: float
    mean_harvested: float
    mean_snr_db: float
    throughput: float


def _draws_per_sample(p):
    # padded to a whole number of 4x64-bit counter blocks so every sample
    # starts on a block boundary (advance() moves whole blocks)
    need = p.dl.shape + p.ul.shape
    return -4 * (-need // 4)


def _run_batch(p, cfg, d, start, count):
    bitgen = Philox(key=cfg.seed)
    if start:
        bitgen.advance(start * d // 4)
    u = Generator(bitgen).random((count, d))
    np.maximum(u, 2.0 ** -53, out=u)
    exp_draws = -np.log(u)
    s1 = p.dl.shape
    v1 = exp_draws[:, :s1].sum(axis=1) / p.dl.rate
    v2 = exp_draws[:, s1:s1 + p.ul.shape].sum(axis=1) / p.ul.rate
    p_eh = harvested_power(p.eh, p.p_t * v1)
    snr = (p.theta * p_eh * p.tau / (1.0 - p.tau)) * v2 / p.sigma2
    gamma_thr = 2.0 ** p.rate - 1.0
    return (int(np.count_nonzero(snr < gamma_thr)),
            float(p_eh.sum()), float(snr.sum()))


def simulate(p, cfg, workers=1):
    """Estimate outage, harvested power, SNR, and throughput over
    cfg.n_samples independent slots.

    ``workers`` only controls scheduling; per-batch partial sums are always
    combined in batch order, so results do not depend on it.
    """
    d = _draws_per_sample(p)
    starts = list(range(0, cfg.n_samples, cfg.batch))
    counts = [min(cfg.batch, cfg.n_samples - s) for s in starts]
    if workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(
                lambda sc: _run_batch(p, cfg, d, sc[0], sc[1]),
                zip(starts, counts)))
    else:
        partials = [_run_batch(p, cfg, d, s, c) for s, c in zip(starts, counts)]

    n = cfg.n_samples
    n_out = sum(part[0] for part in partials)
    harvested_total = math.fsum(part[1] for part in partials)
    snr_total = math.fsum(part[2] for part in partials)
    outage = n_out / n
    ci = 1.96 * math.sqrt(outage * (1.0 - outage) / n)
    if n * min(outage, 1.0 - outage) < 20:
        warnings.warn("normal-approximation CI invalid: fewer than 20 "
                      "expected events in the rarer class", stacklevel=2)
    mean_snr = snr_total / n
    return SimResult(
        outage=outage,
        ci95_halfwidth=ci,
        mean_harvested=harvested_total / n,
        mean_snr_db=10.0 * math.log10(mean_snr) if mean_snr > 0 else -math.inf,
        throughput=p.rate * (1.0 - p.tau) * (1.0 - outage),
    )
