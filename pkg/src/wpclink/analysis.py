"""Outage probability and throughput of the harvest-then-transmit link.

Two analytic routes are provided for the sigmoidal harvester: adaptive
quadrature of the averaged uplink tail over the downlink fading (valid for
any parameters) and a finite double series whose inner factor is an n-th
derivative of Gamma(c1 s) U(c1 s, l, c2) at s = 1 (closed form when the
downlink effective shape is 1).  High-power asymptotics and the fixed-point
conditions for the throughput-optimal rate and harvesting-time split follow
from the saturation limit.

The slot length is normalized to 1: it cancels from every SNR and
throughput expression, so only the split tau matters.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import channel
from .ehmodel import NonLinearSigmoid
from .numerics import (DiffSpec, find_root_bracketed, integrate_01,
                       maximize_quasiconcave, richardson_derivative)
from .specfun import gamma, gamma_upper_int, hyp_u, reg_lower_gamma

MAX_SERIES_DL_SHAPE = 10     # higher derivative orders lose too many digits
_PRECISION_GUARD_RATIO = 1e6
_CLAMP_SPILL = 1e-12


class ModelMismatchError(TypeError):
    """Analytic route requested for a non-sigmoidal harvesting model."""


class SeriesPrecisionError(ArithmeticError):
    """The alternating double series lost more than six decimal digits;
    callers should fall back to the quadrature route."""


@dataclass(frozen=True)
class SystemParams:
    """Full link description.  Powers in watts, rate in bits/s/Hz."""

    p_t: float
    tau: float
    rate: float
    sigma2: float
    theta: float
    dl: channel.EffectiveChannel
    ul: channel.EffectiveChannel
    eh: object

    def __post_init__(self):
        if not self.p_t > 0:
            raise ValueError("p_t must be positive")
        if not 0 < self.tau < 1:
            raise ValueError("tau must lie strictly between 0 and 1")
        if not self.rate > 0:
            raise ValueError("rate must be positive")
        if not self.sigma2 > 0:
            raise ValueError("sigma2 must be positive")
        if not 0 < self.theta <= 1:
            raise ValueError("theta must be in (0, 1]")


@dataclass(frozen=True)
class DerivedConstants:
    gamma_thr: float
    c: float
    c1: float
    c2: float


@dataclass(frozen=True)
class OutageEstimate:
    value: float
    method: str
    abs_err: float

    def __post_init__(self):
        if self.value < -_CLAMP_SPILL or self.value > 1.0 + _CLAMP_SPILL:
            raise ValueError(f"outage {self.value} outside [0,1] beyond rounding spill")
        object.__setattr__(self, "value", min(1.0, max(0.0, self.value)))


def _require_sigmoid(p):
    if not isinstance(p.eh, NonLinearSigmoid):
        raise ModelMismatchError(
            "analytic outage routes need the sigmoidal harvesting model; "
            "use the Monte Carlo simulator for other models")
    return p.eh


def derived_constants(p):
    """Threshold SNR and the saturation/knee constants of the outage
    integrals."""
    eh = _require_sigmoid(p)
    gamma_thr = 2.0 ** p.rate - 1.0
    c = gamma_thr * p.sigma2 * (1.0 - p.tau) / (p.theta * eh.m_sat * p.tau)
    c1 = p.dl.rate / (eh.a * p.p_t)
    c2 = p.ul.rate * c * (1.0 + math.exp(eh.a * eh.b))
    return DerivedConstants(gamma_thr=gamma_thr, c=c, c1=c1, c2=c2)


def ul_gain_threshold(p, v1):
    """Minimum uplink gain that avoids outage given downlink gain v1;
    strictly decreasing, with limit c as v1 grows (harvester saturated)."""
    eh = _require_sigmoid(p)
    if not v1 > 0:
        raise ValueError("v1 must be positive")
    d = derived_constants(p)
    t = eh.a * p.p_t * v1
    if t > 700.0:
        return d.c  # saturation limit, exact
    eab = math.exp(eh.a * eh.b)
    return d.c * (1.0 + eab) / (-math.expm1(-t)) - d.c * eab


def outage_quadrature(p, rel_tol=1e-9):
    """Outage probability by adaptive quadrature of the finite-interval
    outage integral.

    For c1 < 1 the substitution u = (1-y)^c1 removes the (1-y)^(c1-1)
    endpoint singularity before integrating; the same change of variables
    also confines the high-power boundary layer to a resolvable width.
    """
    eh = _require_sigmoid(p)
    d = derived_constants(p)
    s1 = p.dl.shape
    eab = math.exp(eh.a * eh.b)
    ul = p.ul
    c, c1 = d.c, d.c1

    def ccdf_at(y):
        # uplink tail at the gain threshold for substituted variable y
        out = np.empty_like(y)
        for i, yi in enumerate(y):
            if yi <= 0.0:
                out[i] = 0.0
            else:
                w = c * (1.0 + eab) / yi - c * eab
                out[i] = channel.ccdf(ul, w) if w > 0 else 1.0
        return out

    if c1 < 1.0:
        lg = math.lgamma(s1)

        def f(u):
            u = np.asarray(u, dtype=float)
            y = -np.expm1(np.log(np.maximum(u, 5e-324)) / c1)
            tail = ccdf_at(y)
            if s1 == 1:
                return tail / math.exp(lg)
            neg_log_u = np.maximum(-np.log(np.maximum(u, 5e-324)), 5e-324)
            return np.exp((s1 - 1) * np.log(neg_log_u) - lg) * tail

        # seed the saturation layer near u = 1 (width ~ c1) and the bulk of
        # the (-ln u)^(s1-1) e^... mass (v = -ln u around s1 - 1)
        pts = ([math.exp(-c1 * k) for k in (0.25, 1.0, 4.0, 16.0, 64.0)]
               + [math.exp(-k) for k in (1.0, 3.0, 6.0, 10.0, 15.0, 22.0)])
        quad = integrate_01(f, rel_tol=rel_tol, abs_tol=1e-13, points=pts)
        integral, err = quad.value, quad.abs_err
    else:
        apt = eh.a * p.p_t

        def f(y):
            y = np.asarray(y, dtype=float)
            one_m_y = 1.0 - y
            tail = ccdf_at(y)
            out = np.zeros_like(y)
            ok = (one_m_y > 0.0) & (y > 0.0)
            x = -np.log1p(-y[ok]) / apt
            dens = np.array([channel.pdf(p.dl, xi) for xi in x])
            out[ok] = tail[ok] * dens / one_m_y[ok]
            return out

        pts = (1e-6, 1e-4, 1e-2, 0.1, 0.3, 0.6, 0.9, 0.99, 0.9999)
        quad = integrate_01(f, rel_tol=rel_tol, abs_tol=1e-13, points=pts)
        integral, err = quad.value / apt, quad.abs_err / apt

    return OutageEstimate(value=1.0 - integral, method="quadrature", abs_err=err)


def outage_series(p):
    """Outage probability from the finite double series with the
    (dl.shape - 1)-th Richardson-extrapolated derivative of
    Gamma(c1 s) U(c1 s, l, c2) at s = 1.

    Raises SeriesPrecisionError when the alternating sums cancel more than
    six decimal digits or the special-function factors overflow.
    """
    eh = _require_sigmoid(p)
    s1, s2 = p.dl.shape, p.ul.shape
    if s1 > MAX_SERIES_DL_SHAPE:
        raise ValueError(
            f"series route supports dl.shape <= {MAX_SERIES_DL_SHAPE}; "
            "use outage_quadrature")
    d = derived_constants(p)
    ab = eh.a * eh.b
    eab, emab = math.exp(ab), math.exp(-ab)
    lam2c = p.ul.rate * d.c
    order = s1 - 1

    def bracket_derivative(l):
        def f(s):
            return gamma(d.c1 * s) * hyp_u(d.c1 * s, float(l), d.c2).value
        return richardson_derivative(f, DiffSpec(order=order, point=1.0))

    try:
        deriv = [bracket_derivative(l) for l in range(s2)]
        total = 0.0
        max_term = 0.0
        kfac = 1.0
        for k in range(s2):
            if k > 0:
                kfac *= k
            coef_k = (lam2c * eab) ** k / kfac
            for l in range(k + 1):
                term = (coef_k * math.comb(k, l) * (-1.0) ** (k - l)
                        * (1.0 + emab) ** l * deriv[l])
                total += term
                max_term = max(max_term, abs(term))
    except OverflowError as exc:
        raise SeriesPrecisionError(f"series factors overflowed: {exc}") from None

    if total != 0.0 and max_term / abs(total) > _PRECISION_GUARD_RATIO:
        raise SeriesPrecisionError(
            f"cancellation ratio {max_term / abs(total):.1e} exceeds guard")

    prefactor = d.c1 * (-1.0) ** order * math.exp(-lam2c) / gamma(s1)
    survival = prefactor * total
    value = 1.0 - survival
    if value < -_CLAMP_SPILL or value > 1.0 + _CLAMP_SPILL:
        # a probability outside [0,1] is a cancellation artifact of the
        # derivative/series machinery, not a modelling error
        raise SeriesPrecisionError(
            f"series produced out-of-range probability {value:.3e}")
    abs_err = max(1e-12, 5e-10 * abs(prefactor) * max_term)
    return OutageEstimate(value=value, method="series", abs_err=abs_err)


def outage_series_or_quadrature(p, rel_tol=1e-9):
    """Series route with automatic fallback to quadrature on precision loss
    or unsupported derivative order."""
    try:
        return outage_series(p)
    except (SeriesPrecisionError, ValueError):
        return outage_quadrature(p, rel_tol=rel_tol)


def outage_asymptotic(p):
    """High-power outage floor: the harvester saturates, so only the uplink
    matters."""
    d = derived_constants(p)
    value = reg_lower_gamma(p.ul.shape, p.ul.rate * d.c)
    return OutageEstimate(value=value, method="asymptotic", abs_err=1e-14)


def throughput(p, outage):
    """Average throughput rate*(1-tau)*(1-P_out) in bits/s/Hz."""
    if not 0.0 <= outage.value <= 1.0:
        raise ValueError("outage probability must be in [0, 1]")
    return p.rate * (1.0 - p.tau) * (1.0 - outage.value)


def throughput_asymptotic(p):
    """High-power throughput limit."""
    return throughput(p, outage_asymptotic(p))


def _ccdf_poly(n, x):
    # sum_{k<n} x^k/k! -- the e^-x-free polynomial part of Gamma(n,x)/(n-1)!
    term = 1.0
    total = 1.0
    for k in range(1, n):
        term *= x / k
        total += term
    return total


def optimal_rate_asymptotic(p, tol=1e-10):
    """Rate maximizing the high-power throughput, from its stationarity
    condition solved as a bracketed root; returns (rate, throughput)."""
    _require_sigmoid(p)
    n = p.ul.shape
    alpha = p.ul.rate * p.sigma2 * (1.0 - p.tau) / (p.theta * p.eh.m_sat * p.tau)
    ln2 = math.log(2.0)
    fac = math.factorial(n - 1)

    def g(r):
        # e^-x has been cancelled from both sides; x = alpha (2^r - 1)
        x = alpha * (2.0 ** r - 1.0)
        lhs = r * ln2 * 2.0 ** r * alpha * x ** (n - 1)
        return lhs - fac * _ccdf_poly(n, x)

    lo = 1e-6
    hi = 1.0
    for _ in range(80):
        if g(hi) > 0.0:
            break
        hi *= 2.0
    else:
        raise ValueError("could not bracket the optimal-rate condition")
    r_star = find_root_bracketed(g, lo, hi, tol=tol)
    th = _th_asymptotic(p, rate=r_star)
    return r_star, th


def optimal_tau_asymptotic(p, tol=1e-10):
    """Harvesting-time split maximizing the high-power throughput; returns
    (tau, throughput).  For ul.shape = 1 the condition is the quadratic
    tau^2 + beta tau - beta = 0."""
    _require_sigmoid(p)
    n = p.ul.shape
    beta = p.ul.rate * p.sigma2 * (2.0 ** p.rate - 1.0) / (p.theta * p.eh.m_sat)
    fac = math.factorial(n - 1)

    def g(t):
        # fixed point t = x^n e^-x / Gamma(n, x), x = beta (1-t)/t, with
        # e^-x cancelled against the finite series of Gamma(n, x)
        x = beta * (1.0 - t) / t
        return t - x ** n / (fac * _ccdf_poly(n, x))

    eps = 1e-9
    tau_star = find_root_bracketed(g, eps, 1.0 - eps, tol=tol)
    th = _th_asymptotic(p, tau=tau_star)
    return tau_star, th


def _th_asymptotic(p, rate=None, tau=None):
    r = p.rate if rate is None else rate
    t = p.tau if tau is None else tau
    c = ((2.0 ** r - 1.0) * p.sigma2 * (1.0 - t)
         / (p.theta * p.eh.m_sat * t))
    tail = 1.0 - reg_lower_gamma(p.ul.shape, p.ul.rate * c)
    return r * (1.0 - t) * tail


def crosscheck_rate_by_search(p, lo=1e-6, hi=None, tol=1e-6):
    """Golden-section maximizer of the high-power throughput over the rate;
    independent check of the fixed-point solver."""
    if hi is None:
        hi, _ = optimal_rate_asymptotic(p)
        hi *= 4.0
    return maximize_quasiconcave(lambda r: _th_asymptotic(p, rate=r), lo, hi, tol)


def crosscheck_tau_by_search(p, tol=1e-6):
    """Golden-section maximizer of the high-power throughput over tau."""
    eps = 1e-9
    return maximize_quasiconcave(lambda t: _th_asymptotic(p, tau=t),
                                 eps, 1.0 - eps, tol)
