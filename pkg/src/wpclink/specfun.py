"""Special functions for the outage analysis: Gamma, incomplete Gamma with
integer shape, confluent hypergeometric U, and Whittaker W.

U is evaluated from its integral representation
    U(a, g, z) = 1/Gamma(a) * int_0^inf exp(-z t) t^(a-1) (1+t)^(g-a-1) dt
mapped onto (0, 1); integer-shape incomplete Gammas use the exact finite
series, never quadrature.
"""

import math
from dataclasses import dataclass

import numpy as np

from .numerics import ConvergenceError, integrate_01

_U_TOL = 1e-10  # guaranteed absolute-or-relative accuracy of hyp_u


@dataclass(frozen=True)
class EvalResult:
    value: float
    abs_err: float

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError("value must be finite")
        if not math.isfinite(self.abs_err) or self.abs_err < 0:
            raise ValueError("abs_err must be finite and non-negative")


def gamma(x):
    """Gamma(x) for x > 0; exact factorial at integer arguments, log-space
    Lanczos evaluation elsewhere."""
    if x <= 0:
        raise ValueError("gamma requires x > 0")
    if x == int(x) and x <= 171:
        return float(math.factorial(int(x) - 1))
    return math.exp(math.lgamma(x))


def gamma_upper_int(m, x):
    """Upper incomplete Gamma(m, x) for integer m >= 1, x >= 0, via the
    finite series (m-1)! e^-x sum_{k<m} x^k/k!."""
    if m < 1 or m != int(m):
        raise ValueError("shape m must be an integer >= 1")
    if x < 0:
        raise ValueError("x must be non-negative")
    m = int(m)
    if x == 0.0:
        return float(math.factorial(m - 1))
    if x > 700.0:
        # series times e^-x in log space; underflows cleanly to 0
        logs = [k * math.log(x) - math.lgamma(k + 1) for k in range(m)]
        top = max(logs)
        s = math.fsum(math.exp(v - top) for v in logs)
        out = math.lgamma(m) - x + top + math.log(s)
        return math.exp(out) if out > -745.0 else 0.0
    term = 1.0
    terms = [term]
    for k in range(1, m):
        term *= x / k
        terms.append(term)
    return math.factorial(m - 1) * math.exp(-x) * math.fsum(terms)


def reg_lower_gamma(m, x):
    """Regularized lower incomplete Gamma P(m, x) = gamma(m,x)/Gamma(m) for
    integer m >= 1; monotone from 0 at x=0 to 1."""
    if m < 1 or m != int(m):
        raise ValueError("shape m must be an integer >= 1")
    if x < 0:
        raise ValueError("x must be non-negative")
    m = int(m)
    if x == 0.0:
        return 0.0
    if x >= m + 1.0:
        return 1.0 - gamma_upper_int(m, x) / math.factorial(m - 1)
    # ascending series x^m e^-x sum_k x^k / (m (m+1) ... (m+k)); no cancellation
    term = 1.0 / m
    total = term
    k = 0
    while True:
        k += 1
        term *= x / (m + k)
        total += term
        if term < 1e-18 * total or k > 10_000:
            break
    log_val = m * math.log(x) - x + math.log(total) - math.lgamma(m)
    return math.exp(log_val) if log_val > -745.0 else 0.0


_U_LO = 5e-324
_U_HI = float(np.nextafter(1.0, 0.0))  # keeps t = u/(1-u) finite


def _u_integrand_direct(alpha, gamma_param, z):
    # t = u/(1-u); integrand exp((a-1) ln u - z t + g ln(1+t)), a >= 1
    def f(u):
        u = np.clip(np.asarray(u, dtype=float), _U_LO, _U_HI)
        t = u / (1.0 - u)
        expo = -z * t + gamma_param * np.log1p(t)
        if alpha != 1.0:
            expo = expo + (alpha - 1.0) * np.log(u)
        return np.exp(np.maximum(expo, -745.0)) * (expo > -745.0)
    return f


def _u_integrand_substituted(alpha, gamma_param, z):
    # u = w^(1/alpha) removes the u^(alpha-1) endpoint singularity for alpha < 1
    def f(w):
        w = np.clip(np.asarray(w, dtype=float), _U_LO, _U_HI)
        u = np.minimum(np.exp(np.log(w) / alpha), _U_HI)
        t = u / (1.0 - u)
        expo = -z * t + gamma_param * np.log1p(t)
        return np.exp(np.maximum(expo, -745.0)) * (expo > -745.0)
    return f


def hyp_u(alpha, gamma_param, z):
    """Confluent hypergeometric U(alpha, gamma_param, z) for alpha > 0,
    z > 0, by adaptive quadrature of the defining integral.

    Returns an EvalResult carrying the quadrature error bound; raises
    ConvergenceError if the guaranteed tolerance cannot be met.
    """
    if alpha <= 0:
        raise ValueError("hyp_u requires alpha > 0")
    if z <= 0:
        raise ValueError("hyp_u requires z > 0")
    if alpha >= 1.0:
        f = _u_integrand_direct(alpha, gamma_param, z)
        scale = 1.0 / gamma(alpha)
        t_mode = alpha / z
        pts = [0.01, 0.1, 0.5, 0.9, 0.99] + [
            t / (1.0 + t) for t in (0.2 * t_mode, t_mode, 5.0 * t_mode)]
    else:
        f = _u_integrand_substituted(alpha, gamma_param, z)
        scale = 1.0 / gamma(alpha + 1.0)
        # in w = u^alpha the integrand transitions within ~alpha of w = 1
        pts = [math.exp(-alpha * k) for k in (0.25, 1.0, 4.0, 13.0, 40.0)]
    try:
        quad = integrate_01(f, rel_tol=1e-13, abs_tol=1e-15, points=pts)
    except ConvergenceError as exc:
        quad = exc.result
        if quad is None or quad.abs_err * scale > max(_U_TOL, _U_TOL * abs(quad.value) * scale):
            raise ConvergenceError(
                f"U({alpha:g},{gamma_param:g},{z:g}) did not reach tolerance") from exc
    return EvalResult(quad.value * scale, quad.abs_err * scale)


def whittaker_w(alpha, beta, z):
    """Whittaker W_{alpha,beta}(z) = z^(beta+1/2) e^(-z/2)
    U(beta - alpha + 1/2, 2 beta + 1, z) for z > 0."""
    if z <= 0:
        raise ValueError("whittaker_w requires z > 0")
    a = beta - alpha + 0.5
    if a <= 0:
        raise ValueError("beta - alpha + 1/2 must be positive")
    u = hyp_u(a, 2.0 * beta + 1.0, z)
    pref = z ** (beta + 0.5) * math.exp(-0.5 * z)
    return EvalResult(pref * u.value, pref * u.abs_err)
