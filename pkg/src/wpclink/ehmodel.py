"""RF-to-DC harvesting transfer functions: the parametric sigmoidal model
with sensitivity and saturation, linear and piecewise-linear baselines, a
tabulated model interpolating measured circuit data, and least-squares
parameter fitting for the sigmoidal model.

Internal unit convention: all powers in watts (unit conversions live in the
scenario module).
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import minimize


class FitError(Exception):
    """Curve fit stalled without reaching an acceptable residual."""


@dataclass(frozen=True)
class NonLinearSigmoid:
    """Saturating sigmoidal harvester: output M (1 - e^(-a p)) / (1 + e^(-a (p - b))).

    m_sat: maximum harvestable power (W); a: curvature (1/W); b: turn-on
    midpoint (W).  Output is exactly 0 at zero input and tends to m_sat.
    """

    m_sat: float
    a: float
    b: float

    def __post_init__(self):
        if not (self.m_sat > 0 and self.a > 0 and self.b > 0):
            raise ValueError("m_sat, a, b must all be positive")


@dataclass(frozen=True)
class Linear:
    """Conversion-efficiency baseline without saturation or sensitivity."""

    eta: float

    def __post_init__(self):
        if not 0 < self.eta <= 1:
            raise ValueError("eta must be in (0, 1]")


@dataclass(frozen=True)
class PiecewiseLinear:
    """Linear conversion clipped at the saturation power m_sat."""

    eta: float
    m_sat: float

    def __post_init__(self):
        if not 0 < self.eta <= 1:
            raise ValueError("eta must be in (0, 1]")
        if not self.m_sat > 0:
            raise ValueError("m_sat must be positive")


@dataclass(frozen=True)
class Tabulated:
    """Natural cubic spline through measured (p_in, p_out) pairs in watts.

    Outside the sample range the value is clamped into [0, last p_out];
    inside it is clamped to be non-negative.
    """

    p_in: tuple
    p_out: tuple
    _spline: object = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        p_in = tuple(float(v) for v in self.p_in)
        p_out = tuple(float(v) for v in self.p_out)
        if len(p_in) < 4 or len(p_in) != len(p_out):
            raise ValueError("need at least 4 (p_in, p_out) pairs")
        if any(b <= a for a, b in zip(p_in, p_in[1:])):
            raise ValueError("p_in must be strictly increasing")
        if any(v < 0 for v in p_out):
            raise ValueError("p_out must be non-negative")
        object.__setattr__(self, "p_in", p_in)
        object.__setattr__(self, "p_out", p_out)
        object.__setattr__(self, "_spline",
                           CubicSpline(p_in, p_out, bc_type="natural"))


@dataclass(frozen=True)
class FitReport:
    params: NonLinearSigmoid
    rmse: float
    iterations: int
    converged: bool

    def __post_init__(self):
        if self.rmse < 0 or (self.converged and not math.isfinite(self.rmse)):
            raise ValueError("rmse must be non-negative (finite if converged)")


def _sigmoid_out(m_sat, a, b, p_r):
    # log1p/expm1 keep the p_r -> 0 limit exact and the denominator stable
    num = -np.expm1(-a * np.asarray(p_r, dtype=float))
    return m_sat * num * np.exp(-np.logaddexp(0.0, -a * (np.asarray(p_r) - b)))


def harvested_power(model, p_r):
    """Harvested DC power (W) for received RF power p_r >= 0.

    Accepts scalars or ndarrays; the model decides the transfer law.
    """
    if np.any(np.asarray(p_r) < 0):
        raise ValueError("p_r must be non-negative")
    if isinstance(model, NonLinearSigmoid):
        out = _sigmoid_out(model.m_sat, model.a, model.b, p_r)
    elif isinstance(model, Linear):
        out = model.eta * np.asarray(p_r, dtype=float)
    elif isinstance(model, PiecewiseLinear):
        out = np.minimum(model.eta * np.asarray(p_r, dtype=float), model.m_sat)
    elif isinstance(model, Tabulated):
        p = np.asarray(p_r, dtype=float)
        out = np.maximum(model._spline(p), 0.0)
        lo, hi = model.p_in[0], model.p_in[-1]
        out = np.where((p < lo) | (p > hi),
                       np.clip(out, 0.0, model.p_out[-1]), out)
    else:
        raise TypeError(f"unknown harvesting model {type(model).__name__}")
    if np.ndim(p_r) == 0:
        return float(out)
    return out


def fit_sigmoid(data):
    """Least-squares fit of the sigmoidal model to (p_in, p_out) pairs.

    Runs a Nelder-Mead simplex on (ln m_sat, ln a, ln b); derivative-free
    because of the strong a-b coupling.  Stops when the simplex diameter
    falls below 1e-8 in log space or after 2000 iterations.
    """
    pairs = [(float(p), float(q)) for p, q in data]
    if len(pairs) < 4:
        raise ValueError("need at least 4 data points")
    p_in = np.array([p for p, _ in pairs])
    p_out = np.array([q for _, q in pairs])
    if np.any(np.diff(p_in) <= 0):
        raise ValueError("p_in must be strictly increasing")
    if np.any(p_out < 0):
        raise ValueError("p_out must be non-negative")

    m0 = float(p_out.max())
    if m0 <= 0:
        raise ValueError("all-zero p_out cannot be fitted")
    above = np.nonzero(p_out >= 0.5 * m0)[0]
    b0 = float(p_in[above[0]]) if p_in[above[0]] > 0 else float(p_in[p_in > 0][0])
    a0 = 4.0 / b0

    def ssr(theta):
        model_out = _sigmoid_out(math.exp(theta[0]), math.exp(theta[1]),
                                 math.exp(theta[2]), p_in)
        return float(np.sum((model_out - p_out) ** 2))

    res = minimize(ssr, np.log([m0, a0, b0]), method="Nelder-Mead",
                   options={"xatol": 1e-8, "fatol": np.inf,
                            "maxiter": 2000, "maxfev": 10_000})
    m_sat, a, b = (math.exp(v) for v in res.x)
    rmse = math.sqrt(res.fun / len(pairs))
    converged = bool(res.success)
    if not math.isfinite(rmse) or (not converged and rmse > 0.1 * m0):
        raise FitError(f"fit stalled at rmse={rmse:.3e} after {res.nit} iterations")
    return FitReport(params=NonLinearSigmoid(m_sat, a, b), rmse=rmse,
                     iterations=int(res.nit), converged=converged)


def load_tabulated(path):
    """Read a two-column delimited text file (p_in_uW, p_out_uW) into a
    Tabulated model in watts.  '#' starts a comment; a non-numeric first
    line is treated as a header."""
    p_in, p_out = [], []
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.replace(",", " ").split()
            try:
                a, b = float(parts[0]), float(parts[1])
            except (ValueError, IndexError):
                if not p_in:  # header line
                    continue
                raise ValueError(f"malformed data line: {raw.rstrip()}")
            p_in.append(a * 1e-6)
            p_out.append(b * 1e-6)
    return Tabulated(tuple(p_in), tuple(p_out))
