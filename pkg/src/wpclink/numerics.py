"""Generic numerical engines: adaptive quadrature on (0,1), Richardson-extrapolated
differentiation, bracketed (Brent) root finding, and golden-section maximization.

All engines are pure; callables passed in must be safe to call re-entrantly.
"""

import heapq
import math
from dataclasses import dataclass

import numpy as np


class ConvergenceError(Exception):
    """Raised when an iterative engine exhausts its budget.

    For quadrature the best available estimate is attached as ``.result``.
    """

    def __init__(self, msg, result=None):
        super().__init__(msg)
        self.result = result


class BracketError(ValueError):
    """Root bracket endpoints do not straddle a sign change."""


@dataclass(frozen=True)
class QuadResult:
    value: float
    abs_err: float
    evaluations: int

    def __post_init__(self):
        if not math.isfinite(self.abs_err) or self.abs_err < 0:
            raise ValueError("abs_err must be finite and non-negative")
        if self.evaluations <= 0:
            raise ValueError("evaluations must be positive")


@dataclass(frozen=True)
class DiffSpec:
    """n-th derivative request at ``point`` with initial step ``h0`` and
    ``levels`` step halvings of Richardson extrapolation.

    The default step grows with the order: high-order central differences
    cancel catastrophically when all stencil points sit too close together.
    """

    order: int
    point: float
    h0: float = None
    levels: int = 6

    def __post_init__(self):
        if self.order < 0 or self.order > 12:
            raise ValueError("supported derivative orders are 0..12")
        if self.levels < 2:
            raise ValueError("need at least 2 extrapolation levels")
        if self.h0 is None:
            step = max(1e-2, 1.6e-2 * self.order)
            object.__setattr__(self, "h0", step * max(1.0, abs(self.point)))
        if self.h0 <= 0:
            raise ValueError("h0 must be positive")


# 15-point Gauss-Kronrod pair on [-1, 1] (standard QUADPACK abscissae/weights).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

_NODES = np.concatenate([-_XGK[:7], _XGK[7:8], _XGK[6::-1]])          # 15 ascending
_KW = np.concatenate([_WGK[:7], _WGK[7:8], _WGK[6::-1]])
_GW = np.zeros(15)
_GW[1:14:2] = np.concatenate([_WG[:3], _WG[3:4], _WG[2::-1]])


def _gk15(f, a, b):
    half = 0.5 * (b - a)
    x = 0.5 * (a + b) + half * _NODES
    fx = np.asarray(f(x), dtype=float)
    kron = half * float(np.dot(_KW, fx))
    gauss = half * float(np.dot(_GW, fx))
    return kron, abs(kron - gauss)


def integrate_01(f, rel_tol=1e-10, abs_tol=1e-12, max_subdivisions=10_000,
                 points=()):
    """Adaptive Gauss-Kronrod estimate of the integral of ``f`` over (0, 1).

    ``f`` must accept an ndarray of interior points and return an ndarray;
    endpoint limits may be improper as long as the integral exists (nodes
    never touch 0 or 1).  ``points`` seeds interior breakpoints so that
    narrow features cannot hide between the nodes of the initial rule.
    Raises ConvergenceError with the best estimate attached once the
    subdivision budget is spent.
    """
    edges = [0.0]
    for pt in sorted(set(points)):
        if edges[-1] < pt < 1.0:
            edges.append(float(pt))
    edges.append(1.0)
    # heap of (-err, a, b, value, err); worst interval is split first
    heap = []
    total = 0.0
    total_err = 0.0
    evals = 0
    for a, b in zip(edges, edges[1:]):
        kron, err = _gk15(f, a, b)
        if not math.isfinite(kron):
            raise ValueError("integrand produced a non-finite value")
        heap.append((-err, a, b, kron, err))
        total += kron
        total_err += err
        evals += 15
    heapq.heapify(heap)
    for _ in range(max_subdivisions):
        if total_err <= max(abs_tol, rel_tol * abs(total)):
            return QuadResult(total, total_err, evals)
        neg, a, b, val, errv = heapq.heappop(heap)
        m = 0.5 * (a + b)
        k1, e1 = _gk15(f, a, m)
        k2, e2 = _gk15(f, m, b)
        evals += 30
        if not (math.isfinite(k1) and math.isfinite(k2)):
            raise ValueError("integrand produced a non-finite value")
        total += (k1 + k2) - val
        total_err += (e1 + e2) - errv
        heapq.heappush(heap, (-e1, a, m, k1, e1))
        heapq.heappush(heap, (-e2, m, b, k2, e2))
    result = QuadResult(total, total_err, evals)
    if total_err <= max(abs_tol, rel_tol * abs(total)):
        return result
    raise ConvergenceError(
        f"quadrature error {total_err:.3e} above tolerance after "
        f"{max_subdivisions} subdivisions", result)


def _central_difference(f, x, h, order):
    # n+1 point central stencil; offsets are half-integers for odd orders
    n = order
    acc = 0.0
    for i in range(n + 1):
        coeff = (-1.0) ** i * math.comb(n, i)
        acc += coeff * f(x + (0.5 * n - i) * h)
    return acc / h ** n


def richardson_derivative(f, spec):
    """n-th derivative of ``f`` at ``spec.point`` from halved central
    differences, Richardson-extrapolated in h^2.

    Order 0 returns f(point) directly.  The returned value is the diagonal
    entry with the smallest successive change; an error is raised only if
    the extrapolants diverge from the very first level.
    """
    if spec.order == 0:
        return f(spec.point)
    rows = []
    best = None
    best_diff = math.inf
    prev_diag = None
    diffs = []
    for level in range(spec.levels):
        h = spec.h0 / 2.0 ** level
        row = [_central_difference(f, spec.point, h, spec.order)]
        for k in range(1, level + 1):
            fac = 4.0 ** k
            row.append((fac * row[k - 1] - rows[level - 1][k - 1]) / (fac - 1.0))
        rows.append(row)
        diag = row[-1]
        if prev_diag is not None:
            d = abs(diag - prev_diag)
            diffs.append(d)
            if d <= best_diff:
                best_diff = d
                best = diag
            if d <= 1e-9 * max(1.0, abs(diag)):
                return diag
        prev_diag = diag
    if best is None:
        return prev_diag
    if len(diffs) >= 3 and all(diffs[i + 1] > diffs[i] for i in range(len(diffs) - 1)):
        raise ConvergenceError("derivative extrapolants diverge monotonically")
    return best


def find_root_bracketed(g, lo, hi, tol=1e-10):
    """Brent-style safeguarded root of ``g`` on [lo, hi].

    Requires g(lo) and g(hi) of opposite (or zero) sign; the returned point
    always lies inside the original bracket.
    """
    a, b = float(lo), float(hi)
    fa, fb = g(a), g(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if fa * fb > 0.0:
        raise BracketError(f"g({lo:g}) and g({hi:g}) have the same sign")
    c, fc = a, fa
    d = e = b - a
    eps = 2.220446049250313e-16
    while True:
        if abs(fc) < abs(fb):
            a, b, c = b, c, b
            fa, fb, fc = fb, fc, fb
        tol1 = 2.0 * eps * abs(b) + 0.5 * tol
        m = 0.5 * (c - b)
        if abs(m) <= tol1 or fb == 0.0:
            return b
        if abs(e) < tol1 or abs(fa) <= abs(fb):
            d = e = m
        else:
            s = fb / fa
            if a == c:
                p = 2.0 * m * s
                q = 1.0 - s
            else:
                q = fa / fc
                r = fb / fc
                p = s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0))
                q = (q - 1.0) * (r - 1.0) * (s - 1.0)
            if p > 0.0:
                q = -q
            else:
                p = -p
            s, e = e, d
            if 2.0 * p < 3.0 * m * q - abs(tol1 * q) and p < abs(0.5 * s * q):
                d = p / q
            else:
                d = e = m
        a, fa = b, fb
        if abs(d) > tol1:
            b += d
        else:
            b += tol1 if m > 0.0 else -tol1
        fb = g(b)
        if (fb > 0.0) == (fc > 0.0):
            c, fc = a, fa
            d = e = b - a


_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def maximize_quasiconcave(f, lo, hi, tol=1e-6):
    """Golden-section search for the maximizer of a strictly quasi-concave
    ``f`` on [lo, hi]; the bracket shrinks by 1/phi per iteration."""
    a, b = float(lo), float(hi)
    x1 = b - _INVPHI * (b - a)
    x2 = a + _INVPHI * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol:
        if f1 < f2:
            a = x1
            x1, f1 = x2, f2
            x2 = a + _INVPHI * (b - a)
            f2 = f(x2)
        else:
            b = x2
            x2, f2 = x1, f1
            x1 = b - _INVPHI * (b - a)
            f1 = f(x1)
    x = 0.5 * (a + b)
    return x, f(x)
