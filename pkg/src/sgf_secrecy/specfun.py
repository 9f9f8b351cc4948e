"""Special functions and quadrature primitives for the outage expressions.

Covers the nonpositive-integer-order upper incomplete gamma function (the
order 1-N shows up with N eavesdropper antennas), the exponential integral
E1, integer-order incomplete gammas, the Gauss-Chebyshev rule used by the
finite-interval terms, a contract wrapper around adaptive quadrature, and
the slowly-decaying auxiliary integral over 1/(ax+b) weighted by a
Gaussian-exponential factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad

_EULER_GAMMA = 0.5772156649015328606
_TINY = 1e-300


class IntegrationError(RuntimeError):
    """Adaptive quadrature did not meet its tolerance.

    Carries the best available estimate and its reported error bound.
    """

    def __init__(self, message: str, estimate: float, error: float):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


# ---------------------------------------------------------------------------
# incomplete gamma family
# ---------------------------------------------------------------------------

def exp1(x: float) -> float:
    """Exponential integral E1(x) = Gamma(0, x) for x > 0.

    Power series below 1, Lentz continued fraction above (both
    converge to full double precision on their half of the split).
    """
    if x <= 0:
        raise ValueError("exp1 requires x > 0")
    if x < 1.0:
        total = -_EULER_GAMMA - math.log(x)
        term = 1.0
        for k in range(1, 60):
            term *= -x / k
            piece = -term / k
            total += piece
            if abs(piece) < 1e-18 * max(abs(total), 1e-30):
                break
        return total
    return math.exp(-x) * _gamma_cf_scaled(0.0, x)


def _gamma_cf_scaled(a: float, x: float) -> float:
    """exp(x) * Gamma(a, x) by modified Lentz, reliable for x >= 1, a <= 1."""
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, 10000):
        an = -i * (i - a)
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
        if abs(delta - 1.0) < 1e-16:
            break
    return x ** a * h


def upper_incomplete_gamma(a: float, x: float, scaled: bool = False) -> float:
    """Gamma(a, x) for a = 1 - n with integer n >= 0 and x > 0.

    With ``scaled`` the value exp(x) * Gamma(a, x) is returned, which stays
    representable when x is large.  For x below 1 the value is built by the
    downward recurrence Gamma(a, x) = (Gamma(a+1, x) - x^a e^{-x}) / a
    anchored at Gamma(1, x) = e^{-x} and Gamma(0, x) = E1(x); above 1 the
    recurrence sheds digits (the subtraction cancels by ~x/|a| per step), so
    the continued fraction is evaluated directly at order a.
    """
    if x <= 0:
        raise ValueError("upper_incomplete_gamma requires x > 0")
    n = round(1.0 - a)
    if n < 0 or abs((1.0 - a) - n) > 1e-9:
        raise ValueError("order must be a = 1 - n for integer n >= 0")
    a = 1.0 - n
    if x >= 1.0:
        val = 1.0 if n == 0 else _gamma_cf_scaled(a, x)
        return val if scaled else math.exp(-x) * val
    if n == 0:
        g = math.exp(-x)
    else:
        g = exp1(x)
        emx = math.exp(-x)
        for k in range(1, n):
            g = (x ** (-k) * emx - g) / k
    return g * math.exp(x) if scaled else g


def gamma_upper_int(n: int, x: float, scaled: bool = False) -> float:
    """Gamma(n, x) for integer n >= 1: (n-1)! e^{-x} sum_{k<n} x^k / k!."""
    if n < 1:
        raise ValueError("gamma_upper_int requires n >= 1")
    if x < 0:
        raise ValueError("gamma_upper_int requires x >= 0")
    term = 1.0
    total = 1.0
    for k in range(1, n):
        term *= x / k
        total += term
    val = math.factorial(n - 1) * total
    return val if scaled else math.exp(-x) * val


def gamma_lower_int(n: int, x: float) -> float:
    """Lower incomplete gamma(n, x) for integer n >= 1, stable near 0."""
    if n < 1:
        raise ValueError("gamma_lower_int requires n >= 1")
    if x < 0:
        raise ValueError("gamma_lower_int requires x >= 0")
    if x == 0.0:
        return 0.0
    if x >= n + 1.0:
        return math.factorial(n - 1) - gamma_upper_int(n, x)
    # ascending series, all terms positive
    term = 1.0 / n
    total = term
    k = 1
    while True:
        term *= x / (n + k)
        total += term
        if term < 1e-17 * total or k > 500:
            break
        k += 1
    return x ** n * math.exp(-x) * total


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadratureRule:
    """Nodes/weights approximating an integral over (0, upper)."""

    nodes: np.ndarray
    weights: np.ndarray
    count: int
    upper: float

    def apply(self, f: Callable[[np.ndarray], np.ndarray]) -> float:
        return float(np.sum(self.weights * f(self.nodes)))


def gauss_chebyshev_rule(count: int, upper: float) -> QuadratureRule:
    """First-kind Gauss-Chebyshev rule mapped onto (0, upper).

    Nodes are (upper/2)(cos((2r-1)pi/(2 count)) + 1) and the weights fold in
    the sqrt(1 - l^2) de-weighting, so ``apply(f)`` directly approximates
    the plain integral of f over (0, upper).
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if upper <= 0:
        raise ValueError("upper must be positive")
    r = np.arange(1, count + 1, dtype=np.float64)
    ell = np.cos((2.0 * r - 1.0) * np.pi / (2.0 * count))
    nodes = 0.5 * upper * (ell + 1.0)
    weights = (np.pi * upper / (2.0 * count)) * np.sqrt(1.0 - ell * ell)
    return QuadratureRule(nodes=nodes, weights=weights, count=count, upper=upper)


def adaptive_integrate(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    abs_tol: float = 1e-10,
    rel_tol: float = 1e-10,
) -> tuple[float, float]:
    """Adaptive quadrature of f over [lo, hi] with an error estimate.

    Backed by QUADPACK; an infinite upper limit is folded onto a finite
    interval through the rational change of variable x = lo + t/(1-t),
    t in [0, 1).  Returns (value, error_bound); raises IntegrationError
    (carrying the best estimate) if the bound misses both tolerances.
    """
    if abs_tol <= 0 or rel_tol <= 0:
        raise ValueError("tolerances must be positive")
    with np.errstate(all="ignore"):
        val, err, info, *msg = quad(
            f, lo, hi, epsabs=abs_tol, epsrel=rel_tol, limit=400, full_output=True
        )
    ok = err <= max(abs_tol, rel_tol * abs(val))
    if msg and not ok:
        raise IntegrationError(f"quadrature failed: {msg[0]}", val, err)
    if not ok:
        raise IntegrationError(
            f"quadrature error {err:.3e} above tolerance for value {val:.6e}",
            val,
            err,
        )
    return val, err


def omega5(
    a: float,
    b: float,
    c: float,
    f: float,
    rel_tol: float = 1e-9,
) -> float:
    """Integral of exp(-(c x^2 + f x)) / (a x + b) over x in (0, inf).

    Evaluated by adaptive quadrature of the defining integral after
    rescaling x by the dominant decay length (the bivariate special-function
    representation of the same quantity buys nothing numerically).
    """
    if b <= 0 or f <= 0:
        raise ValueError("omega5 requires b > 0 and f > 0")
    if a < 0 or c < 0:
        raise ValueError("omega5 requires a >= 0 and c >= 0")
    s = max(f, math.sqrt(c))

    def g(t: float) -> float:
        x = t / s
        return math.exp(-(c * x * x + f * x)) / (a * x + b) / s

    val, _ = adaptive_integrate(g, 0.0, np.inf, abs_tol=1e-300, rel_tol=rel_tol)
    return val


def omega5_weighted(
    n: int,
    a: float,
    b: float,
    c: float,
    f: float,
    rel_tol: float = 1e-9,
) -> float:
    """Integral of x^{n-1} exp(-(c x^2 + f x)) / (a x + b) over (0, inf).

    Generalizes :func:`omega5` with the power weight that the N-antenna
    eavesdropper density contributes; n = 1 recovers omega5 exactly.
    """
    if n < 1:
        raise ValueError("omega5_weighted requires n >= 1")
    if b <= 0 or f <= 0:
        raise ValueError("omega5_weighted requires b > 0 and f > 0")
    if a < 0 or c < 0:
        raise ValueError("omega5_weighted requires a >= 0 and c >= 0")
    if a == 0.0 and c == 0.0:
        return math.factorial(n - 1) / (b * f ** n)
    s = max(f, math.sqrt(c))

    def g(t: float) -> float:
        x = t / s
        return x ** (n - 1) * math.exp(-(c * x * x + f * x)) / (a * x + b) / s

    val, _ = adaptive_integrate(g, 0.0, np.inf, abs_tol=1e-300, rel_tol=rel_tol)
    return val
