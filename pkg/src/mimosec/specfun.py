"""
Exponential integral and the W(x, N) integral family.

W(x, N) = int_0^inf exp(-x*y) / (1 + y)**N dy  = exp(x) * E_N(x)

Every closed-form outage expression in this package is a binomial sum of
W values, so W has to be accurate to a few ulps across a very wide range
of arguments (x from 1e-3 up to ~1e6, N up to a few hundred).

Evaluation paths
----------------
closed_form         1/x (N=0), -exp(x)*Ei(-x) (N=1), or the finite Gamma-sum
                    for N >= 2 when its cancellation is harmless.
recurrence          upward recurrence W(x,N) = (1 - x*W(x,N-1)) / (N-1),
                    stable for x <= 1.
continued_fraction  Lentz evaluation of exp(x)*E_N(x), stable for x > 1.
quadrature          adaptive quadrature of the defining integral; independent
                    oracle and last-resort fallback.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass

from scipy import integrate, special

from .errors import QuadratureError

EPS = sys.float_info.epsilon

# A Gamma-sum whose estimated relative error exceeds this is not trusted.
# Downstream binomial sums amplify W errors by up to 2**K, so this sits far
# below the 1e-8 an isolated W evaluation would need.
CLOSED_FORM_MAX_REL_ERR = 1e-13

_CF_MAXIT = 10_000
_FPMIN = 1e-300

# Largest x for which exp(x) is finite.
EI_OVERFLOW_X = 709.782712893384


@dataclass(frozen=True)
class WEval:
    value: float
    method: str
    est_abs_error: float

    def __float__(self):
        return self.value


def exp_integral_ei(x: float) -> float:
    """Exponential integral Ei(x) = PV int_{-inf}^{x} e^t / t dt.

    Raises ValueError at x = 0 and OverflowError once e^x overflows.
    """
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"Ei requires a finite argument, got {x}")
    if x == 0.0:
        raise ValueError("Ei(x) has a logarithmic singularity at x = 0")
    if x > EI_OVERFLOW_X:
        raise OverflowError(f"Ei({x}) overflows double precision")
    return float(special.expi(x))


def _w1(x):
    # -exp(x)*Ei(-x) == exp(x)*E1(x); exp1 keeps accuracy for small x where
    # Ei(-x) ~ log(x), the continued fraction avoids exp(x) overflow.
    if x <= 1.0:
        return math.exp(x) * float(special.exp1(x))
    v, _ = _w_continued_fraction(x, 1)
    return v


def _gamma_sum_terms(x, n):
    """Terms of the finite Gamma-sum representation, n >= 2.

    Built by ratios, u_{k-1} = u_k * (-x)/(k-1), to avoid lgamma round-off.
    """
    u = 1.0 / (n - 1)
    terms = [u]
    for k in range(n - 1, 1, -1):
        u *= -x / (k - 1)
        terms.append(u)
    # -(-x)^(n-1)/Gamma(n) * exp(x) * Ei(-x) = (-x)^(n-1)/Gamma(n) * W(x,1)
    terms.append(u * -x * _w1(x))
    return terms


def w_closed_form(x: float, n: int) -> WEval:
    """The Gamma-sum formula, evaluated as written.

    ``est_abs_error`` bounds the floating-point cancellation error; for
    large x*n it can dwarf the value itself.
    """
    x = float(x)
    if x <= 0:
        raise ValueError(f"W(x, N) requires x > 0, got {x}")
    if n < 0:
        raise ValueError(f"W(x, N) requires N >= 0, got {n}")
    if n == 0:
        return WEval(1.0 / x, "closed_form", EPS / x)
    if n == 1:
        v = _w1(x)
        return WEval(v, "closed_form", 4 * EPS * v)
    terms = _gamma_sum_terms(x, n)
    if not all(math.isfinite(t) for t in terms):
        return WEval(math.nan, "closed_form", math.inf)
    v = math.fsum(terms)
    err = 2 * EPS * math.fsum(abs(t) * (i + 2) for i, t in enumerate(terms))
    return WEval(v, "closed_form", err)


def _w_recurrence(x, n):
    w = _w1(x)
    for k in range(2, n + 1):
        w = (1.0 - x * w) / (k - 1)
    return w


def _w_continued_fraction(x, n):
    # Modified Lentz for exp(x)*E_n(x) = 1/(x+n- 1*n/(x+n+2- 2(n+1)/(x+n+4- ...)))
    b = x + n
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, _CF_MAXIT + 1):
        an = -i * (n - 1 + i)
        b += 2.0
        d = an * d + b
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < EPS:
            return h, i
    return None, _CF_MAXIT


def w_function(x: float, n: int) -> WEval:
    """W(x, N) = int_0^inf exp(-x*y) (1+y)^(-N) dy for x > 0, N >= 0.

    Picks the cheapest path that is numerically safe and records it in
    ``WEval.method``.
    """
    x = float(x)
    n = int(n)
    if not x > 0 or not math.isfinite(x):
        raise ValueError(f"W(x, N) requires finite x > 0, got {x}")
    if n < 0:
        raise ValueError(f"W(x, N) requires N >= 0, got {n}")
    if n <= 1:
        return w_closed_form(x, n)

    cf = w_closed_form(x, n)
    if cf.value > 0 and cf.est_abs_error <= CLOSED_FORM_MAX_REL_ERR * cf.value:
        return cf
    if x <= 1.0:
        v = _w_recurrence(x, n)
        return WEval(v, "recurrence", 8 * n * EPS * v)
    v, its = _w_continued_fraction(x, n)
    if v is not None:
        return WEval(v, "continued_fraction", 4 * EPS * v * math.sqrt(its))
    return w_function_quadrature(x, n)


def w_function_mp(ctx, x, n):
    """W(x, N) at the working precision of the mpmath context ``ctx``.

    Same stable paths as the double version: upward recurrence for x <= 1,
    continued fraction otherwise.
    """
    x = ctx.mpf(x)
    if n == 0:
        return 1 / x
    if x <= 1:
        w = ctx.exp(x) * ctx.e1(x)
        for k in range(2, n + 1):
            w = (1 - x * w) / (k - 1)
        return w
    tiny = ctx.mpf(10) ** (-2 * ctx.dps - 10)
    b = x + n
    c = 1 / tiny
    d = 1 / b
    h = d
    for i in range(1, _CF_MAXIT + 1):
        an = -i * (n - 1 + i)
        b += 2
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1 / d
        delta = c * d
        h *= delta
        if abs(delta - 1) < ctx.eps:
            return h
    raise ArithmeticError(f"continued fraction for W({x}, {n}) did not converge")


def w_function_quadrature(x: float, n: int, tol: float = 1e-10) -> WEval:
    """W(x, N) by adaptive quadrature on [0, 1) after y = s*t/(1-t).

    The scale s = 1/(x+N) puts the bulk of the integrand mass near t=1/2.
    Raises QuadratureError if the estimated error exceeds ``tol``.
    """
    x = float(x)
    if not x > 0:
        raise ValueError(f"W(x, N) requires x > 0, got {x}")
    if n < 0:
        raise ValueError(f"W(x, N) requires N >= 0, got {n}")
    s = 1.0 / (x + n)

    def integrand(t):
        if t >= 1.0:
            return 0.0
        u = 1.0 - t
        y = s * t / u
        return math.exp(-x * y - n * math.log1p(y)) * s / (u * u)

    val, err = integrate.quad(integrand, 0.0, 1.0, epsabs=tol * 1e-2, epsrel=1e-13, limit=400)
    if err > tol:
        raise QuadratureError(f"W({x}, {n}) quadrature did not converge", err)
    return WEval(val, "quadrature", err)
