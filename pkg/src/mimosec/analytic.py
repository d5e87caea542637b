"""
Secrecy outage probability G(R), its inverse, and interception probability.

G(R) = P(log2(1+lambda) - log2(1+eta) < R)
     = int_0^inf F_lambda((1+y) 2^R - 1) f_eta(y) dy

Two independent evaluations are provided:

* ``outage_probability_closed_form`` expands F_lambda = F_xi^K binomially
  and integrates term by term into W(x, N) values.  The alternating sum
  cancels badly as K grows, so it carries an a-posteriori error estimate
  and refuses to answer when that estimate exceeds ``CLOSED_FORM_TOL``.
* ``outage_probability_quadrature`` integrates the defining expression
  directly.  It is the reference for the closed form and the working path
  for large K.

``outage_probability`` dispatches between them.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass

from mpmath import MPContext
from scipy import integrate

from .config import SystemConfig
from .errors import NumericalInstabilityError, QuadratureError, SolverError
from .specfun import w_function, w_function_mp

EPS = sys.float_info.epsilon
LN2 = math.log(2.0)

# Above this K the closed form is not even attempted by the dispatcher.
CLOSED_FORM_MAX_K = 30
# Estimated absolute error allowed in the closed-form alternating sum.
CLOSED_FORM_TOL = 1e-8
QUAD_TOL = 1e-9
SOLVER_TOL = 1e-9
SOLVER_MAX_STEPS = 200
RATE_CAP = 64.0


@dataclass(frozen=True)
class ClosedFormTerms:
    """Per-n ingredients of the binomial expansion, n = 1..K."""

    a: tuple
    mu: tuple
    nu: tuple
    ups: tuple


@dataclass(frozen=True)
class OutageSolveResult:
    rate: float
    achieved_outage: float
    method: str
    iterations: int


def closed_form_terms(rate, cfg: SystemConfig) -> ClosedFormTerms:
    m, k, rho = cfg.mode, cfg.n_users, cfg.snr
    two_r = 2.0 ** rate
    a, mu, nu, ups = [], [], [], []
    for n in range(1, k + 1):
        a.append(math.exp(-n * (two_r - 1.0) / rho - n * (m - 1) * rate * LN2))
        mu.append((n * two_r + 1.0 / cfg.alpha2) / rho)
        nu.append(n * (m - 1) + m)
        ups.append((n + 1) * (m - 1))
    return ClosedFormTerms(tuple(a), tuple(mu), tuple(nu), tuple(ups))


def _clamp_probability(v, tol, what):
    if not -tol <= v <= 1.0 + tol:
        raise NumericalInstabilityError(f"{what} = {v!r} is outside [0, 1]", abs(v))
    return min(max(v, 0.0), 1.0)


def _closed_form_extended(rate, cfg, digits):
    """The same binomial sum with every term carried at ``digits`` digits."""
    ctx = MPContext()
    ctx.dps = digits
    m, k = cfg.mode, cfg.n_users
    rho = ctx.mpf(cfg.snr)
    a2 = ctx.mpf(cfg.alpha2)
    two_r = ctx.power(2, ctx.mpf(rate))

    def w(x, n):
        return w_function_mp(ctx, x, n)

    total = ctx.mpf(1)
    abs_total = ctx.mpf(1)
    for n in range(1, k + 1):
        a = ctx.exp(-n * (two_r - 1) / rho) / ctx.power(two_r, n * (m - 1))
        mu = (n * two_r + 1 / a2) / rho
        inner = a / (a2 * rho) * w(mu, (n + 1) * (m - 1))
        if m > 1:
            inner += (m - 1) * a * w(mu, n * (m - 1) + m)
        term = math.comb(k, n) * inner
        total += -term if n % 2 else term
        abs_total += term
    return float(total), float(abs_total) * 10.0 ** (2 - digits)


def outage_probability_closed_form(rate: float, cfg: SystemConfig, return_error=False, extended=True):
    """G(R) from the binomial expansion into W functions.

    The sum is first evaluated in double precision.  If its estimated
    absolute error exceeds ``CLOSED_FORM_TOL`` it is re-evaluated with enough
    extra digits to absorb the cancellation (``extended=True``) or a
    NumericalInstabilityError is raised (``extended=False``).
    """
    if rate < 0:
        raise ValueError(f"rate must be >= 0, got {rate}")
    m, k = cfg.mode, cfg.n_users
    c_eav = 1.0 / cfg.eav_snr
    t = closed_form_terms(rate, cfg)
    terms = [1.0]
    err = 0.0
    for i, n in enumerate(range(1, k + 1)):
        a, mu = t.a[i], t.mu[i]
        wb = w_function(mu, t.ups[i])
        inner = a * c_eav * wb.value
        inner_err = a * c_eav * wb.est_abs_error
        if m > 1:
            wa = w_function(mu, t.nu[i])
            inner += (m - 1) * a * wa.value
            inner_err += (m - 1) * a * wa.est_abs_error
        c = math.comb(k, n)
        term = c * inner
        terms.append(-term if n % 2 else term)
        err += c * inner_err + 4 * EPS * abs(term)
    g = math.fsum(terms)
    if err > CLOSED_FORM_TOL and extended:
        lost = math.log10(err / CLOSED_FORM_TOL)
        g, err = _closed_form_extended(rate, cfg, 20 + math.ceil(lost))
    if err > CLOSED_FORM_TOL:
        raise NumericalInstabilityError(
            f"closed-form outage unstable for K={k}, M={m}, rho={cfg.snr:g}, alpha2={cfg.alpha2:g}; use quadrature",
            err,
        )
    g = _clamp_probability(g, CLOSED_FORM_TOL, "closed-form outage")
    return (g, err) if return_error else g


def _characteristic_points(rate, cfg):
    """Abscissae (in y) where the integrand changes shape."""
    s = cfg.eav_snr
    two_r = 2.0 ** rate
    pts = [s * c for c in (0.1, 1.0, 5.0, 30.0)]
    for xc in (0.1, 1.0, math.log(cfg.n_users + 1.0), 10.0):
        x = cfg.snr * xc
        y = (1.0 + x) / two_r - 1.0
        if y > 0:
            pts.append(y)
    if cfg.mode > 1:
        pts += [0.5, 5.0]
    return sorted(p for p in set(pts) if p > 0 and math.isfinite(p))


def outage_probability_quadrature(rate: float, cfg: SystemConfig, tol: float = QUAD_TOL, return_error=False):
    """G(R) by adaptive quadrature of the defining single integral.

    The half line is mapped to [0, 1) with y = c t / (1 - t), c being the
    median of the characteristic scales; those scales also become quadrature
    breakpoints.
    """
    if rate < 0:
        raise ValueError(f"rate must be >= 0, got {rate}")
    m, k, rho = cfg.mode, cfg.n_users, cfg.snr
    s = cfg.eav_snr
    two_r = 2.0 ** rate
    pts_y = _characteristic_points(rate, cfg)
    c = pts_y[len(pts_y) // 2]

    def integrand(t):
        if t >= 1.0:
            return 0.0
        u = 1.0 - t
        y = c * t / u
        x = (1.0 + y) * two_r - 1.0
        q = math.exp(-x / rho - (m - 1) * math.log1p(x))
        if q >= 1.0:
            return 0.0
        f_lam = math.exp(k * math.log1p(-q))
        lp = math.log1p(y)
        f_eta = math.exp(-y / s - (m - 1) * lp) * ((m - 1) / (1.0 + y) + 1.0 / s)
        return f_lam * f_eta * c / (u * u)

    pts_t = sorted({p / (p + c) for p in pts_y})
    edges = [0.0] + [p for p in pts_t if 0.0 < p < 1.0] + [1.0]
    total = 0.0
    err = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        v, e = integrate.quad(integrand, lo, hi, epsabs=tol / (4 * len(edges)), epsrel=1e-12, limit=200)
        total += v
        err += e
    if err > tol:
        raise QuadratureError(f"outage quadrature did not converge for {cfg}", err)
    g = _clamp_probability(total, tol, "quadrature outage")
    return (g, err) if return_error else g


def outage_probability(rate: float, cfg: SystemConfig, method: str = "auto") -> float:
    """G(R).

    method: ``"auto"`` (closed form when K <= 30 and stable, else
    quadrature), ``"closed_form"`` or ``"quadrature"``.
    """
    if method == "closed_form":
        return outage_probability_closed_form(rate, cfg)
    if method == "quadrature":
        return outage_probability_quadrature(rate, cfg)
    if method != "auto":
        raise ValueError(f"unknown method {method!r}")
    if cfg.n_users <= CLOSED_FORM_MAX_K:
        try:
            return outage_probability_closed_form(rate, cfg)
        except NumericalInstabilityError:
            pass
    return outage_probability_quadrature(rate, cfg)


def interception_probability(cfg: SystemConfig, method: str = "auto") -> float:
    """P(C_sec < 0) = G(0)."""
    return outage_probability(0.0, cfg, method)


def secrecy_outage_capacity(cfg: SystemConfig, method: str = "auto", tol: float = SOLVER_TOL) -> OutageSolveResult:
    """Per-beam secrecy outage capacity: the R >= 0 with G(R) = eps.

    G is increasing in R, so the root is bracketed by doubling from R = 1
    (capped at 64 b/s/Hz) and refined by bisection.  If G(0) >= eps no
    positive rate meets the target and R = 0 is returned.
    """
    eps = cfg.eps

    def g(r):
        return outage_probability(r, cfg, method)

    g0 = g(0.0)
    if g0 >= eps:
        return OutageSolveResult(0.0, g0, method, 0)
    lo, hi = 0.0, 1.0
    g_hi = g(hi)
    while g_hi <= eps:
        lo = hi
        if hi >= RATE_CAP:
            raise SolverError(f"G({hi}) = {g_hi} <= eps = {eps}: no root below {RATE_CAP} b/s/Hz")
        hi = min(2.0 * hi, RATE_CAP)
        g_hi = g(hi)
    for it in range(1, SOLVER_MAX_STEPS + 1):
        mid = 0.5 * (lo + hi)
        g_mid = g(mid)
        if abs(g_mid - eps) <= tol or hi - lo <= 4 * EPS * hi:
            return OutageSolveResult(mid, g_mid, method, it)
        if g_mid < eps:
            lo = mid
        else:
            hi = mid
    raise SolverError(f"bisection did not reach |G(R) - eps| <= {tol} in {SOLVER_MAX_STEPS} steps")


def sum_secrecy_outage_capacity(cfg: SystemConfig, method: str = "auto") -> float:
    """M * G^{-1}(eps) in b/s/Hz."""
    return cfg.mode * secrecy_outage_capacity(cfg, method).rate
