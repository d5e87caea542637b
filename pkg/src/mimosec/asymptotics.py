"""
Outage and interception laws in the three extreme regimes, plus the mode
rules they imply.

noise-limited         interference negligible next to noise (low SNR)
interference-limited  noise negligible next to interference (high SNR, M >= 2)
large-K               scheduled SINR concentrates at rho * ln(K * N_t)

Noise-limited forms
-------------------
Integrating the noise-limited laws F(x) = (1 - e^{-x/rho})^K and
f(y) = e^{-y/s}/s (s = alpha^2 rho) term by term gives

    G(R) = sum_{n=0}^{K} C(K,n) (-1)^n e^{-n(2^R-1)/rho} / (1 + n alpha^2 2^R)
         = int_0^1 (1 - z t^b)^K dt,     z = e^{-(2^R-1)/rho}, b = alpha^2 2^R

and at R = 0 the interception probability (1/alpha^2) B(1/alpha^2, K+1).
These are the defaults (``form="derived"``).  The commonly quoted
variants with exponent -n(2^R + 1/alpha^2)/rho and denominator n 2^R + 1
are available as ``form="printed"``; they do not reduce to the general
outage probability as rho -> 0.
"""

from __future__ import annotations

import math

from scipy import integrate

from .config import Regime, SystemConfig
from .errors import NumericalInstabilityError

CLOSED_FORM_MAX_K = 30
_FORMS = ("derived", "printed")


def _check_form(form):
    if form not in _FORMS:
        raise ValueError(f"form must be one of {_FORMS}, got {form!r}")


# ---------------------------------------------------------------------------
# noise-limited
# ---------------------------------------------------------------------------

def _alternating_sum(k, term):
    terms = [1.0]
    for n in range(1, k + 1):
        t = math.comb(k, n) * term(n)
        terms.append(-t if n % 2 else t)
    v = math.fsum(terms)
    err = 4e-16 * math.fsum(abs(t) for t in terms)
    return v, err


def outage_noise_limited(rate: float, cfg: SystemConfig, form: str = "derived", method: str = "auto") -> float:
    """Outage probability in the noise-limited regime.  Independent of M.

    ``method="auto"`` uses the binomial sum for K <= 30 and quadrature of
    the equivalent integral otherwise; ``"closed_form"`` raises
    NumericalInstabilityError instead of falling back.
    """
    _check_form(form)
    if rate < 0:
        raise ValueError(f"rate must be >= 0, got {rate}")
    k, rho, a2 = cfg.n_users, cfg.snr, cfg.alpha2
    two_r = 2.0 ** rate
    if form == "derived":
        def term(n):
            return math.exp(-n * (two_r - 1.0) / rho) / (1.0 + n * a2 * two_r)
    else:
        def term(n):
            return math.exp(-n * (two_r + 1.0 / a2) / rho) / (n * two_r + 1.0)

    if k <= CLOSED_FORM_MAX_K or method == "closed_form":
        v, err = _alternating_sum(k, term)
        if err <= 1e-9:
            return min(max(v, 0.0), 1.0)
        if method == "closed_form":
            raise NumericalInstabilityError(f"noise-limited sum unstable for K={k}", err)

    # sum_n C(K,n) (-z)^n / (1 + n b)  =  int_0^1 (1 - z t^b)^K dt
    if form == "derived":
        z, b = math.exp(-(two_r - 1.0) / rho), a2 * two_r
    else:
        z, b = math.exp(-(two_r + 1.0 / a2) / rho), two_r

    def f(t):
        if t <= 0.0:
            return 1.0
        return math.exp(k * math.log1p(-z * t ** b))

    v, _ = integrate.quad(f, 0.0, 1.0, epsabs=1e-13, epsrel=1e-12, limit=200)
    return min(max(v, 0.0), 1.0)


def noise_limited_interception(n_users: int, alpha2: float, snr: float, form: str = "derived") -> float:
    """Noise-limited P(C_sec < 0) for explicit K (K = 0 allowed)."""
    _check_form(form)
    if n_users < 0:
        raise ValueError("n_users must be >= 0")
    if form == "derived":
        # (1/alpha^2) B(1/alpha^2, K+1), rho-free
        s = 1.0 / alpha2
        return math.exp(math.log(s) + math.lgamma(s) + math.lgamma(n_users + 1) - math.lgamma(s + n_users + 1))
    c = (1.0 + 1.0 / alpha2) / snr
    t = math.exp(-c)
    if t == 0.0:
        # e^c (1 - (1 - e^{-c})^{K+1}) / (K+1) -> 1 as c -> inf
        return 1.0
    return -math.expm1((n_users + 1) * math.log1p(-t)) / (t * (n_users + 1))


def interception_noise_limited(cfg: SystemConfig, form: str = "derived") -> float:
    return noise_limited_interception(cfg.n_users, cfg.alpha2, cfg.snr, form)


def _invert_increasing(fn, eps, tol=1e-12, cap=64.0):
    """Smallest R >= 0 with fn(R) = eps for increasing fn; 0 if fn(0) >= eps."""
    if fn(0.0) >= eps:
        return 0.0
    lo, hi = 0.0, 1e-6
    while fn(hi) < eps:
        lo, hi = hi, 2.0 * hi
        if hi > cap:
            raise ArithmeticError(f"no root below {cap} b/s/Hz")
    while hi - lo > tol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if fn(mid) < eps:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def noise_limited_capacity(cfg: SystemConfig, form: str = "derived") -> float:
    """Per-beam secrecy outage capacity from the noise-limited outage law."""
    _check_form(form)
    return _invert_increasing(lambda r: outage_noise_limited(r, cfg, form), cfg.eps)


# ---------------------------------------------------------------------------
# interference-limited
# ---------------------------------------------------------------------------

def outage_interference_limited(sum_rate: float, cfg: SystemConfig) -> float:
    """Interference-limited outage in terms of the SUM rate R = M * R_beam.

    eps = 2^{c R} (1 - (1 - 2^{-c R})^{K+1}) / (K+1),  c = (M-1)/M
    """
    if cfg.mode < 2:
        raise ValueError("interference-limited outage is degenerate for M = 1")
    if sum_rate < 0:
        raise ValueError(f"sum_rate must be >= 0, got {sum_rate}")
    k = cfg.n_users
    b = 2.0 ** (-(cfg.mode - 1) / cfg.mode * sum_rate)
    if b == 1.0:
        return 1.0 / (k + 1)
    return -math.expm1((k + 1) * math.log1p(-b)) / (b * (k + 1))


def interception_interference_limited(n_users: int) -> float:
    if n_users < 1:
        raise ValueError("n_users must be >= 1")
    return 1.0 / (n_users + 1)


def interference_limited_sum_capacity(cfg: SystemConfig, tol: float = 1e-12) -> float:
    """Solve the interference-limited outage equation for the sum rate.

    Returns 0 when eps <= 1/(K+1), the rate-zero outage.
    """
    eps = cfg.eps
    if outage_interference_limited(0.0, cfg) >= eps:
        return 0.0
    lo, hi = 0.0, 1.0
    while outage_interference_limited(hi, cfg) < eps:
        lo, hi = hi, 2.0 * hi
        if hi > 1e6:
            raise ArithmeticError("interference-limited capacity is unbounded")
    while hi - lo > tol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if outage_interference_limited(mid, cfg) < eps:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# large K
# ---------------------------------------------------------------------------

def large_k_capacity_ceiling(cfg: SystemConfig) -> float:
    """log2(1 + rho ln(K N_t)), the limiting legitimate capacity."""
    return math.log2(1.0 + cfg.snr * math.log(cfg.n_users * cfg.n_antennas))


def outage_large_k(rate: float, cfg: SystemConfig) -> float:
    """Large-K outage: P(eta > 2^{C - R} - 1) with C the capacity ceiling.

    Returns 1 for R at or beyond the ceiling.
    """
    if rate < 0:
        raise ValueError(f"rate must be >= 0, got {rate}")
    lam = cfg.snr * math.log(cfg.n_users * cfg.n_antennas)
    z = (1.0 + lam) / 2.0 ** rate
    if z <= 1.0:
        return 1.0
    return math.exp(-(z - 1.0) / cfg.eav_snr - (cfg.mode - 1) * math.log(z))


def interception_large_k(cfg: SystemConfig) -> float:
    """(1 + rho L)^{-(N_t-1)} exp(-L / alpha^2), L = ln(K N_t)."""
    lam_over_rho = math.log(cfg.n_users * cfg.n_antennas)
    lam = cfg.snr * lam_over_rho
    return math.exp(-(cfg.n_antennas - 1) * math.log1p(lam) - lam_over_rho / cfg.alpha2)


# ---------------------------------------------------------------------------
# mode rules
# ---------------------------------------------------------------------------

def asymptotic_mode(regime, cfg: SystemConfig) -> int:
    """Optimal mode implied by each extreme regime."""
    regime = Regime(regime)
    if regime is Regime.NOISE_LIMITED or regime is Regime.LARGE_K:
        return cfg.n_antennas
    if regime is Regime.INTERFERENCE_LIMITED:
        return 1
    raise ValueError("no asymptotic mode rule for the general regime; run AMS")


def detect_regime(cfg: SystemConfig) -> Regime:
    """Heuristic regime classification.

    large-K if K >= 1000; noise-limited if rho * N_t < 0.01 (noise dominates
    even the largest possible interference); interference-limited if
    rho > 100 * max(M - 1, 1); general otherwise.
    """
    if cfg.n_users >= 1000:
        return Regime.LARGE_K
    if cfg.snr * cfg.n_antennas < 0.01:
        return Regime.NOISE_LIMITED
    if cfg.snr > 100.0 * max(cfg.mode - 1, 1):
        return Regime.INTERFERENCE_LIMITED
    return Regime.GENERAL
