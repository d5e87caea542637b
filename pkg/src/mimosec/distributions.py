"""
SINR laws under random orthonormal beamforming over Rayleigh fading.

xi      SINR of one user on one beam: signal ~ Exp(1), interference ~ Gamma(M-1, 1)
lambda  scheduled SINR, the max of K independent copies of xi
eta     eavesdropper SINR, distributed like xi with effective SNR alpha^2 * rho

All functions accept scalars or numpy arrays and return the same shape.
"""

from __future__ import annotations

import numpy as np

from .config import Regime, SystemConfig


def _check_nonneg(x, what="x"):
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or np.any(np.isnan(x)):
        raise ValueError(f"{what} must be >= 0")
    return x


def _out(v):
    return float(v) if np.ndim(v) == 0 else v


def _tail(x, snr, mode):
    # P(xi > x) = exp(-x/snr) / (1+x)^(M-1), in log form
    return np.exp(-x / snr - (mode - 1) * np.log1p(x))


def cdf_single_user_sinr(x, cfg: SystemConfig):
    """F_xi(x) = 1 - exp(-x/rho) / (1+x)^(M-1)."""
    x = _check_nonneg(x)
    return _out(-np.expm1(-x / cfg.snr - (cfg.mode - 1) * np.log1p(x)))


def cdf_scheduled_sinr(x, cfg: SystemConfig):
    """F_lambda(x) = F_xi(x)^K, computed as exp(K * log1p(-tail))."""
    x = _check_nonneg(x)
    q = _tail(x, cfg.snr, cfg.mode)
    with np.errstate(divide="ignore"):
        return _out(np.exp(cfg.n_users * np.log1p(-q)))


def cdf_eavesdropper_sinr(y, cfg: SystemConfig):
    y = _check_nonneg(y, "y")
    return _out(-np.expm1(-y / cfg.eav_snr - (cfg.mode - 1) * np.log1p(y)))


def pdf_eavesdropper_sinr(y, cfg: SystemConfig):
    """Density of eta: derivative of 1 - exp(-y/(alpha^2 rho)) / (1+y)^(M-1)."""
    y = _check_nonneg(y, "y")
    s = cfg.eav_snr
    t = _tail(y, s, cfg.mode)
    return _out(t * ((cfg.mode - 1) / (1.0 + y) + 1.0 / s))


def regime_reductions(x, cfg: SystemConfig, regime: Regime, which: str):
    """Reduced laws in the two SNR extremes.

    ``which`` is ``"legit_cdf"`` (F_lambda) or ``"eav_pdf"`` (f_eta).

    noise-limited:        F = (1 - e^{-x/rho})^K,           f = e^{-y/(a2 rho)} / (a2 rho)
    interference-limited: F = (1 - (1+x)^{-(M-1)})^K,       f = (M-1) (1+y)^{-M}
    """
    regime = Regime(regime)
    x = _check_nonneg(x)
    k = cfg.n_users
    m = cfg.mode
    if which not in ("legit_cdf", "eav_pdf"):
        raise ValueError(f"which must be 'legit_cdf' or 'eav_pdf', got {which!r}")
    if regime is Regime.NOISE_LIMITED:
        if which == "legit_cdf":
            with np.errstate(divide="ignore"):
                return _out(np.exp(k * np.log1p(-np.exp(-x / cfg.snr))))
        s = cfg.eav_snr
        return _out(np.exp(-x / s) / s)
    if regime is Regime.INTERFERENCE_LIMITED:
        if which == "legit_cdf":
            if m == 1:
                # lambda is unbounded: its cdf is identically zero
                return _out(np.zeros_like(x))
            with np.errstate(divide="ignore"):
                return _out(np.exp(k * np.log1p(-np.exp(-(m - 1) * np.log1p(x)))))
        if m == 1:
            raise ValueError("interference-limited eavesdropper density is degenerate for M = 1")
        return _out((m - 1) * np.exp(-m * np.log1p(x)))
    raise ValueError(f"no reduced law for regime {regime.value!r}")
