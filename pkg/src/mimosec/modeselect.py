"""
Transmission mode selection: adaptive (AMS) and fixed (FTM1 / FTM2).

AMS computes the per-beam secrecy outage capacity R_m for every mode
m = 1..N_t and picks argmax m * R_m.  Two inversion strategies:

paper_scan  R_m is the first multiple of delta_r at which G(R) >= eps,
            i.e. the result of incrementing R from 0 in delta_r steps while
            G(R) < eps.  It overshoots the exact root by up to delta_r.
            Because G is increasing the first crossing is located by integer
            bisection; ``scan_capacity(..., literal=True)`` runs the loop
            step by step instead.
bisection   R_m = G^{-1}(eps) to solver tolerance.

Ties in the argmax go to the smaller mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .analytic import outage_probability, secrecy_outage_capacity
from .config import SystemConfig
from .errors import NumericalInstabilityError, QuadratureError, SolverError

STRATEGIES = ("paper_scan", "bisection")
TIE_TOL = 1e-12
_MAX_SCAN_STEPS = 1 << 20


@dataclass(frozen=True)
class ModeDecision:
    """Outcome of one mode-selection run.

    ``margin`` is chosen capacity minus the best other mode's (inf when only
    one mode was evaluated); ``runner_up`` is that other mode.
    """

    per_mode_sum_capacity: dict
    chosen: int
    scheme: str
    per_mode_rate: dict = field(default_factory=dict)
    runner_up: int | None = None
    margin: float = math.inf
    failures: dict = field(default_factory=dict)

    @property
    def sum_capacity(self):
        return self.per_mode_sum_capacity[self.chosen]

    def near_tie(self, threshold):
        return self.margin < threshold


def scan_capacity(cfg: SystemConfig, delta_r: float = 0.01, method: str = "auto", literal: bool = False) -> float:
    """First multiple k * delta_r (k >= 0) with G(k * delta_r) >= eps."""
    if not delta_r > 0:
        raise ValueError(f"delta_r must be > 0, got {delta_r}")
    eps = cfg.eps

    def below(k):
        return outage_probability(k * delta_r, cfg, method) < eps

    if literal:
        r = 0.0
        steps = 0
        while outage_probability(r, cfg, method) < eps:
            r += delta_r
            steps += 1
            if steps > _MAX_SCAN_STEPS:
                raise SolverError("scan did not cross eps")
        return r

    if not below(0):
        return 0.0
    lo, hi = 0, 1
    while below(hi):
        lo, hi = hi, 2 * hi
        if hi > _MAX_SCAN_STEPS:
            raise SolverError("scan did not cross eps")
    # below(lo) and not below(hi)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if below(mid):
            lo = mid
        else:
            hi = mid
    return hi * delta_r


def _per_beam_rate(cfg, strategy, delta_r, method):
    if strategy == "paper_scan":
        return scan_capacity(cfg, delta_r, method)
    if strategy == "bisection":
        return secrecy_outage_capacity(cfg, method).rate
    raise ValueError(f"strategy must be one of {STRATEGIES}, got {strategy!r}")


def _decide(caps, scheme, rates, failures):
    modes = sorted(caps)
    best = max(caps.values())
    chosen = next(m for m in modes if caps[m] >= best - TIE_TOL)
    others = [m for m in modes if m != chosen]
    runner_up = max(others, key=lambda m: (caps[m], -m)) if others else None
    margin = caps[chosen] - caps[runner_up] if others else math.inf
    return ModeDecision(caps, chosen, scheme, rates, runner_up, margin, failures)


def ams_select(cfg: SystemConfig, strategy: str = "paper_scan", delta_r: float = 0.01, method: str = "auto") -> ModeDecision:
    """Adaptive mode selection over M = 1..N_t.  ``cfg.mode`` is ignored.

    A mode whose capacity cannot be computed is reported in ``failures``
    and left out of the argmax; if every mode fails the first error is
    re-raised.
    """
    caps, rates, failures = {}, {}, {}
    for m in range(1, cfg.n_antennas + 1):
        try:
            r = _per_beam_rate(cfg.with_mode(m), strategy, delta_r, method)
        except (NumericalInstabilityError, QuadratureError, SolverError) as exc:
            failures[m] = exc
            continue
        rates[m] = r
        caps[m] = m * r
    if not caps:
        raise next(iter(failures.values()))
    return _decide(caps, "AMS", rates, failures)


def fixed_mode(cfg: SystemConfig, which: str, strategy: str = "paper_scan", delta_r: float = 0.01, method: str = "auto") -> ModeDecision:
    """FTM1 (M = 1) or FTM2 (M = N_t)."""
    which = which.upper()
    if which == "FTM1":
        m = 1
    elif which == "FTM2":
        m = cfg.n_antennas
    else:
        raise ValueError(f"which must be 'FTM1' or 'FTM2', got {which!r}")
    r = _per_beam_rate(cfg.with_mode(m), strategy, delta_r, method)
    return _decide({m: m * r}, which, {m: r}, {})


def select(cfg: SystemConfig, scheme: str, **kw) -> ModeDecision:
    scheme = scheme.upper()
    if scheme == "AMS":
        return ams_select(cfg, **kw)
    return fixed_mode(cfg, scheme, **kw)


def compare_schemes(base: SystemConfig, tsnr_db, schemes=("AMS", "FTM1", "FTM2"), **kw):
    """Evaluate each scheme at each transmit SNR (dB).

    Returns a list of dicts with keys tsnr_db, scheme, mode, sum_capacity,
    margin, in grid order.  FTM results are read off the AMS per-mode table
    when AMS is evaluated too, so AMS dominates them exactly.
    """
    rows = []
    for db in tsnr_db:
        cfg = base.replace(snr=10.0 ** (db / 10.0))
        ams = ams_select(cfg, **kw) if "AMS" in schemes else None
        for scheme in schemes:
            if scheme == "AMS":
                d = ams
            elif ams is not None:
                m = 1 if scheme == "FTM1" else cfg.n_antennas
                d = ModeDecision({m: ams.per_mode_sum_capacity[m]}, m, scheme, {m: ams.per_mode_rate[m]})
            else:
                d = fixed_mode(cfg, scheme, **kw)
            rows.append({
                "tsnr_db": db,
                "scheme": scheme,
                "mode": d.chosen,
                "sum_capacity": d.sum_capacity,
                "margin": d.margin,
            })
    return rows
