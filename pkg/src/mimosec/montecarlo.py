"""
Slot-level Monte Carlo of opportunistic random beamforming with a passive
eavesdropper.

Each slot draws fresh Rayleigh channels for the K users and the
eavesdropper, a Haar-random set of M orthonormal beams, computes every
user's SINR on every beam, schedules one user per beam and records the
scheduled SINR lambda_m, the eavesdropper SINR eta_m and the secrecy rate.

Scheduling variants
-------------------
all_users every user competes on every beam; beam m goes to argmax_k SINR_km.
          One user may win several beams.  This is the model behind the
          analytic F_lambda = F_xi^K.
feedback  each user reports only its best beam; beam m goes to the best
          reporter.  A beam with no reporter falls back to argmax over all
          users and is counted as starved.
strict    greedy one-to-one assignment in descending SINR; no user serves
          two beams.  Beams left without a user (K < M) fall back as above.

Reproducibility
---------------
Trials are cut into fixed-size blocks.  Block b draws from a generator
seeded with SeedSequence(seed, spawn_key=(b,)), so every block's samples
depend only on (seed, b).  Per-block partial results are combined in block
order, which makes the output independent of the number of workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import SystemConfig

SCHEDULERS = ("all_users", "feedback", "strict")
BLOCK_SIZE = 10_000


@dataclass(frozen=True)
class ChannelRealization:
    legit: np.ndarray  # (K, N_t) complex
    eav: np.ndarray  # (N_t,) complex, small-scale fading only


@dataclass(frozen=True)
class BeamSet:
    beams: np.ndarray  # (N_t, M) complex, orthonormal columns

    @property
    def mode(self):
        return self.beams.shape[1]


@dataclass(frozen=True)
class ScheduleOutcome:
    selected_user: np.ndarray  # (M,) 0-based user indices
    lam: np.ndarray
    eta: np.ndarray
    secrecy_gap: np.ndarray  # log2(1+lam) - log2(1+eta), may be negative
    starved: np.ndarray  # (M,) bool

    @property
    def secrecy_rate(self):
        return np.maximum(self.secrecy_gap, 0.0)


@dataclass(frozen=True)
class TrialStats:
    """Aggregated Monte Carlo results.

    Empirical probabilities are fractions over all (slot, beam) pairs.
    Standard errors use the slot count as sample size, which is
    conservative because beams within a slot are positively correlated at
    most.
    """

    trials: int
    rates: tuple
    empirical_outage: tuple
    outage_std_err: tuple
    empirical_interception: float
    interception_std_err: float
    mean_sum_secrecy: float
    std_err: float
    starved_beams: int
    quantiles: dict = field(default_factory=dict)


def _complex_normal(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * math.sqrt(0.5)


def draw_channels(cfg: SystemConfig, rng: np.random.Generator) -> ChannelRealization:
    """One slot of i.i.d. CN(0, 1) legitimate and eavesdropper channels."""
    legit = _complex_normal(rng, (cfg.n_users, cfg.n_antennas))
    eav = _complex_normal(rng, (cfg.n_antennas,))
    return ChannelRealization(legit, eav)


def haar_unitaries(rng, n, size):
    """``size`` Haar-distributed n x n unitaries, shape (size, n, n).

    QR of a complex Ginibre matrix, with the phases of diag(R) pushed into
    Q so the result is rotation invariant.
    """
    z = _complex_normal(rng, (size, n, n))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    absd = np.abs(d)
    bad = np.any(absd < 1e-12, axis=-1)
    if np.any(bad):
        q[bad] = haar_unitaries(rng, n, int(bad.sum()))
        d = np.where(bad[:, None], 1.0, d)
        absd = np.where(bad[:, None], 1.0, absd)
    return q * (d / absd)[:, None, :]


def draw_beams(n_antennas: int, mode: int, rng: np.random.Generator) -> BeamSet:
    if not 1 <= mode <= n_antennas:
        raise ValueError(f"mode must satisfy 1 <= M <= N_t={n_antennas}, got {mode}")
    u = haar_unitaries(rng, n_antennas, 1)[0]
    return BeamSet(u[:, :mode])


def _sinr(gains, inv_snr):
    # gains[..., m] = |h w_m|^2; SINR_m = g_m / (sum_{i != m} g_i + 1/snr)
    total = gains.sum(axis=-1, keepdims=True)
    return gains / (total - gains + inv_snr)


def compute_sinr(h, beams: BeamSet, m: int, snr: float) -> float:
    """SINR of channel row ``h`` on beam ``m`` (0-based)."""
    g = np.abs(np.asarray(h) @ beams.beams) ** 2
    return float(_sinr(g, 1.0 / snr)[m])


def sinr_matrix(legit, beams, snr):
    """All users' SINR on all beams; broadcasts over leading slot axes."""
    g = np.abs(legit @ beams) ** 2
    return _sinr(g, 1.0 / snr)


def _assign(gamma, scheduling):
    """Per-slot beam assignment.  gamma: (n, K, M).  Returns (users, starved)."""
    n, k, m = gamma.shape
    best_all = gamma.argmax(axis=1)
    if scheduling == "all_users":
        return best_all, np.zeros((n, m), dtype=bool)
    if scheduling == "feedback":
        reported = gamma.argmax(axis=2)  # (n, K)
        best_val = gamma.max(axis=2)
        cand = np.where(reported[:, :, None] == np.arange(m)[None, None, :], best_val[:, :, None], -1.0)
        users = cand.argmax(axis=1)
        starved = cand.max(axis=1) < 0.0
        return np.where(starved, best_all, users), starved
    if scheduling == "strict":
        work = gamma.copy()
        users = np.full((n, m), -1, dtype=np.int64)
        rows = np.arange(n)
        for _ in range(min(k, m)):
            flat = work.reshape(n, k * m).argmax(axis=1)
            uk, um = np.divmod(flat, m)
            users[rows, um] = uk
            work[rows, uk, :] = -np.inf
            work[rows, :, um] = -np.inf
        starved = users < 0
        return np.where(starved, best_all, users), starved
    raise ValueError(f"scheduling must be one of {SCHEDULERS}, got {scheduling!r}")


def schedule(cfg: SystemConfig, channels: ChannelRealization, beams: BeamSet, scheduling: str = "all_users") -> ScheduleOutcome:
    """Schedule one slot.  The eavesdropper sees the same beams at SNR alpha^2 rho."""
    gamma = sinr_matrix(channels.legit, beams.beams, cfg.snr)[None]
    users, starved = _assign(gamma, scheduling)
    users, starved = users[0], starved[0]
    lam = gamma[0, users, np.arange(beams.mode)]
    eta = _sinr(np.abs(channels.eav @ beams.beams) ** 2, 1.0 / cfg.eav_snr)
    gap = np.log2(1.0 + lam) - np.log2(1.0 + eta)
    return ScheduleOutcome(users, lam, eta, gap, starved)


def simulate_slots(cfg: SystemConfig, n_slots: int, rng: np.random.Generator, scheduling: str = "all_users"):
    """Vectorised batch of slots.

    Returns (lam, eta, starved), each of shape (n_slots, M).
    """
    nt, k, m = cfg.n_antennas, cfg.n_users, cfg.mode
    legit = _complex_normal(rng, (n_slots, k, nt))
    eav = _complex_normal(rng, (n_slots, 1, nt))
    w = haar_unitaries(rng, nt, n_slots)[:, :, :m]
    gamma = sinr_matrix(legit, w, cfg.snr)
    users, starved = _assign(gamma, scheduling)
    lam = np.take_along_axis(gamma, users[:, None, :], axis=1)[:, 0, :]
    eta = _sinr(np.abs(eav @ w)[:, 0, :] ** 2, 1.0 / cfg.eav_snr)
    return lam, eta, starved


def block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(block,))))


def _run_block(cfg, seed, block, n_slots, rates, scheduling, keep_gaps):
    rng = block_rng(seed, block)
    lam, eta, starved = simulate_slots(cfg, n_slots, rng, scheduling)
    gap = np.log2(1.0 + lam) - np.log2(1.0 + eta)
    flat = np.sort(gap, axis=None)
    below = np.searchsorted(flat, np.asarray(rates, dtype=float), side="left")
    intercepted = int(np.searchsorted(flat, 0.0, side="left"))
    sum_sec = np.maximum(gap, 0.0).sum(axis=1)
    return {
        "below": below.astype(np.int64),
        "intercepted": intercepted,
        "sum": float(sum_sec.sum()),
        "sumsq": float(np.square(sum_sec).sum()),
        "starved": int(starved.sum()),
        "gaps": gap.ravel() if keep_gaps else None,
    }


def run_trials(
    cfg: SystemConfig,
    n_trials: int,
    rate_grid=(),
    rng_seed: int = 0,
    scheduling: str = "all_users",
    workers: int = 1,
    block_size: int = BLOCK_SIZE,
    quantile_levels=(),
) -> TrialStats:
    """Run ``n_trials`` independent slots and aggregate secrecy statistics.

    Outage at rate R counts (slot, beam) pairs whose secrecy gap
    log2(1+lam) - log2(1+eta) falls below R; interception counts gaps below
    zero.  ``quantile_levels`` adds empirical quantiles of the gap, i.e.
    Monte Carlo estimates of the per-beam secrecy outage capacity
    (negative values mean the target is not reachable).
    """
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    if scheduling not in SCHEDULERS:
        raise ValueError(f"scheduling must be one of {SCHEDULERS}, got {scheduling!r}")
    rates = tuple(float(r) for r in np.atleast_1d(rate_grid)) if np.size(rate_grid) else ()
    sizes = [block_size] * (n_trials // block_size)
    if n_trials % block_size:
        sizes.append(n_trials % block_size)
    keep = bool(quantile_levels)
    jobs = [(cfg, rng_seed, b, sz, rates, scheduling, keep) for b, sz in enumerate(sizes)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_block, *zip(*jobs)))
    else:
        parts = [_run_block(*j) for j in jobs]

    samples = n_trials * cfg.mode
    below = np.zeros(len(rates), dtype=np.int64)
    intercepted = starved = 0
    s = ss = 0.0
    for p in parts:
        below += p["below"]
        intercepted += p["intercepted"]
        starved += p["starved"]
        s += p["sum"]
        ss += p["sumsq"]

    def se(p):
        return math.sqrt(max(p * (1.0 - p), 0.0) / n_trials)

    outage = tuple(float(c) / samples for c in below)
    p_int = intercepted / samples
    mean = s / n_trials
    var = max(ss / n_trials - mean * mean, 0.0) * n_trials / max(n_trials - 1, 1)
    quantiles = {}
    if keep:
        gaps = np.concatenate([p["gaps"] for p in parts])
        for q in quantile_levels:
            quantiles[float(q)] = float(np.quantile(gaps, q))
    return TrialStats(
        trials=n_trials,
        rates=rates,
        empirical_outage=outage,
        outage_std_err=tuple(se(p) for p in outage),
        empirical_interception=p_int,
        interception_std_err=se(p_int),
        mean_sum_secrecy=mean,
        std_err=math.sqrt(var / n_trials),
        starved_beams=starved,
        quantiles=quantiles,
    )
