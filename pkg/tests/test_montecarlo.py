"""Simulator: channel and beam laws, SINR, scheduling, aggregation."""

import math

import numpy as np
import pytest
from scipy import stats

from mimosec import SystemConfig
from mimosec.analytic import secrecy_outage_capacity
from mimosec.distributions import cdf_eavesdropper_sinr, cdf_scheduled_sinr, cdf_single_user_sinr
from mimosec.montecarlo import (
    BeamSet,
    ChannelRealization,
    block_rng,
    compute_sinr,
    draw_beams,
    draw_channels,
    haar_unitaries,
    run_trials,
    schedule,
    simulate_slots,
)


def C(m=1, k=10, rho=1.0, alpha2=0.01, eps=0.05, nt=4):
    return SystemConfig(n_antennas=nt, n_users=k, mode=m, snr=rho, alpha2=alpha2, eps=eps)


def ks_bound(n, alpha=1e-3):
    # asymptotic one-sample KS critical value
    return math.sqrt(-0.5 * math.log(alpha / 2) / n)


# ---------------------------------------------------------------------------
# channels and beams
# ---------------------------------------------------------------------------

def test_channel_moments():
    rng = block_rng(1, 0)
    h = np.concatenate([draw_channels(C(k=1000, nt=10), rng).legit.ravel() for _ in range(10)])
    n = h.size
    assert n >= 10 ** 5
    assert np.mean(np.abs(h) ** 2) == pytest.approx(1.0, abs=0.02)
    for part in (h.real, h.imag):
        assert abs(part.mean()) < 4 / math.sqrt(2 * n)
        # Var of a sample variance of N(0, 1/2) is 2 (1/2)^2 / n
        assert abs(part.var() - 0.5) < 5 * math.sqrt(0.5 / n)
    x, y = np.abs(h[0::2]) ** 2, np.abs(h[1::2]) ** 2
    assert abs(np.corrcoef(x, y)[0, 1]) < 0.02
    assert abs(np.corrcoef(h.real, h.imag)[0, 1]) < 0.02


def test_channels_replay_bitwise():
    a = draw_channels(C(), block_rng(7, 3))
    b = draw_channels(C(), block_rng(7, 3))
    assert np.array_equal(a.legit, b.legit) and np.array_equal(a.eav, b.eav)
    assert a.legit.shape == (10, 4) and a.eav.shape == (4,)
    assert not np.array_equal(a.legit, draw_channels(C(), block_rng(7, 4)).legit)


@pytest.mark.parametrize("nt,m", [(1, 1), (2, 1), (4, 2), (4, 4), (8, 5)])
def test_beams_orthonormal(nt, m):
    rng = block_rng(0, 0)
    for _ in range(50):
        w = draw_beams(nt, m, rng).beams
        assert w.shape == (nt, m)
        assert np.max(np.abs(w.conj().T @ w - np.eye(m))) <= 1e-12


def test_single_antenna_beam_is_unit_phase():
    w = draw_beams(1, 1, block_rng(3, 0)).beams
    assert abs(abs(w[0, 0]) - 1.0) <= 1e-15


def test_draw_beams_rejects_bad_mode():
    with pytest.raises(ValueError):
        draw_beams(4, 5, block_rng(0, 0))
    with pytest.raises(ValueError):
        draw_beams(4, 0, block_rng(0, 0))


@pytest.mark.parametrize("nt", [2, 4])
def test_haar_first_entry_is_beta(nt):
    u = haar_unitaries(block_rng(11, 0), nt, 10 ** 5)
    s = np.abs(u[:, 0, 0]) ** 2
    d = stats.kstest(s, stats.beta(1, nt - 1).cdf).statistic
    assert d < ks_bound(s.size)


def test_haar_rotation_invariant_phases():
    # without the diag(R) phase fix, the phase of u[0, 0] is not uniform
    u = haar_unitaries(block_rng(12, 0), 3, 10 ** 5)
    ph = (np.angle(u[:, 0, 0]) + np.pi) / (2 * np.pi)
    assert stats.kstest(ph, "uniform").statistic < ks_bound(ph.size)


# ---------------------------------------------------------------------------
# SINR
# ---------------------------------------------------------------------------

def test_sinr_single_beam_has_no_interference():
    rng = block_rng(2, 0)
    beams = draw_beams(4, 1, rng)
    h = draw_channels(C(), rng).legit[0]
    assert compute_sinr(h, beams, 0, 3.0) == pytest.approx(3.0 * abs(h @ beams.beams[:, 0]) ** 2, rel=1e-14)


def test_sinr_aligned_channel_gives_snr():
    beams = draw_beams(4, 3, block_rng(5, 0))
    for m in range(3):
        h = beams.beams[:, m].conj()
        assert compute_sinr(h, beams, m, 7.5) == pytest.approx(7.5, rel=1e-12)


def test_sinr_with_interference():
    beams = BeamSet(np.eye(3, dtype=complex)[:, :2])
    h = np.array([1.0, 2.0, 5.0], dtype=complex)
    assert compute_sinr(h, beams, 0, 1.0) == pytest.approx(1.0 / (4.0 + 1.0))
    assert compute_sinr(h, beams, 1, 2.0) == pytest.approx(4.0 / (1.0 + 0.5))


@pytest.mark.parametrize("m,rho", [(1, 1.0), (2, 1.0), (3, 5.0)])
def test_single_user_sinr_ks(m, rho):
    c = C(m=m, k=1, rho=rho)
    lam, _, _ = simulate_slots(c, 2 * 10 ** 5 // m, block_rng(20 + m, 0))
    x = lam.ravel()
    d = stats.kstest(x, lambda t: cdf_single_user_sinr(t, c)).statistic
    # beams of one slot share the channel; use the slot count for the bound
    assert d < ks_bound(x.size // m)


# ---------------------------------------------------------------------------
# scheduling
# ---------------------------------------------------------------------------

def test_single_user_single_beam_schedule():
    rng = block_rng(4, 0)
    c = C(m=1, k=1)
    ch, beams = draw_channels(c, rng), draw_beams(4, 1, rng)
    out = schedule(c, ch, beams)
    assert out.selected_user.tolist() == [0]
    assert out.lam[0] == pytest.approx(compute_sinr(ch.legit[0], beams, 0, c.snr), rel=1e-14)
    assert not out.starved.any()


@pytest.mark.parametrize("scheduling", ["all_users", "feedback", "strict"])
def test_schedule_invariants(scheduling):
    rng = block_rng(6, 0)
    c = C(m=3, k=5, rho=2.0, alpha2=0.5)
    for _ in range(200):
        ch, beams = draw_channels(c, rng), draw_beams(4, 3, rng)
        out = schedule(c, ch, beams, scheduling)
        gamma = np.array([[compute_sinr(h, beams, m, c.snr) for m in range(3)] for h in ch.legit])
        assert np.all(out.secrecy_rate >= 0)
        np.testing.assert_allclose(out.secrecy_rate,
                                   np.maximum(np.log2(1 + out.lam) - np.log2(1 + out.eta), 0), rtol=1e-14)
        eta = [compute_sinr(ch.eav, beams, m, c.eav_snr) for m in range(3)]
        np.testing.assert_allclose(out.eta, eta, rtol=1e-12)
        if scheduling == "all_users":
            np.testing.assert_allclose(out.lam, gamma.max(axis=0), rtol=1e-14)
        if scheduling == "feedback":
            best = gamma.argmax(axis=1)
            for m in range(3):
                rep = gamma[best == m, m]
                if rep.size:
                    assert not out.starved[m]
                    assert out.lam[m] == pytest.approx(rep.max(), rel=1e-14)
                else:
                    assert out.starved[m]
                    assert out.lam[m] == pytest.approx(gamma[:, m].max(), rel=1e-14)
        if scheduling == "strict":
            assert len(set(out.selected_user.tolist())) == 3


def test_strict_starves_when_fewer_users_than_beams():
    rng = block_rng(8, 0)
    c = C(m=4, k=2)
    out = schedule(c, draw_channels(c, rng), draw_beams(4, 4, rng), "strict")
    assert out.starved.sum() == 2


def test_unknown_scheduler():
    with pytest.raises(ValueError):
        run_trials(C(), 10, scheduling="round_robin")


def test_scheduled_sinr_ks_within_3x():
    # the analytic law is exact for all_users; the protocol scheduler is tested
    # against the same law with the tolerance widened threefold
    c = C(m=2, k=4, rho=1.0)
    for sched, factor in (("all_users", 1.0), ("feedback", 3.0)):
        lam, _, _ = simulate_slots(c, 10 ** 5, block_rng(30, 0), sched)
        x = lam.ravel()
        d = stats.kstest(x, lambda t: cdf_scheduled_sinr(t, c)).statistic
        assert d < factor * ks_bound(x.size // 2)


@pytest.mark.parametrize("m,alpha2", [(1, 0.5), (2, 0.1), (4, 1.0)])
def test_eavesdropper_sinr_ks(m, alpha2):
    c = C(m=m, k=6, rho=2.0, alpha2=alpha2)
    _, eta, _ = simulate_slots(c, 10 ** 5, block_rng(40 + m, 0))
    x = eta.ravel()
    d = stats.kstest(x, lambda t: cdf_eavesdropper_sinr(t, c)).statistic
    assert d < ks_bound(x.size // m)


# ---------------------------------------------------------------------------
# aggregation
# ---------------------------------------------------------------------------

def test_interference_limited_interception_mc():
    n = 2 * 10 ** 5
    s = run_trials(C(m=2, k=10, rho=1e6), n, rng_seed=5)
    sigma = math.sqrt((1 / 11) * (10 / 11) / n)
    assert abs(s.empirical_interception - 1 / 11) <= 3 * sigma


def test_outage_at_capacity_matches_target():
    c = C(m=2)
    r = secrecy_outage_capacity(c).rate
    n = 2 * 10 ** 5
    s = run_trials(c, n, rate_grid=[r], rng_seed=9)
    assert abs(s.empirical_outage[0] - 0.05) <= 3 * math.sqrt(0.05 * 0.95 / n)


def test_workers_do_not_change_results():
    c = C(m=3, k=6)
    kw = dict(rate_grid=[0.0, 0.5, 1.0], rng_seed=123, block_size=5000, quantile_levels=(0.05,))
    a = run_trials(c, 23_456, workers=1, **kw)
    b = run_trials(c, 23_456, workers=2, **kw)
    assert a == b


def test_seed_changes_results():
    a = run_trials(C(), 5000, rate_grid=[0.5], rng_seed=1)
    b = run_trials(C(), 5000, rate_grid=[0.5], rng_seed=2)
    assert a.mean_sum_secrecy != b.mean_sum_secrecy


def test_single_trial_fractions():
    s = run_trials(C(m=4), 1, rate_grid=[0.0, 0.3, 5.0], rng_seed=0)
    for p in (*s.empirical_outage, s.empirical_interception):
        assert p in (0.0, 0.25, 0.5, 0.75, 1.0)
    assert s.trials == 1


def test_zero_trials_rejected():
    with pytest.raises(ValueError):
        run_trials(C(), 0)


def test_stats_shapes_and_ranges():
    s = run_trials(C(m=2), 3000, rate_grid=np.linspace(0, 2, 5), rng_seed=4, quantile_levels=(0.05, 0.5))
    assert len(s.empirical_outage) == len(s.outage_std_err) == 5
    assert all(0 <= p <= 1 for p in s.empirical_outage)
    assert list(s.empirical_outage) == sorted(s.empirical_outage)
    assert s.empirical_outage[0] == s.empirical_interception
    assert s.quantiles[0.05] <= s.quantiles[0.5]
    assert s.mean_sum_secrecy > 0 and s.std_err > 0
    for p, se in zip(s.empirical_outage, s.outage_std_err):
        assert se == pytest.approx(math.sqrt(p * (1 - p) / 3000))


def test_channel_realization_is_frozen():
    ch = draw_channels(C(), block_rng(0, 0))
    assert isinstance(ch, ChannelRealization)
    with pytest.raises(AttributeError):
        ch.legit = None
