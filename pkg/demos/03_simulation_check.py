# coding: utf-8

# # Checking the analysis by simulation
#
# The simulator draws Rayleigh channels, a Haar-random beam set and the
# eavesdropper channel for each slot, schedules the best user per beam
# and records the secrecy gap.  Blocks of slots are seeded from
# (seed, block index), so results do not depend on the worker count.

# In[1]:

import math

import numpy as np
from scipy import stats

from mimosec import SystemConfig
from mimosec.analytic import outage_probability, secrecy_outage_capacity
from mimosec.distributions import cdf_scheduled_sinr
from mimosec.montecarlo import block_rng, run_trials, simulate_slots


# ## Outage at the analytic capacity
#
# If the closed form is right, running at R = G^{-1}(eps) should produce
# an empirical outage of eps up to binomial noise.

# In[2]:

n = 100_000
for db in (-10, 0, 10):
    for m in (1, 2, 4):
        cfg = SystemConfig(n_antennas=4, n_users=10, mode=m, snr=10 ** (db / 10), alpha2=0.01, eps=0.05)
        r = secrecy_outage_capacity(cfg).rate
        st = run_trials(cfg, n, [r], rng_seed=1)
        z = (st.empirical_outage[0] - 0.05) / math.sqrt(0.05 * 0.95 / n)
        print(f"{db:4d} dB M={m}: R={r:.4f}  empirical {st.empirical_outage[0]:.4f}  z={z:+.2f}")


# ## Scheduled SINR distribution
#
# The analysis lets all K users compete on every beam.  Under the
# protocol where each user reports only its best beam, fewer users
# compete per beam and the distribution shifts slightly.

# In[3]:

cfg = SystemConfig(n_antennas=4, n_users=4, mode=2, snr=1.0)
for sched in ("all_users", "feedback", "strict"):
    lam, _, starved = simulate_slots(cfg, 50_000, block_rng(3, 0), sched)
    d = stats.kstest(lam.ravel(), lambda t: cdf_scheduled_sinr(t, cfg)).statistic
    print(f"{sched:9s}: KS distance {d:.4f}, starved beams {int(starved.sum())}")


# ## Interception at high SNR
#
# With M >= 2 and negligible noise both SINRs are interference ratios and
# the interception probability tends to 1/(K+1) regardless of alpha.

# In[4]:

for k in (1, 10, 50):
    cfg = SystemConfig(n_antennas=4, n_users=k, mode=2, snr=1e6, alpha2=0.01)
    st = run_trials(cfg, 100_000, rng_seed=k)
    print(f"K={k:2d}: simulated {st.empirical_interception:.4f}  analytic {outage_probability(0.0, cfg):.4f}"
          f"  1/(K+1) {1 / (k + 1):.4f}")


# ## Determinism under parallelism

# In[5]:

cfg = SystemConfig(n_antennas=4, n_users=10, mode=3, snr=1.0)
a = run_trials(cfg, 40_000, [0.5], rng_seed=9, workers=1)
b = run_trials(cfg, 40_000, [0.5], rng_seed=9, workers=2)
print("identical across worker counts:", a == b)
print("empirical outage at 0.5:", np.round(a.empirical_outage, 5))
