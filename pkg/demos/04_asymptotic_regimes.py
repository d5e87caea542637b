# coding: utf-8

# # Extreme regimes
#
# Three limits give simple closed forms and simple mode rules:
#
# * noise-limited (low SNR): outage does not depend on M, so use all beams
# * interference-limited (high SNR): sum capacity falls with M, so use one
# * many users: the scheduled SINR concentrates near rho ln(K N_t)

# In[1]:

import numpy as np

from mimosec import SystemConfig
from mimosec import asymptotics as asy
from mimosec.analytic import outage_probability, secrecy_outage_capacity


# ## Noise-limited
#
# At rho = 1e-4 the general law and the noise-limited law agree closely.
# The variant with the other exponent is kept for comparison; it does not
# reduce to the general law.

# In[2]:

cfg = SystemConfig(n_antennas=4, n_users=10, mode=2, snr=1e-4, alpha2=0.3)
for r in (0.0, 1e-4, 3e-4):
    print(f"R={r:g}: general {outage_probability(r, cfg):.5f}  derived {asy.outage_noise_limited(r, cfg):.5f}"
          f"  printed {asy.outage_noise_limited(r, cfg, form='printed'):.5f}")


# ## Interference-limited
#
# The implied sum capacity decreases strictly with M.

# In[3]:

for k in (5, 10, 50):
    caps = [asy.interference_limited_sum_capacity(SystemConfig(n_antennas=8, n_users=k, mode=m, eps=0.3))
            for m in range(2, 9)]
    print(f"K={k:2d}: " + " ".join(f"{c:.3f}" for c in caps))


# ## Many users
#
# The large-K law replaces the scheduled SINR by its concentration point
# and ignores inter-beam interference, so it is only close when there is
# a single beam.

# In[4]:

for k in (10 ** 2, 10 ** 3, 10 ** 4):
    c = SystemConfig(n_antennas=1, n_users=k, mode=1, snr=1.0, alpha2=0.1)
    law = asy._invert_increasing(lambda r: asy.outage_large_k(r, c), c.eps)
    print(f"K={k:5d}: general capacity {secrecy_outage_capacity(c).rate:.3f}  law {law:.3f}"
          f"  ceiling {asy.large_k_capacity_ceiling(c):.3f}")

c4 = SystemConfig(n_antennas=4, n_users=10 ** 4, mode=4, snr=1.0, alpha2=0.01)
r = np.array([0.5, 1.0, 2.0])
print("N_t=M=4, K=1e4  general:", [f"{outage_probability(x, c4):.2e}" for x in r],
      " law:", [f"{asy.outage_large_k(x, c4):.2e}" for x in r])
