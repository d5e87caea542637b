# coding: utf-8

# # Secrecy outage probability and its inverse
#
# A base station with N_t antennas serves M of K single-antenna users on M
# random orthonormal beams.  An eavesdropper listens on every beam with a
# channel attenuated by alpha^2.  For one beam the secrecy outage
# probability G(R) is the probability that the secrecy rate falls below R.
# This script walks through how it is evaluated and inverted.

# In[1]:

import numpy as np

from mimosec import SystemConfig
from mimosec.analytic import (
    interception_probability,
    outage_probability,
    outage_probability_closed_form,
    outage_probability_quadrature,
    secrecy_outage_capacity,
)
from mimosec.specfun import w_function


# ## The W family
#
# Every closed-form term is an integral W(x, N) = int_0^inf e^{-xy} (1+y)^{-N} dy.
# The evaluator picks a path depending on x and reports it.

# In[2]:

for x, n in [(0.5, 3), (1.0, 2), (50.0, 40), (1e-3, 10)]:
    w = w_function(x, n)
    print(f"W({x:g}, {n:2d}) = {w.value:.16g}   via {w.method:18s} est. err {w.est_abs_error:.1e}")


# ## Outage versus rate
#
# Default network: 4 antennas, 10 users, alpha^2 = 0.01, 0 dB transmit SNR.

# In[3]:

base = SystemConfig(n_antennas=4, n_users=10, mode=1, snr=1.0, alpha2=0.01, eps=0.05)

rates = np.linspace(0.0, 2.5, 11)
print("   R   " + "".join(f"   M={m}     " for m in range(1, 5)))
for r in rates:
    g = [outage_probability(r, base.with_mode(m)) for m in range(1, 5)]
    print(f"{r:5.2f}  " + "".join(f"{v:11.3e} " for v in g))


# At R = 0 the outage probability is the interception probability, the
# chance that the eavesdropper's SINR beats the scheduled user's.

# In[4]:

for m in range(1, 5):
    c = base.with_mode(m)
    print(f"M={m}: P(intercept) = {interception_probability(c):.3e}")


# ## Closed form against direct quadrature
#
# The binomial closed form is an alternating sum.  Its cancellation error
# is estimated term by term; the quadrature path integrates the
# distribution laws directly and serves as an oracle.

# In[5]:

worst = 0.0
for m in range(1, 5):
    for k in (1, 5, 10, 30):
        for rho in (0.1, 1.0, 10.0):
            c = base.replace(mode=m, n_users=k, snr=rho)
            for r in (0.0, 0.5, 2.0):
                d = abs(outage_probability_closed_form(r, c) - outage_probability_quadrature(r, c))
                worst = max(worst, d)
print(f"max |closed form - quadrature| over the grid: {worst:.2e}")


# ## Secrecy outage capacity
#
# The largest per-beam rate with outage eps is found by bisection on G.
# The sum capacity multiplies by M.

# In[6]:

for m in range(1, 5):
    res = secrecy_outage_capacity(base.with_mode(m))
    print(f"M={m}: R = {res.rate:.6f} b/s/Hz per beam, sum {m * res.rate:.4f}, G(R) = {res.achieved_outage:.3g}")
