"""
Independent reference values for the test suite.

Everything here is computed without going through the package under
test: Ei by its convergent power series in high-precision arithmetic,
W by mpmath quadrature of its defining integral.  Frozen numbers carry a
note on how they were obtained.
"""

import mpmath

# ---------------------------------------------------------------------------
# high-precision oracles
# ---------------------------------------------------------------------------

def ei_series(x, dps=None):
    """Ei(x) = gamma + ln|x| + sum_{k>=1} x^k / (k k!), summed exactly enough.

    The series converges for every x but its terms peak near e^|x|, so the
    working precision is raised by 2 |x| / ln(10) digits, enough to absorb
    the cancellation for negative x and still resolve an e^{-|x|} result.
    """
    x = mpmath.mpf(x)
    if dps is None:
        dps = 30 + int(2 * abs(x) / 2.302585)
    with mpmath.workdps(dps):
        s = mpmath.mpf(0)
        term = mpmath.mpf(1)
        k = 0
        while True:
            k += 1
            term *= x / k
            add = term / k
            s += add
            if k > abs(x) and abs(add) < mpmath.mpf(10) ** (-dps) * (1 + abs(s)):
                break
        return +(mpmath.euler + mpmath.log(abs(x)) + s)


def w_quad(x, n, dps=30):
    """W(x, n) by mpmath quadrature, split at the scales 1/x and 1."""
    with mpmath.workdps(dps):
        x = mpmath.mpf(x)
        f = lambda y: mpmath.exp(-x * y) * (1 + y) ** (-n)
        pts = sorted({mpmath.mpf(0), mpmath.mpf(1), 1 / x, 10 / x, mpmath.inf})
        return mpmath.quad(f, pts)


# ---------------------------------------------------------------------------
# frozen values
# ---------------------------------------------------------------------------

EI_MINUS_ONE = -0.21938393439552029         # ei_series(-1) at 30 digits
W_1_1 = 0.5963473623231940                  # -e Ei(-1)
W_1_2 = 0.4036526376768060                  # (1 - W(1,1)) / 1

# outage quadrature at tol 1e-11, M=4, K=10, rho=1, alpha2=0.01, R=0.1
G_QUAD_M4_K10_R01 = 4.390497765254666e-06
# outage quadrature at tol 1e-11, M=2, K=3, rho=1, alpha2=0.01, R=0.5
G_QUAD_M2_K3_R05 = 0.16079225609450354
# per-beam capacity, quadrature path, N_t=4, K=10, M=2, alpha2=0.01, eps=0.05, rho=1
CAPACITY_M2_TSNR0 = 0.8145933151245117
