import pytest

from mimosec import SystemConfig


@pytest.fixture
def defaults():
    """N_t=4, K=10, alpha^2=0.01, eps=0.05 at 0 dB."""
    return SystemConfig(n_antennas=4, n_users=10, mode=1, snr=1.0, alpha2=0.01, eps=0.05)
