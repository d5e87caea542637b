"""Scenario parameters shared by every module."""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

MAX_USERS = 1_000_000


class Regime(str, enum.Enum):
    GENERAL = "general"
    NOISE_LIMITED = "noise_limited"
    INTERFERENCE_LIMITED = "interference_limited"
    LARGE_K = "large_k"


def db_to_linear(db):
    return 10.0 ** (db / 10.0)


@dataclass(frozen=True)
class SystemConfig:
    """One downlink scenario, all quantities linear.

    Attributes:
        n_antennas: BS antennas N_t.
        n_users: number of single-antenna secure users K.
        mode: transmission mode M, the number of active beams (1..N_t).
        snr: transmit SNR rho = P / sigma^2 per beam.
        alpha2: eavesdropper relative path gain alpha^2.
        eps: outage target in (0, 1).
    """

    n_antennas: int = 4
    n_users: int = 10
    mode: int = 1
    snr: float = 1.0
    alpha2: float = 0.01
    eps: float = 0.05

    def __post_init__(self):
        for name in ("n_antennas", "n_users", "mode"):
            v = getattr(self, name)
            if int(v) != v:
                raise ValueError(f"{name} must be an integer, got {v!r}")
            object.__setattr__(self, name, int(v))
        if self.n_antennas < 1:
            raise ValueError(f"n_antennas must be >= 1, got {self.n_antennas}")
        if not 1 <= self.n_users <= MAX_USERS:
            raise ValueError(f"n_users must be in [1, {MAX_USERS}], got {self.n_users}")
        if not 1 <= self.mode <= self.n_antennas:
            raise ValueError(f"mode must satisfy 1 <= M <= N_t={self.n_antennas}, got {self.mode}")
        if not self.snr > 0:
            raise ValueError(f"snr must be > 0, got {self.snr}")
        if not self.alpha2 > 0:
            raise ValueError(f"alpha2 must be > 0, got {self.alpha2}")
        if not 0 < self.eps < 1:
            raise ValueError(f"eps must be in (0, 1), got {self.eps}")

    @property
    def eav_snr(self):
        """Effective eavesdropper SNR alpha^2 * rho."""
        return self.alpha2 * self.snr

    def with_mode(self, mode):
        return replace(self, mode=mode)

    def replace(self, **changes):
        return replace(self, **changes)

    @classmethod
    def from_tsnr_db(cls, tsnr_db, **kw):
        return cls(snr=db_to_linear(tsnr_db), **kw)
