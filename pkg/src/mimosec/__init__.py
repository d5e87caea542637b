"""
Secrecy outage analysis and transmission mode selection for multi-user
MIMO downlinks with opportunistic random beamforming and a passive
eavesdropper.

Modules
-------
specfun        W(x, N) = int_0^inf e^{-xy} (1+y)^{-N} dy and Ei(x)
distributions  SINR laws of users, scheduled users and the eavesdropper
analytic       secrecy outage probability, its inverse, interception
asymptotics    noise-limited, interference-limited and large-K laws
montecarlo     slot-level scheduling simulator
modeselect     adaptive (AMS) and fixed (FTM1/FTM2) mode selection
experiment     parameter sweeps, table/figure data, CSV output
cli            command-line front end (``python3 -m mimosec``)
"""

from .analytic import (
    interception_probability,
    outage_probability,
    outage_probability_closed_form,
    outage_probability_quadrature,
    secrecy_outage_capacity,
    sum_secrecy_outage_capacity,
)
from .config import Regime, SystemConfig, db_to_linear
from .errors import NumericalInstabilityError, QuadratureError, SolverError
from .modeselect import ModeDecision, ams_select, compare_schemes, fixed_mode
from .montecarlo import run_trials
from .specfun import exp_integral_ei, w_function

__version__ = "0.1.0"

__all__ = [
    "ModeDecision",
    "NumericalInstabilityError",
    "QuadratureError",
    "Regime",
    "SolverError",
    "SystemConfig",
    "ams_select",
    "compare_schemes",
    "db_to_linear",
    "exp_integral_ei",
    "fixed_mode",
    "interception_probability",
    "outage_probability",
    "outage_probability_closed_form",
    "outage_probability_quadrature",
    "run_trials",
    "secrecy_outage_capacity",
    "sum_secrecy_outage_capacity",
    "w_function",
]
