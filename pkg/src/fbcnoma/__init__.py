"""Finite-blocklength NOMA rates, effective capacity, and energy efficiency."""

__version__ = "0.1.0"

from .channel import DecodingOrder, FadingSpec, SicScenario, sample_snr, sinr_pair
from .effcap import (
    EcMethod,
    EcResult,
    Normalization,
    OrderSelection,
    PowerPolicy,
    SicMode,
    ec_max_approx,
    ec_max_exact,
    effective_capacity,
    select_order,
    solve_policy_user1,
    solve_policy_user2,
)
from .energyeff import (
    EeMethod,
    EeResult,
    PowerModel,
    ee_value,
    maximize_ee_fixed_point,
    maximize_ee_golden,
    total_power,
)
from .errors import (
    BoundaryWarning,
    BracketError,
    CapExceededError,
    DomainError,
    FbcNomaError,
    InfeasibleError,
    InstabilityError,
    InsufficientEventsError,
    NonConvergenceError,
    ScenarioError,
    SeriesDivergenceWarning,
)
from .fbc import QosSpec, RatePoint, achievable_rate, capacity_dispersion, n_rt
from .numerics import QuadratureSpec, inv_q, q_function, upper_incomplete_gamma
from .queuesim import QueueSimConfig, TailEstimate, simulate_queue, tail_slope_sweep

__all__ = [
    "__version__",
    "DecodingOrder",
    "FadingSpec",
    "SicScenario",
    "sample_snr",
    "sinr_pair",
    "EcMethod",
    "EcResult",
    "Normalization",
    "OrderSelection",
    "PowerPolicy",
    "SicMode",
    "ec_max_approx",
    "ec_max_exact",
    "effective_capacity",
    "select_order",
    "solve_policy_user1",
    "solve_policy_user2",
    "EeMethod",
    "EeResult",
    "PowerModel",
    "ee_value",
    "maximize_ee_fixed_point",
    "maximize_ee_golden",
    "total_power",
    "BoundaryWarning",
    "BracketError",
    "CapExceededError",
    "DomainError",
    "FbcNomaError",
    "InfeasibleError",
    "InstabilityError",
    "InsufficientEventsError",
    "NonConvergenceError",
    "ScenarioError",
    "SeriesDivergenceWarning",
    "QosSpec",
    "RatePoint",
    "achievable_rate",
    "capacity_dispersion",
    "n_rt",
    "QuadratureSpec",
    "inv_q",
    "q_function",
    "upper_incomplete_gamma",
    "QueueSimConfig",
    "TailEstimate",
    "simulate_queue",
    "tail_slope_sweep",
]
