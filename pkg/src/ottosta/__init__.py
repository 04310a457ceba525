"""Finite-time quantum Otto engine with counterdiabatic shortcut driving.

A harmonic working medium is compressed and expanded by frequency ramps,
exchanging heat with two baths in between. The package propagates the
Gaussian moments of the medium exactly, evaluates the energetic cost of
counterdiabatic driving, books the cycle under four accounting conventions,
locates the efficiency at maximum power, and cross-checks everything against
an independent truncated Fock-basis engine. ``ottosta`` is the batch CLI.

Units: hbar = m = k_B = 1.
"""

from .dynamics import (
    Drive,
    GaussianState,
    adiabaticity,
    adiabaticity_pair,
    mean_energy,
    propagate,
    propagate_path,
    q_cd,
    sudden_quench_q,
    thermal_state,
)
from .errors import (
    ConfigError,
    CutoffError,
    NumericsError,
    OttoStaError,
    PhysicsError,
    SecondLawViolationError,
    TrapInversionError,
)
from .optimizer import EmpConfig, EmpResult, curzon_ahlborn, maximize_power_numeric
from .protocols import (
    FrequencyProtocol,
    ProtocolKind,
    check_cd_validity,
    check_sta_boundary,
)
from .sta_cost import StrokeContext, avg_variance_cost, avg_work_cost
from .thermo_cycle import Accounting, CycleConfig, CycleResult, evaluate_cycle

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "Accounting",
    "ConfigError",
    "CutoffError",
    "CycleConfig",
    "CycleResult",
    "Drive",
    "EmpConfig",
    "EmpResult",
    "FrequencyProtocol",
    "GaussianState",
    "NumericsError",
    "OttoStaError",
    "PhysicsError",
    "ProtocolKind",
    "SecondLawViolationError",
    "StrokeContext",
    "TrapInversionError",
    "adiabaticity",
    "adiabaticity_pair",
    "avg_variance_cost",
    "avg_work_cost",
    "check_cd_validity",
    "check_sta_boundary",
    "curzon_ahlborn",
    "evaluate_cycle",
    "maximize_power_numeric",
    "mean_energy",
    "propagate",
    "propagate_path",
    "q_cd",
    "sudden_quench_q",
    "thermal_state",
]
