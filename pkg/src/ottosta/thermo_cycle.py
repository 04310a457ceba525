"""Quantum Otto cycle bookkeeping for the harmonic working medium.

The four strokes: (1) unitary compression omega1 -> omega2 from the cold
thermal state A, (2) full thermalization with the hot bath at inverse
temperature beta2, (3) unitary expansion omega2 -> omega1 from the hot
thermal state C, (4) full thermalization with the cold bath at beta1.

Sign conventions: stroke works are energy INTO the medium (engine output is
-(W1+W3) > 0), heats are energy absorbed by the medium. All stroke works
and heats are closed forms in the two adiabaticity factors Q*1 (compression)
and Q*3 (expansion); the accounting conventions differ only in what they
plug in for those factors and in how driving costs enter.

Accounting conventions:

* ADIABATIC: Q*1 = Q*3 = 1 (quasistatic limit).
* NONADIABATIC: bare-drive factors from Gaussian propagation at t = tau.
* STA: counterdiabatic driving, endpoint-exact (Q* = 1), with the
  time-averaged driving cost added to the heat input for the efficiency and
  subtracted from the output for the power.
* TIME_AVERAGED: stroke work replaced by its driving-time average,
  W_i + <dW_i>_tau, with the bare heat input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .dynamics import (
    DEFAULT_ATOL,
    DEFAULT_RTOL,
    Drive,
    adiabaticity,
    coth_half,
)
from .errors import SecondLawViolationError
from .protocols import FrequencyProtocol, ProtocolKind
from .quadrature import DEFAULT_NODES
from .sta_cost import StrokeContext, avg_work_cost

__all__ = [
    "Accounting",
    "CycleConfig",
    "CycleResult",
    "stroke_works",
    "heat_hot",
    "heat_cold",
    "efficiency_exact",
    "power_exact",
    "entropy_production",
    "driving_costs",
    "nonadiabatic_factors",
    "sta_efficiency",
    "sta_power",
    "time_averaged_performance",
    "evaluate_cycle",
]


class Accounting(str, Enum):
    ADIABATIC = "adiabatic"
    NONADIABATIC = "nonadiabatic"
    STA = "sta"
    TIME_AVERAGED = "time_averaged"


@dataclass(frozen=True)
class CycleConfig:
    """Cycle parameters. beta1 is the cold bath (coupled at omega1), beta2
    the hot bath (coupled at omega2); an engine needs beta1 > beta2 and
    omega1 < omega2."""

    omega1: float
    omega2: float
    beta1: float
    beta2: float
    tau1: float
    tau3: float
    kind: ProtocolKind = ProtocolKind.POLY5

    def __post_init__(self):
        for name in ("omega1", "omega2", "beta1", "beta2", "tau1", "tau3"):
            v = float(getattr(self, name))
            if not math.isfinite(v) or v <= 0.0:
                raise ValueError(f"{name} must be finite and positive, got {v!r}")
            object.__setattr__(self, name, v)
        object.__setattr__(self, "kind", ProtocolKind(self.kind))
        if not self.omega1 < self.omega2:
            raise ValueError("need omega1 < omega2 (compression raises the frequency)")
        if not self.beta1 > self.beta2:
            raise ValueError("need beta1 > beta2 (cold bath colder than hot bath)")

    @property
    def x(self) -> float:
        """Frequency ratio omega1/omega2, in (0, 1)."""
        return self.omega1 / self.omega2

    @property
    def tau_cycle(self) -> float:
        """Driving time per cycle; thermalization strokes are not clocked."""
        return self.tau1 + self.tau3

    @property
    def eta_carnot(self) -> float:
        return 1.0 - self.beta2 / self.beta1

    @property
    def cold_energy(self) -> float:
        """<H>_A: thermal energy at (beta1, omega1), start of compression."""
        return 0.5 * self.omega1 * coth_half(self.beta1, self.omega1)

    @property
    def hot_energy(self) -> float:
        """<H>_C: thermal energy at (beta2, omega2), start of expansion."""
        return 0.5 * self.omega2 * coth_half(self.beta2, self.omega2)

    def compression_protocol(self) -> FrequencyProtocol:
        return FrequencyProtocol(self.kind, self.omega1, self.omega2, self.tau1)

    def expansion_protocol(self) -> FrequencyProtocol:
        return FrequencyProtocol(self.kind, self.omega2, self.omega1, self.tau3)


def stroke_works(config: CycleConfig, q1: float, q3: float) -> tuple[float, float]:
    """(W1, W3) for given adiabaticity factors of the two unitary strokes."""
    w1 = config.cold_energy * (q1 / config.x - 1.0)
    w3 = (config.x * q3 - 1.0) * config.hot_energy
    return w1, w3


def heat_hot(config: CycleConfig, q1: float) -> float:
    """Q2: heat absorbed from the hot bath while thermalizing B -> C."""
    return config.hot_energy - q1 * config.cold_energy / config.x


def heat_cold(config: CycleConfig, q3: float) -> float:
    """Q4: heat absorbed from the cold bath while thermalizing D -> A,
    computed from the state energies <H>_A - x Q*3 <H>_C (so the first law
    around the cycle is a checkable identity, not a definition)."""
    return config.cold_energy - config.x * q3 * config.hot_energy


def efficiency_exact(config: CycleConfig, q1: float, q3: float) -> float:
    """Engine efficiency -(W1+W3)/Q2 in its factored closed form."""
    x = config.x
    num = x * (x * q3 * config.hot_energy - config.cold_energy)
    den = x * config.hot_energy - q1 * config.cold_energy
    return 1.0 - num / den


def power_exact(config: CycleConfig, q1: float, q3: float) -> float:
    """Output power -(W1+W3)/tau_cycle."""
    w1, w3 = stroke_works(config, q1, q3)
    return -(w1 + w3) / config.tau_cycle


def entropy_production(
    config: CycleConfig, q2: float, q4: float, tol: float = 1e-9
) -> float:
    """Total entropy production per cycle, -beta2 Q2 - beta1 Q4.

    Raises SecondLawViolationError if negative beyond tolerance."""
    ds = -config.beta2 * q2 - config.beta1 * q4
    if ds < -tol:
        raise SecondLawViolationError(
            f"entropy production {ds:.6g} < 0; inconsistent heats (q2={q2:.6g}, "
            f"q4={q4:.6g})"
        )
    return ds


def nonadiabatic_factors(
    config: CycleConfig,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
) -> tuple[float, float]:
    """(Q*1, Q*3) of the bare drive at the end of each unitary stroke."""
    q1 = adiabaticity(
        config.compression_protocol(), config.beta1, config.tau1,
        drive=Drive.BARE, rtol=rtol, atol=atol,
    )
    q3 = adiabaticity(
        config.expansion_protocol(), config.beta2, config.tau3,
        drive=Drive.BARE, rtol=rtol, atol=atol,
    )
    return q1, q3


def driving_costs(
    config: CycleConfig, nodes: int = DEFAULT_NODES
) -> tuple[float, float]:
    """Time-averaged counterdiabatic work cost of each unitary stroke."""
    c1 = avg_work_cost(
        StrokeContext(config.compression_protocol(), config.beta1), nodes=nodes
    )
    c3 = avg_work_cost(
        StrokeContext(config.expansion_protocol(), config.beta2), nodes=nodes
    )
    return c1, c3


def sta_efficiency(config: CycleConfig, nodes: int = DEFAULT_NODES) -> float:
    """Efficiency with the driving cost charged to the heat input:
    -(W1+W3)_AD / (Q2_AD + <dW1>_tau + <dW3>_tau)."""
    w1, w3 = stroke_works(config, 1.0, 1.0)
    q2 = heat_hot(config, 1.0)
    c1, c3 = driving_costs(config, nodes=nodes)
    return -(w1 + w3) / (q2 + c1 + c3)


def sta_power(config: CycleConfig, nodes: int = DEFAULT_NODES) -> float:
    """Output power with the driving cost subtracted:
    [-(W1+W3)_AD - <dW1>_tau - <dW3>_tau] / tau_cycle."""
    w1, w3 = stroke_works(config, 1.0, 1.0)
    c1, c3 = driving_costs(config, nodes=nodes)
    return (-(w1 + w3) - c1 - c3) / config.tau_cycle


def time_averaged_performance(
    config: CycleConfig, nodes: int = DEFAULT_NODES
) -> tuple[float, float]:
    """(eta, P) with each stroke work replaced by its driving-time average,
    W_i + <dW_i>_tau, against the bare heat input Q2_AD."""
    w1, w3 = stroke_works(config, 1.0, 1.0)
    q2 = heat_hot(config, 1.0)
    c1, c3 = driving_costs(config, nodes=nodes)
    w1a = w1 + c1
    w3a = w3 + c3
    eta = -(w1a + w3a) / q2
    power = -(w1a + w3a) / config.tau_cycle
    return eta, power


@dataclass(frozen=True)
class CycleResult:
    """One cycle evaluation under a given accounting convention."""

    accounting: Accounting
    q1_star: float
    q3_star: float
    w1: float
    w3: float
    q2: float
    q4: float
    cost1: float
    cost3: float
    eta: float
    power: float
    ds_tot: float
    is_engine: bool

    @property
    def work_output(self) -> float:
        return -(self.w1 + self.w3) - self.cost1 - self.cost3


def evaluate_cycle(
    config: CycleConfig,
    accounting: Accounting = Accounting.ADIABATIC,
    nodes: int = DEFAULT_NODES,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
) -> CycleResult:
    """Evaluate the full cycle under one accounting convention."""
    accounting = Accounting(accounting)
    if accounting is Accounting.NONADIABATIC:
        q1, q3 = nonadiabatic_factors(config, rtol=rtol, atol=atol)
        c1 = c3 = 0.0
        w1, w3 = stroke_works(config, q1, q3)
        q2 = heat_hot(config, q1)
        q4 = heat_cold(config, q3)
        eta = efficiency_exact(config, q1, q3)
        power = power_exact(config, q1, q3)
    else:
        q1 = q3 = 1.0
        w1, w3 = stroke_works(config, 1.0, 1.0)
        q2 = heat_hot(config, 1.0)
        q4 = heat_cold(config, 1.0)
        if accounting is Accounting.ADIABATIC:
            c1 = c3 = 0.0
            eta = efficiency_exact(config, 1.0, 1.0)
            power = power_exact(config, 1.0, 1.0)
        else:
            c1, c3 = driving_costs(config, nodes=nodes)
            if accounting is Accounting.STA:
                eta = -(w1 + w3) / (q2 + c1 + c3)
                power = (-(w1 + w3) - c1 - c3) / config.tau_cycle
            else:  # TIME_AVERAGED
                w1 = w1 + c1
                w3 = w3 + c3
                c1 = c3 = 0.0
                q4 = -(w1 + w3) - q2  # accounting closure
                eta = -(w1 + w3) / q2
                power = -(w1 + w3) / config.tau_cycle
    ds = entropy_production(config, q2, q4)
    is_engine = (-(w1 + w3) - c1 - c3) > 0.0 and (q2 + c1 + c3) > 0.0
    return CycleResult(
        accounting=accounting,
        q1_star=q1,
        q3_star=q3,
        w1=w1,
        w3=w3,
        q2=q2,
        q4=q4,
        cost1=c1,
        cost3=c3,
        eta=eta,
        power=power,
        ds_tot=ds,
        is_engine=is_engine,
    )
