"""Frequency protocols for the driven harmonic trap.

A protocol is the control history omega(t) on t in [0, tau] taking the trap
from omega_i to omega_f. Three ramp families satisfy the shortcut boundary
conditions needed for counterdiabatic driving to switch off at the ends
(value and slope match; the fifth-order polynomial also matches curvature),
plus a linear ramp and a constant control for baselines.

Units: hbar = m = 1 throughout the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np

from . import kernels

__all__ = [
    "ProtocolKind",
    "FrequencyProtocol",
    "BoundaryReport",
    "ValidityReport",
    "check_sta_boundary",
    "check_cd_validity",
]


class ProtocolKind(str, Enum):
    """Ramp families. The string values are the CLI / config spellings."""

    POLY5 = "poly5"
    POLY3 = "poly3"
    COSINE = "cosine"
    LINEAR = "linear"
    CONSTANT = "constant"

    @property
    def kernel_code(self) -> int:
        return _KERNEL_CODES[self]

    @classmethod
    def shortcut_kinds(cls) -> tuple["ProtocolKind", ...]:
        """Kinds whose boundary conditions make CD driving vanish at t=0, tau."""
        return (cls.POLY5, cls.POLY3, cls.COSINE)


_KERNEL_CODES = {
    ProtocolKind.CONSTANT: kernels.KIND_CONSTANT,
    ProtocolKind.POLY5: kernels.KIND_POLY5,
    ProtocolKind.POLY3: kernels.KIND_POLY3,
    ProtocolKind.COSINE: kernels.KIND_COSINE,
    ProtocolKind.LINEAR: kernels.KIND_LINEAR,
}

# Slack allowed when checking t against [0, tau], relative to tau.
_DOMAIN_TOL = 1e-12


@dataclass(frozen=True)
class FrequencyProtocol:
    """One ramp omega(t), t in [0, tau], from omega_i to omega_f."""

    kind: ProtocolKind
    omega_i: float
    omega_f: float
    tau: float

    def __post_init__(self):
        object.__setattr__(self, "kind", ProtocolKind(self.kind))
        for name in ("omega_i", "omega_f", "tau"):
            v = float(getattr(self, name))
            if not math.isfinite(v) or v <= 0.0:
                raise ValueError(f"{name} must be finite and positive, got {v!r}")
            object.__setattr__(self, name, v)
        if self.kind is ProtocolKind.CONSTANT and self.omega_f != self.omega_i:
            raise ValueError("constant protocol requires omega_f == omega_i")

    @classmethod
    def constant(cls, omega: float, tau: float) -> "FrequencyProtocol":
        return cls(ProtocolKind.CONSTANT, omega, omega, tau)

    # -- evaluation ---------------------------------------------------------

    def _check_domain(self, t):
        tol = _DOMAIN_TOL * self.tau
        tmin = float(np.min(t))
        tmax = float(np.max(t))
        if tmin < -tol or tmax > self.tau + tol:
            raise ValueError(
                f"time outside protocol domain [0, {self.tau}]: [{tmin}, {tmax}]"
            )

    def eval(self, t: float) -> tuple[float, float, float]:
        """(omega, omegadot, omegaddot) at scalar time t."""
        self._check_domain(t)
        return kernels.ramp_eval(
            self.kind.kernel_code, self.omega_i, self.omega_f, self.tau, float(t)
        )

    def _shape(self, s: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Vectorized (omega, omegadot, omegaddot) as functions of s = t/tau."""
        wi, wf, tau = self.omega_i, self.omega_f, self.tau
        d = wf - wi
        kind = self.kind
        if kind is ProtocolKind.CONSTANT:
            z = np.zeros_like(s)
            return np.full_like(s, wi), z, z.copy()
        if kind is ProtocolKind.POLY5:
            f = s**3 * (10.0 - 15.0 * s + 6.0 * s**2)
            fp = 30.0 * s**2 * (1.0 - s) ** 2
            fpp = 60.0 * s - 180.0 * s**2 + 120.0 * s**3
            return wi + d * f, d * fp / tau, d * fpp / tau**2
        if kind is ProtocolKind.POLY3:
            f = s**2 * (3.0 - 2.0 * s)
            fp = 6.0 * s * (1.0 - s)
            fpp = 6.0 - 12.0 * s
            return wi + d * f, d * fp / tau, d * fpp / tau**2
        if kind is ProtocolKind.COSINE:
            a2 = (wf / wi) ** 2
            u = 0.5 * ((a2 + 1.0) - (a2 - 1.0) * np.cos(np.pi * s))
            up = 0.5 * (a2 - 1.0) * np.pi * np.sin(np.pi * s)
            upp = 0.5 * (a2 - 1.0) * np.pi**2 * np.cos(np.pi * s)
            r = np.sqrt(u)
            w = wi * r
            wd = wi * up / (2.0 * r) / tau
            wdd = wi * (upp / (2.0 * r) - up**2 / (4.0 * u * r)) / tau**2
            return w, wd, wdd
        # linear
        return wi + d * s, np.full_like(s, d / tau), np.zeros_like(s)

    def eval_many(self, ts) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Vectorized eval over an array of times."""
        ts = np.asarray(ts, dtype=np.float64)
        self._check_domain(ts)
        return self._shape(ts / self.tau)

    def omega(self, t):
        if np.isscalar(t):
            return self.eval(t)[0]
        return self.eval_many(t)[0]

    def omega_dot(self, t):
        if np.isscalar(t):
            return self.eval(t)[1]
        return self.eval_many(t)[1]

    def omega_ddot(self, t):
        if np.isscalar(t):
            return self.eval(t)[2]
        return self.eval_many(t)[2]


class BoundaryReport(NamedTuple):
    """Per-condition shortcut boundary flags at t = 0 and t = tau."""

    value_start: bool
    value_end: bool
    slope_start: bool
    slope_end: bool
    curvature_start: bool
    curvature_end: bool

    @property
    def shortcut_ok(self) -> bool:
        """Value and slope conditions, the ones CD switch-off needs."""
        return (
            self.value_start and self.value_end
            and self.slope_start and self.slope_end
        )

    @property
    def all_ok(self) -> bool:
        return self.shortcut_ok and self.curvature_start and self.curvature_end


def check_sta_boundary(protocol: FrequencyProtocol, tol: float = 1e-12) -> BoundaryReport:
    """Check omega(0)=omega_i, omega(tau)=omega_f and vanishing endpoint
    derivatives, each against a scale-aware tolerance."""
    w0, wd0, wdd0 = protocol.eval(0.0)
    w1, wd1, wdd1 = protocol.eval(protocol.tau)
    scale_w = max(abs(protocol.omega_i), abs(protocol.omega_f))
    delta = abs(protocol.omega_f - protocol.omega_i)
    scale_d = max(delta, scale_w) / protocol.tau
    scale_dd = max(delta, scale_w) / protocol.tau**2
    return BoundaryReport(
        value_start=abs(w0 - protocol.omega_i) <= tol * scale_w,
        value_end=abs(w1 - protocol.omega_f) <= tol * scale_w,
        slope_start=abs(wd0) <= tol * scale_d,
        slope_end=abs(wd1) <= tol * scale_d,
        curvature_start=abs(wdd0) <= tol * scale_dd,
        curvature_end=abs(wdd1) <= tol * scale_dd,
    )


class ValidityReport(NamedTuple):
    """Counterdiabatic validity over the whole ramp."""

    valid: bool
    min_margin: float


def validity_margin(protocol: FrequencyProtocol, ts) -> np.ndarray:
    """Margin g(t) = 1 - omegadot^2 / (4 omega^4) at the given times.

    The effective frequency of the counterdiabatic Hamiltonian is
    omega(t) sqrt(g(t)); g must stay positive or the trap inverts.
    """
    w, wd, _ = protocol.eval_many(ts)
    return 1.0 - wd**2 / (4.0 * w**4)


def check_cd_validity(protocol: FrequencyProtocol, n_samples: int = 1001) -> ValidityReport:
    """Scan the validity margin on a uniform grid over [0, tau]."""
    if n_samples < 3:
        raise ValueError("n_samples must be at least 3")
    ts = np.linspace(0.0, protocol.tau, n_samples)
    margin = validity_margin(protocol, ts)
    min_margin = float(np.min(margin))
    return ValidityReport(valid=min_margin > 0.0, min_margin=min_margin)
