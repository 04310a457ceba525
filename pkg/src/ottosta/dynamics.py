"""Gaussian-state dynamics of the driven harmonic trap.

The working medium stays Gaussian under any quadratic Hamiltonian, so the
full quantum evolution reduces to five real ODEs for the first moments
(mx, mp) and the symmetrized covariances (Sxx, Sxp, Spp). Two drives are
supported:

* ``Drive.BARE``: H0 = p^2/2 + omega(t)^2 x^2 / 2;
* ``Drive.CD``: H0 plus the counterdiabatic term -(omegadot/4 omega)(xp+px),
  which transports eigenstates of H0 along the instantaneous basis exactly.

Three independent routes to the adiabaticity factor Q* (the ratio of the
actual mean energy to the adiabatically transported one) are provided:
covariance propagation, the classical solution-pair recursion (which is
manifestly independent of temperature), and, for CD accounting, a closed
form built from the validity margin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import kernels
from .errors import NumericsError, TrapInversionError
from .protocols import FrequencyProtocol, validity_margin

__all__ = [
    "Drive",
    "GaussianState",
    "thermal_state",
    "coth_half",
    "mean_energy",
    "propagate",
    "propagate_path",
    "classical_pair_path",
    "adiabaticity",
    "adiabaticity_path",
    "adiabaticity_pair",
    "adiabaticity_pair_path",
    "sudden_quench_q",
    "q_cd",
    "q_cd_grid",
    "DEFAULT_RTOL",
    "DEFAULT_ATOL",
]

DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-12
_MAX_STEPS = 1_000_000

# Minimum symplectic eigenvalue squared is 1/4 (vacuum), with slack for
# accumulated integrator roundoff.
_DET_FLOOR = 0.25 - 1e-9


class Drive(str, Enum):
    BARE = "bare"
    CD = "cd"

    @property
    def system_code(self) -> int:
        return kernels.SYS_COV_CD if self is Drive.CD else kernels.SYS_COV_BARE


@dataclass(frozen=True)
class GaussianState:
    """First moments (2,) and symmetrized covariance matrix (2, 2) in (x, p)."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.array(self.mean, dtype=np.float64).reshape(2)
        cov = np.array(self.cov, dtype=np.float64).reshape(2, 2)
        asym = abs(cov[0, 1] - cov[1, 0])
        scale = max(abs(cov[0, 0]), abs(cov[1, 1]), 1.0)
        if asym > 1e-10 * scale:
            raise ValueError(f"covariance matrix not symmetric: asymmetry {asym}")
        sxp = 0.5 * (cov[0, 1] + cov[1, 0])
        cov[0, 1] = cov[1, 0] = sxp
        if cov[0, 0] <= 0.0 or cov[1, 1] <= 0.0:
            raise ValueError("diagonal covariances must be positive")
        det = cov[0, 0] * cov[1, 1] - sxp * sxp
        if det < _DET_FLOOR:
            raise ValueError(
                f"covariance determinant {det} below the uncertainty floor 1/4"
            )
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def det_cov(self) -> float:
        return float(self.cov[0, 0] * self.cov[1, 1] - self.cov[0, 1] ** 2)

    def _vector(self) -> np.ndarray:
        return np.array(
            [self.mean[0], self.mean[1], self.cov[0, 0], self.cov[0, 1], self.cov[1, 1]],
            dtype=np.float64,
        )

    @staticmethod
    def _from_vector(y: np.ndarray) -> "GaussianState":
        return GaussianState(
            mean=np.array([y[0], y[1]]),
            cov=np.array([[y[2], y[3]], [y[3], y[4]]]),
        )


def coth_half(beta: float, omega: float) -> float:
    """coth(beta * omega / 2), the thermal width factor; 1.0 at beta = inf."""
    if omega <= 0.0:
        raise ValueError(f"omega must be positive, got {omega}")
    if beta <= 0.0:
        raise ValueError(f"beta must be positive, got {beta}")
    z = 0.5 * beta * omega
    if z >= 20.0 or math.isinf(z):
        return 1.0
    return 1.0 / math.tanh(z)


def thermal_state(beta: float, omega: float) -> GaussianState:
    """Thermal (Gibbs) state of the trap at frequency omega; beta=inf gives
    the ground state."""
    c = coth_half(beta, omega)
    return GaussianState(
        mean=np.zeros(2),
        cov=np.array([[c / (2.0 * omega), 0.0], [0.0, 0.5 * omega * c]]),
    )


def mean_energy(state: GaussianState, omega: float) -> float:
    """<H0> at trap frequency omega: quadrature variances plus mean motion."""
    w2 = omega * omega
    quad = 0.5 * (state.cov[1, 1] + w2 * state.cov[0, 0])
    drift = 0.5 * (state.mean[1] ** 2 + w2 * state.mean[0] ** 2)
    return float(quad + drift)


def _require_cd_valid(protocol: FrequencyProtocol, t_end: float, n_samples: int = 1001):
    ts = np.linspace(0.0, t_end, n_samples)
    margin = validity_margin(protocol, ts)
    i = int(np.argmin(margin))
    if margin[i] <= 0.0:
        raise TrapInversionError(
            f"counterdiabatic validity margin {margin[i]:.6g} <= 0 at "
            f"t = {ts[i]:.6g} (protocol {protocol.kind.value}, tau = {protocol.tau:g}); "
            "the effective trap inverts, shorten the stroke less aggressively"
        )


_STATUS_MESSAGES = {
    1: "step budget exhausted",
    2: "step size underflow",
}


def _raise_status(status: int):
    if status != 0:
        raise NumericsError(
            f"adaptive RK45 failed: {_STATUS_MESSAGES.get(status, f'status {status}')}"
        )


def propagate(
    state: GaussianState,
    protocol: FrequencyProtocol,
    t: float,
    drive: Drive = Drive.BARE,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
) -> GaussianState:
    """Evolve a Gaussian state from time 0 to time t under the protocol.

    CD driving requires the validity margin to stay positive on [0, t].
    """
    drive = Drive(drive)
    t = float(t)
    if t < 0.0 or t > protocol.tau * (1.0 + 1e-12):
        raise ValueError(f"t = {t} outside [0, tau = {protocol.tau}]")
    if drive is Drive.CD:
        _require_cd_valid(protocol, t)
    y = state._vector()
    status = kernels.integrate(
        drive.system_code,
        protocol.kind.kernel_code,
        protocol.omega_i,
        protocol.omega_f,
        protocol.tau,
        0.0,
        t,
        y,
        rtol,
        atol,
        _MAX_STEPS,
    )
    _raise_status(status)
    return GaussianState._from_vector(y)


def propagate_path(
    state: GaussianState,
    protocol: FrequencyProtocol,
    ts,
    drive: Drive = Drive.BARE,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
) -> list[GaussianState]:
    """States at each ascending checkpoint in ``ts`` (single forward sweep)."""
    drive = Drive(drive)
    ts = np.asarray(ts, dtype=np.float64)
    if ts.ndim != 1 or ts.size == 0:
        raise ValueError("ts must be a non-empty 1-d array of times")
    if np.any(np.diff(ts) < 0.0) or ts[0] < 0.0:
        raise ValueError("ts must be ascending and non-negative")
    if ts[-1] > protocol.tau * (1.0 + 1e-12):
        raise ValueError(f"ts exceeds tau = {protocol.tau}")
    if drive is Drive.CD:
        _require_cd_valid(protocol, float(ts[-1]))
    y = state._vector()
    out = np.empty((ts.size, 5), dtype=np.float64)
    status = kernels.integrate_path(
        drive.system_code,
        protocol.kind.kernel_code,
        protocol.omega_i,
        protocol.omega_f,
        protocol.tau,
        ts,
        y,
        out,
        rtol,
        atol,
        _MAX_STEPS,
    )
    _raise_status(status)
    return [GaussianState._from_vector(row) for row in out]


# -- classical solution pair (temperature-independent route) ----------------


def classical_pair_path(
    protocol: FrequencyProtocol,
    ts,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
) -> np.ndarray:
    """Rows (X, Xdot, Y, Ydot) at each checkpoint for the two classical
    solutions of xddot + omega(t)^2 x = 0 with X(0)=0, Xdot(0)=1 and
    Y(0)=1, Ydot(0)=0. Their Wronskian X Ydot - Y Xdot stays -1."""
    ts = np.asarray(ts, dtype=np.float64)
    if ts.ndim != 1 or ts.size == 0:
        raise ValueError("ts must be a non-empty 1-d array of times")
    if np.any(np.diff(ts) < 0.0) or ts[0] < 0.0:
        raise ValueError("ts must be ascending and non-negative")
    y = np.array([0.0, 1.0, 1.0, 0.0], dtype=np.float64)
    out = np.empty((ts.size, 4), dtype=np.float64)
    status = kernels.integrate_path(
        kernels.SYS_PAIR,
        protocol.kind.kernel_code,
        protocol.omega_i,
        protocol.omega_f,
        protocol.tau,
        ts,
        y,
        out,
        rtol,
        atol,
        _MAX_STEPS,
    )
    _raise_status(status)
    return out


def _pair_q(protocol: FrequencyProtocol, rows: np.ndarray, ts: np.ndarray) -> np.ndarray:
    w_t = protocol.omega(ts)
    w_t = np.atleast_1d(np.asarray(w_t, dtype=np.float64))
    wi = protocol.omega_i
    x, xd, yv, yd = rows[:, 0], rows[:, 1], rows[:, 2], rows[:, 3]
    return (
        wi * wi * (w_t**2 * x**2 + xd**2) + (w_t**2 * yv**2 + yd**2)
    ) / (2.0 * wi * w_t)


def adiabaticity_pair(
    protocol: FrequencyProtocol,
    t: float,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
) -> float:
    """Q*(t) from the classical pair; independent of the initial thermal state."""
    ts = np.array([float(t)])
    rows = classical_pair_path(protocol, ts, rtol=rtol, atol=atol)
    return float(_pair_q(protocol, rows, ts)[0])


def adiabaticity_pair_path(
    protocol: FrequencyProtocol,
    ts,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
) -> np.ndarray:
    ts = np.asarray(ts, dtype=np.float64)
    rows = classical_pair_path(protocol, ts, rtol=rtol, atol=atol)
    return _pair_q(protocol, rows, ts)


# -- energy-ratio route ------------------------------------------------------


def adiabaticity(
    protocol: FrequencyProtocol,
    beta: float,
    t: float,
    drive: Drive = Drive.BARE,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
) -> float:
    """Q*(t) = <H0(omega_t)> / [(omega_t/omega_i) <H0(omega_i)>_thermal].

    For a thermal start this equals the classical-pair value under the bare
    drive for every beta; under the CD drive it is 1 at all times.
    """
    return float(
        adiabaticity_path(protocol, beta, [t], drive=drive, rtol=rtol, atol=atol)[0]
    )


def adiabaticity_path(
    protocol: FrequencyProtocol,
    beta: float,
    ts,
    drive: Drive = Drive.BARE,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
) -> np.ndarray:
    ts = np.asarray(ts, dtype=np.float64)
    state0 = thermal_state(beta, protocol.omega_i)
    e0 = mean_energy(state0, protocol.omega_i)
    states = propagate_path(state0, protocol, ts, drive=drive, rtol=rtol, atol=atol)
    w_t = np.atleast_1d(np.asarray(protocol.omega(ts), dtype=np.float64))
    energies = np.array(
        [mean_energy(st, w) for st, w in zip(states, w_t)], dtype=np.float64
    )
    return energies / (w_t / protocol.omega_i * e0)


def sudden_quench_q(omega_i: float, omega_f: float) -> float:
    """Adiabaticity factor of an instantaneous frequency jump:
    (omega_i^2 + omega_f^2) / (2 omega_i omega_f). The tau -> 0 limit of any
    ramp's bare-drive Q*(tau)."""
    if omega_i <= 0.0 or omega_f <= 0.0:
        raise ValueError("frequencies must be positive")
    return (omega_i * omega_i + omega_f * omega_f) / (2.0 * omega_i * omega_f)


# -- closed-form CD accounting ------------------------------------------------


def q_cd_grid(protocol: FrequencyProtocol, ts) -> np.ndarray:
    """Closed-form Q*_CD(t) = 1 / sqrt(1 - omegadot^2/(4 omega^4)).

    This is the accounting factor behind the driving-cost measures: it maps
    the instantaneous counterdiabatic level structure onto bare-trap
    energies. It is not the energy ratio of the propagated state, which CD
    driving pins to 1. Raises TrapInversionError where the margin is not
    positive.
    """
    ts = np.asarray(ts, dtype=np.float64)
    margin = validity_margin(protocol, np.atleast_1d(ts))
    i = int(np.argmin(margin))
    if margin[i] <= 0.0:
        t_bad = float(np.atleast_1d(ts)[i])
        raise TrapInversionError(
            f"counterdiabatic validity margin {margin[i]:.6g} <= 0 at t = {t_bad:.6g} "
            f"(protocol {protocol.kind.value}, tau = {protocol.tau:g})"
        )
    return 1.0 / np.sqrt(margin)


def q_cd(protocol: FrequencyProtocol, t: float) -> float:
    """Scalar closed-form Q*_CD(t); see q_cd_grid."""
    return float(q_cd_grid(protocol, np.array([float(t)]))[0])
