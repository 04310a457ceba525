"""Compiled numerical kernels.

Everything in this module is plain scalar/array code so it runs identically
under two backends:

* numba ``@njit(cache=True, nogil=True)`` (default when numba imports),
* pure Python/NumPy, selected by setting ``OTTOSTA_NO_NUMBA=1`` in the
  environment before first import (or when numba is unavailable).

``benchmarks/compare_backends.py`` times the two paths on the same workload.
The kernels release the GIL under numba, which is what makes thread-based
CLI parallelism effective.

Contents: closed-form frequency-ramp evaluation (value and first two time
derivatives) and an adaptive Dormand-Prince RK45 integrator for the two
small ODE systems used by :mod:`ottosta.dynamics`:

* Gaussian first and second moments, state ``y = (mx, mp, Sxx, Sxp, Spp)``,
  with an optional counterdiabatic squeezing rate;
* the classical solution pair ``y = (X, Xdot, Y, Ydot)`` that feeds the
  beta-independent adiabaticity factor.

Status codes returned by the integrators: 0 ok, 1 step budget exhausted,
2 step size underflow.
"""

import math
import os

import numpy as np

__all__ = [
    "NUMBA_ENABLED",
    "KIND_CONSTANT",
    "KIND_POLY5",
    "KIND_POLY3",
    "KIND_COSINE",
    "KIND_LINEAR",
    "SYS_COV_BARE",
    "SYS_COV_CD",
    "SYS_PAIR",
    "ramp_eval",
    "integrate",
    "integrate_path",
]


def _env_flag(name):
    return os.environ.get(name, "").strip().lower() in {"1", "true", "yes", "on"}


NUMBA_ENABLED = False
if not _env_flag("OTTOSTA_NO_NUMBA"):
    try:
        from numba import njit as _njit

        NUMBA_ENABLED = True
    except ImportError:  # pragma: no cover - depends on the environment
        NUMBA_ENABLED = False

if not NUMBA_ENABLED:

    def _njit(*args, **kwargs):
        # Identity decorator: keeps the fallback path byte-for-byte the same
        # code object semantics as the jitted one.
        if args and callable(args[0]):
            return args[0]

        def deco(fn):
            return fn

        return deco


# Ramp kind codes (stable, also used by the CSV metadata and the schema).
KIND_CONSTANT = 0
KIND_POLY5 = 1
KIND_POLY3 = 2
KIND_COSINE = 3
KIND_LINEAR = 4

# ODE system codes.
SYS_COV_BARE = 0
SYS_COV_CD = 1
SYS_PAIR = 2


@_njit(cache=True, nogil=True)
def ramp_eval(kind, omega_i, omega_f, tau, t):
    """Frequency ramp at time ``t``: returns (omega, omegadot, omegaddot).

    ``kind`` is one of the KIND_* codes. The polynomial ramps interpolate
    omega itself; the cosine ramp interpolates omega squared, which is why
    its curvature does not vanish at the endpoints.
    """
    if kind == KIND_CONSTANT:
        return omega_i, 0.0, 0.0
    s = t / tau
    d = omega_f - omega_i
    if kind == KIND_POLY5:
        f = s * s * s * (10.0 + s * (-15.0 + 6.0 * s))
        fp = 30.0 * s * s * (1.0 - s) * (1.0 - s)
        fpp = s * (60.0 + s * (-180.0 + 120.0 * s))
        return omega_i + d * f, d * fp / tau, d * fpp / (tau * tau)
    if kind == KIND_POLY3:
        f = s * s * (3.0 - 2.0 * s)
        fp = 6.0 * s * (1.0 - s)
        fpp = 6.0 - 12.0 * s
        return omega_i + d * f, d * fp / tau, d * fpp / (tau * tau)
    if kind == KIND_COSINE:
        a2 = (omega_f / omega_i) * (omega_f / omega_i)
        u = 0.5 * ((a2 + 1.0) - (a2 - 1.0) * math.cos(math.pi * s))
        up = 0.5 * (a2 - 1.0) * math.pi * math.sin(math.pi * s)
        upp = 0.5 * (a2 - 1.0) * math.pi * math.pi * math.cos(math.pi * s)
        r = math.sqrt(u)
        w = omega_i * r
        wd = omega_i * up / (2.0 * r) / tau
        wdd = omega_i * (upp / (2.0 * r) - up * up / (4.0 * u * r)) / (tau * tau)
        return w, wd, wdd
    # linear
    return omega_i + d * s, d / tau, 0.0


@_njit(cache=True, nogil=True)
def _rhs(system, kind, omega_i, omega_f, tau, t, y, dy):
    w, wd, _ = ramp_eval(kind, omega_i, omega_f, tau, t)
    w2 = w * w
    if system == SYS_PAIR:
        # Two classical solutions of xddot + omega(t)^2 x = 0.
        dy[0] = y[1]
        dy[1] = -w2 * y[0]
        dy[2] = y[3]
        dy[3] = -w2 * y[2]
    else:
        # Gaussian moments under H = p^2/2 + w^2 x^2/2 + (g/2)(xp + px)
        # with g = 0 (bare) or g = -wd/(2w) (counterdiabatic).
        g = 0.0
        if system == SYS_COV_CD:
            g = -wd / (2.0 * w)
        dy[0] = g * y[0] + y[1]
        dy[1] = -w2 * y[0] - g * y[1]
        dy[2] = 2.0 * (g * y[2] + y[3])
        dy[3] = y[4] - w2 * y[2]
        dy[4] = -2.0 * (w2 * y[3] + g * y[4])


@_njit(cache=True, nogil=True)
def integrate(system, kind, omega_i, omega_f, tau, t0, t1, y, rtol, atol, max_steps):
    """Advance ``y`` in place from t0 to t1 with adaptive RK45.

    Dormand-Prince 5(4) pair with the first-same-as-last stage reuse and a
    mixed absolute/relative error norm. Returns a status code (0 ok).
    """
    n = y.shape[0]
    k1 = np.empty(n)
    k2 = np.empty(n)
    k3 = np.empty(n)
    k4 = np.empty(n)
    k5 = np.empty(n)
    k6 = np.empty(n)
    k7 = np.empty(n)
    yt = np.empty(n)
    y5 = np.empty(n)

    span = t1 - t0
    if span == 0.0:
        return 0
    t = t0
    h = span / 100.0
    hmin = span * 1e-15

    _rhs(system, kind, omega_i, omega_f, tau, t, y, k1)
    steps = 0
    while t < t1:
        if h > t1 - t:
            h = t1 - t
        for i in range(n):
            yt[i] = y[i] + h * (0.2 * k1[i])
        _rhs(system, kind, omega_i, omega_f, tau, t + 0.2 * h, yt, k2)
        for i in range(n):
            yt[i] = y[i] + h * (0.075 * k1[i] + 0.225 * k2[i])
        _rhs(system, kind, omega_i, omega_f, tau, t + 0.3 * h, yt, k3)
        for i in range(n):
            yt[i] = y[i] + h * (
                (44.0 / 45.0) * k1[i]
                + (-56.0 / 15.0) * k2[i]
                + (32.0 / 9.0) * k3[i]
            )
        _rhs(system, kind, omega_i, omega_f, tau, t + 0.8 * h, yt, k4)
        for i in range(n):
            yt[i] = y[i] + h * (
                (19372.0 / 6561.0) * k1[i]
                + (-25360.0 / 2187.0) * k2[i]
                + (64448.0 / 6561.0) * k3[i]
                + (-212.0 / 729.0) * k4[i]
            )
        _rhs(system, kind, omega_i, omega_f, tau, t + (8.0 / 9.0) * h, yt, k5)
        for i in range(n):
            yt[i] = y[i] + h * (
                (9017.0 / 3168.0) * k1[i]
                + (-355.0 / 33.0) * k2[i]
                + (46732.0 / 5247.0) * k3[i]
                + (49.0 / 176.0) * k4[i]
                + (-5103.0 / 18656.0) * k5[i]
            )
        _rhs(system, kind, omega_i, omega_f, tau, t + h, yt, k6)
        for i in range(n):
            y5[i] = y[i] + h * (
                (35.0 / 384.0) * k1[i]
                + (500.0 / 1113.0) * k3[i]
                + (125.0 / 192.0) * k4[i]
                + (-2187.0 / 6784.0) * k5[i]
                + (11.0 / 84.0) * k6[i]
            )
        _rhs(system, kind, omega_i, omega_f, tau, t + h, y5, k7)

        errn = 0.0
        for i in range(n):
            e = h * (
                (71.0 / 57600.0) * k1[i]
                + (-71.0 / 16695.0) * k3[i]
                + (71.0 / 1920.0) * k4[i]
                + (-17253.0 / 339200.0) * k5[i]
                + (22.0 / 525.0) * k6[i]
                + (-1.0 / 40.0) * k7[i]
            )
            ay = abs(y[i])
            a5 = abs(y5[i])
            sc = atol + rtol * (ay if ay > a5 else a5)
            r = e / sc
            errn += r * r
        errn = math.sqrt(errn / n)

        if errn <= 1.0:
            t += h
            for i in range(n):
                y[i] = y5[i]
                k1[i] = k7[i]  # first-same-as-last
            if errn == 0.0:
                fac = 5.0
            else:
                fac = 0.9 * math.pow(errn, -0.2)
                if fac > 5.0:
                    fac = 5.0
                elif fac < 0.2:
                    fac = 0.2
            h *= fac
        else:
            fac = 0.9 * math.pow(errn, -0.2)
            if fac < 0.2:
                fac = 0.2
            h *= fac
        steps += 1
        if steps > max_steps:
            return 1
        if h < hmin:
            return 2
    return 0


@_njit(cache=True, nogil=True)
def integrate_path(system, kind, omega_i, omega_f, tau, ts, y, out, rtol, atol, max_steps):
    """Integrate from t = 0 through the ascending checkpoints ``ts``.

    ``y`` holds the state at t = 0 on entry and the state at ts[-1] on exit;
    ``out[i]`` receives the state at ts[i]. Returns a status code (0 ok).
    """
    t_prev = 0.0
    for j in range(ts.shape[0]):
        status = integrate(
            system, kind, omega_i, omega_f, tau, t_prev, ts[j], y, rtol, atol, max_steps
        )
        if status != 0:
            return status
        for i in range(y.shape[0]):
            out[j, i] = y[i]
        t_prev = ts[j]
    return 0
