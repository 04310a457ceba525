#!/usr/bin/env python3
"""Time the compiled kernels against the pure-numpy fallback.

Runs the same workload twice in fresh subprocesses, once per backend
(selected by the OTTOSTA_NO_NUMBA environment flag), checks that the
results agree bit for bit, and prints a small table. JIT compilation
time is excluded by doing one warmup pass before the clock starts.

Usage: python3 benchmarks/compare_backends.py [--repeats N]
"""

import argparse
import json
import os
import subprocess
import sys

WORKLOAD = r"""
import json
import time

import numpy as np

import ottosta.kernels as K
from ottosta.dynamics import adiabaticity, adiabaticity_pair, propagate_path, thermal_state
from ottosta.protocols import FrequencyProtocol, ProtocolKind
from ottosta.sta_cost import StrokeContext, avg_work_cost
from ottosta.thermo_cycle import Accounting, CycleConfig, evaluate_cycle

REPEATS = __REPEATS__


def workload():
    out = []
    for tau in (2.5, 3.0, 4.0, 6.0):
        p = FrequencyProtocol(ProtocolKind.POLY5, 0.35, 1.0, tau)
        out.append(adiabaticity(p, 2.0, tau))
        out.append(adiabaticity_pair(p, tau))
        out.append(avg_work_cost(StrokeContext(p, 2.0)))
        cfg = CycleConfig(omega1=0.35, omega2=1.0, beta1=2.0, beta2=0.2, tau1=tau, tau3=tau)
        r = evaluate_cycle(cfg, Accounting.NONADIABATIC)
        out.extend([r.eta, r.power])
    ts = np.linspace(0.0, 3.0, 25)
    p = FrequencyProtocol(ProtocolKind.COSINE, 0.35, 1.0, 3.0)
    for st in propagate_path(thermal_state(2.0, 0.35), p, ts):
        out.append(float(st.cov[0, 0]))
    return out


workload()  # warmup: triggers JIT compilation on the compiled backend
t0 = time.perf_counter()
for _ in range(REPEATS):
    result = workload()
elapsed = (time.perf_counter() - t0) / REPEATS
print(json.dumps({
    "backend": "numba" if K.NUMBA_ENABLED else "numpy-fallback",
    "seconds_per_pass": elapsed,
    "checksum": repr(sum(result)),
    "values": [repr(v) for v in result],
}))
"""


def run_backend(no_numba: bool, repeats: int) -> dict:
    env = dict(os.environ)
    if no_numba:
        env["OTTOSTA_NO_NUMBA"] = "1"
    else:
        env.pop("OTTOSTA_NO_NUMBA", None)
    proc = subprocess.run(
        [sys.executable, "-c", WORKLOAD.replace("__REPEATS__", str(repeats))],
        env=env,
        capture_output=True,
        text=True,
    )
    if proc.returncode != 0:
        sys.stderr.write(proc.stderr)
        raise SystemExit(f"backend run failed (no_numba={no_numba})")
    return json.loads(proc.stdout)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeats", type=int, default=3, help="timed passes per backend (default 3)")
    args = ap.parse_args()

    jit = run_backend(no_numba=False, repeats=args.repeats)
    plain = run_backend(no_numba=True, repeats=args.repeats)

    identical = jit["values"] == plain["values"]
    speedup = plain["seconds_per_pass"] / jit["seconds_per_pass"]
    print(f"{'backend':<16} {'s/pass':>10}")
    for row in (jit, plain):
        print(f"{row['backend']:<16} {row['seconds_per_pass']:>10.4f}")
    print(f"speedup: {speedup:.1f}x (warmup/JIT compile excluded)")
    print(f"results bit-identical across backends: {identical}")
    return 0 if identical else 1


if __name__ == "__main__":
    raise SystemExit(main())
