import math
import os
import subprocess
import sys

import numpy as np
import pytest

import oracles
from ottosta import kernels


class TestRampEval:
    @pytest.mark.parametrize(
        "code,name",
        [
            (kernels.KIND_POLY5, "poly5"),
            (kernels.KIND_POLY3, "poly3"),
            (kernels.KIND_COSINE, "cosine"),
            (kernels.KIND_LINEAR, "linear"),
        ],
    )
    def test_value_against_reference_formula(self, code, name):
        for t in (0.0, 0.7, 1.5, 2.3, 3.0):
            w, _, _ = kernels.ramp_eval(code, 0.35, 1.0, 3.0, t)
            assert w == pytest.approx(oracles.ramp_omega(name, 0.35, 1.0, 3.0, t), rel=1e-14)

    def test_constant_kind(self):
        w, wd, wdd = kernels.ramp_eval(kernels.KIND_CONSTANT, 0.7, 0.7, 3.0, 1.1)
        assert (w, wd, wdd) == (0.7, 0.0, 0.0)

    def test_derivatives_vs_finite_difference(self):
        h = 1e-6
        for code in (kernels.KIND_POLY5, kernels.KIND_COSINE):
            for t in (0.4, 1.5, 2.6):
                wm, _, _ = kernels.ramp_eval(code, 0.35, 1.0, 3.0, t - h)
                wp, _, _ = kernels.ramp_eval(code, 0.35, 1.0, 3.0, t + h)
                _, wd, _ = kernels.ramp_eval(code, 0.35, 1.0, 3.0, t)
                assert wd == pytest.approx((wp - wm) / (2 * h), rel=1e-7, abs=1e-10)


class TestIntegrator:
    def test_bare_covariance_matches_brute_rk4(self):
        beta, wi, wf, tau = 2.0, 0.35, 1.0, 3.0
        c = 1.0 / math.tanh(beta * wi / 2.0)
        y = np.array([0.0, 0.0, c / (2 * wi), 0.0, c * wi / 2])
        status = kernels.integrate(
            kernels.SYS_COV_BARE, kernels.KIND_POLY5, wi, wf, tau, 0.0, tau, y, 1e-12, 1e-14, 1_000_000
        )
        assert status == 0
        brute = oracles.rk4_fixed(
            oracles.covariance_rhs("poly5", wi, wf, tau, cd=False),
            np.array([0.0, 0.0, c / (2 * wi), 0.0, c * wi / 2]),
            0.0,
            tau,
            40000,
        )
        np.testing.assert_allclose(y, brute, rtol=1e-8, atol=1e-12)

    def test_cd_covariance_matches_brute_rk4(self):
        beta, wi, wf, tau = 2.0, 0.35, 1.0, 3.0
        c = 1.0 / math.tanh(beta * wi / 2.0)
        y = np.array([0.05, -0.02, c / (2 * wi), 0.0, c * wi / 2])
        status = kernels.integrate(
            kernels.SYS_COV_CD, kernels.KIND_POLY5, wi, wf, tau, 0.0, tau, y, 1e-12, 1e-14, 1_000_000
        )
        assert status == 0
        brute = oracles.rk4_fixed(
            oracles.covariance_rhs("poly5", wi, wf, tau, cd=True),
            np.array([0.05, -0.02, c / (2 * wi), 0.0, c * wi / 2]),
            0.0,
            tau,
            40000,
        )
        # the brute force run uses finite-difference omega_dot, so keep a
        # little slack beyond pure integrator error
        np.testing.assert_allclose(y, brute, rtol=5e-7, atol=2e-9)

    def test_pair_matches_brute_rk4(self):
        wi, wf, tau = 0.35, 1.0, 3.0
        y = np.array([0.0, 1.0, 1.0, 0.0])
        status = kernels.integrate(
            kernels.SYS_PAIR, kernels.KIND_COSINE, wi, wf, tau, 0.0, tau, y, 1e-12, 1e-14, 1_000_000
        )
        assert status == 0
        brute = oracles.rk4_fixed(
            oracles.pair_rhs("cosine", wi, wf, tau), np.array([0.0, 1.0, 1.0, 0.0]), 0.0, tau, 40000
        )
        np.testing.assert_allclose(y, brute, rtol=1e-8, atol=1e-12)

    def test_path_agrees_with_single_shot(self):
        wi, wf, tau = 0.35, 1.0, 3.0
        ts = np.linspace(0.0, tau, 7)
        y = np.array([0.0, 1.0, 1.0, 0.0])
        out = np.empty((ts.size, 4))
        status = kernels.integrate_path(
            kernels.SYS_PAIR, kernels.KIND_POLY5, wi, wf, tau, ts, y, out, 1e-12, 1e-14, 1_000_000
        )
        assert status == 0
        for i, t in enumerate(ts):
            z = np.array([0.0, 1.0, 1.0, 0.0])
            if t > 0.0:
                st = kernels.integrate(
                    kernels.SYS_PAIR, kernels.KIND_POLY5, wi, wf, tau, 0.0, t, z, 1e-12, 1e-14, 1_000_000
                )
                assert st == 0
            np.testing.assert_allclose(out[i], z, rtol=1e-9, atol=1e-12)

    def test_step_budget_status(self):
        y = np.array([0.0, 1.0, 1.0, 0.0])
        status = kernels.integrate(
            kernels.SYS_PAIR, kernels.KIND_POLY5, 0.35, 1.0, 3.0, 0.0, 3.0, y, 1e-12, 1e-14, 3
        )
        assert status == 1

    def test_tightening_tolerance_converges(self):
        wi, wf, tau = 0.35, 1.0, 3.0
        results = []
        for rtol in (1e-6, 1e-9, 1e-12):
            y = np.array([0.0, 1.0, 1.0, 0.0])
            kernels.integrate(
                kernels.SYS_PAIR, kernels.KIND_POLY5, wi, wf, tau, 0.0, tau, y, rtol, rtol * 1e-2, 1_000_000
            )
            results.append(y.copy())
        d1 = np.max(np.abs(results[0] - results[2]))
        d2 = np.max(np.abs(results[1] - results[2]))
        assert d2 < d1
        assert d2 < 1e-8


class TestBackendFlag:
    def test_fallback_matches_active_backend(self):
        """Run a tiny workload in a subprocess with OTTOSTA_NO_NUMBA=1 and
        compare against the in-process backend bit for bit."""
        y = np.array([0.0, 1.0, 1.0, 0.0])
        kernels.integrate(
            kernels.SYS_PAIR, kernels.KIND_POLY5, 0.35, 1.0, 3.0, 0.0, 3.0, y, 1e-10, 1e-12, 1_000_000
        )
        code = (
            "import numpy as np\n"
            "from ottosta import kernels\n"
            "assert not kernels.NUMBA_ENABLED\n"
            "y = np.array([0.0, 1.0, 1.0, 0.0])\n"
            "kernels.integrate(kernels.SYS_PAIR, kernels.KIND_POLY5, 0.35, 1.0, 3.0,"
            " 0.0, 3.0, y, 1e-10, 1e-12, 1000000)\n"
            "print(repr(list(y)))\n"
        )
        env = dict(os.environ, OTTOSTA_NO_NUMBA="1")
        out = subprocess.run(
            [sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True
        )
        got = np.array(eval(out.stdout.strip()))
        np.testing.assert_array_equal(got, y)
