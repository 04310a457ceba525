import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from ottosta.errors import TrapInversionError
from ottosta.protocols import (
    FrequencyProtocol,
    ProtocolKind,
    check_cd_validity,
    check_sta_boundary,
    validity_margin,
)

RAMP_KINDS = [k for k in ProtocolKind if k is not ProtocolKind.CONSTANT]


def make(kind, tau=3.0, wi=0.35, wf=1.0):
    return FrequencyProtocol(kind, wi, wf, tau)


class TestEndpointsAndValues:
    @pytest.mark.parametrize("kind", RAMP_KINDS)
    def test_endpoints_hit_target_frequencies(self, kind):
        p = make(kind)
        assert p.omega(0.0) == pytest.approx(0.35, abs=1e-14)
        assert p.omega(3.0) == pytest.approx(1.0, abs=1e-14)

    @pytest.mark.parametrize("kind", RAMP_KINDS)
    @pytest.mark.parametrize("t", [0.0, 0.41, 1.5, 2.77, 3.0])
    def test_matches_independent_ramp_formula(self, kind, t):
        p = make(kind)
        want = oracles.ramp_omega(kind.value, 0.35, 1.0, 3.0, t)
        assert p.omega(t) == pytest.approx(want, rel=1e-14)

    def test_poly5_midpoint_is_frequency_midpoint(self):
        p = make(ProtocolKind.POLY5)
        assert p.omega(1.5) == pytest.approx(0.675, abs=1e-15)

    def test_cosine_midpoint_value(self):
        # sqrt((a^2+1)/2) * omega_i with a = 1/0.35
        p = make(ProtocolKind.COSINE)
        want = 0.35 * math.sqrt(((1.0 / 0.35) ** 2 + 1.0) / 2.0)
        assert p.omega(1.5) == pytest.approx(want, rel=1e-15)
        assert want == pytest.approx(0.74916620318858485, abs=1e-15)

    def test_eval_many_matches_scalar(self):
        p = make(ProtocolKind.COSINE)
        ts = np.linspace(0.0, 3.0, 17)
        w, wd, wdd = p.eval_many(ts)
        for i, t in enumerate(ts):
            sw, swd, swdd = p.eval(t)
            assert w[i] == sw
            assert wd[i] == swd
            assert wdd[i] == swdd

    def test_constant_protocol(self):
        p = FrequencyProtocol.constant(0.7, 2.0)
        assert p.omega(1.3) == 0.7
        assert p.omega_dot(1.3) == 0.0
        assert p.omega_ddot(1.3) == 0.0

    def test_domain_is_enforced(self):
        p = make(ProtocolKind.POLY5)
        with pytest.raises(ValueError):
            p.omega(-0.1)
        with pytest.raises(ValueError):
            p.omega(3.1)

    def test_validation_rejects_bad_parameters(self):
        with pytest.raises(ValueError):
            FrequencyProtocol(ProtocolKind.POLY5, -0.35, 1.0, 3.0)
        with pytest.raises(ValueError):
            FrequencyProtocol(ProtocolKind.POLY5, 0.35, 1.0, 0.0)
        with pytest.raises(ValueError):
            FrequencyProtocol(ProtocolKind.CONSTANT, 0.35, 1.0, 3.0)
        with pytest.raises(ValueError):
            FrequencyProtocol(ProtocolKind.POLY5, 0.35, math.inf, 3.0)


class TestDerivatives:
    @pytest.mark.parametrize("kind", RAMP_KINDS)
    @pytest.mark.parametrize("t", [0.3, 1.5, 2.9])
    def test_first_derivative_matches_finite_difference(self, kind, t):
        p = make(kind)
        h = 1e-6
        fd = (p.omega(t + h) - p.omega(t - h)) / (2 * h)
        assert p.omega_dot(t) == pytest.approx(fd, rel=1e-7, abs=1e-9)

    @pytest.mark.parametrize("kind", RAMP_KINDS)
    @pytest.mark.parametrize("t", [0.3, 1.5, 2.9])
    def test_second_derivative_matches_finite_difference(self, kind, t):
        p = make(kind)
        h = 1e-4
        fd = (p.omega(t + h) - 2 * p.omega(t) + p.omega(t - h)) / (h * h)
        assert p.omega_ddot(t) == pytest.approx(fd, rel=1e-5, abs=1e-7)

    @given(
        st.sampled_from(RAMP_KINDS),
        st.floats(0.05, 0.95),
        st.floats(0.2, 0.9),
        st.floats(1.0, 3.0),
        st.floats(0.5, 8.0),
    )
    def test_derivative_consistency_random(self, kind, s, wi, wf, tau):
        p = FrequencyProtocol(kind, wi, wf, tau)
        t = s * tau
        h = 1e-6 * tau
        fd = (p.omega(t + h) - p.omega(t - h)) / (2 * h)
        assert p.omega_dot(t) == pytest.approx(fd, rel=1e-5, abs=1e-7)


class TestBoundaryConditions:
    def test_poly5_satisfies_value_slope_curvature(self):
        rep = check_sta_boundary(make(ProtocolKind.POLY5))
        assert rep.all_ok
        assert rep.shortcut_ok

    def test_poly3_slope_only(self):
        rep = check_sta_boundary(make(ProtocolKind.POLY3))
        # slope vanishes at both ends, curvature does not
        assert rep.slope_start and rep.slope_end
        assert not (rep.curvature_start and rep.curvature_end)
        assert rep.shortcut_ok

    def test_cosine_slope_only(self):
        rep = check_sta_boundary(make(ProtocolKind.COSINE))
        assert rep.slope_start and rep.slope_end
        assert not (rep.curvature_start and rep.curvature_end)
        assert rep.shortcut_ok

    def test_linear_fails_slope(self):
        rep = check_sta_boundary(make(ProtocolKind.LINEAR))
        assert not rep.slope_start
        assert not rep.shortcut_ok
        assert not rep.all_ok

    def test_shortcut_kinds_listing(self):
        assert set(ProtocolKind.shortcut_kinds()) == {
            ProtocolKind.POLY5,
            ProtocolKind.POLY3,
            ProtocolKind.COSINE,
        }


class TestValidity:
    def test_reference_protocol_margin(self):
        # poly5 compression 0.35 -> 1.0 over tau = 3: minimum of
        # 1 - wdot^2/(4 w^4), checked against a dense independent scan.
        p = make(ProtocolKind.POLY5)
        rep = check_cd_validity(p)
        assert rep.valid
        assert rep.min_margin == pytest.approx(0.5248888430576066, abs=1e-12)

        ts = np.linspace(0.0, 3.0, 200001)
        margins = []
        for t in ts:
            w = oracles.ramp_omega("poly5", 0.35, 1.0, 3.0, t)
            wd = oracles.ramp_omega_dot("poly5", 0.35, 1.0, 3.0, t)
            margins.append(1.0 - wd * wd / (4.0 * w**4))
        # the library scans 1001 points, so allow grid-placement slack
        assert rep.min_margin == pytest.approx(min(margins), abs=5e-6)

    def test_margin_midpoint_value(self):
        p = make(ProtocolKind.POLY5)
        m = validity_margin(p, np.array([1.5]))[0]
        # closed form at s = 1/2: omega = 0.675, omega_dot = 0.65 * 1.875 / 3
        wd = 0.65 * 1.875 / 3.0
        want = 1.0 - wd * wd / (4.0 * 0.675**4)
        assert m == pytest.approx(want, abs=1e-15)

    def test_fast_ramp_inverts_trap(self):
        p = make(ProtocolKind.POLY5, tau=1.5)
        rep = check_cd_validity(p)
        assert not rep.valid
        assert rep.min_margin < 0.0

    def test_inversion_threshold_bracket(self):
        # The margin for poly5 0.35 -> 1.0 first touches zero near
        # tau = 2.0678; just above is valid, just below is not.
        assert check_cd_validity(make(ProtocolKind.POLY5, tau=2.07)).valid
        assert not check_cd_validity(make(ProtocolKind.POLY5, tau=2.06)).valid

    def test_constant_ramp_has_unit_margin(self):
        p = FrequencyProtocol.constant(0.7, 2.0)
        rep = check_cd_validity(p)
        assert rep.valid
        assert rep.min_margin == pytest.approx(1.0, abs=1e-15)

    @given(st.floats(2.1, 10.0))
    def test_slow_poly5_always_valid(self, tau):
        assert check_cd_validity(make(ProtocolKind.POLY5, tau=tau)).valid
