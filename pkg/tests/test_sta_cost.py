import math

import numpy as np
import pytest

import oracles
from ottosta.errors import PhysicsError, TrapInversionError
from ottosta.protocols import FrequencyProtocol, ProtocolKind
from ottosta.quadrature import simpson_uniform, stroke_grid
from ottosta.sta_cost import (
    StrokeContext,
    avg_variance_cost,
    avg_work_cost,
    friction,
    friction_path,
    mean_sta_term,
    work_variance_excess,
)

COMP = FrequencyProtocol(ProtocolKind.POLY5, 0.35, 1.0, 3.0)
EXP = FrequencyProtocol(ProtocolKind.POLY5, 1.0, 0.35, 3.0)


class TestQuadrature:
    def test_simpson_exact_for_cubic(self):
        xs = np.linspace(0.0, 2.0, 11)
        y = xs**3 - 2 * xs**2 + 5
        got = simpson_uniform(y, xs[1] - xs[0])
        assert got == pytest.approx(4.0 - 16.0 / 3.0 + 10.0, rel=1e-14)

    def test_simpson_requires_odd_node_count(self):
        with pytest.raises(ValueError):
            simpson_uniform(np.zeros(4), 0.1)

    def test_stroke_grid(self):
        ts = stroke_grid(3.0, 5)
        np.testing.assert_allclose(ts, [0.0, 0.75, 1.5, 2.25, 3.0])


class TestStrokeContext:
    def test_derived_thermal_quantities(self):
        ctx = StrokeContext(COMP, 2.0)
        assert ctx.n_bar == pytest.approx(oracles.thermal_nbar(2.0, 0.35), rel=1e-14)
        assert ctx.n_bar == pytest.approx(0.9864338636344633, abs=1e-14)
        assert ctx.h0_mean == pytest.approx(0.52025185227206215, abs=1e-14)

    def test_variance_of_occupation(self):
        ctx = StrokeContext(COMP, 2.0)
        var_n = ctx.n_bar * (ctx.n_bar + 1.0)
        assert var_n == pytest.approx(1.9594856309592782, abs=1e-13)


class TestMeanCost:
    def test_midpoint_integrand_value(self):
        ctx = StrokeContext(COMP, 2.0)
        got = mean_sta_term(ctx, 1.5)
        assert got == pytest.approx(0.11755465080084085, abs=1e-14)

    def test_midpoint_decomposition(self):
        # integrand = (w_t / w_i) (Q - 1) * E0; at the midpoint
        # w Q = 0.75408501930480058 for the reference ramp
        from ottosta.dynamics import q_cd

        w = COMP.omega(1.5)
        q = q_cd(COMP, 1.5)
        assert w * q == pytest.approx(0.75408501930480058, abs=1e-13)
        want = (w / 0.35) * (q - 1.0) * 0.52025185227206215
        assert mean_sta_term(StrokeContext(COMP, 2.0), 1.5) == pytest.approx(want, rel=1e-14)

    def test_vanishes_at_stroke_ends(self):
        ctx = StrokeContext(COMP, 2.0)
        assert mean_sta_term(ctx, 0.0) == pytest.approx(0.0, abs=1e-14)
        assert mean_sta_term(ctx, 3.0) == pytest.approx(0.0, abs=1e-14)

    def test_average_reference_values(self):
        assert avg_work_cost(StrokeContext(COMP, 2.0)) == pytest.approx(
            0.07982655330359724, abs=1e-12
        )
        assert avg_work_cost(StrokeContext(EXP, 0.2)) == pytest.approx(
            0.2694114637405115, abs=1e-12
        )

    def test_average_matches_trapezoid_oracle(self):
        ctx = StrokeContext(COMP, 2.0)
        want = oracles.trapezoid_mean(lambda t: float(mean_sta_term(ctx, t)), 0.0, 3.0, n=20001)
        assert avg_work_cost(ctx) == pytest.approx(want, rel=1e-9)

    def test_node_count_convergence(self):
        ctx = StrokeContext(COMP, 2.0)
        assert avg_work_cost(ctx, nodes=257) == pytest.approx(avg_work_cost(ctx, nodes=2049), rel=1e-10)

    def test_inverse_square_time_scaling(self):
        c24 = avg_work_cost(StrokeContext(FrequencyProtocol(ProtocolKind.POLY5, 0.35, 1.0, 24.0), 2.0))
        c48 = avg_work_cost(StrokeContext(FrequencyProtocol(ProtocolKind.POLY5, 0.35, 1.0, 48.0), 2.0))
        assert c48 / c24 == pytest.approx(0.25, abs=2e-3)
        assert c48 / c24 == pytest.approx(0.24931277414163455, abs=1e-10)

    def test_trap_inversion_propagates(self):
        fast = FrequencyProtocol(ProtocolKind.POLY5, 0.35, 1.0, 1.5)
        with pytest.raises(TrapInversionError):
            avg_work_cost(StrokeContext(fast, 2.0))


class TestVarianceCost:
    def test_midpoint_excess_closed_form(self):
        ctx = StrokeContext(COMP, 2.0)
        got = work_variance_excess(ctx, 1.5)
        assert got == pytest.approx(0.11298335917402848, abs=1e-13)
        assert math.sqrt(got) == pytest.approx(0.33612997363226695, abs=1e-13)

    def test_excess_formula(self):
        from ottosta.dynamics import q_cd

        ctx = StrokeContext(COMP, 2.0)
        t = 0.9
        w = COMP.omega(t)
        q = q_cd(COMP, t)
        var_n = ctx.n_bar * (ctx.n_bar + 1.0)
        want = ((w * q - 0.35) ** 2 - (w - 0.35) ** 2) * var_n
        assert work_variance_excess(ctx, t) == pytest.approx(want, rel=1e-13)

    def test_average_reference_value(self):
        assert avg_variance_cost(StrokeContext(COMP, 2.0)) == pytest.approx(
            0.18274471987550409, abs=1e-12
        )

    def test_compression_excess_nonnegative(self):
        ctx = StrokeContext(COMP, 2.0)
        ts = np.linspace(0.0, 3.0, 101)
        assert np.all(work_variance_excess(ctx, ts) >= -1e-15)

    def test_expansion_excess_is_negative_and_rejected(self):
        ctx = StrokeContext(EXP, 0.2)
        # on an expansion stroke the counterdiabatic factor pulls the
        # instantaneous frequency toward the initial one, so the excess
        # spread is negative and an averaged "cost" would be meaningless
        assert work_variance_excess(ctx, 1.5) < 0.0
        with pytest.raises(PhysicsError):
            avg_variance_cost(ctx)


class TestFriction:
    def test_reference_value(self):
        ctx = StrokeContext(COMP, 2.0)
        assert friction(ctx, 3.0) == pytest.approx(0.5258059404, abs=1e-8)

    def test_equals_bare_excess_over_adiabatic(self):
        from ottosta.dynamics import adiabaticity

        ctx = StrokeContext(COMP, 2.0)
        q = adiabaticity(COMP, 2.0, 3.0)
        want = (1.0 / 0.35) * (q - 1.0) * ctx.h0_mean
        assert friction(ctx, 3.0) == pytest.approx(want, rel=1e-9)

    def test_zero_at_start(self):
        ctx = StrokeContext(COMP, 2.0)
        path = friction_path(ctx, np.array([0.0, 3.0]))
        assert path[0] == pytest.approx(0.0, abs=1e-12)
        assert path[1] == pytest.approx(friction(ctx, 3.0), rel=1e-10)

    def test_decreases_with_duration(self):
        vals = []
        for tau in (2.25, 3.0, 6.0, 12.0):
            p = FrequencyProtocol(ProtocolKind.POLY5, 0.35, 1.0, tau)
            vals.append(friction(StrokeContext(p, 2.0), tau))
        assert vals == sorted(vals, reverse=True)
        assert all(v > 0 for v in vals)


class TestEndpointCosts:
    def test_sta_ramps_have_zero_endpoint_cost(self):
        for kind in (ProtocolKind.POLY5, ProtocolKind.POLY3, ProtocolKind.COSINE):
            p = FrequencyProtocol(kind, 0.35, 1.0, 3.0)
            ctx = StrokeContext(p, 2.0)
            assert mean_sta_term(ctx, p.tau) == pytest.approx(0.0, abs=1e-12)

    def test_linear_ramp_has_nonzero_endpoint_cost(self):
        p = FrequencyProtocol(ProtocolKind.LINEAR, 0.35, 1.0, 3.0)
        ctx = StrokeContext(p, 2.0)
        assert mean_sta_term(ctx, p.tau) > 1e-3
