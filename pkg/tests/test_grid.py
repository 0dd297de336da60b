"""Grid substrate: quadrature, trajectories, supremum search."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from memfun import (
    ConfigError,
    InvalidParameter,
    NonConvergence,
    TimeDomain,
    Trajectory,
    combine,
    constant_trajectory,
    indicator_trajectory,
    integrate,
    scale,
    step_trajectory,
    sup_norm,
    supremum,
)
from memfun.grid import exp_causal_profile, regrid, sup_norm_scan, zero_crossings

# Closed-form antiderivative oracle: int_0^1 e^-t dt = 1 - 1/e.
EXP_INTEGRAL = 0.63212055882855768


class TestTimeDomain:
    def test_uniform_basics(self):
        d = TimeDomain.uniform(2.0, 5)
        assert d.nodes[0] == 0.0 and d.nodes[-1] == 2.0
        assert d.grid_points == 5
        assert d.is_uniform

    @pytest.mark.parametrize("horizon", [0.0, -1.0, math.inf, math.nan])
    def test_bad_horizon(self, horizon):
        with pytest.raises(InvalidParameter):
            TimeDomain.uniform(horizon, 5)

    def test_too_few_nodes(self):
        with pytest.raises(InvalidParameter):
            TimeDomain.uniform(1.0, 2)

    def test_nodes_must_increase(self):
        with pytest.raises(InvalidParameter):
            TimeDomain(1.0, np.array([0.0, 0.5, 0.5, 1.0]))

    def test_clip_rejects_outside(self):
        d = TimeDomain.uniform(1.0, 5)
        with pytest.raises(InvalidParameter):
            d.clip_inside(np.array([1.5]))
        with pytest.raises(InvalidParameter):
            d.clip_inside(np.array([-0.2]))


class TestIntegrate:
    def test_constant_is_exact_at_first_level(self):
        res = integrate(lambda ts: np.ones_like(np.asarray(ts, dtype=float)), 0.0, 1.0)
        assert res.value == 1.0
        assert res.refinement_levels == 1

    def test_exponential_against_antiderivative(self):
        res = integrate(lambda ts: np.exp(-np.asarray(ts, dtype=float)), 0.0, 1.0, rel_tol=1e-10)
        assert abs(res.value - EXP_INTEGRAL) < 1e-10

    def test_declared_breakpoint_split_is_exact(self):
        def fn(ts):
            ts = np.asarray(ts, dtype=float)
            return np.where(ts <= 0.5, 2.0, 0.0)

        res = integrate(fn, 0.0, 1.0, breakpoints=[0.5])
        assert abs(res.value - 1.0) < 1e-14

    def test_quadratic_exact_to_machine_precision(self):
        res = integrate(lambda ts: 3.0 * np.asarray(ts, dtype=float) ** 2, 0.0, 1.0)
        assert abs(res.value - 1.0) < 1e-14
        assert res.refinement_levels == 1

    def test_linearity(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            a, b = rng.uniform(-3, 3, 2)
            cf = rng.uniform(-2, 2, 4)
            cg = rng.uniform(-2, 2, 4)

            def f(ts):
                return np.polynomial.polynomial.polyval(np.asarray(ts, dtype=float), cf)

            def g(ts):
                return np.polynomial.polynomial.polyval(np.asarray(ts, dtype=float), cg)

            def mix(ts):
                return a * f(ts) + b * g(ts)

            rm = integrate(mix, 0.0, 1.0)
            rf = integrate(f, 0.0, 1.0)
            rg = integrate(g, 0.0, 1.0)
            slack = rm.error_estimate + abs(a) * rf.error_estimate + abs(b) * rg.error_estimate
            assert abs(rm.value - (a * rf.value + b * rg.value)) <= slack + 1e-12

    def test_undeclared_jump_does_not_converge(self):
        def fn(ts):
            ts = np.asarray(ts, dtype=float)
            return np.where(ts <= 1.0 / 3.0, 1.0, 0.0)

        with pytest.raises(NonConvergence):
            integrate(fn, 0.0, 1.0, rel_tol=1e-12)

    def test_empty_range(self):
        res = integrate(lambda ts: np.exp(np.asarray(ts, dtype=float)), 0.3, 0.3)
        assert res.value == 0.0

    def test_bad_arguments(self):
        one = lambda ts: np.ones_like(np.asarray(ts, dtype=float))
        with pytest.raises(InvalidParameter):
            integrate(one, 1.0, 0.0)
        with pytest.raises(InvalidParameter):
            integrate(one, 0.0, 1.0, rel_tol=0.0)


class TestSupremum:
    def test_monotone_max_at_right_end(self, unit_domain):
        value, argmax, interior = supremum(lambda ts: np.asarray(ts, dtype=float), unit_domain)
        assert value == pytest.approx(1.0, abs=1e-12)
        assert argmax == pytest.approx(1.0, abs=1e-9)
        assert interior

    def test_parabola_vertex(self, unit_domain):
        value, argmax, interior = supremum(
            lambda ts: 1.0 - (np.asarray(ts, dtype=float) - 0.3) ** 2, unit_domain
        )
        assert value == pytest.approx(1.0, abs=1e-9)
        # Flat peaks limit argmax resolution to ~sqrt(eps) in float64; 1e-7
        # is far inside one grid cell.
        assert argmax == pytest.approx(0.3, abs=1e-7)
        assert interior

    def test_zero_function_ties_to_origin(self, unit_domain):
        value, argmax, interior = supremum(
            lambda ts: np.zeros_like(np.asarray(ts, dtype=float)), unit_domain
        )
        assert value == 0.0
        assert argmax == 0.0
        assert not interior

    def test_never_under_reports_grid_samples(self, unit_domain):
        rng = np.random.default_rng(3)
        coeffs = rng.uniform(-1, 1, 6)

        def g(ts):
            ts = np.asarray(ts, dtype=float)
            out = np.zeros_like(ts)
            for k, c in enumerate(coeffs):
                out = out + c * np.sin(2.0 * np.pi * (k + 1) * ts)
            return out

        value, _, _ = supremum(g, unit_domain)
        assert np.all(value >= g(unit_domain.nodes) - 1e-12)


class TestSupNorm:
    def test_zero(self, unit_domain):
        assert sup_norm(constant_trajectory(unit_domain, 0.0)) == 0.0

    def test_sine(self, unit_domain):
        f = Trajectory.from_callable(
            unit_domain, lambda ts: np.sin(2.0 * np.pi * np.asarray(ts, dtype=float))
        )
        assert sup_norm(f) == pytest.approx(1.0, abs=1e-9)

    def test_indicator(self, unit_domain):
        assert sup_norm(indicator_trajectory(unit_domain, 0.5)) == 1.0

    @settings(max_examples=60, deadline=None)
    @given(st.floats(min_value=-1e6, max_value=1e6, allow_nan=False))
    def test_absolute_homogeneity(self, c):
        domain = TimeDomain.uniform(1.0, 129)
        f = Trajectory.from_callable(
            domain, lambda ts: np.cos(2.0 * np.pi * np.asarray(ts, dtype=float)) + 0.25
        )
        base = sup_norm(f)
        scaled = sup_norm(scale(f, c))
        assert scaled == pytest.approx(abs(c) * base, rel=1e-12, abs=1e-12)


class TestTrajectory:
    def test_outside_domain_is_an_error(self, unit_domain):
        f = constant_trajectory(unit_domain, 1.0)
        with pytest.raises(InvalidParameter):
            f.value(1.5)

    def test_jump_sides(self, unit_domain):
        f = indicator_trajectory(unit_domain, 0.5)
        assert f.value(0.5, side="left") == 1.0
        assert f.value(0.5, side="right") == 0.0
        assert f.value(0.5) == 0.0  # point evaluation is right-continuous
        assert f.value(0.25) == 1.0

    def test_pieces_must_tile(self, unit_domain):
        with pytest.raises(InvalidParameter):
            Trajectory(unit_domain, ((0.0, 0.4, lambda ts: ts), (0.6, 1.0, lambda ts: ts)), ())

    def test_from_samples_with_duplicate_time(self):
        f = Trajectory.from_samples([0.0, 0.5, 0.5, 1.0], [1.0, 1.0, 0.0, 0.0], grid_points=65)
        assert f.breakpoint_times == (0.5,)
        assert f.value(0.5, side="left") == 1.0
        assert f.value(0.5, side="right") == 0.0

    def test_from_samples_rejects_triplicates(self):
        with pytest.raises(InvalidParameter):
            Trajectory.from_samples([0.0, 0.5, 0.5, 0.5, 1.0], [1, 1, 2, 3, 3], grid_points=65)

    def test_csv_round_trip_is_bit_exact(self, unit_domain):
        rng = np.random.default_rng(7)
        f = Trajectory.from_samples(
            np.linspace(0.0, 1.0, 33), rng.standard_normal(33), grid_points=unit_domain.grid_points
        )
        again = Trajectory.from_csv(f.to_csv(), grid_points=unit_domain.grid_points)
        assert np.array_equal(f.node_values(), again.node_values())

    def test_csv_header_optional(self):
        with_header = Trajectory.from_csv("t,value\n0,1\n1,2\n", grid_points=65)
        without = Trajectory.from_csv("0,1\n1,2\n", grid_points=65)
        assert np.array_equal(with_header.node_values(), without.node_values())

    def test_csv_parse_error_names_line(self):
        with pytest.raises(ConfigError, match="line 3"):
            Trajectory.from_csv("t,value\n0,1\n0.5,nope\n1,2\n")

    def test_combine_tracks_one_sided_values(self, unit_domain):
        f = indicator_trajectory(unit_domain, 0.5)
        g = constant_trajectory(unit_domain, 0.25)
        diff = combine(f, g, 1.0, -1.0)
        assert diff.value(0.5, side="left") == 0.75
        assert diff.value(0.5, side="right") == -0.25
        assert diff.value(0.2) == 0.75

    def test_step_trajectory_validation(self, unit_domain):
        with pytest.raises(InvalidParameter):
            step_trajectory(unit_domain, [1.0, 2.0], [1.5])
        with pytest.raises(InvalidParameter):
            step_trajectory(unit_domain, [1.0], [0.5])

    def test_regrid_keeps_values(self, unit_domain, fine_domain):
        f = Trajectory.from_callable(unit_domain, lambda ts: np.asarray(ts, dtype=float) ** 2)
        g = regrid(f, fine_domain)
        assert g.domain is fine_domain
        assert g.value(0.3) == f.value(0.3)


class TestZeroCrossings:
    def test_sine_crossing(self, unit_domain):
        crossings = zero_crossings(
            lambda ts: np.sin(2.0 * np.pi * np.asarray(ts, dtype=float)), unit_domain
        )
        assert len(crossings) == 1
        assert crossings[0] == pytest.approx(0.5, abs=1e-12)

    def test_no_crossing_for_positive(self, unit_domain):
        assert zero_crossings(lambda ts: np.cos(np.asarray(ts, dtype=float)) + 2.0, unit_domain) == ()


class TestExpCausalProfile:
    def test_against_closed_form(self):
        domain = TimeDomain.uniform(1.0, 129)
        prof = exp_causal_profile(
            1.0, 1.0, lambda ts: np.ones_like(np.asarray(ts, dtype=float)), domain
        )
        assert np.max(np.abs(prof - (1.0 - np.exp(-domain.nodes)))) < 1e-9

    def test_zero_rate_is_running_integral(self):
        domain = TimeDomain.uniform(1.0, 129)
        prof = exp_causal_profile(0.0, 1.0, lambda ts: np.asarray(ts, dtype=float), domain)
        assert np.max(np.abs(prof - domain.nodes**2 / 2.0)) < 1e-10


def test_sup_norm_scan_reports_tie_ends(unit_domain):
    f = constant_trajectory(unit_domain, 2.0)
    scan = sup_norm_scan(f)
    assert scan.value == 2.0
    assert scan.first_argmax == 0.0
    assert scan.last_argmax == 1.0
