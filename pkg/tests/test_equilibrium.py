import math

import numpy as np
import pytest

from tfx import equilibrium as eq

SQRT2 = math.sqrt(2.0)


class TestAsymptoticPosition:
    def test_closed_form_value(self):
        assert eq.predict_position_asymptotic(0.01) == pytest.approx(0.0345157,
                                                                     abs=5e-7)

    def test_leading_order_ratio_tends_to_one(self):
        ratios = [eq.predict_position_asymptotic(e) / (e * -math.log(e) / SQRT2)
                  for e in (1e-2, 1e-3, 1e-4)]
        assert ratios == sorted(ratios, reverse=True)
        assert abs(ratios[-1] - 1.0) <= 0.06

    def test_apriori_amplitude_bound(self):
        a = eq.predict_position_asymptotic(0.01)
        assert a <= SQRT2 * 0.01 ** (2.0 / 3.0)

    def test_rejects_eps_at_log_singularity(self):
        with pytest.raises(ValueError):
            eq.predict_position_asymptotic(1.0 / math.e)
        with pytest.raises(ValueError):
            eq.predict_position_asymptotic(0.0)

    def test_warns_outside_asymptotic_range(self):
        with pytest.warns(UserWarning):
            eq.predict_position_asymptotic(0.2)


class TestScalarRoot:
    @staticmethod
    def bisection_oracle(eps):
        def f(a):
            return 4.0 * SQRT2 * eps * a - 32.0 * math.exp(-2.0 * SQRT2 * a / eps)

        lo, hi = eps * eps, 1.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if f(lo) * f(mid) <= 0.0:
                hi = mid
            else:
                lo = mid
        return 0.5 * (lo + hi)

    def test_matches_bisection_oracle(self):
        for eps in (0.05, 0.01, 0.005):
            cfg = eq.solve_bifurcation_scalar(eps)
            assert cfg.positions[-1] == pytest.approx(self.bisection_oracle(eps),
                                                      abs=1e-12)

    def test_relative_residual(self):
        for eps in (0.02, 0.005):
            cfg = eq.solve_bifurcation_scalar(eps)
            a = cfg.positions[-1]
            rel = abs(4.0 * SQRT2 * eps * a - 32.0 * math.exp(-2.0 * SQRT2 * a / eps))
            rel /= 4.0 * SQRT2 * eps * a
            assert rel <= 1e-14

    def test_close_to_asymptotic_formula(self):
        cfg = eq.solve_bifurcation_scalar(0.01)
        a = cfg.positions[-1]
        assert abs(a - eq.predict_position_asymptotic(0.01)) / a <= 0.05

    def test_monotone_with_limit_ratio(self):
        eps_list = (0.001, 0.005, 0.01, 0.05)
        roots = [eq.solve_bifurcation_scalar(e).positions[-1] for e in eps_list]
        assert roots == sorted(roots)
        ratios = [r / (e * abs(math.log(e))) for e, r in zip(eps_list, roots)]
        assert ratios == sorted(ratios)  # decreasing toward 1/sqrt(2) as eps drops
        assert ratios[0] == pytest.approx(1.0 / SQRT2, abs=0.01)

    def test_positions_antisymmetric(self):
        cfg = eq.solve_bifurcation_scalar(0.01)
        assert cfg.positions[0] == -cfg.positions[1]
        assert cfg.source == "scalar_root"
        assert cfg.bounds_ok


class TestRefinement:
    def test_limits_of_scale_factors(self):
        us, vs = [], []
        for e in (1e-2, 1e-12, 1e-100, 1e-300):
            u, v, _ = eq.refine_position(e)
            us.append(u)
            vs.append(v)
        assert abs(vs[-1]) < abs(vs[0])
        assert all(b < a for a, b in zip(np.abs(vs), np.abs(vs[1:])))
        assert abs(us[-1] - 1.0) < abs(us[0] - 1.0)
        assert abs(us[-1] - 1.0) <= 0.01

    def test_refined_position_is_closest_to_exact_root(self):
        for eps in (0.02, 0.01):
            a_exact = eq.solve_bifurcation_scalar(eps).positions[-1]
            _, _, a_uv = eq.refine_position(eps)
            a_asym = eq.predict_position_asymptotic(eps)
            assert abs(a_uv - a_exact) <= abs(a_exact - a_asym)
            assert abs(a_uv - a_exact) <= 1e-12


class TestInteractionSystem:
    def test_single_soliton_rests_at_center(self):
        cfg = eq.solve_toda(0.01, 1)
        assert cfg.positions == (0.0,)
        assert cfg.residual == 0.0

    def test_two_solitons_reduce_to_scalar_equation(self):
        for eps in (0.02, 0.01, 0.005):
            toda = eq.solve_toda(eps, 2)
            scalar = eq.solve_bifurcation_scalar(eps)
            assert abs(toda.positions[-1] - scalar.positions[-1]) <= 1e-12

    def test_three_solitons_center_is_pinned(self):
        cfg = eq.solve_toda(0.01, 3)
        assert abs(cfg.positions[1]) <= 1e-13
        assert cfg.positions[2] == -cfg.positions[0]

    @pytest.mark.filterwarnings("ignore:equilibrium at")
    def test_ordering_and_antisymmetry(self):
        for m in (2, 3, 4, 5):
            cfg = eq.solve_toda(0.01, m)
            pos = np.array(cfg.positions)
            assert np.all(np.diff(pos) > 0.0)
            assert np.max(np.abs(pos + pos[::-1])) <= 1e-13

    @pytest.mark.filterwarnings("ignore:equilibrium at")
    def test_residual_verified_outside_newton_loop(self):
        cfg = eq.solve_toda(0.005, 4)
        assert cfg.residual <= 1e-12

    @pytest.mark.filterwarnings("ignore:equilibrium at")
    def test_inner_gaps_shrink(self):
        gaps = np.diff(eq.solve_toda(0.01, 4).positions)
        assert gaps[1] < gaps[0]

    def test_bound_flags_in_validity_range(self):
        for eps in (0.02, 0.01, 0.005):
            assert eq.solve_toda(eps, 2).bounds_ok
        for eps in (0.01, 0.005):
            assert eq.solve_toda(eps, 3).bounds_ok

    def test_bound_violation_warns(self):
        with pytest.warns(UserWarning):
            cfg = eq.solve_toda(0.01, 5)
        assert not cfg.bounds_ok

    def test_preconditions(self):
        with pytest.raises(ValueError):
            eq.solve_toda(0.1, 3)  # m >= 3 needs eps <= 0.05
        with pytest.raises(ValueError):
            eq.solve_toda(0.01, 0)


def test_agreement_hierarchy():
    for eps in (0.02, 0.01):
        a_scalar = eq.solve_bifurcation_scalar(eps).positions[-1]
        a_toda = eq.solve_toda(eps, 2).positions[-1]
        _, _, a_uv = eq.refine_position(eps)
        a_asym = eq.predict_position_asymptotic(eps)
        assert abs(a_toda - a_scalar) <= 1e-12
        assert abs(a_scalar - a_uv) <= abs(a_scalar - a_asym)


def test_check_bounds_interaction_ratio():
    amp, inter, ok = eq.check_bounds(0.01, (-0.0343, 0.0343))
    assert ok
    assert 0.0 < amp < 1.0
    assert 0.0 < inter <= 1.0
