import numpy as np
import pytest

from tfx import analysis, ansatz, apply, gpe_solver, make_field, make_grid
from tfx.gpe_solver import (ContinuationError, NewtonError, SolverOptions,
                            ZeroCountError, bifurcation_eps)
from tfx.grid_fd import resolution_for

from conftest import SWEEP, sweep_grid


def test_residual_of_zero_field_vanishes():
    grid = make_grid(2.0, 401)
    zero = make_field(grid, np.zeros(grid.n))
    assert np.all(gpe_solver.residual(zero, 0.1).values == 0.0)


def test_cloud_residual_order_eps2_inside_support():
    # away from |x| = 1 only the eps^2 curvature term survives
    sups = {}
    for eps in (0.05, 0.02):
        grid = sweep_grid(eps)
        res = gpe_solver.residual(ansatz.tf_cloud(grid), eps).values
        mask = np.abs(grid.nodes) <= 0.9
        sups[eps] = float(np.max(np.abs(res[mask]))) / eps ** 2
    assert all(5.0 <= v <= 20.0 for v in sups.values())
    assert abs(sups[0.05] - sups[0.02]) <= 2.0


def test_jacobian_at_zero_field_is_trap_potential():
    grid = make_grid(2.0, 401)
    zero = make_field(grid, np.zeros(grid.n))
    op = gpe_solver.jacobian(zero, 0.1)
    c = 0.1 ** 2 / grid.h ** 2
    assert np.allclose(op.diagonal, 2.0 * c + grid.nodes ** 2 - 1.0, atol=1e-14)
    assert op.off_diagonal == -c


def test_jacobian_matches_directional_derivative(ground_sweep):
    eps = 0.05
    state = ground_sweep[eps]
    grid = state.field.grid
    rng = np.random.default_rng(7)
    delta = make_field(grid, rng.standard_normal(grid.n))
    jac_delta = apply(gpe_solver.jacobian(state.field, eps), delta).values
    r0 = gpe_solver.residual(state.field, eps).values
    errs = []
    for t in (1e-3, 1e-4):
        shifted = make_field(grid, state.field.values + t * delta.values)
        r1 = gpe_solver.residual(shifted, eps).values
        errs.append(float(np.max(np.abs((r1 - r0) / t + jac_delta))))
    assert errs[0] / errs[1] == pytest.approx(10.0, rel=0.6)
    assert errs[1] <= 60.0 * 1e-4


def test_jacobian_positive_at_ground_state(ground_sweep):
    from tfx.spectrum import lowest_eigenpairs
    state = ground_sweep[0.05]
    op = gpe_solver.jacobian(state.field, 0.05)
    assert lowest_eigenpairs(op, 1).eigenvalues[0] > 0.0


class TestGroundState:
    def test_postconditions(self, ground_sweep):
        for eps, st in ground_sweep.items():
            assert st.m == 0
            assert st.residual_sup <= 1e-12
            assert st.zeros == ()
            assert st.field.parity == "even"
            assert float(np.min(st.field.values)) > 0.0
            assert float(np.max(st.field.values)) <= 1.0 + 1e-8

    def test_monotone_on_right_half(self, ground_sweep):
        for st in ground_sweep.values():
            half = st.field.values[(st.field.grid.n - 1) // 2:]
            assert np.all(np.diff(half) <= 1e-12)

    def test_sup_error_peaks_at_cloud_edge_with_cuberoot_scale(self, ground_sweep):
        slopes = []
        for eps, st in ground_sweep.items():
            cloud = ansatz.tf_cloud(st.field.grid)
            diff = np.abs(st.field.values - cloud.values)
            x_star = abs(st.field.grid.nodes[int(np.argmax(diff))])
            assert abs(x_star - 1.0) <= 2.0 * eps ** (2.0 / 3.0)
            slopes.append((eps, float(diff.max())))
        fit = analysis.fit_rate(slopes)
        assert fit.slope == pytest.approx(1.0 / 3.0, abs=0.1)

    def test_edge_value_scales_like_cuberoot(self, ground_sweep):
        ratios = []
        for eps, st in ground_sweep.items():
            i = int(np.argmin(np.abs(st.field.grid.nodes - 1.0)))
            ratios.append(st.field.values[i] / eps ** (1.0 / 3.0))
        assert min(ratios) >= 0.3
        assert max(ratios) / min(ratios) <= 1.5

    def test_rejects_unresolved_grid(self):
        grid = make_grid(2.0, 101)
        with pytest.raises(ValueError):
            gpe_solver.solve_ground(0.01, grid)

    def test_symmetrization_toggle_agrees(self):
        eps = 0.05
        grid = make_grid(2.0, resolution_for(eps))
        on = gpe_solver.solve_ground(eps, grid)
        off = gpe_solver.solve_ground(eps, grid,
                                      SolverOptions(symmetrize_each_step=False))
        assert analysis.sup_error(on.field, off.field) <= 1e-10

    def test_refinement_changes_state_at_second_order(self):
        eps = 0.05
        states = {}
        for factor in (8, 16, 32):
            grid = make_grid(2.0, resolution_for(eps, nodes_per_core=factor))
            states[factor] = gpe_solver.solve_ground(eps, grid)
        g8 = states[8].field.grid
        g16 = states[16].field.grid
        d1 = np.max(np.abs(np.interp(g8.nodes, g16.nodes, states[16].field.values)
                           - states[8].field.values))
        d2 = np.max(np.abs(np.interp(g16.nodes, states[32].field.grid.nodes,
                                     states[32].field.values)
                           - states[16].field.values))
        assert d1 / d2 == pytest.approx(4.0, rel=0.3)

    def test_quadratic_convergence_of_newton(self, ground_sweep):
        hist = ground_sweep[0.05].residual_history
        rates = [np.log(b) / np.log(a)
                 for a, b in zip(hist, hist[1:]) if a < 0.5 and b > 1e-13]
        assert rates and min(rates) >= 1.7


class TestFirstExcited:
    def test_pinned_zero_and_positivity(self, first_sweep):
        for eps, st in first_sweep.items():
            assert st.m == 1
            assert st.field.parity == "odd"
            assert st.zeros == (0.0,)
            mid = (st.field.grid.n - 1) // 2
            assert st.field.values[mid] == 0.0
            assert np.all(st.field.values[mid + 1:] > 0.0)

    def test_close_to_soliton_product(self, first_sweep, ground_sweep):
        for eps in (0.05, 0.01):
            guess = ansatz.product_ansatz(ground_sweep[eps].field, eps, (0.0,))
            err = analysis.sup_error(first_sweep[eps].field, guess)
            assert err <= 2.0 * eps ** (2.0 / 3.0)


class TestSecondExcited:
    def test_zeros_track_equilibrium_positions(self, second_sweep):
        from tfx.equilibrium import solve_bifurcation_scalar
        for eps, st in second_sweep.items():
            assert st.m == 2
            assert st.field.parity == "even"
            assert len(st.zeros) == 2
            a = solve_bifurcation_scalar(eps).positions[-1]
            assert st.zeros[1] == pytest.approx(a, abs=1e-4)
            assert st.zeros[0] == pytest.approx(-a, abs=1e-4)

    def test_wrong_position_seed_is_flagged_or_recovers(self, ground_sweep):
        # deliberately poor seed: solitons far outside equilibrium
        eps = 0.01
        ground = ground_sweep[eps]
        try:
            st = gpe_solver.solve_excited(eps, 2, ground.field.grid, (-0.5, 0.5),
                                          eta=ground.field)
        except NewtonError:
            return
        assert len(st.zeros) == 2
        assert st.zeros[1] <= 0.1  # migrated toward the true equilibrium

    def test_positions_must_match_m_and_symmetry(self, ground_sweep):
        ground = ground_sweep[0.02]
        with pytest.raises(ValueError):
            gpe_solver.solve_excited(0.02, 2, ground.field.grid, (0.0,),
                                     eta=ground.field)
        with pytest.raises(ValueError):
            gpe_solver.solve_excited(0.02, 2, ground.field.grid, (-0.01, 0.02),
                                     eta=ground.field)


class TestContinuation:
    def test_bifurcation_points(self):
        assert bifurcation_eps(1) == pytest.approx(1.0 / 3.0)
        assert bifurcation_eps(2) == pytest.approx(0.2)

    def test_first_branch_chain(self):
        states = gpe_solver.continuation_excited(1, [0.3, 0.2, 0.1, 0.05])
        assert [st.eps for st in states] == [0.3, 0.2, 0.1, 0.05]
        assert all(len(st.zeros) == 1 for st in states)
        assert all(st.field.parity == "odd" for st in states)

    def test_third_branch_has_center_zero(self):
        states = gpe_solver.continuation_excited(3, [0.12, 0.08])
        zeros = states[-1].zeros
        assert len(zeros) == 3
        assert zeros[1] == 0.0

    def test_rejects_bad_target_lists(self):
        with pytest.raises(ValueError):
            gpe_solver.continuation_excited(1, [0.32])  # above 0.9 eps_1
        with pytest.raises(ValueError):
            gpe_solver.continuation_excited(1, [0.2, 0.3])


def test_zero_count_error_reports_achieved_count():
    grid = make_grid(2.0, resolution_for(0.05))
    ground = gpe_solver.solve_ground(0.05, grid)
    with pytest.raises(ZeroCountError) as info:
        gpe_solver._finish_state(grid, 0.05, 3, ground.field.values,
                                 (ground.residual_sup,), 0)
    assert info.value.expected == 3
    assert info.value.found == 0


def test_continuation_error_carries_partial_results(monkeypatch):
    calls = []
    original = gpe_solver._newton

    def failing_newton(grid, eps, u0, parity, opts):
        calls.append(eps)
        if eps < 0.25:
            raise NewtonError("forced failure", (1.0,))
        return original(grid, eps, u0, parity, opts)

    monkeypatch.setattr(gpe_solver, "_newton", failing_newton)
    with pytest.raises(ContinuationError) as info:
        gpe_solver.continuation_excited(1, [0.3, 0.2])
    assert [st.eps for st in info.value.states] == [0.3]
    assert info.value.failures == (0.2,)
