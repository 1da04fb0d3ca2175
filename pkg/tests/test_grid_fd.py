import numpy as np
import pytest

from tfx import OperatorMatrix, apply, make_field, make_grid, schrodinger_matrix
from tfx.grid_fd import GridMismatchError, make_zgrid, resolution_for, symmetrized
from tfx.spectrum import lowest_eigenpairs


def test_make_grid_three_points():
    grid = make_grid(2.0, 3)
    assert grid.h == 1.0
    assert grid.nodes.tolist() == [-1.0, 0.0, 1.0]


def test_make_grid_spacing():
    grid = make_grid(2.0, 7999)
    assert grid.h == 4.0 / 8000


def test_make_grid_rejects_bad_input():
    with pytest.raises(ValueError):
        make_grid(1.0, 5)  # domain must contain the cloud support
    with pytest.raises(ValueError):
        make_grid(2.0, 4)
    with pytest.raises(ValueError):
        make_grid(2.0, 1)


def test_nodes_mirror_bitwise():
    grid = make_grid(2.0, 4097)
    assert np.array_equal(grid.nodes, -grid.nodes[::-1])
    assert grid.nodes[(grid.n - 1) // 2] == 0.0


def test_resolution_rule():
    for eps in (0.05, 0.013):
        n = resolution_for(eps)
        grid = make_grid(2.0, n)
        assert n % 2 == 1
        assert grid.h <= eps / 8.0


def test_schrodinger_matrix_stencil():
    grid = make_grid(2.0, 3)  # h = 1
    zero = make_field(grid, np.zeros(3))
    op = schrodinger_matrix(grid, 1.0, zero)
    assert np.allclose(op.diagonal, 2.0)
    assert op.off_diagonal == -1.0

    pot = make_field(grid, grid.nodes ** 2 - 1.0)
    op = schrodinger_matrix(grid, 1.0, pot)
    assert op.diagonal.tolist() == [2.0, 1.0, 2.0]


def test_second_derivative_is_second_order():
    # -d^2/dx^2 of sin(pi (x + L) / (2 L)) vs the analytic value, two grids
    errs = []
    for n in (801, 1601):
        grid = make_grid(2.0, n)
        k = np.pi / (2.0 * grid.x_max)
        f = make_field(grid, np.sin(k * (grid.nodes + grid.x_max)))
        zero = make_field(grid, np.zeros(grid.n))
        op = schrodinger_matrix(grid, 1.0, zero)
        exact = k * k * f.values
        errs.append(float(np.max(np.abs(apply(op, f).values - exact))))
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.05)


def test_apply_identity_and_parity():
    grid = make_grid(2.0, 51)
    rng = np.random.default_rng(3)
    f = make_field(grid, rng.standard_normal(grid.n))
    ident = OperatorMatrix(grid=grid, diagonal=np.ones(grid.n), off_diagonal=0.0)
    assert np.array_equal(apply(ident, f).values, f.values)

    odd = make_field(grid, symmetrized(rng.standard_normal(grid.n), "odd"), "odd")
    pot = make_field(grid, grid.nodes ** 2, "even")
    op = schrodinger_matrix(grid, 0.3, pot)
    assert apply(op, odd).parity == "odd"


def test_apply_matches_dense_oracle():
    grid = make_grid(2.0, 51)
    rng = np.random.default_rng(11)
    pot = make_field(grid, rng.standard_normal(grid.n))
    op = schrodinger_matrix(grid, 0.7, pot)
    dense = np.diag(op.diagonal)
    dense += np.diag(np.full(grid.n - 1, op.off_diagonal), 1)
    dense += np.diag(np.full(grid.n - 1, op.off_diagonal), -1)
    f = make_field(grid, rng.standard_normal(grid.n))
    assert np.max(np.abs(apply(op, f).values - dense @ f.values)) <= 1e-13


def test_apply_rejects_grid_mismatch():
    g1 = make_grid(2.0, 51)
    g2 = make_grid(2.0, 53)
    pot = make_field(g1, np.zeros(g1.n))
    op = schrodinger_matrix(g1, 1.0, pot)
    with pytest.raises(GridMismatchError):
        apply(op, make_field(g2, np.zeros(g2.n)))


def test_harmonic_ground_energy_converges_to_eps():
    # -eps^2 d^2/dx^2 + x^2 has spectrum eps (2k + 1)
    eps = 0.2
    errs = []
    for n in (401, 801):
        grid = make_grid(2.0, n)
        pot = make_field(grid, grid.nodes ** 2)
        op = schrodinger_matrix(grid, eps, pot)
        errs.append(abs(lowest_eigenpairs(op, 1).eigenvalues[0] - eps))
    assert errs[1] < errs[0] / 3.0
    assert errs[1] < 1e-5


def test_field_parity_enforcement():
    grid = make_grid(2.0, 101)
    vals = np.cos(grid.nodes)
    f = make_field(grid, vals, "even")
    assert np.array_equal(f.values, f.values[::-1])
    with pytest.raises(ValueError):
        make_field(grid, np.cos(grid.nodes) + np.linspace(0, 1, grid.n), "even")
    with pytest.raises(ValueError):
        make_field(grid, vals[:-1])


def test_zgrid():
    zg = make_zgrid(25.0, 499)
    assert zg.nodes[0] == pytest.approx(-25.0 + zg.h, abs=1e-13)
    assert np.array_equal(zg.nodes, -zg.nodes[::-1])
    with pytest.raises(ValueError):
        make_zgrid(-1.0, 499)
