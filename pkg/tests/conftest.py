import pytest

from tfx import ansatz, equilibrium, gpe_solver
from tfx.grid_fd import make_grid, resolution_for

# Default verification sweep.  Grids resolve the soliton core with 16
# nodes per sqrt(2)*eps width (twice the h <= eps/8 floor): the zero
# positions and product-ansatz errors measured by the acceptance tests
# sit below the discretization floor of the coarser rule.
SWEEP = (0.05, 0.02, 0.01, 0.005)
SECOND_SWEEP = (0.02, 0.01, 0.005)
NODES_PER_CORE = 16


def sweep_grid(eps):
    return make_grid(2.0, resolution_for(eps, nodes_per_core=NODES_PER_CORE))


@pytest.fixture(scope="session")
def painleve_sol():
    return ansatz.solve_painleve()


@pytest.fixture(scope="session")
def ground_sweep():
    return {eps: gpe_solver.solve_ground(eps, sweep_grid(eps)) for eps in SWEEP}


@pytest.fixture(scope="session")
def first_sweep(ground_sweep):
    out = {}
    for eps, ground in ground_sweep.items():
        out[eps] = gpe_solver.solve_excited(eps, 1, ground.field.grid, (0.0,),
                                            eta=ground.field)
    return out


@pytest.fixture(scope="session")
def second_sweep(ground_sweep):
    out = {}
    for eps in SECOND_SWEEP:
        ground = ground_sweep[eps]
        positions = equilibrium.solve_bifurcation_scalar(eps).positions
        out[eps] = gpe_solver.solve_excited(eps, 2, ground.field.grid, positions,
                                            eta=ground.field)
    return out
