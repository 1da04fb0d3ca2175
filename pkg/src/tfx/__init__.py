"""Stationary states of the trapped 1-D Gross-Pitaevskii equation in the
Thomas-Fermi (small-eps) limit: ground and excited states, dark-soliton
product approximations, equilibrium soliton positions, and the spectra
of the associated linearization operators.
"""

from .analysis import (RateFit, VerificationReport, c1_error_on_compact,
                       find_zeros, fit_rate, sup_error, verify_claims)
from .ansatz import (PainleveSolution, corner_layer_field, dark_soliton,
                     product_ansatz, solve_painleve, tf_cloud)
from .equilibrium import (SolitonConfig, check_bounds,
                          predict_position_asymptotic, refine_position,
                          solve_bifurcation_scalar, solve_toda)
from .gpe_solver import (ContinuationError, NewtonError, SolverOptions,
                         StationaryState, ZeroCountError, bifurcation_eps,
                         continuation_excited, jacobian, residual,
                         solve_excited, solve_ground)
from .grid_fd import (Grid, OperatorMatrix, ScalarField, apply, make_field,
                      make_grid, make_zgrid, resolution_for,
                      schrodinger_matrix)
from .spectrum import (SpectrumResult, count_potential_wells,
                       linearized_operator, lowest_eigenpairs,
                       multi_well_operator, single_well_inverse_odd,
                       single_well_operator, split_eigenfunctions)

__version__ = "0.1.0"
