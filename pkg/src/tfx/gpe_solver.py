"""Damped-Newton solution of eps^2 u'' + (1 - x^2 - u^2) u = 0.

The ground state (no zeros) starts from the compact cloud; the m-th
excited state starts from the ground state multiplied by m dark
solitons.  Near the bifurcation point eps_m = 1/(1+2m) the states can
also be grown by continuation in eps, seeded with the m-th oscillator
mode at small amplitude.

Parity is enforced by projecting each Newton iterate onto the even or
odd subspace (the states carry exact parity and symmetrization keeps
round-off from drifting into asymmetric artifacts).
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from . import analysis, spectrum
from .ansatz import product_ansatz, tf_cloud
from .grid_fd import (Grid, OperatorMatrix, ScalarField, make_field,
                      make_grid, resolution_for, schrodinger_matrix,
                      symmetrized)

__all__ = [
    "SolverOptions",
    "StationaryState",
    "NewtonError",
    "ZeroCountError",
    "InconsistentStateError",
    "ContinuationError",
    "residual",
    "jacobian",
    "solve_ground",
    "solve_excited",
    "continuation_excited",
    "bifurcation_eps",
]


class NewtonError(RuntimeError):
    """Newton iteration failed; carries the sup-norm residual history."""

    def __init__(self, message, residual_history=()):
        super().__init__(message)
        self.residual_history = tuple(residual_history)


class InconsistentStateError(NewtonError):
    """A converged iterate violates a structural property (e.g. positivity)."""


class ZeroCountError(NewtonError):
    """Converged to a state with the wrong number of zeros (basin escape)."""

    def __init__(self, message, expected, found, residual_history=()):
        super().__init__(message, residual_history)
        self.expected = expected
        self.found = found


class ContinuationError(NewtonError):
    """A continuation leg failed; carries the states solved so far."""

    def __init__(self, message, states=(), failures=(), residual_history=()):
        super().__init__(message, residual_history)
        self.states = tuple(states)
        self.failures = tuple(failures)


@dataclass(frozen=True)
class SolverOptions:
    residual_tol: float = 1e-12
    max_newton_iters: int = 60
    damping_factor: float = 0.5
    min_step: float = 2.0 ** -20
    symmetrize_each_step: bool = True

    def __post_init__(self):
        if self.residual_tol <= 0.0:
            raise ValueError("residual_tol must be positive")
        if self.max_newton_iters < 1:
            raise ValueError("max_newton_iters must be >= 1")


@dataclass(frozen=True)
class StationaryState:
    """A converged stationary solution with m sign changes."""

    eps: float
    m: int
    field: ScalarField
    residual_sup: float
    zeros: tuple
    newton_iters: int
    residual_history: tuple = field(default_factory=tuple)


def bifurcation_eps(m: int) -> float:
    """Linear bifurcation point eps_m = 1 / (1 + 2m) of the m-th branch."""
    return 1.0 / (1.0 + 2.0 * m)


def _residual_values(grid: Grid, eps: float, u: np.ndarray) -> np.ndarray:
    c = eps * eps / (grid.h * grid.h)
    out = (1.0 - grid.nodes ** 2 - u ** 2) * u - 2.0 * c * u
    out[1:] += c * u[:-1]
    out[:-1] += c * u[1:]
    return out


def residual(f: ScalarField, eps: float) -> ScalarField:
    """Discrete residual of the stationary equation at every node (Dirichlet ends)."""
    vals = _residual_values(f.grid, eps, f.values)
    return ScalarField(grid=f.grid, values=vals, parity="none")


def jacobian(f: ScalarField, eps: float) -> OperatorMatrix:
    """Linearization -eps^2 d^2/dx^2 + x^2 - 1 + 3 u^2 at the field u.

    Sign convention: jacobian . delta ~ -d(residual), so a Newton step
    solves jacobian . delta = residual and updates u <- u + delta.
    """
    grid = f.grid
    pot = make_field(grid, grid.nodes ** 2 - 1.0 + 3.0 * f.values ** 2)
    return schrodinger_matrix(grid, eps, pot, description="stationary-equation jacobian")


def _check_resolution(grid: Grid, eps: float):
    if grid.h > eps / 8.0 * (1.0 + 1e-12):
        raise ValueError(
            f"grid too coarse for eps={eps}: h={grid.h:.3e} exceeds eps/8={eps / 8.0:.3e}")


def _newton(grid: Grid, eps: float, u0: np.ndarray, parity: str,
            opts: SolverOptions):
    """Damped Newton with backtracking on the sup-norm residual."""
    u = symmetrized(u0, parity) if opts.symmetrize_each_step else np.array(u0)
    res = _residual_values(grid, eps, u)
    r_sup = float(np.max(np.abs(res)))
    history = [r_sup]
    iters = 0
    while r_sup > opts.residual_tol:
        if iters >= opts.max_newton_iters:
            raise NewtonError(
                f"no convergence after {iters} iterations (residual {r_sup:.3e})",
                history)
        c = eps * eps / (grid.h * grid.h)
        ab = np.zeros((3, grid.n))
        ab[0, 1:] = -c
        ab[1, :] = 2.0 * c + grid.nodes ** 2 - 1.0 + 3.0 * u ** 2
        ab[2, :-1] = -c
        try:
            delta = sla.solve_banded((1, 1), ab, res)
        except np.linalg.LinAlgError as exc:
            raise NewtonError(f"singular Jacobian: {exc}", history) from exc
        t = 1.0
        while True:
            cand = u + t * delta
            if opts.symmetrize_each_step:
                cand = symmetrized(cand, parity)
            cand_res = _residual_values(grid, eps, cand)
            cand_sup = float(np.max(np.abs(cand_res)))
            if cand_sup < r_sup:
                break
            t *= opts.damping_factor
            if t < opts.min_step:
                raise NewtonError(
                    f"damping stalled at residual {r_sup:.3e}", history)
        u, res, r_sup = cand, cand_res, cand_sup
        history.append(r_sup)
        iters += 1
    return u, tuple(history), iters


def _finish_state(grid: Grid, eps: float, m: int, u: np.ndarray,
                  history, iters) -> StationaryState:
    parity = "even" if m % 2 == 0 else "odd"
    f = ScalarField(grid=grid, values=u, parity=parity)
    zeros = analysis.find_zeros(f)
    if len(zeros) != m:
        raise ZeroCountError(
            f"converged to a state with {len(zeros)} zeros, expected {m}",
            expected=m, found=len(zeros), residual_history=history)
    return StationaryState(eps=eps, m=m, field=f,
                           residual_sup=history[-1], zeros=zeros,
                           newton_iters=iters, residual_history=history)


def solve_ground(eps: float, grid: Grid, opts: SolverOptions | None = None) -> StationaryState:
    """Positive even ground state, Newton-started from the smoothed compact cloud."""
    opts = opts or SolverOptions()
    _check_resolution(grid, eps)
    u0 = tf_cloud(grid).values
    # One Jacobi relaxation sweep rounds off the corner at |x| = 1.
    sm = np.zeros_like(u0)
    sm[1:-1] = 0.5 * (u0[:-2] + u0[2:])
    sm[0] = 0.5 * u0[1]
    sm[-1] = 0.5 * u0[-2]
    u, history, iters = _newton(grid, eps, sm, "even", opts)
    if float(np.min(u)) <= 0.0:
        raise InconsistentStateError(
            "ground state lost positivity after convergence", history)
    half = u[(grid.n - 1) // 2:]
    if np.any(np.diff(half) > 1e-12):
        warnings.warn("ground state is not monotone on [0, x_max] at this resolution")
    return _finish_state(grid, eps, 0, u, history, iters)


def solve_excited(eps: float, m: int, grid: Grid, positions,
                  opts: SolverOptions | None = None,
                  eta: ScalarField | None = None) -> StationaryState:
    """m-th excited state from the soliton-product initial guess.

    positions must hold m values symmetric about the origin.  The
    background eta defaults to a freshly solved ground state at the
    same eps; pass a cached one to skip that solve.
    """
    opts = opts or SolverOptions()
    if m < 1:
        raise ValueError("m must be >= 1 (use solve_ground for m = 0)")
    _check_resolution(grid, eps)
    pos = tuple(float(a) for a in getattr(positions, "positions", positions))
    if len(pos) != m:
        raise ValueError(f"need {m} positions, got {len(pos)}")
    if max(abs(a + b) for a, b in zip(pos, reversed(pos))) > 1e-9:
        raise ValueError(f"positions must be symmetric about 0, got {pos}")
    if eta is None:
        eta = solve_ground(eps, grid, opts).field
    guess = product_ansatz(eta, eps, pos)
    parity = "even" if m % 2 == 0 else "odd"
    u, history, iters = _newton(grid, eps, guess.values, parity, opts)
    return _finish_state(grid, eps, m, u, history, iters)


def _oscillator_mode(grid: Grid, eps: float, m: int) -> np.ndarray:
    """m-th eigenfunction of -eps^2 d^2/dx^2 + x^2 (m zeros), sup-normalized."""
    pot = make_field(grid, grid.nodes ** 2)
    op = schrodinger_matrix(grid, eps, pot, description="harmonic oscillator")
    result = spectrum.lowest_eigenpairs(op, m + 1)
    mode = result.eigenfunctions[m].values
    return mode / float(np.max(np.abs(mode)))


def continuation_excited(m: int, eps_targets, grid_policy=None,
                         opts: SolverOptions | None = None,
                         seed_amplitude: float = 0.1):
    """Solve the m-th branch over a decreasing list of eps values.

    The first leg is seeded with seed_amplitude times the m-th
    oscillator mode; each later leg reuses the previous converged state
    interpolated onto the new grid.  If a seed collapses into the zero
    solution (Newton is happy there too), the amplitude is doubled and
    the leg retried before giving up.
    """
    opts = opts or SolverOptions()
    targets = [float(e) for e in eps_targets]
    if any(b >= a for a, b in zip(targets, targets[1:])):
        raise ValueError("eps_targets must be strictly decreasing")
    eps_m = bifurcation_eps(m)
    if targets[0] > 0.9 * eps_m + 1e-12:
        raise ValueError(
            f"first target {targets[0]} exceeds 0.9 eps_m = {0.9 * eps_m:.4f} for m={m}")
    if grid_policy is None:
        grid_policy = _default_grid_policy
    parity = "even" if m % 2 == 0 else "odd"

    states = []
    prev = None
    for eps in targets:
        try:
            if prev is None:
                grid = grid_policy(eps)
                _check_resolution(grid, eps)
                state = _seed_first_leg(grid, eps, m, parity, opts, seed_amplitude)
            else:
                state = _continue_leg(prev, eps, m, parity, grid_policy, opts)
        except NewtonError as exc:
            raise ContinuationError(
                f"continuation leg eps={eps} failed: {exc}",
                states=states, failures=(eps,),
                residual_history=exc.residual_history) from exc
        states.append(state)
        prev = state
    return states


def _continue_leg(prev, eps, m, parity, grid_policy, opts, depth=0):
    """One continuation step, bisected recursively if the basin is missed.

    The seed is the previous state rescaled by the near-bifurcation
    amplitude law |u| ~ sqrt(1 - (2m+1) eps): without it large steps in
    eps land outside the target branch's basin.
    """
    grid = grid_policy(eps)
    _check_resolution(grid, eps)
    u0 = np.interp(grid.nodes, prev.field.grid.nodes, prev.field.values)
    c_prev = 1.0 - (2.0 * m + 1.0) * prev.eps
    c_next = 1.0 - (2.0 * m + 1.0) * eps
    if c_prev > 0.0 and c_next > 0.0:
        u0 = u0 * math.sqrt(c_next / c_prev)
    try:
        u, history, iters = _newton(grid, eps, u0, parity, opts)
        return _finish_state(grid, eps, m, u, history, iters)
    except NewtonError:
        if depth >= 6:
            raise
        mid_state = _continue_leg(prev, 0.5 * (prev.eps + eps), m, parity,
                                  grid_policy, opts, depth + 1)
        return _continue_leg(mid_state, eps, m, parity, grid_policy, opts,
                             depth + 1)


def _seed_first_leg(grid, eps, m, parity, opts, amplitude):
    mode = _oscillator_mode(grid, eps, m)
    amp = amplitude
    last_exc = None
    # The zero solution attracts Newton from too-small seeds; grow the
    # amplitude geometrically until the nontrivial branch is captured.
    for _ in range(8):
        try:
            u, history, iters = _newton(grid, eps, amp * mode, parity, opts)
            if float(np.max(np.abs(u))) > 1e-6:
                return _finish_state(grid, eps, m, u, history, iters)
            last_exc = NewtonError("collapsed to the zero solution", history)
        except NewtonError as exc:
            last_exc = exc
        amp *= 2.0
    raise last_exc


def _default_grid_policy(eps: float) -> Grid:
    return make_grid(2.0, resolution_for(eps))
