"""Closed-form building blocks of the small-eps asymptotics.

The nearly compact cloud sqrt(max(1 - x^2, 0)), the dark soliton
tanh((x - a) / (sqrt(2) eps)), products of solitons riding on a
background, and the Painleve-II corner layer that smooths the cloud
edge at |x| = 1 over a width of order eps^(2/3).
"""

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .grid_fd import Grid, ScalarField, make_field, symmetrized

__all__ = [
    "PainleveSolution",
    "PainleveError",
    "tf_cloud",
    "dark_soliton",
    "product_ansatz",
    "solve_painleve",
    "corner_layer_field",
]

SQRT2 = math.sqrt(2.0)


class PainleveError(RuntimeError):
    """Newton failed on the corner-layer boundary value problem."""

    def __init__(self, message, residual_history=()):
        super().__init__(message)
        self.residual_history = tuple(residual_history)


@dataclass(frozen=True)
class PainleveSolution:
    """Discrete solution of 4 nu'' + y nu - nu^3 = 0 on [y_min, y_max].

    Boundary data pin nu(y_min) = 0 and nu(y_max) = sqrt(y_max); the
    interior is resolved by damped Newton.  residual_history holds the
    sup-norm residual after each accepted step (diagnostics and the
    quadratic-convergence check).
    """

    y_nodes: np.ndarray
    nu_values: np.ndarray
    residual_norm: float
    newton_iters: int
    residual_history: tuple

    def __post_init__(self):
        self.y_nodes.setflags(write=False)
        self.nu_values.setflags(write=False)

    def __call__(self, y):
        """Evaluate by interpolation, clamped to 0 below y_min and sqrt(y) above y_max."""
        y = np.asarray(y, dtype=float)
        out = np.interp(y, self.y_nodes, self.nu_values)
        out = np.where(y < self.y_nodes[0], 0.0, out)
        hi = y > self.y_nodes[-1]
        if np.any(hi):
            out = np.where(hi, np.sqrt(np.maximum(y, 0.0)), out)
        return out if out.ndim else float(out)


def tf_cloud(grid: Grid) -> ScalarField:
    """Compact cloud sqrt(1 - x^2) on |x| < 1, zero outside; even."""
    vals = np.sqrt(np.clip(1.0 - grid.nodes ** 2, 0.0, None))
    return make_field(grid, vals, parity="even")


def dark_soliton(grid: Grid, eps: float, center: float = 0.0) -> ScalarField:
    """Kink tanh((x - center) / (sqrt(2) eps)); odd when centered at 0."""
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    vals = np.tanh((grid.nodes - center) / (SQRT2 * eps))
    parity = "odd" if center == 0.0 else "none"
    return make_field(grid, vals, parity=parity)


def _positions_tuple(positions):
    pos = getattr(positions, "positions", positions)
    return tuple(float(a) for a in pos)


def product_ansatz(eta: ScalarField, eps: float, positions) -> ScalarField:
    """Background times a product of dark solitons, one per position.

    With positions symmetric about 0 the result has the parity of the
    soliton count (even count -> even, odd count -> odd).  An empty
    position list returns the background itself.
    """
    pos = _positions_tuple(positions)
    if any(b <= a for a, b in zip(pos, pos[1:])):
        raise ValueError(f"positions must be strictly increasing, got {pos}")
    x = eta.grid.nodes
    vals = np.array(eta.values, dtype=float)
    for a in pos:
        vals *= np.tanh((x - a) / (SQRT2 * eps))
    m = len(pos)
    antisym = m == 0 or max(abs(a + b) for a, b in zip(pos, reversed(pos))) <= 1e-12
    parity = "none"
    if eta.parity == "even" and antisym:
        parity = "even" if m % 2 == 0 else "odd"
        vals = symmetrized(vals, parity)
    return ScalarField(grid=eta.grid, values=vals, parity=parity)


def _painleve_residual(y: np.ndarray, nu: np.ndarray, h: float) -> np.ndarray:
    """Interior residual of 4 nu'' + y nu - nu^3 with the boundary values in place."""
    d2 = (nu[:-2] - 2.0 * nu[1:-1] + nu[2:]) / (h * h)
    return 4.0 * d2 + y[1:-1] * nu[1:-1] - nu[1:-1] ** 3


def solve_painleve(y_min: float = -15.0, y_max: float = 20.0, n: int = 3501,
                   tol: float = 1e-10, max_iters: int = 60) -> PainleveSolution:
    """Damped-Newton solution of the corner-layer boundary value problem.

    The connection conditions are nu(y_max) = sqrt(y_max) (matching the
    parabolic growth nu ~ sqrt(y)) and nu(y_min) = 0 (the solution decays
    faster than any exponential to the left, so truncation there is
    harmless).  The initial guess sqrt(max(y, 0) + 0.1) sits in the basin
    of the positive connecting solution and avoids the trivial branch.

    The reachable residual scales like (4/h^2) * machine epsilon, so a
    finer grid needs a proportionally larger tol.
    """
    if y_min > -10.0:
        raise ValueError(f"y_min must be <= -10, got {y_min}")
    if y_max < 10.0:
        raise ValueError(f"y_max must be >= 10, got {y_max}")
    if n < 51:
        raise ValueError("n too small to resolve the layer")
    y = np.linspace(y_min, y_max, n)
    h = (y_max - y_min) / (n - 1)

    nu = np.sqrt(np.maximum(y, 0.0) + 0.1)
    nu[0] = 0.0
    nu[-1] = math.sqrt(y_max)

    res = _painleve_residual(y, nu, h)
    r_sup = float(np.max(np.abs(res)))
    history = [r_sup]
    iters = 0
    while r_sup > tol:
        if iters >= max_iters:
            raise PainleveError(
                f"no convergence after {max_iters} iterations (residual {r_sup:.3e})",
                history)
        # Jacobian of the interior residual: tridiagonal, diag -8/h^2 + y - 3 nu^2.
        diag = -8.0 / (h * h) + y[1:-1] - 3.0 * nu[1:-1] ** 2
        off = 4.0 / (h * h)
        ab = np.zeros((3, n - 2))
        ab[0, 1:] = off
        ab[1, :] = diag
        ab[2, :-1] = off
        try:
            delta = sla.solve_banded((1, 1), ab, -res)
        except np.linalg.LinAlgError as exc:
            raise PainleveError(f"singular Jacobian: {exc}", history) from exc
        t = 1.0
        while True:
            cand = nu.copy()
            cand[1:-1] += t * delta
            cand_res = _painleve_residual(y, cand, h)
            cand_sup = float(np.max(np.abs(cand_res)))
            if cand_sup < r_sup:
                break
            t *= 0.5
            if t < 2.0 ** -20:
                raise PainleveError(
                    f"damping stalled at residual {r_sup:.3e}", history)
        nu, res, r_sup = cand, cand_res, cand_sup
        history.append(r_sup)
        iters += 1

    return PainleveSolution(y_nodes=y, nu_values=nu, residual_norm=r_sup,
                            newton_iters=iters, residual_history=tuple(history))


def corner_layer_field(grid: Grid, eps: float, pnl: PainleveSolution) -> ScalarField:
    """Edge-layer approximation eps^(1/3) nu((1 - x^2) / eps^(2/3)); even.

    Outside the solved window nu is clamped: 0 to the left (super-
    exponential decay), sqrt(y) to the right (where the layer merges
    into the cloud), so the field is defined on any grid.
    """
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    y = (1.0 - grid.nodes ** 2) / eps ** (2.0 / 3.0)
    vals = eps ** (1.0 / 3.0) * pnl(y)
    return make_field(grid, vals, parity="even")
