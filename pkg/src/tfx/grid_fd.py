"""Uniform symmetric grids and second-order finite-difference operators.

All computations live on the interior nodes of a truncated symmetric
interval [-x_max, x_max] with homogeneous Dirichlet conditions at the
cut.  The node count n is kept odd so that x = 0 is a node: parity
enforcement and the pinned zero of odd states both need it.  Nodes are
built by mirroring one half so that x_i == -x_{n+1-i} holds bitwise.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Grid",
    "ScalarField",
    "OperatorMatrix",
    "GridMismatchError",
    "make_grid",
    "make_zgrid",
    "make_field",
    "symmetrized",
    "resolution_for",
    "schrodinger_matrix",
    "apply",
]

PARITIES = ("even", "odd", "none")


class GridMismatchError(ValueError):
    """Raised when two objects defined on different grids are combined."""


@dataclass(frozen=True)
class Grid:
    """Interior nodes of a uniform mesh on [-x_max, x_max], spacing h = 2 x_max / (n+1)."""

    x_max: float
    n: int
    h: float
    nodes: np.ndarray

    def __post_init__(self):
        self.nodes.setflags(write=False)


@dataclass(frozen=True)
class ScalarField:
    """Real samples of a function on a Grid, tagged with a parity."""

    grid: Grid
    values: np.ndarray
    parity: str = "none"

    def __post_init__(self):
        self.values.setflags(write=False)


@dataclass(frozen=True)
class OperatorMatrix:
    """Symmetric tridiagonal operator -c d^2/dx^2 + V(x) with Dirichlet ends.

    The constant off-diagonal is -c/h^2 and the diagonal is 2c/h^2 + V(x_i).
    """

    grid: Grid
    diagonal: np.ndarray
    off_diagonal: float
    description: str = ""

    def __post_init__(self):
        self.diagonal.setflags(write=False)


def make_grid(x_max: float, n: int) -> Grid:
    """Symmetric grid of n interior nodes; n odd, x_max > 1 (the cloud support |x| < 1 must fit)."""
    if n < 3 or n % 2 == 0:
        raise ValueError(f"n must be odd and >= 3, got {n}")
    if not x_max > 1.0:
        raise ValueError(f"x_max must exceed 1, got {x_max}")
    h = 2.0 * x_max / (n + 1)
    half = (n - 1) // 2
    right = h * np.arange(1, half + 1, dtype=float)
    nodes = np.concatenate([-right[::-1], [0.0], right])
    return Grid(x_max=float(x_max), n=int(n), h=h, nodes=nodes)


def make_zgrid(z_max: float, n: int) -> Grid:
    """Grid in the stretched variable z = x / (sqrt(2) eps); no lower bound on z_max besides > 0."""
    if n < 3 or n % 2 == 0:
        raise ValueError(f"n must be odd and >= 3, got {n}")
    if not z_max > 0.0:
        raise ValueError(f"z_max must be positive, got {z_max}")
    h = 2.0 * z_max / (n + 1)
    half = (n - 1) // 2
    right = h * np.arange(1, half + 1, dtype=float)
    nodes = np.concatenate([-right[::-1], [0.0], right])
    return Grid(x_max=float(z_max), n=int(n), h=h, nodes=nodes)


def resolution_for(eps: float, x_max: float = 2.0, nodes_per_core: float = 8.0) -> int:
    """Smallest odd n with spacing h <= eps / nodes_per_core on [-x_max, x_max]."""
    n = int(np.ceil(2.0 * x_max * nodes_per_core / eps))
    return n if n % 2 == 1 else n + 1


def symmetrized(values: np.ndarray, parity: str) -> np.ndarray:
    """Project onto the even or odd subspace; exact for already-symmetric data."""
    if parity == "even":
        return 0.5 * (values + values[::-1])
    if parity == "odd":
        return 0.5 * (values - values[::-1])
    return np.array(values, dtype=float)


def make_field(grid: Grid, values, parity: str = "none") -> ScalarField:
    """Wrap samples as a ScalarField; a declared parity is enforced by symmetrization."""
    v = np.asarray(values, dtype=float)
    if v.shape != (grid.n,):
        raise ValueError(f"values length {v.shape} does not match grid n={grid.n}")
    if parity not in PARITIES:
        raise ValueError(f"parity must be one of {PARITIES}")
    if parity != "none":
        sym = symmetrized(v, parity)
        scale = max(float(np.max(np.abs(v))), 1.0)
        if float(np.max(np.abs(sym - v))) > 1e-6 * scale:
            raise ValueError(f"values are not {parity} within tolerance")
        v = sym
    else:
        v = np.array(v, dtype=float)
    return ScalarField(grid=grid, values=v, parity=parity)


def same_grid(a: Grid, b: Grid) -> bool:
    return a is b or (a.n == b.n and a.x_max == b.x_max)


def schrodinger_matrix(grid: Grid, eps: float, potential: ScalarField,
                       description: str = "") -> OperatorMatrix:
    """Tridiagonal discretization of -eps^2 d^2/dx^2 + V(x), Dirichlet at +-x_max."""
    if not same_grid(grid, potential.grid):
        raise GridMismatchError("potential does not live on the given grid")
    c = eps * eps / (grid.h * grid.h)
    diagonal = 2.0 * c + potential.values
    return OperatorMatrix(grid=grid, diagonal=diagonal, off_diagonal=-c,
                          description=description)


def apply(op: OperatorMatrix, f: ScalarField) -> ScalarField:
    """Matrix-vector product; preserves the parity tag when the potential is even."""
    if not same_grid(op.grid, f.grid):
        raise GridMismatchError("operator and field live on different grids")
    v = f.values
    out = op.diagonal * v
    out[1:] += op.off_diagonal * v[:-1]
    out[:-1] += op.off_diagonal * v[1:]
    parity = "none"
    if f.parity != "none" and np.array_equal(op.diagonal, op.diagonal[::-1]):
        parity = f.parity
    return ScalarField(grid=f.grid, values=out, parity=parity)
