"""Excited states as products of dark solitons riding on the ground state.

Solves the first three excited states at eps = 0.01, checks the zero
pattern (m zeros, parity of m), and measures how close each state is
to the product of the ground state with m dark solitons placed at the
equilibrium positions.  Also demonstrates continuation from near the
bifurcation point eps_m = 1/(1+2m) down to small eps.
"""

from pathlib import Path

import numpy as np

from tfx import analysis, ansatz, equilibrium, gpe_solver, serialize
from tfx.grid_fd import make_grid, resolution_for

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

eps = 0.01
grid = make_grid(2.0, resolution_for(eps, nodes_per_core=16))
ground = gpe_solver.solve_ground(eps, grid)
print(f"ground state at eps={eps}: residual {ground.residual_sup:.2e}")

for m in (1, 2, 3):
    positions = equilibrium.solve_toda(eps, m).positions
    state = gpe_solver.solve_excited(eps, m, grid, positions, eta=ground.field)
    guess = ansatz.product_ansatz(ground.field, eps, positions)
    err = analysis.sup_error(state.field, guess)
    print(f"\nm={m}: solitons at {[f'{a:+.4f}' for a in positions]}")
    print(f"   zeros of the solved state: {[f'{z:+.6f}' for z in state.zeros]}")
    print(f"   parity: {state.field.parity}   sup|state - product| = {err:.2e}"
          f"   (eps^(2/3) = {eps ** (2/3):.3f})")
    serialize.write_csv(OUT / f"excited_m{m}_eps{eps:g}.csv", ("x", "u"),
                        zip(grid.nodes, state.field.values))

print("\ncontinuation of the m=1 branch from near eps_1 = 1/3:")
chain = gpe_solver.continuation_excited(1, [0.3, 0.2, 0.1, 0.05])
for st in chain:
    print(f"   eps={st.eps}: amplitude {np.max(np.abs(st.field.values)):.4f}, "
          f"zeros {st.zeros}")

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, axes = plt.subplots(3, 1, figsize=(7, 8), sharex=True)
    for ax, m in zip(axes, (1, 2, 3)):
        positions = equilibrium.solve_toda(eps, m).positions
        state = gpe_solver.solve_excited(eps, m, grid, positions,
                                         eta=ground.field)
        ax.plot(grid.nodes, state.field.values, lw=1)
        ax.plot(grid.nodes, ground.field.values, "k:", lw=0.8)
        ax.plot(grid.nodes, -ground.field.values, "k:", lw=0.8)
        ax.set_ylabel(f"m = {m}")
        ax.set_xlim(-1.3, 1.3)
    axes[-1].set_xlabel("x")
    axes[0].set_title(f"excited states at eps = {eps}")
    fig.tight_layout()
    fig.savefig(OUT / "excited_states.png", dpi=120)
    print(f"\nwrote {OUT / 'excited_states.png'}")
except ImportError:
    print("\nmatplotlib not available; CSV output only")
