"""Where the solitons sit: trap force against tail-to-tail repulsion.

For two symmetric solitons the balance equation
4 sqrt(2) eps a = 32 exp(-2 sqrt(2) a / eps) fixes the half-separation.
This script compares four routes to it: the closed-form asymptotic
expansion, the logarithmic fixed-point refinement, the exact root, and
the m-soliton interaction system, then checks them all against the
zeros of the actual solved two-soliton state.
"""

from pathlib import Path

from tfx import equilibrium, gpe_solver, serialize
from tfx.grid_fd import make_grid, resolution_for

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

print(f"{'eps':>7} {'asymptotic':>12} {'fixed-point':>12} {'exact root':>12} "
      f"{'toda m=2':>12} {'PDE zero':>12} {'|zero-root|':>12}")
rows = []
for eps in (0.02, 0.01, 0.005):
    a_asym = equilibrium.predict_position_asymptotic(eps)
    _, _, a_uv = equilibrium.refine_position(eps)
    scalar = equilibrium.solve_bifurcation_scalar(eps)
    a_root = scalar.positions[-1]
    a_toda = equilibrium.solve_toda(eps, 2).positions[-1]

    grid = make_grid(2.0, resolution_for(eps, nodes_per_core=16))
    ground = gpe_solver.solve_ground(eps, grid)
    state = gpe_solver.solve_excited(eps, 2, grid, scalar.positions,
                                     eta=ground.field)
    x0 = max(state.zeros)
    print(f"{eps:>7} {a_asym:>12.7f} {a_uv:>12.7f} {a_root:>12.7f} "
          f"{a_toda:>12.7f} {x0:>12.7f} {abs(x0 - a_root):>12.2e}")
    rows.append((eps, a_asym, a_uv, a_root, a_toda, x0))
serialize.write_csv(OUT / "equilibrium_positions.csv",
                    ("eps", "a_asymptotic", "a_uv", "a_scalar", "a_toda", "x0"),
                    rows)

print("\nthe zero-vs-root gap shrinks much faster than a itself "
      "(the product approximation places the zeros to higher order).")

print("\nthree and five solitons (interaction system):")
for m in (3, 5):
    cfg = equilibrium.solve_toda(0.005, m)
    print(f"  m={m}: positions {[f'{a:+.5f}' for a in cfg.positions]}, "
          f"bounds ok: {cfg.bounds_ok}")
print("\na-priori bound ratios at eps=0.01, m=2 "
      "(amplitude must stay below 1):")
cfg = equilibrium.solve_toda(0.01, 2)
print(f"  amplitude ratio {cfg.bound_amplitude:.3f}, "
      f"interaction ratio {cfg.bound_interaction:.3f}")
