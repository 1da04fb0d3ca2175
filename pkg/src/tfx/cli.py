"""Command-line surface: ground, excited, equilibrium, spectrum, converge, painleve.

Exit codes: 0 success, 2 usage, 3 wrong zero count (basin escape),
4 convergence failure, 5 I/O.  Flags beat the optional KEY=VALUE
config file, which beats built-in defaults.  TFX_CACHE_DIR overrides
the cache location.
"""

import argparse
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import analysis, ansatz, equilibrium, gpe_solver, serialize, spectrum
from .grid_fd import make_grid, make_zgrid, resolution_for

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_BASIN = 3
EXIT_NO_CONVERGENCE = 4
EXIT_IO = 5

DEFAULT_SWEEP = (0.05, 0.02, 0.01, 0.005)


class UsageError(ValueError):
    pass


def _eps_list(text):
    try:
        values = [float(t) for t in str(text).split(",") if t]
    except ValueError as exc:
        raise UsageError(f"bad eps list {text!r}") from exc
    if not values or any(e <= 0.0 for e in values):
        raise UsageError(f"eps values must be positive, got {text!r}")
    return values


def _load_config(path):
    cfg = {}
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"bad config line {line!r}")
        key, val = line.split("=", 1)
        cfg[key.strip().replace("-", "_")] = val.strip()
    return cfg


def _merge(args, config, key, default, cast=str):
    val = getattr(args, key, None)
    if val is not None:
        return val
    if key in config:
        return cast(config[key])
    return default


def _grid_for(eps, x_max, n_override):
    n_auto = resolution_for(eps, x_max)
    n = n_override or n_auto
    if n_override and n_override < n_auto:
        print(f"warning: n={n_override} is below the resolution rule "
              f"h <= eps/8 (needs n >= {n_auto})", file=sys.stderr)
    if n % 2 == 0:
        n += 1
    return make_grid(x_max, n)


def _fmt(x):
    return format(x, "g")


class Runtime:
    """Resolved run options shared by the subcommands."""

    def __init__(self, args):
        config = _load_config(args.config) if getattr(args, "config", None) else {}
        self.out = Path(_merge(args, config, "out", "out"))
        self.x_max = float(_merge(args, config, "x_max", 2.0, float))
        self.n = _merge(args, config, "n", None, int)
        self.jobs = int(_merge(args, config, "jobs", 1, int))
        self.tol = float(_merge(args, config, "tol", 1e-12, float))
        cache_dir = os.environ.get("TFX_CACHE_DIR") or _merge(
            args, config, "cache_dir", str(self.out / "cache"))
        self.cache = None
        if not getattr(args, "no_cache", False):
            self.cache = serialize.StateCache(cache_dir)
        self.opts = gpe_solver.SolverOptions(residual_tol=self.tol)

    def solve_ground(self, eps):
        grid = _grid_for(eps, self.x_max, self.n)
        if self.cache:
            hit = self.cache.load(0, eps, grid.x_max, grid.n, self.tol)
            if hit is not None:
                return hit
        state = gpe_solver.solve_ground(eps, grid, self.opts)
        if self.cache:
            self.cache.save(state)
        return state

    def solve_excited(self, eps, m, positions=None):
        grid = _grid_for(eps, self.x_max, self.n)
        if self.cache:
            hit = self.cache.load(m, eps, grid.x_max, grid.n, self.tol)
            if hit is not None:
                return hit
        eta = self.solve_ground(eps)
        if positions is None:
            positions = equilibrium.solve_toda(eps, m).positions
        state = gpe_solver.solve_excited(eps, m, grid, positions, self.opts,
                                         eta=eta.field)
        if self.cache:
            self.cache.save(state)
        return state

    def map_eps(self, fn, eps_values):
        if self.jobs > 1:
            with ThreadPoolExecutor(max_workers=self.jobs) as pool:
                return list(pool.map(fn, eps_values))
        return [fn(e) for e in eps_values]


def _write_state(rt, state, stem):
    rt.out.mkdir(parents=True, exist_ok=True)
    serialize.save_state(rt.out / f"{stem}.json", state)
    grid = state.field.grid
    serialize.write_csv(rt.out / f"{stem}.csv", ("x", "u"),
                        zip(grid.nodes, state.field.values))
    serialize.write_plot_stub(rt.out / f"{stem}.csv", ("x", "u"), title=stem)


def cmd_ground(args):
    rt = Runtime(args)
    eps_values = _eps_list(args.eps)
    states = rt.map_eps(rt.solve_ground, eps_values)
    for state in states:
        _write_state(rt, state, f"ground_eps{_fmt(state.eps)}")
    if args.verify:
        if len(states) < 3:
            raise UsageError("--verify needs a sweep of at least 3 eps values")
        reports = analysis.verify_claims(states)
        _write_reports(rt, reports)
    return EXIT_OK


def _write_reports(rt, reports):
    rt.out.mkdir(parents=True, exist_ok=True)
    for rep in reports:
        payload = {
            "claim": rep.claim_id,
            "expected_rate": rep.expected_rate,
            "tolerance": rep.tolerance,
            "one_sided": rep.one_sided,
            "pass": rep.passed,
        }
        if rep.fitted_rate is not None:
            payload["slope"] = rep.fitted_rate.slope
            payload["r_squared"] = rep.fitted_rate.r_squared
        serialize.write_json(rt.out / f"report_{rep.claim_id}.json", payload)
        (rt.out / f"raw_{rep.claim_id}.csv").write_text(
            rep.raw_table, encoding="ascii", newline="\n")
        print(f"{rep.claim_id}: {'PASS' if rep.passed else 'FAIL'}")


def cmd_excited(args):
    rt = Runtime(args)
    eps_values = _eps_list(args.eps)
    m = args.m
    positions = None
    if args.positions:
        positions = tuple(float(t) for t in args.positions.split(","))
        if len(positions) != m:
            raise UsageError(f"--positions needs exactly {m} values")
    for eps in eps_values:
        state = rt.solve_excited(eps, m, positions)
        stem = f"excited_m{m}_eps{_fmt(eps)}"
        _write_state(rt, state, stem)
        eta = rt.solve_ground(eps)
        used = positions if positions is not None else equilibrium.solve_toda(eps, m).positions
        guess = ansatz.product_ansatz(eta.field, eps, used)
        summary = {
            "eps": eps,
            "m": m,
            "zeros": list(state.zeros),
            "positions": list(used),
            "ansatz_sup_error": analysis.sup_error(state.field, guess),
            "residual_sup": state.residual_sup,
        }
        serialize.write_json(rt.out / f"{stem}_summary.json", summary)
    return EXIT_OK


def cmd_equilibrium(args):
    rt = Runtime(args)
    eps_values = _eps_list(args.eps)
    m = args.m
    rows = []
    for eps in eps_values:
        row = {"eps": eps, "a_asymptotic": None, "a_scalar": None,
               "a_uv": None, "a_toda_outer": None, "bounds_ok": None}
        if eps >= 1.0 / math.e:
            print(f"warning: eps={_fmt(eps)} outside asymptotic validity, skipped",
                  file=sys.stderr)
            rows.append(row)
            continue
        if eps > 0.1:
            print(f"warning: eps={_fmt(eps)} above the asymptotic range (0, 0.1]",
                  file=sys.stderr)
        row["a_asymptotic"] = equilibrium.predict_position_asymptotic(eps)
        if eps <= 0.1:
            row["a_scalar"] = equilibrium.solve_bifurcation_scalar(eps).positions[-1]
            row["a_uv"] = equilibrium.refine_position(eps)[2]
            if m < 3 or eps <= 0.05:
                cfg = equilibrium.solve_toda(eps, m)
                row["a_toda_outer"] = cfg.positions[-1]
                row["toda_positions"] = list(cfg.positions)
                row["bound_amplitude"] = cfg.bound_amplitude
                row["bound_interaction"] = cfg.bound_interaction
                row["bounds_ok"] = cfg.bounds_ok
        rows.append(row)
    rt.out.mkdir(parents=True, exist_ok=True)
    serialize.write_json(rt.out / f"equilibrium_m{m}.json", {"m": m, "rows": rows})
    keys = ("a_asymptotic", "a_scalar", "a_uv", "a_toda_outer")
    csv_rows = [[r["eps"]] + [r[k] for k in keys]
                for r in rows if all(r[k] is not None for k in keys)]
    if csv_rows:
        serialize.write_csv(rt.out / f"equilibrium_m{m}.csv",
                            ("eps",) + keys, csv_rows)
    return EXIT_OK


def cmd_spectrum(args):
    rt = Runtime(args)
    k = args.k
    if args.op == "L0":
        zgrid = make_zgrid(args.z_max, _odd(2 * args.z_max / args.hz))
        op = spectrum.single_well_operator(zgrid)
    elif args.op == "double":
        zgrid = make_zgrid(args.z_max, _odd(2 * args.z_max / args.hz))
        op = spectrum.multi_well_operator(zgrid, (-args.zeta, args.zeta))
    elif args.op == "multi":
        if not args.centers:
            raise UsageError("--centers is required for --op multi")
        centers = tuple(float(t) for t in args.centers.split(","))
        zgrid = make_zgrid(args.z_max, _odd(2 * args.z_max / args.hz))
        op = spectrum.multi_well_operator(zgrid, centers)
    elif args.op == "trap":
        if args.eps is None:
            raise UsageError("--eps is required for --op trap")
        eps = float(args.eps)
        eta = rt.solve_ground(eps)
        positions = equilibrium.solve_toda(eps, args.m).positions if args.m else ()
        op = spectrum.linearized_operator(eta.field.grid, eps, eta.field, positions)
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(f"unknown operator {args.op!r}")
    result = spectrum.lowest_eigenpairs(op, k)
    rt.out.mkdir(parents=True, exist_ok=True)
    stem = f"spectrum_{args.op}"
    serialize.write_json(rt.out / f"{stem}.json", {
        "operator": result.operator_label,
        "k": result.k,
        "eigenvalues": list(result.eigenvalues),
        "residuals": list(result.residuals),
    })
    grid = op.grid
    cols = ["x"] + [f"phi{j + 1}" for j in range(k)]
    rows = zip(grid.nodes, *[f.values for f in result.eigenfunctions])
    serialize.write_csv(rt.out / f"{stem}.csv", cols, rows)
    serialize.write_plot_stub(rt.out / f"{stem}.csv", cols, title=result.operator_label)
    print("eigenvalues:", " ".join(format(v, ".10g") for v in result.eigenvalues))
    return EXIT_OK


def _odd(x):
    n = int(round(x)) - 1
    return n if n % 2 == 1 else n + 1


def cmd_converge(args):
    rt = Runtime(args)
    eps_values = _eps_list(args.eps) if args.eps else list(DEFAULT_SWEEP)
    claim = args.claim
    ground = rt.map_eps(rt.solve_ground, eps_values)
    first = second = None
    if claim in ("thm1", "all"):
        first = [rt.solve_excited(e, 1, (0.0,)) for e in eps_values]
    if claim in ("thm2", "rem2", "all"):
        second_eps = [e for e in eps_values if e <= 0.02] or eps_values[-3:]
        if len(second_eps) < 3:
            second_eps = sorted({*second_eps, 0.02, 0.01, 0.005}, reverse=True)
        second = [rt.solve_excited(e, 2) for e in second_eps]
    reports = analysis.verify_claims(ground, first_excited=first,
                                     second_excited=second)
    wanted = {
        "p1": ["P1"], "p2": ["P2"], "p3": ["P3-sup", "P3-deriv"], "p4": ["P4"],
        "thm1": ["Thm1"], "thm2": ["Thm2-a"], "rem2": ["Rem2"],
        "all": [r.claim_id for r in reports],
    }[claim]
    _write_reports(rt, [r for r in reports if r.claim_id in wanted])
    return EXIT_OK


def cmd_painleve(args):
    rt = Runtime(args)
    sol = ansatz.solve_painleve(args.y_min, args.y_max, args.n_points)
    rt.out.mkdir(parents=True, exist_ok=True)
    serialize.write_csv(rt.out / "painleve.csv", ("y", "nu"),
                        zip(sol.y_nodes, sol.nu_values))
    serialize.write_plot_stub(rt.out / "painleve.csv", ("y", "nu"),
                              title="corner-layer profile")
    serialize.write_json(rt.out / "painleve.json", {
        "y_min": args.y_min, "y_max": args.y_max, "n": args.n_points,
        "residual_norm": sol.residual_norm,
        "newton_iters": sol.newton_iters,
        "nu_at_0": float(sol(0.0)),
    })
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="tfx",
        description="Stationary states of the trapped 1-D Gross-Pitaevskii "
                    "equation in the small-eps limit")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="output directory (default: out)")
        p.add_argument("--config", help="KEY=VALUE config file")
        p.add_argument("--cache-dir", dest="cache_dir")
        p.add_argument("--no-cache", action="store_true")
        p.add_argument("--jobs", type=int)
        p.add_argument("--x-max", dest="x_max", type=float)
        p.add_argument("--n", type=int, help="override the automatic resolution")
        p.add_argument("--tol", type=float)

    p = sub.add_parser("ground", help="solve the positive ground state")
    p.add_argument("--eps", required=True, help="eps value or comma list")
    p.add_argument("--verify", action="store_true",
                   help="emit P1-P4 rate reports (needs >= 3 eps)")
    common(p)
    p.set_defaults(fn=cmd_ground)

    p = sub.add_parser("excited", help="solve the m-th excited state")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--eps", required=True)
    p.add_argument("--positions", help="comma list overriding the equilibrium "
                                       "positions (use --positions=-a,a for "
                                       "values starting with a dash)")
    common(p)
    p.set_defaults(fn=cmd_excited)

    p = sub.add_parser("equilibrium", help="tabulate soliton equilibrium positions")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--eps", default="0.05,0.02,0.01,0.005")
    common(p)
    p.set_defaults(fn=cmd_equilibrium)

    p = sub.add_parser("spectrum", help="eigenvalues of the linearization operators")
    p.add_argument("--op", choices=("L0", "double", "multi", "trap"), default="L0")
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--z-max", dest="z_max", type=float, default=25.0)
    p.add_argument("--hz", type=float, default=0.01)
    p.add_argument("--zeta", type=float, default=5.0)
    p.add_argument("--centers", help="comma list of well centers for --op multi "
                                     "(use --centers=-6,0,6 for negative values)")
    p.add_argument("--eps", help="eps for --op trap")
    p.add_argument("--m", type=int, default=1, help="soliton count for --op trap")
    common(p)
    p.set_defaults(fn=cmd_spectrum)

    p = sub.add_parser("converge", help="run a claim verification sweep")
    p.add_argument("--claim", required=True,
                   choices=("p1", "p2", "p3", "p4", "thm1", "thm2", "rem2", "all"))
    p.add_argument("--eps", help="comma list (default 0.05,0.02,0.01,0.005)")
    common(p)
    p.set_defaults(fn=cmd_converge)

    p = sub.add_parser("painleve", help="solve the corner-layer profile")
    p.add_argument("--y-min", dest="y_min", type=float, default=-15.0)
    p.add_argument("--y-max", dest="y_max", type=float, default=20.0)
    p.add_argument("--points", dest="n_points", type=int, default=3501)
    common(p)
    p.set_defaults(fn=cmd_painleve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except gpe_solver.ZeroCountError as exc:
        print(f"error: {exc} (achieved {exc.found}, wanted {exc.expected})",
              file=sys.stderr)
        return EXIT_BASIN
    except (gpe_solver.NewtonError, ansatz.PainleveError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        if getattr(exc, "residual_history", None):
            tail = ", ".join(f"{r:.3e}" for r in exc.residual_history[-6:])
            print(f"residual history tail: {tail}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


def run():
    raise SystemExit(main())


if __name__ == "__main__":
    run()
