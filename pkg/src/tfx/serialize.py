"""Deterministic JSON/CSV emission and the on-disk state cache.

Output files must be byte-identical across runs for the same inputs
and code version, so floats are always printed with 17 significant
digits (lossless for doubles), keys keep insertion order, and line
endings are LF.
"""

import hashlib
import json
import math
import os
from pathlib import Path

import numpy as np
from filelock import FileLock

from .grid_fd import make_grid, ScalarField
from .gpe_solver import StationaryState, residual

__all__ = [
    "format_float",
    "dumps_json",
    "write_json",
    "write_csv",
    "write_plot_stub",
    "state_to_record",
    "state_from_record",
    "save_state",
    "load_state",
    "StateCache",
    "code_version",
]

STATE_SCHEMA = "tfx-state-v1"


def format_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        raise ValueError("non-finite value in serialized output")
    return "%.17g" % x


def _emit(obj, out):
    if isinstance(obj, dict):
        out.append("{")
        for i, (key, val) in enumerate(obj.items()):
            if i:
                out.append(", ")
            out.append(json.dumps(str(key)))
            out.append(": ")
            _emit(val, out)
        out.append("}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        out.append("[")
        for i, val in enumerate(obj):
            if i:
                out.append(", ")
            _emit(val, out)
        out.append("]")
    elif isinstance(obj, bool) or isinstance(obj, np.bool_):
        out.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(format_float(float(obj)))
    elif obj is None:
        out.append("null")
    else:
        out.append(json.dumps(str(obj)))


def dumps_json(obj) -> str:
    out = []
    _emit(obj, out)
    return "".join(out) + "\n"


def write_json(path, obj):
    Path(path).write_text(dumps_json(obj), encoding="ascii", newline="\n")


def write_csv(path, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_float(float(v)) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii", newline="\n")


def write_plot_stub(csv_path, columns, title=""):
    """Plain-text plotting recipe accompanying a CSV file."""
    csv_path = Path(csv_path)
    cols = ", ".join(columns)
    text = (
        f"# plot recipe for {csv_path.name}\n"
        f"# columns: {cols}\n"
        f"# title: {title}\n"
        "import matplotlib.pyplot as plt\n"
        "import numpy as np\n"
        f"data = np.genfromtxt({csv_path.name!r}, delimiter=',', names=True)\n"
        + "".join(f"plt.plot(data[{columns[0]!r}], data[{c!r}], label={c!r})\n"
                  for c in columns[1:])
        + "plt.legend()\nplt.show()\n"
    )
    stub = csv_path.with_suffix(csv_path.suffix + ".plot.txt")
    stub.write_text(text, encoding="ascii", newline="\n")
    return stub


def state_to_record(state: StationaryState) -> dict:
    grid = state.field.grid
    return {
        "schema": STATE_SCHEMA,
        "eps": state.eps,
        "m": state.m,
        "x_max": grid.x_max,
        "n": grid.n,
        "residual_sup": state.residual_sup,
        "zeros": list(state.zeros),
        "values": list(state.field.values),
    }


def state_from_record(record: dict) -> StationaryState:
    if record.get("schema") != STATE_SCHEMA:
        raise ValueError(f"unsupported state schema {record.get('schema')!r}")
    grid = make_grid(record["x_max"], record["n"])
    parity = "even" if record["m"] % 2 == 0 else "odd"
    fld = ScalarField(grid=grid, values=np.array(record["values"], dtype=float),
                      parity=parity)
    return StationaryState(eps=record["eps"], m=record["m"], field=fld,
                           residual_sup=record["residual_sup"],
                           zeros=tuple(record["zeros"]), newton_iters=0,
                           residual_history=())


def save_state(path, state: StationaryState):
    write_json(path, state_to_record(state))


def load_state(path) -> StationaryState:
    return state_from_record(json.loads(Path(path).read_text(encoding="ascii")))


def code_version() -> str:
    """Hash of the package sources; cache keys include it."""
    pkg = Path(__file__).parent
    digest = hashlib.sha256()
    for src in sorted(pkg.glob("*.py")):
        digest.update(src.name.encode())
        digest.update(src.read_bytes())
    return digest.hexdigest()[:10]


class StateCache:
    """Versioned JSON store of solved states keyed by (m, eps, x_max, n, code version).

    Loads re-verify the residual before reuse; a stale or corrupted
    entry is treated as a miss.  Writes take an advisory file lock so
    concurrent sweeps do not interleave.
    """

    def __init__(self, directory):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._version = code_version()
        self._lock = FileLock(str(self.directory / "cache.lock"))

    def _path(self, m, eps, x_max, n) -> Path:
        name = (f"state_m{m}_eps{format_float(eps)}_xmax{format_float(x_max)}"
                f"_n{n}_v{self._version}.json")
        return self.directory / name

    def save(self, state: StationaryState) -> Path:
        grid = state.field.grid
        path = self._path(state.m, state.eps, grid.x_max, grid.n)
        with self._lock:
            tmp = path.with_suffix(".tmp")
            write_json(tmp, state_to_record(state))
            os.replace(tmp, path)
        return path

    def load(self, m, eps, x_max, n, residual_tol=1e-12):
        path = self._path(m, eps, x_max, n)
        if not path.exists():
            return None
        with self._lock:
            try:
                state = load_state(path)
            except (ValueError, KeyError, json.JSONDecodeError):
                return None
        check = float(np.max(np.abs(residual(state.field, state.eps).values)))
        if check > residual_tol:
            return None
        return state
