"""CSV, JSON and plot-table import/export.

Floats are written with 17 significant digits so a write/read round trip
is exact.  Grid fields use long format, one row per (u, s) sample, u major.
"""

import csv
import json
from pathlib import Path

import numpy as np

from .errors import MismatchError
from .flattener import ExponentProfile
from .grid import MetricGrid, as_values
from .profile import CurvatureProfile

FLOAT_FMT = "%.17g"


def _fmt(x):
    return FLOAT_FMT % float(x)


def _write_rows(path, header, columns):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in zip(*columns):
            w.writerow([_fmt(x) for x in row])


def _read_columns(path, header):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        got = [h.strip() for h in next(reader)]
        if got != list(header):
            raise MismatchError(f"{path}: expected columns {','.join(header)}, found {','.join(got)}")
        rows = [[float(x) for x in row] for row in reader if row]
    data = np.array(rows, dtype=float).reshape(-1, len(header))
    return [data[:, i] for i in range(len(header))]


# -- curvature profiles ---------------------------------------------------

PROFILE_COLUMNS = ("u", "K", "Kprime")


def write_profile_csv(profile, path):
    _write_rows(path, PROFILE_COLUMNS, (profile.u_grid, profile.k_values, profile.kprime_values))


def read_profile_csv(path, c):
    u, k, kp = _read_columns(path, PROFILE_COLUMNS)
    return CurvatureProfile(float(c), u, k, kp)


def profile_to_dict(profile):
    return {"c": float(profile.c), "u": profile.u_grid.tolist(), "K": profile.k_values.tolist(),
            "Kprime": profile.kprime_values.tolist(), "truncated": bool(profile.truncated)}


def profile_from_dict(data):
    return CurvatureProfile(float(data["c"]), data["u"], data["K"], data["Kprime"],
                            truncated=bool(data.get("truncated", False)))


# -- metric and scalar fields ---------------------------------------------

METRIC_COLUMNS = ("u", "s", "g11", "g12", "g22")


def _long(grid, *fields):
    uu, ss = grid.mesh()
    return [uu.ravel(), ss.ravel()] + [as_values(f, grid).ravel() for f in fields]


def write_metric_csv(grid, path):
    _write_rows(path, METRIC_COLUMNS, _long(grid, grid.g11, grid.g12, grid.g22))


def _unflatten(u, s, *fields):
    u_grid = np.unique(u)
    s_grid = np.unique(s)
    shape = (u_grid.size, s_grid.size)
    if u.size != shape[0] * shape[1]:
        raise MismatchError("samples do not form a full (u, s) tensor grid")
    order = np.lexsort((s, u))
    return u_grid, s_grid, [f[order].reshape(shape) for f in fields]


def read_metric_csv(path, c=0.0):
    u, s, g11, g12, g22 = _read_columns(path, METRIC_COLUMNS)
    u_grid, s_grid, (a, b, d) = _unflatten(u, s, g11, g12, g22)
    return MetricGrid(u_grid, s_grid, a, b, d, c=float(c), meta={"source": str(path)})


def metric_to_dict(grid):
    return {"c": float(grid.c), "u": grid.u_grid.tolist(), "s": grid.s_grid.tolist(),
            "g11": grid.g11.tolist(), "g12": grid.g12.tolist(), "g22": grid.g22.tolist()}


def metric_from_dict(data):
    return MetricGrid(data["u"], data["s"], data["g11"], data["g12"], data["g22"],
                      c=float(data.get("c", 0.0)))


SCALAR_COLUMNS = ("u", "s", "value")


def write_scalar_csv(values, grid, path):
    _write_rows(path, SCALAR_COLUMNS, _long(grid, values))


def read_scalar_csv(path):
    """Returns (u_grid, s_grid, values[nu, ns])."""
    u, s, v = _read_columns(path, SCALAR_COLUMNS)
    u_grid, s_grid, (vals,) = _unflatten(u, s, v)
    return u_grid, s_grid, vals


# -- exponent profiles, shape operators, traces ---------------------------

EXPONENT_COLUMNS = ("u", "r", "rprime", "rsecond", "rthird")


def write_exponent_csv(rprof, path):
    _write_rows(path, EXPONENT_COLUMNS, (rprof.u_grid, *rprof.derivatives()))


def read_exponent_csv(path):
    return ExponentProfile(*_read_columns(path, EXPONENT_COLUMNS))


SHAPE_COLUMNS = ("u", "s", "f", "lambda1", "lambda2")


def write_shape_csv(shape, grid, path):
    _write_rows(path, SHAPE_COLUMNS, _long(grid, shape.f, shape.lambda1, shape.lambda2))


def write_trace_jsonl(trace, path):
    """Solver trace, one JSON object per iteration."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        for entry in trace:
            fh.write(json.dumps(entry, sort_keys=True) + "\n")


def write_dat(path, columns, comment=""):
    """Whitespace-separated table for generic plotting tools.

    ``columns`` maps names to equal-length 1-D arrays; the header line is a
    ``#`` comment.  2-D grid fields should be flattened with a blank line
    between u rows (see :func:`write_grid_dat`).
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    names = list(columns)
    data = [np.ravel(columns[n]) for n in names]
    with open(path, "w") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        fh.write("# " + " ".join(names) + "\n")
        for row in zip(*data):
            fh.write(" ".join(_fmt(x) for x in row) + "\n")


def write_grid_dat(path, grid, values, name="value", comment=""):
    """u s value rows, blank line after each u row (gnuplot splot layout)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    vals = as_values(values, grid)
    with open(path, "w") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        fh.write(f"# u s {name}\n")
        for i, u in enumerate(grid.u_grid):
            for j, s in enumerate(grid.s_grid):
                fh.write(f"{_fmt(u)} {_fmt(s)} {_fmt(vals[i, j])}\n")
            fh.write("\n")
