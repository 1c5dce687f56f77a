"""Columnar text output: field snapshots, line slices and diagnostic series.

Every file is semicolon separated, starts with a ``#`` line carrying the
config hash and time, followed by one header line. Floats are written with
``repr`` so a snapshot reloads bit for bit. Files are written to a temporary
name and renamed, so an aborted run never leaves a partial file.
"""

import os
import tempfile
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from .operators import operators
from .timeloop import StepRecord

SNAPSHOT_COLUMNS = ("element", "i", "j", "x", "y", "h", "hu", "hv", "b", "H", "eps")
SLICE_COLUMNS = ("element", "i", "s", "x", "y", "h", "hu", "hv", "b", "H")


class SliceError(ValueError):
    pass


@contextmanager
def atomic_open(path):
    """Open a temporary file next to ``path`` and rename it into place on success."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            yield fh
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _fmt(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def _write_table(path, columns, rows, preamble):
    with atomic_open(path) as fh:
        fh.write("# " + " ".join(f"{k}={v}" for k, v in preamble.items()) + "\n")
        fh.write(";".join(columns) + "\n")
        for row in rows:
            fh.write(";".join(_fmt(v) for v in row) + "\n")


def _read_table(path):
    with open(path) as fh:
        first = fh.readline().strip()
        if not first.startswith("#"):
            raise ValueError(f"{path}: missing '#' preamble line")
        preamble = dict(item.split("=", 1) for item in first[1:].split())
        columns = fh.readline().strip().split(";")
        data = [line.strip().split(";") for line in fh if line.strip()]
    return preamble, columns, data


def snapshot_rows(W, mesh, eps=None):
    """Rows ordered by element, then i, then j."""
    K, n = mesh.K, mesh.n
    eps = np.zeros(K) if eps is None else np.asarray(eps, float)
    k, i, j = (a.ravel() for a in np.meshgrid(np.arange(K), np.arange(n), np.arange(n), indexing="ij"))
    h, hu, hv = (W[c].ravel() for c in range(3))
    b = mesh.b.ravel()
    cols = [k, i, j, mesh.x.ravel(), mesh.y.ravel(), h, hu, hv, b, h + b, eps[k]]
    return zip(*cols)


def write_snapshot(path, W, mesh, t, eps=None, config_hash="none"):
    _write_table(path, SNAPSHOT_COLUMNS, snapshot_rows(W, mesh, eps),
                 {"config_hash": config_hash, "t": repr(float(t)), "N": mesh.N, "K": mesh.K})


def read_snapshot(path):
    """Reload a snapshot; returns dict with t, N, K, W, eps, x, y, b, config_hash."""
    pre, columns, data = _read_table(path)
    if tuple(columns) != SNAPSHOT_COLUMNS:
        raise ValueError(f"{path}: unexpected columns {columns}")
    N, K = int(pre["N"]), int(pre["K"])
    n = N + 1
    if len(data) != K * n * n:
        raise ValueError(f"{path}: expected {K * n * n} rows, found {len(data)}")
    arr = np.array([[float(v) for v in row[3:]] for row in data]).reshape(K, n, n, -1)
    x, y, h, hu, hv, b, _, eps = np.moveaxis(arr, -1, 0)
    return dict(
        t=float(pre["t"]), N=N, K=K, config_hash=pre["config_hash"],
        W=np.stack([h, hu, hv]), eps=eps[:, 0, 0].copy(), x=x, y=y, b=b,
    )


def _line_roots(c, ops, coord):
    """Reference coordinate r in [-1, 1] with p(r) = coord for a nodal polynomial c, or None."""
    lo, hi = c.min(), c.max()
    tol = 1e-12 * max(1.0, np.abs(c).max())
    if coord < lo - tol or coord > hi + tol:
        return None
    # the mapping is monotone along a grid line of a valid element: bisection on the interpolant
    a, b = -1.0, 1.0
    fa = ops.interpolation_matrix(np.array([a]))[0] @ c - coord
    if abs(fa) <= tol:
        return a
    for _ in range(200):
        m = 0.5 * (a + b)
        fm = ops.interpolation_matrix(np.array([m]))[0] @ c - coord
        if abs(fm) <= tol or b - a < 1e-15:
            return m
        if np.sign(fm) == np.sign(fa):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def slice_rows(W, mesh, axis, coordinate):
    """Sample the solution along ``axis = coordinate`` (axis 'x' or 'y').

    For every element crossed by the line, each grid line of the other reference
    direction is intersected with the line and the nodal polynomials are
    evaluated there, so the samples sit at the face-aligned LGL points.
    Rows are ordered by element id, then node index.
    """
    if axis not in ("x", "y"):
        raise SliceError(f"axis must be 'x' or 'y', got {axis!r}")
    ops = operators(mesh.N)
    coords = mesh.y if axis == "y" else mesh.x
    if not coords.min() - 1e-12 <= coordinate <= coords.max() + 1e-12:
        raise SliceError(f"{axis} = {coordinate} lies outside the domain "
                         f"[{coords.min():.6g}, {coords.max():.6g}]")
    fieldsets = np.stack([mesh.x, mesh.y, W[0], W[1], W[2], mesh.b])
    rows = []
    for k in range(mesh.K):
        if not coords[k].min() - 1e-12 <= coordinate <= coords[k].max() + 1e-12:
            continue
        for i in range(mesh.n):
            # y-slices walk along eta on each xi line i, x-slices along xi on each eta line
            line = coords[k, i, :] if axis == "y" else coords[k, :, i]
            r = _line_roots(line, ops, coordinate)
            if r is None:
                continue
            P = ops.interpolation_matrix(np.array([r]))[0]
            vals = fieldsets[:, k, i, :] @ P if axis == "y" else fieldsets[:, k, :, i] @ P
            x, y, h, hu, hv, b = vals
            s = x if axis == "y" else y
            rows.append((k, i, s, x, y, h, hu, hv, b, h + b))
    if not rows:
        raise SliceError(f"no element intersects {axis} = {coordinate}")
    return rows


def write_slice(path, W, mesh, t, axis, coordinate, config_hash="none"):
    rows = slice_rows(W, mesh, axis, coordinate)
    _write_table(path, SLICE_COLUMNS, rows,
                 {"config_hash": config_hash, "t": repr(float(t)), "axis": axis, "coordinate": repr(float(coordinate))})
    return rows


def write_diagnostics(path, records, config_hash="none"):
    _write_table(path, StepRecord.FIELDS, (r.as_tuple() for r in records), {"config_hash": config_hash})


def read_diagnostics(path):
    _, columns, data = _read_table(path)
    return [StepRecord(*(int(v) if c in ("step", "n_limited") else float(v) for c, v in zip(columns, row)))
            for row in data]
