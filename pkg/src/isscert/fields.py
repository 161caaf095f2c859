"""Grids on the unit interval and unit square, discrete fields, Lq norms,
and the trajectory record produced by the solvers.

Node-centered layouts carry n+1 points including both endpoints and
integrate with composite trapezoid; cell-centered layouts carry n cell
midpoints and integrate with the midpoint rule.  Both quadratures are
second order, which is what the certification tolerances assume.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np
import yaml

__all__ = [
    "Grid1D",
    "Grid2D",
    "Field",
    "Trajectory",
    "lq_norm",
    "trapezoid_1d",
    "trapezoid_2d",
    "EDGES_2D",
]

EDGES_2D = ("left", "right", "bottom", "top")

_MIN_CELLS = 8


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid on [0, 1] with n cells.

    layout "node" exposes the n+1 nodes including both endpoints; layout
    "cell" exposes the n cell midpoints.
    """

    n: int
    layout: str = "node"

    def __post_init__(self):
        if self.n < _MIN_CELLS:
            raise ValueError(f"need at least {_MIN_CELLS} cells, got {self.n}")
        if self.layout not in ("node", "cell"):
            raise ValueError(f"unknown layout {self.layout!r}")

    @property
    def h(self) -> float:
        return 1.0 / self.n

    @property
    def npoints(self) -> int:
        return self.n + 1 if self.layout == "node" else self.n

    def points(self) -> np.ndarray:
        if self.layout == "node":
            return np.linspace(0.0, 1.0, self.n + 1)
        return (np.arange(self.n) + 0.5) * self.h

    def refine(self) -> "Grid1D":
        return Grid1D(2 * self.n, self.layout)


@dataclass(frozen=True)
class Grid2D:
    """Node-centered tensor grid on the unit square.

    The four boundary edges are partitioned into a Dirichlet part
    (gamma1) and a flux part (gamma2); together they must cover all four
    edge labels exactly once.
    """

    nx: int
    ny: int
    gamma1: frozenset = dc_field(default_factory=frozenset)
    gamma2: frozenset = dc_field(default_factory=frozenset)

    def __post_init__(self):
        if self.nx < _MIN_CELLS or self.ny < _MIN_CELLS:
            raise ValueError(f"need at least {_MIN_CELLS} cells per direction")
        g1 = frozenset(self.gamma1)
        g2 = frozenset(self.gamma2)
        object.__setattr__(self, "gamma1", g1)
        object.__setattr__(self, "gamma2", g2)
        if not g1.isdisjoint(g2):
            raise ValueError("gamma1 and gamma2 overlap")
        if g1 | g2 != set(EDGES_2D):
            raise ValueError(f"edge labels must cover {EDGES_2D} exactly")

    @property
    def hx(self) -> float:
        return 1.0 / self.nx

    @property
    def hy(self) -> float:
        return 1.0 / self.ny

    def points(self):
        """Coordinate meshes (X, Y), indexed [ix, iy]."""
        x = np.linspace(0.0, 1.0, self.nx + 1)
        y = np.linspace(0.0, 1.0, self.ny + 1)
        return np.meshgrid(x, y, indexing="ij")

    def refine(self) -> "Grid2D":
        return Grid2D(2 * self.nx, 2 * self.ny, self.gamma1, self.gamma2)


@dataclass(frozen=True)
class Field:
    """State snapshot: values on a grid at one time."""

    grid: object
    values: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        if isinstance(self.grid, Grid1D):
            if vals.shape != (self.grid.npoints,):
                raise ValueError(f"values shape {vals.shape} does not match grid")
        elif isinstance(self.grid, Grid2D):
            if vals.shape != (self.grid.nx + 1, self.grid.ny + 1):
                raise ValueError(f"values shape {vals.shape} does not match grid")
        else:
            raise TypeError("grid must be Grid1D or Grid2D")
        if not np.all(np.isfinite(vals)):
            raise ValueError("field values must be finite")


def trapezoid_1d(values, h):
    values = np.asarray(values, dtype=float)
    return float(h * (values.sum() - 0.5 * (values[0] + values[-1])))


def trapezoid_2d(values, hx, hy):
    values = np.asarray(values, dtype=float)
    wx = np.ones(values.shape[0]); wx[0] = wx[-1] = 0.5
    wy = np.ones(values.shape[1]); wy[0] = wy[-1] = 0.5
    return float(hx * hy * (wx @ values @ wy))


def lq_norm(fld, q, grid=None):
    """Lq norm of a field over its domain for q in [2, inf].

    Accepts a :class:`Field` or a raw array plus a grid.  Finite q uses
    the grid's native second-order quadrature of |w|**q; q = inf is the
    max norm.
    """
    if isinstance(fld, Field):
        values, grid = fld.values, fld.grid
    else:
        values = np.asarray(fld, dtype=float)
        if grid is None:
            raise ValueError("grid required when passing a bare array")
        expected = ((grid.nx + 1, grid.ny + 1) if isinstance(grid, Grid2D)
                    else (grid.npoints,))
        if values.shape != expected:
            raise ValueError(f"values shape {values.shape} does not match grid")
    if q == math.inf or q == "inf":
        return float(np.max(np.abs(values)))
    q = float(q)
    if not q >= 2.0:
        raise ValueError(f"q must lie in [2, inf], got {q}")
    power = np.abs(values) ** q
    if isinstance(grid, Grid2D):
        integral = trapezoid_2d(power, grid.hx, grid.hy)
    elif grid.layout == "node":
        integral = trapezoid_1d(power, grid.h)
    else:
        integral = float(grid.h * power.sum())
    return float(integral ** (1.0 / q))


class Trajectory:
    """Append-only record of a solve: time stamps plus named state arrays.

    Parabolic and transport runs carry one array per stamp under the name
    "u"; wave runs carry the characteristic pair under "plus" and
    "minus".  Metadata (scheme, step sizes, grid size) lives in ``meta``.
    """

    def __init__(self, pde_class: str, grid, names=("u",), meta=None):
        if pde_class not in ("parabolic", "transport", "wave"):
            raise ValueError(f"unknown pde class {pde_class!r}")
        self.pde_class = pde_class
        self.grid = grid
        self.names = tuple(names)
        self.meta = dict(meta or {})
        self._times: list[float] = []
        self._states: list[dict] = []

    def append(self, t: float, **arrays):
        if set(arrays) != set(self.names):
            raise ValueError(f"expected arrays {self.names}, got {tuple(arrays)}")
        if self._times and not t > self._times[-1]:
            raise ValueError("time stamps must increase")
        self._times.append(float(t))
        self._states.append({k: np.asarray(v, dtype=float) for k, v in arrays.items()})

    def __len__(self):
        return len(self._times)

    @property
    def times(self) -> np.ndarray:
        return np.asarray(self._times)

    def state(self, i: int, name: str = None) -> np.ndarray:
        name = name or self.names[0]
        return self._states[i][name]

    def snapshot(self, i: int) -> dict:
        """All state arrays at stamp i, keyed by name."""
        return self._states[i]

    def field(self, i: int, name: str = None) -> Field:
        name = name or self.names[0]
        return Field(self.grid, self._states[i][name], self._times[i])

    def write_csv(self, directory, basename: str = "trajectory"):
        """One long-format CSV per state name, plus a metadata sidecar.

        Columns are (t, y, value) in one dimension and (t, y1, y2, value)
        on the square.  Returns the list of paths written.
        """
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        paths = []
        for name in self.names:
            suffix = "" if len(self.names) == 1 else f"_{name}"
            path = directory / f"{basename}{suffix}.csv"
            with open(path, "w") as fh:
                if isinstance(self.grid, Grid2D):
                    fh.write("t,y1,y2,value\n")
                    X, Y = self.grid.points()
                    for t, state in zip(self._times, self._states):
                        vals = state[name]
                        for ix in range(vals.shape[0]):
                            for iy in range(vals.shape[1]):
                                fh.write(f"{t!r},{float(X[ix, iy])!r},"
                                         f"{float(Y[ix, iy])!r},{float(vals[ix, iy])!r}\n")
                else:
                    fh.write("t,y,value\n")
                    pts = self.grid.points()
                    for t, state in zip(self._times, self._states):
                        for y, v in zip(pts, state[name]):
                            fh.write(f"{t!r},{float(y)!r},{float(v)!r}\n")
            paths.append(path)
        meta_path = directory / f"{basename}_meta.yaml"
        # solvers may stash numpy scalars in meta; yaml wants plain types
        clean = {k: (v.item() if isinstance(v, np.generic) else v)
                 for k, v in self.meta.items()}
        with open(meta_path, "w") as fh:
            yaml.safe_dump(clean, fh, sort_keys=True, default_flow_style=False)
        paths.append(meta_path)
        return paths
