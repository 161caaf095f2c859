"""Semi-implicit finite differences for the disturbed reaction-diffusion class

    u_t = div(a grad u) - c*phi(u) - absorption(y, t, u) + f(y, t)

on the unit interval or unit square, with Dirichlet data u = d1 on one part
of the boundary and the nonlinear flux law

    a du/dnu = -varphi(u) + d2        (nu the outward normal)

on the rest.  Diffusion is implicit (backward Euler in one dimension,
dimension-split backward Euler on the square); reaction, absorption, and
forcing are explicit.  Each flux-boundary node is closed per step by a
scalar bisection: the interior unknowns of a line are tridiagonal and
affine in the boundary value, so the boundary balance becomes a strictly
increasing scalar equation with a guaranteed bracket.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.linalg import solve_banded

from ..fields import Grid1D, Grid2D, Trajectory
from ..signals import SpaceTimeField
from .common import (ScenarioError, SolverConfig, SolverDivergedError,
                     check_finite)

__all__ = ["ParabolicScenario", "solve_parabolic"]

EDGES_1D = ("left", "right")

_SIGN_TOL = 1e-12
_SLOPE_TOL = 1e-8


@dataclass
class ParabolicScenario:
    """Problem data for the reaction-diffusion class.

    gamma1 and gamma2 partition the boundary edge labels: ("left",
    "right") in one dimension, the four square edges in two.  The maps
    must satisfy the structural sign conditions checked by
    :meth:`validate`; c0 = 0 is allowed (no reaction floor), but the
    truncation-level computation then refuses the scenario.
    """

    dim: int
    a: SpaceTimeField
    a0: float
    c: SpaceTimeField
    c0: float
    reaction: Callable
    boundary_reaction: Callable
    f: SpaceTimeField
    d1: SpaceTimeField
    d2: SpaceTimeField
    w0: Callable
    gamma1: frozenset
    gamma2: frozenset
    absorption: Optional[Callable] = None
    label: str = ""

    def __post_init__(self):
        self.gamma1 = frozenset(self.gamma1)
        self.gamma2 = frozenset(self.gamma2)

    def validate(self):
        if self.dim not in (1, 2):
            raise ScenarioError(f"dim must be 1 or 2, got {self.dim}")
        if not self.a0 > 0:
            raise ScenarioError("diffusion floor a0 must be positive")
        if self.c0 < 0:
            raise ScenarioError("reaction floor c0 must be nonnegative")
        edges = set(EDGES_1D) if self.dim == 1 else {"left", "right", "bottom", "top"}
        if not self.gamma1.isdisjoint(self.gamma2):
            raise ScenarioError("gamma1 and gamma2 overlap")
        if self.gamma1 | self.gamma2 != edges:
            raise ScenarioError(f"boundary labels must cover {sorted(edges)} exactly")
        self._check_maps()
        self._check_coefficients()

    def _check_maps(self):
        v = np.linspace(-10.0, 10.0, 401)
        phi = np.asarray(self.reaction(v), dtype=float)
        if np.any(phi * v < -_SIGN_TOL):
            raise ScenarioError("reaction must satisfy phi(v)*v >= 0")
        pos = v[v >= 0]
        if np.any(np.asarray(self.reaction(-pos)) > -np.asarray(self.reaction(pos)) + _SIGN_TOL):
            raise ScenarioError("reaction must satisfy phi(-v) <= -phi(v) for v >= 0")
        dv = 1e-4
        slope = (np.asarray(self.reaction(v + dv)) - phi) / dv
        if np.any(slope < 1.0 - _SLOPE_TOL):
            raise ScenarioError("reaction slope must be at least one")
        bphi = np.asarray(self.boundary_reaction(v), dtype=float)
        if np.any(bphi * v < -_SIGN_TOL):
            raise ScenarioError("boundary reaction must satisfy varphi(v)*v >= 0")
        if np.any(np.asarray(self.boundary_reaction(-pos))
                  > -np.asarray(self.boundary_reaction(pos)) + _SIGN_TOL):
            raise ScenarioError("boundary reaction must satisfy varphi(-v) <= -varphi(v)")
        if self.absorption is not None:
            ts = (0.0, 0.7, 5.0)
            ys = np.asarray([0.0, 0.31, 0.5, 0.77, 1.0])
            pts = ys if self.dim == 1 else (ys, ys[::-1].copy())
            for t in ts:
                for vi in (-7.3, -1.0, -0.2, 0.2, 1.0, 7.3):
                    hv = np.asarray(self.absorption(pts, t, np.full(ys.shape, vi)))
                    if np.any(hv * vi < -_SIGN_TOL):
                        raise ScenarioError("absorption must satisfy h(y,t,v)*v >= 0")

    def _check_coefficients(self):
        ys = np.linspace(0.0, 1.0, 17)
        pts = ys if self.dim == 1 else tuple(np.meshgrid(ys, ys, indexing="ij"))
        for t in (0.0, 0.5, 5.0):
            if np.any(np.asarray(self.a(pts, t)) < self.a0 - _SIGN_TOL):
                raise ScenarioError("diffusion coefficient drops below a0")
            if np.any(np.asarray(self.c(pts, t)) < self.c0 - _SIGN_TOL):
                raise ScenarioError("reaction coefficient drops below c0")


def solve_parabolic(scn: ParabolicScenario, grid, cfg: SolverConfig) -> Trajectory:
    """March the scenario to cfg.t_end and record every stride-th state."""
    scn.validate()
    if cfg.dt is None:
        raise ValueError("the parabolic stepper needs an explicit dt")
    if scn.dim == 1:
        if not isinstance(grid, Grid1D) or grid.layout != "node":
            raise ValueError("one-dimensional runs need a node-centered Grid1D")
        return _solve_1d(scn, grid, cfg)
    if not isinstance(grid, Grid2D):
        raise ValueError("two-dimensional runs need a Grid2D")
    if grid.gamma1 != scn.gamma1 or grid.gamma2 != scn.gamma2:
        raise ScenarioError("grid edge labels disagree with the scenario")
    return _solve_2d(scn, grid, cfg)


def _bc_spec(scn, edge, coord, tn):
    if edge in scn.gamma1:
        return ("dirichlet", float(scn.d1(coord, tn)))
    return ("flux", scn.boundary_reaction, float(scn.d2(coord, tn)))


def _solve_line(w_old, h, dt, af, src, bc_lo, bc_hi, bc_tol):
    """One implicit diffusion solve along a grid line.

    Interior rows are backward Euler with face diffusivities af; the two
    end rows follow bc_lo / bc_hi, each either ("dirichlet", value) or
    ("flux", varphi, d2_value).  Flux ends are eliminated affinely and
    closed by bisection.
    """
    m = w_old.size
    lam = dt / h**2
    diag = np.ones(m)
    upper = np.zeros(m)
    lower = np.zeros(m)
    diag[1:m - 1] = 1.0 + lam * (af[1:] + af[:-1])
    upper[2:] = -lam * af[1:]
    lower[:m - 2] = -lam * af[:-1]
    ab = np.vstack([upper, diag, lower])

    rhs_cols = [np.concatenate([[0.0], w_old[1:m - 1] + dt * src[1:m - 1], [0.0]])]
    if bc_lo[0] == "dirichlet":
        rhs_cols[0][0] = bc_lo[1]
    if bc_hi[0] == "dirichlet":
        rhs_cols[0][-1] = bc_hi[1]
    col_of = {}
    for end, spec in (("lo", bc_lo), ("hi", bc_hi)):
        if spec[0] == "flux":
            e = np.zeros(m)
            e[0 if end == "lo" else -1] = 1.0
            col_of[end] = len(rhs_cols)
            rhs_cols.append(e)
    sol = solve_banded((1, 1), ab, np.column_stack(rhs_cols))
    base = sol[:, 0]
    resp_lo = sol[:, col_of["lo"]] if "lo" in col_of else None
    resp_hi = sol[:, col_of["hi"]] if "hi" in col_of else None

    if not col_of:
        return base

    def inner(end, b_lo, b_hi):
        idx = 1 if end == "lo" else m - 2
        val = base[idx]
        if resp_lo is not None:
            val += b_lo * resp_lo[idx]
        if resp_hi is not None:
            val += b_hi * resp_hi[idx]
        return val

    def residual(end, b, b_lo, b_hi):
        spec = bc_lo if end == "lo" else bc_hi
        _, varphi, d2v = spec
        i = 0 if end == "lo" else m - 1
        a_face = af[0] if end == "lo" else af[-1]
        if end == "lo":
            b_lo = b
        else:
            b_hi = b
        return ((b - w_old[i]) / dt
                + (2.0 / h) * float(varphi(b))
                - (2.0 / h) * d2v
                + (2.0 / h**2) * a_face * (b - inner(end, b_lo, b_hi))
                - src[i])

    def bisect(end, b_lo, b_hi):
        center = w_old[0 if end == "lo" else -1]
        span = max(1.0, abs(center))
        lo, hi = center - span, center + span
        for _ in range(80):
            if residual(end, lo, b_lo, b_hi) <= 0.0:
                break
            span *= 2.0
            lo = center - span
        else:
            raise RuntimeError("flux boundary bracket expansion failed (low side)")
        span = max(1.0, abs(center))
        for _ in range(80):
            if residual(end, hi, b_lo, b_hi) >= 0.0:
                break
            span *= 2.0
            hi = center + span
        else:
            raise RuntimeError("flux boundary bracket expansion failed (high side)")
        while hi - lo > bc_tol:
            mid = 0.5 * (lo + hi)
            r = residual(end, mid, b_lo, b_hi)
            if r == 0.0:
                # exact root (equilibria land here); keep it bitwise
                return mid
            if r <= 0.0:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    b_lo = bc_lo[1] if bc_lo[0] == "dirichlet" else w_old[0]
    b_hi = bc_hi[1] if bc_hi[0] == "dirichlet" else w_old[-1]
    flux_ends = [e for e in ("lo", "hi") if e in col_of]
    if len(flux_ends) == 1:
        end = flux_ends[0]
        b = bisect(end, b_lo, b_hi)
        if end == "lo":
            b_lo = b
        else:
            b_hi = b
    else:
        # two coupled scalar closures; the cross influence through one
        # implicit step decays like exp(-1/sqrt(a*dt)), so a couple of
        # sweeps suffice
        for _ in range(100):
            new_lo = bisect("lo", b_lo, b_hi)
            new_hi = bisect("hi", new_lo, b_hi)
            moved = max(abs(new_lo - b_lo), abs(new_hi - b_hi))
            b_lo, b_hi = new_lo, new_hi
            if moved <= bc_tol:
                break
        else:
            raise RuntimeError("coupled flux boundaries did not settle")

    w = base.copy()
    if resp_lo is not None:
        w += b_lo * resp_lo
    if resp_hi is not None:
        w += b_hi * resp_hi
    if bc_lo[0] == "dirichlet":
        w[0] = bc_lo[1]
    if bc_hi[0] == "dirichlet":
        w[-1] = bc_hi[1]
    return w


def _explicit_source(scn, pts, t, w):
    src = -np.asarray(scn.c(pts, t), dtype=float) * np.asarray(scn.reaction(w), dtype=float)
    if scn.absorption is not None:
        src = src - np.asarray(scn.absorption(pts, t, w), dtype=float)
    return src + np.asarray(scn.f(pts, t), dtype=float)


def _solve_1d(scn, grid, cfg):
    y = grid.points()
    h = grid.h
    yf = 0.5 * (y[:-1] + y[1:])
    w = np.asarray(scn.w0(y), dtype=float)
    check_finite(w, 0, 0.0)

    traj = Trajectory("parabolic", grid, meta={
        "scheme": "semi-implicit diffusion, explicit reaction",
        "dim": 1, "n": grid.n, "dt": cfg.dt, "t_end": cfg.t_end,
        "scenario": scn.label,
    })
    traj.append(0.0, u=w.copy())

    t, step = 0.0, 0
    while t < cfg.t_end - 1e-12 * cfg.t_end:
        dt = min(cfg.dt, cfg.t_end - t)
        tn = t + dt
        af = np.asarray(scn.a(yf, tn), dtype=float)
        src = _explicit_source(scn, y, t, w)
        bc_lo = _bc_spec(scn, "left", 0.0, tn)
        bc_hi = _bc_spec(scn, "right", 1.0, tn)
        try:
            w = _solve_line(w, h, dt, af, src, bc_lo, bc_hi, cfg.bc_tol)
        except (RuntimeError, np.linalg.LinAlgError) as exc:
            raise SolverDivergedError(step + 1, tn, str(exc)) from exc
        step += 1
        t = tn
        check_finite(w, step, t)
        if step % cfg.output_stride == 0 or t >= cfg.t_end - 1e-12 * cfg.t_end:
            traj.append(t, u=w.copy())
    return traj


def _solve_2d(scn, grid, cfg):
    nx, ny = grid.nx, grid.ny
    hx, hy = grid.hx, grid.hy
    X, Y = grid.points()
    xs = X[:, 0]
    ys = Y[0, :]
    xf = 0.5 * (xs[:-1] + xs[1:])
    yf = 0.5 * (ys[:-1] + ys[1:])
    w = np.asarray(scn.w0((X, Y)), dtype=float)
    check_finite(w, 0, 0.0)

    traj = Trajectory("parabolic", grid, meta={
        "scheme": "dimension-split semi-implicit diffusion, explicit reaction",
        "dim": 2, "nx": nx, "ny": ny, "dt": cfg.dt, "t_end": cfg.t_end,
        "scenario": scn.label,
    })
    traj.append(0.0, u=w.copy())

    t, step = 0.0, 0
    while t < cfg.t_end - 1e-12 * cfg.t_end:
        dt = min(cfg.dt, cfg.t_end - t)
        tn = t + dt
        src = _explicit_source(scn, (X, Y), t, w)
        dvals = np.asarray(scn.d1((X, Y), tn), dtype=float)

        try:
            # sweep along x: rows carry the full explicit source
            w_star = np.empty_like(w)
            for iy in range(ny + 1):
                if (iy == 0 and "bottom" in scn.gamma1) or (iy == ny and "top" in scn.gamma1):
                    w_star[:, iy] = dvals[:, iy]
                    continue
                y_row = ys[iy]
                af = np.asarray(scn.a((xf, np.full(nx, y_row)), tn), dtype=float)
                bc_lo = _bc_spec(scn, "left", (0.0, y_row), tn)
                bc_hi = _bc_spec(scn, "right", (1.0, y_row), tn)
                w_star[:, iy] = _solve_line(w[:, iy], hx, dt, af, src[:, iy],
                                            bc_lo, bc_hi, cfg.bc_tol)

            # sweep along y: pure diffusion correction
            zero_src = np.zeros(ny + 1)
            w_new = np.empty_like(w)
            for ix in range(nx + 1):
                if (ix == 0 and "left" in scn.gamma1) or (ix == nx and "right" in scn.gamma1):
                    w_new[ix, :] = dvals[ix, :]
                    continue
                x_col = xs[ix]
                af = np.asarray(scn.a((np.full(ny, x_col), yf), tn), dtype=float)
                bc_lo = _bc_spec(scn, "bottom", (x_col, 0.0), tn)
                bc_hi = _bc_spec(scn, "top", (x_col, 1.0), tn)
                w_new[ix, :] = _solve_line(w_star[ix, :], hy, dt, af, zero_src,
                                           bc_lo, bc_hi, cfg.bc_tol)
        except (RuntimeError, np.linalg.LinAlgError) as exc:
            raise SolverDivergedError(step + 1, tn, str(exc)) from exc

        w = w_new
        step += 1
        t = tn
        check_finite(w, step, t)
        if step % cfg.output_stride == 0 or t >= cfg.t_end - 1e-12 * cfg.t_end:
            traj.append(t, u=w.copy())
    return traj
