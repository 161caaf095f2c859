"""Conservative upwind scheme for the nonlocal-velocity transport class

    rho_t + (speed(W(t)) * rho)_y = 0,       W(t) = integral of rho over (0, 1),

with the recirculation boundary condition rho(0, t) = k*rho(1, t) + d(t),
|k| < 1.  The velocity depends on the instantaneous total mass only, so
within a step the field is advected rigidly; cell averages are updated
with first-order upwind fluxes and the step size is chosen so the CFL
number speed*dt/h never exceeds the configured safety factor.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ..fields import Grid1D, Trajectory
from ..signals import TimeSignal
from .common import (AssumptionViolationError, ScenarioError, SolverConfig,
                     capped_dt, check_finite)

__all__ = ["TransportScenario", "solve_transport"]

_ASSUMPTIONS = ("uniform", "decreasing")


@dataclass
class TransportScenario:
    """Problem data for the recirculating transport class.

    assumption "uniform" declares speed(s) >= speed_floor > 0 everywhere
    (speed_floor mandatory); assumption "decreasing" declares speed
    positive, nonincreasing on s >= 0, and speed(s) >= speed(|s|), which
    is what the local estimates need.  Both are spot-checked on a sample
    lattice.
    """

    speed_map: Callable
    assumption: str
    k: float
    d: TimeSignal
    rho0: Callable
    speed_floor: Optional[float] = None
    label: str = ""

    def validate(self):
        if self.assumption not in _ASSUMPTIONS:
            raise ScenarioError(f"assumption must be one of {_ASSUMPTIONS}")
        if not abs(self.k) < 1.0:
            raise ScenarioError(f"recirculation gain must satisfy |k| < 1, got {self.k}")
        s = np.linspace(-10.0, 10.0, 401)
        vals = np.asarray([float(self.speed_map(si)) for si in s])
        if not np.all(np.isfinite(vals)) or np.any(vals <= 0):
            raise ScenarioError("speed map must be positive and finite")
        if self.assumption == "uniform":
            if self.speed_floor is None or not self.speed_floor > 0:
                raise ScenarioError("assumption 'uniform' needs speed_floor > 0")
            if np.any(vals < self.speed_floor - 1e-12):
                raise ScenarioError("speed map drops below its declared floor")
        else:
            pos = vals[s >= 0]
            if np.any(np.diff(pos) > 1e-12):
                raise ScenarioError("assumption 'decreasing' needs a nonincreasing speed on s >= 0")
            mirrored = np.asarray([float(self.speed_map(abs(si))) for si in s])
            if np.any(vals < mirrored - 1e-12):
                raise ScenarioError("assumption 'decreasing' needs speed(s) >= speed(|s|)")


def solve_transport(scn: TransportScenario, grid: Grid1D, cfg: SolverConfig) -> Trajectory:
    """March to cfg.t_end with first-order upwind fluxes on cell averages.

    The inflow value k*rho(1, t) + d(t) uses the current outflow cell and
    the current time.  Total mass W(t) is the midpoint sum of the cell
    averages.  Raises AssumptionViolationError if the speed ever fails to
    be positive along the run.
    """
    scn.validate()
    if not isinstance(grid, Grid1D) or grid.layout != "cell":
        raise ValueError("transport runs need a cell-centered Grid1D")
    sigma = cfg.cfl_sigma if cfg.cfl_sigma is not None else 0.9
    h = grid.h
    y = grid.points()
    rho = np.asarray(scn.rho0(y), dtype=float)
    check_finite(rho, 0, 0.0)

    traj = Trajectory("transport", grid, meta={
        "scheme": "first-order conservative upwind, adaptive dt",
        "n": grid.n, "cfl_sigma": sigma, "t_end": cfg.t_end,
        "scenario": scn.label,
    })
    traj.append(0.0, u=rho.copy())
    dt_history = []

    t, step = 0.0, 0
    while t < cfg.t_end - 1e-12 * cfg.t_end:
        mass = h * float(rho.sum())
        speed = float(scn.speed_map(mass))
        if not (np.isfinite(speed) and speed > 0):
            raise AssumptionViolationError(
                f"speed {speed} at total mass {mass} is not positive (t = {t})")
        raw = cfg.t_end - t if cfg.dt is None else min(cfg.dt, cfg.t_end - t)
        dt = capped_dt(raw, speed, h, sigma)
        nu = speed * dt / h
        inflow = scn.k * rho[-1] + float(scn.d(t))
        shifted = np.concatenate([[inflow], rho[:-1]])
        rho = rho - nu * (rho - shifted)
        step += 1
        t += dt
        dt_history.append(dt)
        check_finite(rho, step, t)
        if step % cfg.output_stride == 0 or t >= cfg.t_end - 1e-12 * cfg.t_end:
            traj.append(t, u=rho.copy())
    traj.meta["dt_min"] = min(dt_history) if dt_history else None
    traj.meta["dt_max"] = max(dt_history) if dt_history else None
    traj.meta["steps"] = step
    return traj
