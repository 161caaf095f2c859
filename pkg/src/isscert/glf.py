"""Truncation-energy functionals along trajectories.

For each model class the certified functional is a sum of exponentially
weighted truncation energies of the shifted state,

    E(v) = integral of exp(sign * r * y) * G(v(y) - level) dy,

summed over the sign pattern the class calls for.  The truncation level
is derived from the disturbances alone, so the functional vanishes
whenever the state is trapped inside the disturbance band, and along
solutions it obeys a linear decay inequality whose residual this module
measures stamp by stamp.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from pathlib import Path
from typing import Optional

import numpy as np

from .comparison import invert_monotone
from .fields import Grid1D, Grid2D, Trajectory, trapezoid_1d, trapezoid_2d
from .signals import sup_field, sup_window
from .solvers.common import ScenarioError
from .trunc import TruncationPair, gronwall_envelope_at

__all__ = [
    "GlfSpec",
    "GlfSeries",
    "weighted_energy",
    "evaluate",
    "components",
    "series",
    "dissipation_report",
    "truncation_level_parabolic",
    "truncation_level_transport",
    "truncation_level_wave",
    "default_transport_rate",
    "transport_rate_bounds_q",
    "local_speed_floor",
    "glf_for_parabolic",
    "glf_for_transport",
    "glf_for_wave",
    "dissipation_rate",
    "wave_forcing_slack",
]


@dataclass(frozen=True)
class GlfSpec:
    """Shape of the functional: class, exponent, weight rate, level, split.

    r is the exponential weight rate (zero for the parabolic class), and
    eps the Young split used by the wave dissipation inequality.  Use the
    ``glf_for_*`` builders to derive admissible values from a scenario
    instead of filling these by hand.
    """

    pde_class: str
    p: float
    r: float = 0.0
    level: float = 0.0
    eps: Optional[float] = None

    def __post_init__(self):
        if self.pde_class not in ("parabolic", "transport", "wave"):
            raise ValueError(f"unknown pde class {self.pde_class!r}")
        if not self.p > 1.0:
            raise ValueError("exponent p must exceed 1")
        if not self.r >= 0.0:
            raise ValueError("weight rate r must be nonnegative")
        if self.level < 0.0:
            raise ValueError("truncation level must be nonnegative")
        if self.eps is not None and not self.eps > 0.0:
            raise ValueError("eps must be positive when given")

    @property
    def pair(self) -> TruncationPair:
        return TruncationPair(self.p)


def weighted_energy(values, grid, pair, rate=0.0, weight_sign=0, shift_sign=1,
                    level=0.0):
    """integral of exp(weight_sign * rate * y) * G(shift_sign * v - level).

    Node layouts integrate by composite trapezoid, cell layouts by
    midpoint; on the square only the unweighted case is defined.
    """
    values = np.asarray(values, dtype=float)
    if weight_sign not in (-1, 0, 1):
        raise ValueError("weight_sign must be -1, 0, or 1")
    if shift_sign not in (-1, 1):
        raise ValueError("shift_sign must be -1 or 1")
    if level < 0:
        raise ValueError("level must be nonnegative")
    integrand = pair.G(shift_sign * values - level)
    if isinstance(grid, Grid2D):
        if weight_sign != 0:
            raise ValueError("exponential weights are one-dimensional")
        return trapezoid_2d(integrand, grid.hx, grid.hy)
    if weight_sign != 0:
        integrand = np.exp(weight_sign * rate * grid.points()) * integrand
    if grid.layout == "node":
        return trapezoid_1d(integrand, grid.h)
    return float(grid.h * integrand.sum())


def components(state: dict, grid, spec: GlfSpec) -> dict:
    """Each energy term of the functional for one state snapshot."""
    pair = spec.pair
    if spec.pde_class in ("parabolic", "transport"):
        wsign = -1 if spec.pde_class == "transport" else 0
        u = state["u"]
        return {
            "pos": weighted_energy(u, grid, pair, spec.r, wsign, 1, spec.level),
            "neg": weighted_energy(u, grid, pair, spec.r, wsign, -1, spec.level),
        }
    plus, minus = state["plus"], state["minus"]
    return {
        "plus_pos": weighted_energy(plus, grid, pair, spec.r, 1, 1, spec.level),
        "plus_neg": weighted_energy(plus, grid, pair, spec.r, 1, -1, spec.level),
        "minus_pos": weighted_energy(minus, grid, pair, spec.r, -1, 1, spec.level),
        "minus_neg": weighted_energy(minus, grid, pair, spec.r, -1, -1, spec.level),
    }


def evaluate(state: dict, grid, spec: GlfSpec) -> float:
    """Value of the functional for one state snapshot."""
    return float(sum(components(state, grid, spec).values()))


def series(traj: Trajectory, spec: GlfSpec):
    """Functional values and component arrays along a trajectory."""
    comp_arrays: dict = {}
    vhat = np.empty(len(traj))
    for i in range(len(traj)):
        comps = components(traj.snapshot(i), traj.grid, spec)
        for name, val in comps.items():
            comp_arrays.setdefault(name, np.empty(len(traj)))[i] = val
        vhat[i] = sum(comps.values())
    return vhat, comp_arrays


@dataclass
class GlfSeries:
    """Functional history with dissipation residuals and Gronwall envelope.

    residuals[i] is the forward-difference slack of the decay inequality
    on the interval (t_i, t_{i+1}); there is one fewer residual than
    stamps.  envelope carries the comparison trajectory from the same
    decay rate and slack series.
    """

    times: np.ndarray
    vhat: np.ndarray
    components: dict
    residuals: np.ndarray
    envelope: np.ndarray
    decay_rate: float
    slack: np.ndarray

    @property
    def max_residual(self) -> float:
        return float(np.max(self.residuals)) if self.residuals.size else -math.inf

    def to_csv(self, path):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as fh:
            fh.write("t,Vhat,residual,envelope\n")
            for i in range(self.times.size):
                res = self.residuals[i] if i < self.residuals.size else math.nan
                fh.write(f"{float(self.times[i])!r},{float(self.vhat[i])!r},"
                         f"{float(res)!r},{float(self.envelope[i])!r}\n")
        return path


def dissipation_report(traj: Trajectory, spec: GlfSpec, decay_rate: float,
                       slack=None) -> GlfSeries:
    """Measure the decay inequality  dV/dt <= -decay_rate * V + slack.

    slack is an optional per-stamp array (defaults to zero).  Residuals
    use the forward difference on each recorded interval; the envelope is
    the Gronwall comparison curve started at the first stamp.
    """
    times = traj.times
    vhat, comps = series(traj, spec)
    slack_arr = np.zeros_like(vhat) if slack is None else np.asarray(slack, dtype=float)
    if slack_arr.shape != vhat.shape:
        raise ValueError("slack must align with the trajectory stamps")
    dts = np.diff(times)
    residuals = ((vhat[1:] - vhat[:-1]) / dts
                 + decay_rate * vhat[:-1]
                 - slack_arr[:-1])
    envelope = gronwall_envelope_at(times, np.full_like(vhat, -decay_rate),
                                    slack_arr, vhat[0])
    return GlfSeries(times=times, vhat=vhat, components=comps,
                     residuals=residuals, envelope=envelope,
                     decay_rate=decay_rate, slack=slack_arr)


# ---------------------------------------------------------------------------
# truncation levels


def _boundary_sup(scn, fld, edges, horizon, samples=129):
    """Sup of |fld| over the named boundary part crossed with (0, horizon)."""
    if not edges:
        return 0.0
    if scn.dim == 1:
        pts = np.asarray([0.0 if e == "left" else 1.0 for e in sorted(edges)])
        return sup_field(fld, pts, 0.0, horizon)
    lat = np.linspace(0.0, 1.0, samples)
    best = 0.0
    for edge in sorted(edges):
        if edge == "left":
            pts = (np.zeros(samples), lat)
        elif edge == "right":
            pts = (np.ones(samples), lat)
        elif edge == "bottom":
            pts = (lat, np.zeros(samples))
        else:
            pts = (lat, np.ones(samples))
        best = max(best, sup_field(fld, pts, 0.0, horizon))
    return best


def _domain_sup(scn, fld, horizon, samples=257):
    if scn.dim == 1:
        space = np.linspace(0.0, 1.0, samples)
    else:
        lat = np.linspace(0.0, 1.0, 65)
        space = tuple(np.meshgrid(lat, lat, indexing="ij"))
    return sup_field(fld, space, 0.0, horizon)


def truncation_level_parabolic(scn, horizon: float) -> float:
    """Disturbance level phi^{-1}(sup|f|/c0) + sup|d1| + varphi^{-1}(sup|d2|).

    Requires a strictly positive reaction floor; the classical heat
    baseline (c0 = 0) has no truncation level and must be certified by
    its own quadratic estimate instead.
    """
    if not scn.c0 > 0:
        raise ScenarioError("truncation level needs a positive reaction floor c0")
    sup_f = _domain_sup(scn, scn.f, horizon)
    sup_d1 = _boundary_sup(scn, scn.d1, scn.gamma1, horizon)
    sup_d2 = _boundary_sup(scn, scn.d2, scn.gamma2, horizon)
    lvl = _invert_expanding(scn.reaction, sup_f / scn.c0) + sup_d1
    if scn.gamma2:
        lvl += _invert_expanding(scn.boundary_reaction, sup_d2)
    return lvl


def _invert_expanding(fn, y, tol=1e-12):
    """Inverse of an increasing map at y >= 0 with a doubling bracket."""
    if y < 0:
        raise ValueError("target must be nonnegative")
    if y == 0.0:
        return 0.0
    hi = 1.0
    for _ in range(200):
        if float(fn(hi)) >= y:
            break
        hi *= 2.0
    else:
        raise ValueError("bracket expansion failed; map grows too slowly")
    return invert_monotone(fn, y, lo=0.0, hi=hi, tol=tol)


def truncation_level_transport(scn, horizon: float) -> float:
    return sup_window(scn.d, 0.0, horizon) / (1.0 - abs(scn.k))


def truncation_level_wave(scn, horizon: float) -> float:
    return sup_window(scn.d, 0.0, horizon) / scn.c


# ---------------------------------------------------------------------------
# admissible weight rates and spec builders


def default_transport_rate(p: float, k: float) -> float:
    """Largest admissible weight rate (p+1) * ln(1/|k|)."""
    if k == 0:
        raise ValueError("recirculation gain zero leaves the rate unconstrained")
    return (p + 1.0) * math.log(1.0 / abs(k))


def transport_rate_bounds_q(p: float, k: float):
    """Admissible (lo, hi) rate window for the q-norm estimate, and its midpoint."""
    hi = default_transport_rate(p, k)
    lo = 0.5 * hi
    return lo, hi, 0.75 * hi


def glf_for_parabolic(scn, p: float, horizon: float) -> GlfSpec:
    return GlfSpec("parabolic", p, 0.0, truncation_level_parabolic(scn, horizon))


def glf_for_transport(scn, p: float, horizon: float, r: Optional[float] = None) -> GlfSpec:
    hi = default_transport_rate(p, scn.k)
    r = hi if r is None else float(r)
    if not 0.0 < r <= hi + 1e-12:
        raise ValueError(f"weight rate must lie in (0, {hi}], got {r}")
    return GlfSpec("transport", p, r, truncation_level_transport(scn, horizon))


def glf_for_wave(scn, p: float, horizon: float, r: float,
                 eps: Optional[float] = None) -> GlfSpec:
    r = float(r)
    if not r > 0:
        raise ValueError("the wave functional needs a positive weight rate")
    eps = 0.5 * scn.c * r if eps is None else float(eps)
    if not scn.c * r - eps > 0:
        raise ValueError(f"need c*r - eps > 0, got c*r = {scn.c * r}, eps = {eps}")
    return GlfSpec("wave", p, r, truncation_level_wave(scn, horizon), eps)


def dissipation_rate(spec: GlfSpec, scn) -> float:
    """Decay rate certified by the functional for this scenario.

    Parabolic: c0 * (p+1).  Transport: r * speed_floor (the scenario must
    declare one).  Wave: c*r - eps.
    """
    if spec.pde_class == "parabolic":
        return scn.c0 * (spec.p + 1.0)
    if spec.pde_class == "transport":
        if not scn.speed_floor:
            raise ScenarioError("decay rate needs a declared speed floor")
        return spec.r * scn.speed_floor
    return scn.c * spec.r - spec.eps


def wave_forcing_slack(traj: Trajectory, spec: GlfSpec, f_field) -> np.ndarray:
    """Forcing slack 4*(p/eps)**p * E_plus(|f(., t)|) per recorded stamp."""
    if spec.eps is None:
        raise ValueError("wave slack needs the Young split eps")
    pair = spec.pair
    pts = traj.grid.points()
    out = np.empty(len(traj))
    coef = 4.0 * (spec.p / spec.eps) ** spec.p
    for i, t in enumerate(traj.times):
        fabs = np.abs(np.asarray(f_field(pts, float(t)), dtype=float))
        out[i] = coef * weighted_energy(fabs, traj.grid, pair, spec.r, 1, 1, 0.0)
    return out


def local_speed_floor(scn, radius: float):
    """Guaranteed speed floor for data in a ball, with the mass range used.

    For a scenario under the "decreasing" assumption and initial data plus
    disturbance bounded by ``radius``, the total mass stays within
    ``2 * radius * max(1/|k|, 1/(1-|k|))`` in magnitude, so the speed never
    drops below the map's value there.  Returns (floor, mass_range).
    """
    if scn.assumption != "decreasing":
        raise ScenarioError("local speed floors need the 'decreasing' assumption")
    if not radius > 0:
        raise ValueError("radius must be positive")
    if scn.k == 0:
        raise ScenarioError("local speed floors need a nonzero recirculation gain")
    mass_range = 2.0 * radius * max(1.0 / abs(scn.k), 1.0 / (1.0 - abs(scn.k)))
    return float(scn.speed_map(mass_range)), mass_range
