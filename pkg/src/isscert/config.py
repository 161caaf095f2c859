"""YAML run configurations: loading, validation, object construction.

A config document has the sections

    name, description, pde, scenario, grid, solver, energy (optional),
    checks (optional)

and :func:`build_plan` turns it into solver-ready objects.  Errors carry
the dotted key path of the offending entry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np
import yaml

from .comparison import identity_map, linear_map, odd_cubic_map, power_map
from .scenarios import SCENARIOS, bundled_config_text
from .signals import (SpaceTimeField, TimeSignal, profile2d_constant,
                      profile2d_sinprod, profile_affine, profile_bump,
                      profile_constant, profile_poly, profile_sin, profile_sum)
from .fields import Grid1D, Grid2D
from .solvers import (ParabolicScenario, SolverConfig, TransportScenario,
                      WaveScenario)

__all__ = ["ConfigError", "RunPlan", "load_config", "build_plan", "load_plan"]


class ConfigError(ValueError):
    """Invalid configuration; the message starts with the dotted key path."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def _expect_mapping(doc, path):
    if not isinstance(doc, dict):
        raise ConfigError(path, f"expected a mapping, got {type(doc).__name__}")
    return doc


def _get(doc, key, path, required=True, default=None):
    if key not in doc:
        if required:
            raise ConfigError(f"{path}.{key}", "missing required key")
        return default
    return doc[key]


def _number(doc, key, path, required=True, default=None):
    val = _get(doc, key, path, required, default)
    if val is None and not required:
        return default
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError(f"{path}.{key}", f"expected a number, got {val!r}")
    return float(val)


def _reject_unknown(doc, allowed, path):
    extra = sorted(set(doc) - set(allowed))
    if extra:
        raise ConfigError(f"{path}.{extra[0]}", "unknown key")


# ---------------------------------------------------------------------------
# leaf builders

def _build_signal(spec, path) -> TimeSignal:
    spec = _expect_mapping(spec, path)
    kind = _get(spec, "kind", path)
    if kind == "constant":
        return TimeSignal.constant(_number(spec, "value", path))
    if kind == "sinusoid":
        return TimeSignal.sinusoid(
            _number(spec, "amplitude", path),
            _number(spec, "frequency", path),
            phase=_number(spec, "phase", path, required=False, default=0.0),
            offset=_number(spec, "offset", path, required=False, default=0.0))
    if kind == "exp_decay":
        return TimeSignal.exp_decay(
            _number(spec, "amplitude", path),
            _number(spec, "rate", path),
            offset=_number(spec, "offset", path, required=False, default=0.0))
    if kind == "polynomial":
        coeffs = _get(spec, "coeffs", path)
        if not isinstance(coeffs, list) or not coeffs:
            raise ConfigError(f"{path}.coeffs", "expected a nonempty list")
        return TimeSignal.polynomial(*coeffs)
    raise ConfigError(f"{path}.kind", f"unknown signal kind {kind!r}")


def _build_profile(spec, path, dim):
    spec = _expect_mapping(spec, path)
    kind = _get(spec, "kind", path)
    if kind == "sum":
        terms = _get(spec, "terms", path)
        if not isinstance(terms, list) or not terms:
            raise ConfigError(f"{path}.terms", "expected a nonempty list")
        parts = [_build_profile(t, f"{path}.terms[{i}]", dim)
                 for i, t in enumerate(terms)]
        return profile_sum(*parts)
    if dim == 2:
        if kind == "constant":
            return profile2d_constant(_number(spec, "value", path))
        if kind == "sinprod":
            return profile2d_sinprod(
                _number(spec, "amplitude", path),
                mode_x=int(_number(spec, "mode_x", path, required=False, default=1)),
                mode_y=int(_number(spec, "mode_y", path, required=False, default=1)))
        raise ConfigError(f"{path}.kind", f"unknown 2D profile kind {kind!r}")
    if kind == "constant":
        return profile_constant(_number(spec, "value", path))
    if kind == "affine":
        return profile_affine(_number(spec, "intercept", path),
                              _number(spec, "slope", path))
    if kind == "sin":
        return profile_sin(_number(spec, "amplitude", path),
                           mode=int(_number(spec, "mode", path, required=False, default=1)))
    if kind == "bump":
        return profile_bump(_number(spec, "amplitude", path),
                            _number(spec, "center", path),
                            _number(spec, "halfwidth", path))
    if kind == "poly":
        coeffs = _get(spec, "coeffs", path)
        if not isinstance(coeffs, list) or not coeffs:
            raise ConfigError(f"{path}.coeffs", "expected a nonempty list")
        return profile_poly(*coeffs)
    raise ConfigError(f"{path}.kind", f"unknown profile kind {kind!r}")


def _build_field(spec, path, dim) -> SpaceTimeField:
    spec = _expect_mapping(spec, path)
    kind = _get(spec, "kind", path)
    if kind == "constant":
        return SpaceTimeField.constant(_number(spec, "value", path))
    if kind == "uniform":
        return SpaceTimeField.from_signal(
            _build_signal(_get(spec, "signal", path), f"{path}.signal"))
    if kind == "separable":
        profile = _build_profile(_get(spec, "profile", path), f"{path}.profile", dim)
        sig = _build_signal(_get(spec, "signal", path), f"{path}.signal")
        return SpaceTimeField.separable(profile, sig)
    raise ConfigError(f"{path}.kind", f"unknown field kind {kind!r}")


def _build_monotone(spec, path):
    spec = _expect_mapping(spec, path)
    kind = _get(spec, "kind", path)
    if kind == "identity":
        return identity_map()
    if kind == "linear":
        return linear_map(_number(spec, "slope", path))
    if kind == "cubic":
        return odd_cubic_map(_number(spec, "gamma", path))
    if kind == "power":
        return power_map(_number(spec, "exponent", path),
                         coef=_number(spec, "coef", path, required=False, default=1.0))
    raise ConfigError(f"{path}.kind", f"unknown map kind {kind!r}")


def _build_speed(spec, path):
    spec = _expect_mapping(spec, path)
    kind = _get(spec, "kind", path)
    if kind == "constant":
        value = _number(spec, "value", path)
        if value <= 0:
            raise ConfigError(f"{path}.value", "speed must be positive")
        return lambda s: value
    if kind == "reciprocal":
        scale = _number(spec, "scale", path, required=False, default=1.0)
        if scale < 0:
            raise ConfigError(f"{path}.scale", "scale must be nonnegative")
        return lambda s: 1.0 / (1.0 + scale * np.abs(s))
    raise ConfigError(f"{path}.kind", f"unknown speed kind {kind!r}")


# ---------------------------------------------------------------------------
# section builders

_EDGES_1D = ("left", "right")
_EDGES_2D = ("left", "right", "bottom", "top")


def _edge_list(doc, key, path, dim):
    edges = _get(doc, key, path, required=False, default=[])
    if edges is None:
        edges = []
    if not isinstance(edges, list):
        raise ConfigError(f"{path}.{key}", "expected a list of edge names")
    valid = _EDGES_2D if dim == 2 else _EDGES_1D
    for e in edges:
        if e not in valid:
            raise ConfigError(f"{path}.{key}", f"unknown edge {e!r} for dim={dim}")
    return frozenset(edges)


def _build_parabolic(doc, path, name):
    allowed = ("dim", "diffusion", "diffusion_floor", "damping", "damping_floor",
               "reaction", "boundary_reaction", "forcing", "dirichlet_data",
               "flux_data", "dirichlet_edges", "flux_edges", "initial")
    _reject_unknown(doc, allowed, path)
    dim = int(_number(doc, "dim", path, required=False, default=1))
    if dim not in (1, 2):
        raise ConfigError(f"{path}.dim", f"dim must be 1 or 2, got {dim}")
    scn = ParabolicScenario(
        dim=dim,
        a=_build_field(_get(doc, "diffusion", path), f"{path}.diffusion", dim),
        a0=_number(doc, "diffusion_floor", path),
        c=_build_field(_get(doc, "damping", path), f"{path}.damping", dim),
        c0=_number(doc, "damping_floor", path),
        reaction=_build_monotone(_get(doc, "reaction", path), f"{path}.reaction"),
        boundary_reaction=_build_monotone(_get(doc, "boundary_reaction", path),
                                          f"{path}.boundary_reaction"),
        f=_build_field(_get(doc, "forcing", path), f"{path}.forcing", dim),
        d1=_build_field(_get(doc, "dirichlet_data", path), f"{path}.dirichlet_data", dim),
        d2=_build_field(_get(doc, "flux_data", path), f"{path}.flux_data", dim),
        w0=_build_profile(_get(doc, "initial", path), f"{path}.initial", dim),
        gamma1=_edge_list(doc, "dirichlet_edges", path, dim),
        gamma2=_edge_list(doc, "flux_edges", path, dim),
        label=name)
    return scn


def _build_transport(doc, path, name):
    allowed = ("assumption", "speed", "speed_floor", "k", "boundary_data", "initial")
    _reject_unknown(doc, allowed, path)
    floor = _number(doc, "speed_floor", path, required=False, default=None)
    return TransportScenario(
        speed_map=_build_speed(_get(doc, "speed", path), f"{path}.speed"),
        assumption=_get(doc, "assumption", path),
        k=_number(doc, "k", path),
        d=_build_signal(_get(doc, "boundary_data", path), f"{path}.boundary_data"),
        rho0=_build_profile(_get(doc, "initial", path), f"{path}.initial", 1),
        speed_floor=floor,
        label=name)


def _build_wave(doc, path, name):
    allowed = ("c", "forcing", "boundary_data", "initial_displacement",
               "initial_velocity")
    _reject_unknown(doc, allowed, path)
    d_sig = _build_signal(_get(doc, "boundary_data", path), f"{path}.boundary_data")
    return WaveScenario(
        c=_number(doc, "c", path),
        f=_build_field(_get(doc, "forcing", path), f"{path}.forcing", 1),
        d=d_sig,
        w0=_build_profile(_get(doc, "initial_displacement", path),
                          f"{path}.initial_displacement", 1),
        v0=_build_profile(_get(doc, "initial_velocity", path),
                          f"{path}.initial_velocity", 1),
        label=name)


def _build_grid(doc, path, pde, scenario=None):
    doc = _expect_mapping(doc, path)
    if "nx" in doc or "ny" in doc:
        _reject_unknown(doc, ("nx", "ny"), path)
        if scenario is None or getattr(scenario, "dim", 1) != 2:
            raise ConfigError(path, "an nx/ny grid needs a dim=2 scenario")
        return Grid2D(int(_number(doc, "nx", path)), int(_number(doc, "ny", path)),
                      gamma1=scenario.gamma1, gamma2=scenario.gamma2)
    _reject_unknown(doc, ("n", "layout"), path)
    n = int(_number(doc, "n", path))
    layout = _get(doc, "layout", path, required=False,
                  default="cell" if pde == "transport" else "node")
    if layout not in ("node", "cell"):
        raise ConfigError(f"{path}.layout", f"layout must be node or cell, got {layout!r}")
    return Grid1D(n, layout=layout)


def _build_solver(doc, path):
    doc = _expect_mapping(doc, path)
    allowed = ("t_end", "dt", "cfl_sigma", "bc_tol", "output_stride")
    _reject_unknown(doc, allowed, path)
    try:
        return SolverConfig(
            t_end=_number(doc, "t_end", path),
            dt=_number(doc, "dt", path, required=False, default=None),
            cfl_sigma=_number(doc, "cfl_sigma", path, required=False, default=None),
            bc_tol=_number(doc, "bc_tol", path, required=False, default=1e-10),
            output_stride=int(_number(doc, "output_stride", path,
                                      required=False, default=1)))
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from exc


def _build_energy(doc, path, pde):
    if doc is None:
        return None
    doc = _expect_mapping(doc, path)
    _reject_unknown(doc, ("p", "rate", "eps"), path)
    energy = {"p": _number(doc, "p", path)}
    rate = _number(doc, "rate", path, required=False, default=None)
    eps = _number(doc, "eps", path, required=False, default=None)
    if rate is not None:
        energy["rate"] = rate
    if eps is not None:
        energy["eps"] = eps
    if pde == "wave" and rate is None:
        raise ConfigError(f"{path}.rate", "wave energies need an explicit weight rate")
    return energy


_CHECK_KEYS = {
    "heat_clm": ("eps",),
    "parabolic_q": (),
    "transport_p": ("p", "r"),
    "transport_q": (),
    "transport_liss": ("R0", "variant", "p", "r"),
    "wave_r_eps": ("r", "eps"),
    "wave_m": ("m",),
}

_CHECK_REQUIRED = {
    "heat_clm": ("eps",),
    "transport_p": ("p",),
    "transport_liss": ("R0",),
    "wave_r_eps": ("r", "eps"),
    "wave_m": ("m",),
}


def _build_checks(doc, path):
    if doc is None:
        return []
    if not isinstance(doc, list):
        raise ConfigError(path, "expected a list of check entries")
    out = []
    for i, entry in enumerate(doc):
        epath = f"{path}[{i}]"
        entry = _expect_mapping(entry, epath)
        kind = _get(entry, "kind", epath)
        if kind not in _CHECK_KEYS:
            raise ConfigError(f"{epath}.kind", f"unknown check kind {kind!r}")
        _reject_unknown(entry, ("kind", "q", "tol") + _CHECK_KEYS[kind], epath)
        q = _get(entry, "q", epath)
        if q == "inf":
            q = math.inf
        elif isinstance(q, (int, float)) and not isinstance(q, bool):
            q = float(q)
        else:
            raise ConfigError(f"{epath}.q", f"expected a number or 'inf', got {q!r}")
        tol = _number(entry, "tol", epath, required=False, default=0.0)
        params = {}
        for key in _CHECK_KEYS[kind]:
            if key in entry:
                params[key] = (entry[key] if key == "variant"
                               else _number(entry, key, epath))
        for key in _CHECK_REQUIRED.get(kind, ()):
            if key not in params:
                raise ConfigError(f"{epath}.{key}", "missing required key")
        out.append({"kind": kind, "q": q, "tol": tol, "params": params})
    return out


@dataclass
class RunPlan:
    """Everything a run needs, built from one config document."""

    name: str
    description: str
    pde: str
    scenario: object
    grid: object
    solver: SolverConfig
    energy: dict | None
    checks: list = dc_field(default_factory=list)
    doc: dict = dc_field(default_factory=dict)


def load_config(source) -> dict:
    """Parse a YAML config from a path, or a bundled scenario name."""
    text = None
    if isinstance(source, str) and source in SCENARIOS:
        text = bundled_config_text(source)
    else:
        path = Path(source)
        if not path.exists():
            known = ", ".join(sorted(SCENARIOS))
            raise ConfigError(str(source),
                              f"no such config file or bundled scenario (bundled: {known})")
        text = path.read_text()
    doc = yaml.safe_load(text)
    return _expect_mapping(doc, "<config>")


def build_plan(doc: dict) -> RunPlan:
    """Validate a config document and construct the run objects."""
    doc = _expect_mapping(doc, "<config>")
    _reject_unknown(doc, ("name", "description", "pde", "scenario", "grid",
                          "solver", "energy", "checks"), "<config>")
    name = _get(doc, "name", "<config>", required=False, default="run")
    description = _get(doc, "description", "<config>", required=False, default="")
    pde = _get(doc, "pde", "<config>")
    if pde not in ("parabolic", "transport", "wave"):
        raise ConfigError("<config>.pde", f"unknown pde class {pde!r}")
    sdoc = _expect_mapping(_get(doc, "scenario", "<config>"), "scenario")
    if pde == "parabolic":
        scenario = _build_parabolic(sdoc, "scenario", name)
    elif pde == "transport":
        scenario = _build_transport(sdoc, "scenario", name)
    else:
        scenario = _build_wave(sdoc, "scenario", name)
    try:
        scenario.validate()
    except ValueError as exc:
        raise ConfigError("scenario", str(exc)) from exc
    grid = _build_grid(_get(doc, "grid", "<config>"), "grid", pde, scenario)
    if pde == "parabolic" and scenario.dim == 2 and not isinstance(grid, Grid2D):
        raise ConfigError("grid", "a dim=2 scenario needs an nx/ny grid")
    solver = _build_solver(_get(doc, "solver", "<config>"), "solver")
    energy = _build_energy(doc.get("energy"), "energy", pde)
    checks = _build_checks(doc.get("checks"), "checks")
    return RunPlan(name=name, description=description, pde=pde, scenario=scenario,
                   grid=grid, solver=solver, energy=energy, checks=checks, doc=doc)


def load_plan(source) -> RunPlan:
    return build_plan(load_config(source))
