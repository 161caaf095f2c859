"""Tests for the truncation-energy functionals and decay reports."""

import math

import numpy as np
import pytest

from isscert.comparison import odd_cubic_map
from isscert.fields import Grid1D, Grid2D, Trajectory
from isscert.glf import (GlfSeries, GlfSpec, default_transport_rate,
                         dissipation_rate, dissipation_report, evaluate,
                         glf_for_parabolic, glf_for_transport, glf_for_wave,
                         local_speed_floor, series, transport_rate_bounds_q,
                         truncation_level_parabolic,
                         truncation_level_transport, truncation_level_wave,
                         wave_forcing_slack, weighted_energy)
from isscert.signals import SpaceTimeField, TimeSignal, profile_constant
from isscert.solvers import (ParabolicScenario, ScenarioError,
                             TransportScenario, WaveScenario)
from isscert.trunc import TruncationPair

ONE = SpaceTimeField.constant(1.0)
ZERO = SpaceTimeField.constant(0.0)


def make_parabolic(**over):
    base = dict(dim=1, a=ONE, a0=1.0, c=ONE, c0=1.0,
                reaction=odd_cubic_map(1.0),
                boundary_reaction=odd_cubic_map(1.0),
                f=SpaceTimeField.constant(2.0), d1=ZERO, d2=ZERO,
                w0=profile_constant(0.0), gamma1=("left", "right"),
                gamma2=())
    base.update(over)
    return ParabolicScenario(**base)


def make_transport(**over):
    base = dict(speed_map=lambda w: 1.0, assumption="decreasing", k=0.5,
                d=TimeSignal.constant(0.75), rho0=profile_constant(0.0),
                speed_floor=None)
    base.update(over)
    return TransportScenario(**base)


def make_wave(**over):
    base = dict(c=2.0, f=ZERO, d=TimeSignal.constant(0.8),
                w0=profile_constant(0.0), v0=profile_constant(0.0))
    base.update(over)
    return WaveScenario(**base)


# ---------------------------------------------------------------------------
# weighted energies


def test_weighted_energy_constant_exact():
    grid = Grid1D(64, layout="node")
    pair = TruncationPair(2.0)
    u = 2.0 * np.ones(grid.npoints)
    # G(2 - 1) = 1/3 over the unit interval
    assert weighted_energy(u, grid, pair, level=1.0) == pytest.approx(
        1.0 / 3.0, rel=1e-12)


def test_weighted_energy_exponential_weight():
    grid = Grid1D(512, layout="node")
    pair = TruncationPair(2.0)
    u = 2.0 * np.ones(grid.npoints)
    r = 1.5
    got = weighted_energy(u, grid, pair, rate=r, weight_sign=-1, level=1.0)
    want = (1.0 - math.exp(-r)) / (3.0 * r)
    assert got == pytest.approx(want, rel=1e-5)


def test_weighted_energy_zero_inside_band():
    grid = Grid1D(32, layout="node")
    pair = TruncationPair(2.0)
    u = 0.9 * np.sin(3.0 * grid.points())
    assert weighted_energy(u, grid, pair, level=1.0) == 0.0
    assert weighted_energy(u, grid, pair, shift_sign=-1, level=1.0) == 0.0


def test_weighted_energy_decreasing_in_level():
    grid = Grid1D(64, layout="node")
    pair = TruncationPair(2.0)
    u = 3.0 * np.ones(grid.npoints)
    vals = [weighted_energy(u, grid, pair, level=m) for m in (0.0, 1.0, 2.0)]
    assert vals[0] > vals[1] > vals[2] > 0.0


def test_weighted_energy_homogeneous_scaling():
    grid = Grid1D(64, layout="node")
    p = 3.0
    pair = TruncationPair(p)
    rng = np.random.default_rng(7)
    u = rng.uniform(0.0, 2.0, grid.npoints)
    base = weighted_energy(u, grid, pair)
    scaled = weighted_energy(5.0 * u, grid, pair)
    assert scaled == pytest.approx(5.0 ** (p + 1.0) * base, rel=1e-12)


def test_weighted_energy_validation():
    grid = Grid1D(16, layout="node")
    pair = TruncationPair(2.0)
    u = np.ones(grid.npoints)
    with pytest.raises(ValueError):
        weighted_energy(u, grid, pair, weight_sign=2)
    with pytest.raises(ValueError):
        weighted_energy(u, grid, pair, shift_sign=0)
    with pytest.raises(ValueError):
        weighted_energy(u, grid, pair, level=-1.0)
    g2 = Grid2D(8, 8, gamma1=("left", "right", "bottom", "top"))
    u2 = np.ones((9, 9))
    with pytest.raises(ValueError):
        weighted_energy(u2, g2, pair, rate=1.0, weight_sign=1)


# ---------------------------------------------------------------------------
# functional evaluation


def test_evaluate_vanishes_inside_band():
    grid = Grid1D(32, layout="node")
    spec = GlfSpec("parabolic", 2.0, level=1.0)
    u = np.linspace(-1.0, 1.0, grid.npoints)
    assert evaluate({"u": u}, grid, spec) == 0.0
    assert evaluate({"u": u + 0.5}, grid, spec) > 0.0
    assert evaluate({"u": u - 0.5}, grid, spec) > 0.0


def test_evaluate_wave_needs_both_families_trapped():
    grid = Grid1D(32, layout="node")
    spec = GlfSpec("wave", 2.0, r=1.0, level=1.0, eps=0.5)
    inside = 0.5 * np.ones(grid.npoints)
    outside = 2.0 * np.ones(grid.npoints)
    assert evaluate({"plus": inside, "minus": inside}, grid, spec) == 0.0
    assert evaluate({"plus": inside, "minus": outside}, grid, spec) > 0.0
    assert evaluate({"plus": -outside, "minus": inside}, grid, spec) > 0.0


def test_spec_validation():
    with pytest.raises(ValueError):
        GlfSpec("elliptic", 2.0)
    with pytest.raises(ValueError):
        GlfSpec("parabolic", 1.0)
    with pytest.raises(ValueError):
        GlfSpec("parabolic", 2.0, r=-0.1)
    with pytest.raises(ValueError):
        GlfSpec("parabolic", 2.0, level=-1.0)
    with pytest.raises(ValueError):
        GlfSpec("wave", 2.0, r=1.0, eps=0.0)


# ---------------------------------------------------------------------------
# truncation levels


def test_level_parabolic_identity_reactions():
    scn = make_parabolic(reaction=lambda v: v, boundary_reaction=lambda v: v,
                         f=SpaceTimeField.constant(0.5),
                         d1=SpaceTimeField.constant(0.2),
                         d2=SpaceTimeField.constant(0.3),
                         gamma1=("left",), gamma2=("right",))
    # 0.5/1 + 0.2 + 0.3
    assert truncation_level_parabolic(scn, 4.0) == pytest.approx(1.0, abs=1e-11)


def test_level_parabolic_cubic_reaction():
    # v + v**3 = 2 at v = 1
    assert truncation_level_parabolic(make_parabolic(), 1.0) == pytest.approx(
        1.0, abs=1e-11)
    # v + 2 v**3 = 2
    scn = make_parabolic(reaction=odd_cubic_map(2.0))
    assert truncation_level_parabolic(scn, 1.0) == pytest.approx(
        0.835122348481, abs=1e-9)


def test_level_parabolic_needs_damping_floor():
    with pytest.raises(ScenarioError):
        truncation_level_parabolic(make_parabolic(c0=0.0), 1.0)


def test_level_transport_and_wave():
    assert truncation_level_transport(make_transport(), 2.0) == 1.5
    assert truncation_level_wave(make_wave(), 1.0) == 0.4


# ---------------------------------------------------------------------------
# weight rates and builders


def test_default_transport_rate():
    got = default_transport_rate(2.0, 0.5)
    assert got == pytest.approx(3.0 * math.log(2.0), rel=1e-12)
    with pytest.raises(ValueError):
        default_transport_rate(2.0, 0.0)


def test_transport_rate_window():
    lo, hi, mid = transport_rate_bounds_q(2.0, 0.5)
    assert hi == pytest.approx(3.0 * math.log(2.0), rel=1e-12)
    assert lo == pytest.approx(0.5 * hi, rel=1e-12)
    assert mid == pytest.approx(0.75 * hi, rel=1e-12)


def test_builders_derive_specs():
    pspec = glf_for_parabolic(make_parabolic(), 2.0, 1.0)
    assert pspec.pde_class == "parabolic" and pspec.r == 0.0
    assert pspec.level == pytest.approx(1.0, abs=1e-11)

    tspec = glf_for_transport(make_transport(), 2.0, 2.0)
    assert tspec.r == pytest.approx(3.0 * math.log(2.0), rel=1e-12)
    assert tspec.level == 1.5
    with pytest.raises(ValueError):
        glf_for_transport(make_transport(), 2.0, 2.0,
                          r=1.1 * default_transport_rate(2.0, 0.5))

    wspec = glf_for_wave(make_wave(), 2.0, 1.0, r=1.0)
    assert wspec.eps == 0.5 * 2.0 * 1.0
    assert wspec.level == 0.4
    with pytest.raises(ValueError):
        glf_for_wave(make_wave(), 2.0, 1.0, r=0.0)
    with pytest.raises(ValueError):
        glf_for_wave(make_wave(), 2.0, 1.0, r=1.0, eps=2.0)


def test_dissipation_rate_per_class():
    pspec = GlfSpec("parabolic", 2.0)
    assert dissipation_rate(pspec, make_parabolic(c0=1.0)) == 3.0

    tspec = GlfSpec("transport", 2.0, r=2.0)
    assert dissipation_rate(tspec, make_transport(speed_floor=0.25)) == 0.5
    with pytest.raises(ScenarioError):
        dissipation_rate(tspec, make_transport(speed_floor=None))

    wspec = GlfSpec("wave", 2.0, r=1.0, eps=1.0)
    assert dissipation_rate(wspec, make_wave(c=2.0)) == 1.0


def test_local_speed_floor():
    scn = make_transport(speed_map=lambda w: 1.0 / (1.0 + abs(w)),
                         d=TimeSignal.constant(0.0))
    floor, mass_range = local_speed_floor(scn, 1.0)
    assert mass_range == 4.0
    assert floor == pytest.approx(0.2, rel=1e-12)
    with pytest.raises(ScenarioError):
        local_speed_floor(make_transport(assumption="uniform"), 1.0)
    with pytest.raises(ValueError):
        local_speed_floor(scn, 0.0)
    with pytest.raises(ScenarioError):
        local_speed_floor(make_transport(k=0.0), 1.0)


# ---------------------------------------------------------------------------
# dissipation reports


def _flat_trajectory(value=0.0, stamps=5):
    grid = Grid1D(16, layout="node")
    traj = Trajectory("parabolic", grid)
    for i in range(stamps):
        traj.append(0.1 * i, u=value * np.ones(grid.npoints))
    return traj


def test_report_zero_trajectory():
    traj = _flat_trajectory(0.0)
    rep = dissipation_report(traj, GlfSpec("parabolic", 2.0, level=0.5), 3.0)
    assert np.all(rep.vhat == 0.0)
    assert np.all(rep.residuals == 0.0)
    assert np.all(rep.envelope == 0.0)
    assert rep.residuals.size == len(traj) - 1
    assert rep.max_residual == 0.0


def test_report_constant_state_residual():
    # steady vhat > 0 gives residual exactly decay_rate * vhat
    traj = _flat_trajectory(2.0)
    spec = GlfSpec("parabolic", 2.0, level=1.0)
    rep = dissipation_report(traj, spec, 3.0)
    assert np.allclose(rep.residuals, 3.0 * rep.vhat[0], rtol=1e-12)


def test_report_slack_shift_and_validation():
    traj = _flat_trajectory(2.0)
    spec = GlfSpec("parabolic", 2.0, level=1.0)
    base = dissipation_report(traj, spec, 3.0)
    shifted = dissipation_report(traj, spec, 3.0,
                                 slack=0.25 * np.ones(len(traj)))
    assert np.allclose(shifted.residuals, base.residuals - 0.25, rtol=1e-12)
    with pytest.raises(ValueError):
        dissipation_report(traj, spec, 3.0, slack=np.ones(len(traj) + 1))


def test_series_matches_evaluate():
    traj = _flat_trajectory(2.0)
    spec = GlfSpec("parabolic", 2.0, level=1.0)
    vhat, comps = series(traj, spec)
    direct = [evaluate(traj.snapshot(i), traj.grid, spec)
              for i in range(len(traj))]
    assert np.allclose(vhat, direct, rtol=1e-15)
    assert set(comps) == {"pos", "neg"}
    assert np.allclose(comps["pos"] + comps["neg"], vhat, rtol=1e-15)


def test_series_csv_schema(tmp_path):
    traj = _flat_trajectory(2.0)
    rep = dissipation_report(traj, GlfSpec("parabolic", 2.0, level=1.0), 3.0)
    path = rep.to_csv(tmp_path / "glf.csv")
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "t,Vhat,residual,envelope"
    assert len(lines) == 1 + len(traj)
    last = lines[-1].split(",")
    assert math.isnan(float(last[2]))
    assert float(last[0]) == traj.times[-1]


# ---------------------------------------------------------------------------
# wave forcing slack


def _wave_trajectory(stamps=3):
    grid = Grid1D(64, layout="node")
    traj = Trajectory("wave", grid, names=("plus", "minus"))
    z = np.zeros(grid.npoints)
    for i in range(stamps):
        traj.append(0.5 * i, plus=z, minus=z)
    return traj


def test_wave_forcing_slack_requires_split():
    spec = GlfSpec("wave", 2.0, r=1.0, level=0.0, eps=None)
    with pytest.raises(ValueError):
        wave_forcing_slack(_wave_trajectory(), spec, ONE)


def test_wave_forcing_slack_frozen_constant():
    # 4 * (p/eps)**p * G(1) integrated without weight: 16/3
    spec = GlfSpec("wave", 2.0, r=0.0, level=0.0, eps=1.0)
    out = wave_forcing_slack(_wave_trajectory(), spec, ONE)
    assert np.allclose(out, 16.0 / 3.0, rtol=1e-12)


def test_wave_forcing_slack_tracks_stamp_times():
    sig = TimeSignal.sinusoid(1.0, 0.7, 0.0, 2.0)
    fld = SpaceTimeField.from_signal(sig)
    traj = _wave_trajectory(3)
    spec = GlfSpec("wave", 2.0, r=1.0, level=0.0, eps=1.0)
    out = wave_forcing_slack(traj, spec, fld)
    # space-uniform forcing scales the common integral by G(|s(t)|)
    s = np.array([abs(float(sig(t))) for t in traj.times])
    assert out[1] / out[0] == pytest.approx((s[1] / s[0]) ** 3.0, rel=1e-12)
    assert out[2] / out[0] == pytest.approx((s[2] / s[0]) ** 3.0, rel=1e-12)
