"""Tests for grids, norms, and trajectory recording."""

import math

import numpy as np
import pytest
import yaml

from isscert.fields import Field, Grid1D, Grid2D, Trajectory, lq_norm


def test_grid1d_node_layout():
    g = Grid1D(10, layout="node")
    assert g.h == pytest.approx(0.1, rel=1e-15)
    assert g.npoints == 11
    pts = g.points()
    assert pts[0] == 0.0 and pts[-1] == 1.0
    assert np.allclose(np.diff(pts), g.h)


def test_grid1d_cell_layout():
    g = Grid1D(8, layout="cell")
    assert g.npoints == 8
    pts = g.points()
    assert pts[0] == pytest.approx(g.h / 2.0)
    assert pts[-1] == pytest.approx(1.0 - g.h / 2.0)


def test_grid1d_refine_doubles():
    g = Grid1D(16, layout="cell")
    r = g.refine()
    assert r.n == 32 and r.layout == "cell"
    assert r.h == pytest.approx(g.h / 2.0)


def test_grid1d_validation():
    with pytest.raises(ValueError):
        Grid1D(4)
    with pytest.raises(ValueError):
        Grid1D(16, layout="staggered")


def test_grid2d_edges_partition():
    g = Grid2D(8, 8, gamma1=frozenset({"left", "right"}),
               gamma2=frozenset({"bottom", "top"}))
    assert g.hx == pytest.approx(0.125)
    X, Y = g.points()
    assert X.shape == (9, 9)
    with pytest.raises(ValueError):
        Grid2D(8, 8, gamma1=frozenset({"left"}), gamma2=frozenset({"left",
                                                                   "right",
                                                                   "bottom",
                                                                   "top"}))
    with pytest.raises(ValueError):
        Grid2D(8, 8, gamma1=frozenset({"left"}), gamma2=frozenset({"right"}))


def test_field_shape_check():
    g = Grid1D(8, layout="node")
    Field(g, np.zeros(9))
    with pytest.raises(ValueError):
        Field(g, np.zeros(8))


# ---------------------------------------------------------------------------
# norms


def test_lq_norm_constant():
    g = Grid1D(16, layout="node")
    ones = np.ones(g.npoints)
    assert lq_norm(ones, 2.0, g) == pytest.approx(1.0, rel=1e-14)
    assert lq_norm(3.0 * ones, 4.0, g) == pytest.approx(3.0, rel=1e-14)


def test_lq_norm_inf_is_max():
    g = Grid1D(8, layout="node")
    vals = np.array([0.0, 1.0, -5.0, 2.0, 0.0, 0.0, 0.0, 0.0, 0.0])
    assert lq_norm(vals, math.inf, g) == 5.0


def test_lq_norm_sine():
    # L2 of sin(pi y) on [0,1] is 1/sqrt(2); trapezoid is second order
    g = Grid1D(200, layout="node")
    vals = np.sin(np.pi * g.points())
    assert lq_norm(vals, 2.0, g) == pytest.approx(1.0 / math.sqrt(2.0),
                                                  abs=1e-4)


def test_lq_norm_cell_quadrature():
    g = Grid1D(64, layout="cell")
    vals = np.ones(g.npoints)
    # midpoint rule is exact on constants
    assert lq_norm(vals, 2.0, g) == pytest.approx(1.0, rel=1e-14)


def test_lq_norm_validation():
    g = Grid1D(8, layout="node")
    with pytest.raises(ValueError):
        lq_norm(np.ones(9), 1.5, g)
    with pytest.raises(ValueError):
        lq_norm(np.ones(9), 2.0, None)
    with pytest.raises(ValueError):
        lq_norm(np.ones(7), 2.0, g)


def test_lq_norm_field_object():
    g = Grid1D(8, layout="node")
    fld = Field(g, 2.0 * np.ones(9))
    assert lq_norm(fld, 2.0) == pytest.approx(2.0, rel=1e-14)


def test_lq_norm_2d():
    g = Grid2D(8, 8, gamma1=frozenset({"left", "right", "bottom", "top"}),
               gamma2=frozenset())
    vals = np.full((9, 9), 1.5)
    assert lq_norm(vals, 2.0, g) == pytest.approx(1.5, rel=1e-14)


# ---------------------------------------------------------------------------
# trajectories


def test_trajectory_append_and_state():
    g = Grid1D(8, layout="node")
    traj = Trajectory("parabolic", g)
    traj.append(0.0, u=np.zeros(9))
    traj.append(0.1, u=np.ones(9))
    assert len(traj) == 2
    assert traj.times[-1] == 0.1
    np.testing.assert_array_equal(traj.state(1), np.ones(9))
    np.testing.assert_array_equal(traj.state(-1, "u"), np.ones(9))


def test_trajectory_wave_names():
    g = Grid1D(8, layout="node")
    traj = Trajectory("wave", g, names=("plus", "minus"))
    traj.append(0.0, plus=np.ones(9), minus=np.zeros(9))
    np.testing.assert_array_equal(traj.state(0, "minus"), np.zeros(9))


def test_trajectory_rejects_unknown_class():
    with pytest.raises(ValueError):
        Trajectory("elliptic", Grid1D(8))


def test_trajectory_write_csv(tmp_path):
    g = Grid1D(8, layout="node")
    traj = Trajectory("parabolic", g, meta={"scheme": "test",
                                            "dt": np.float64(0.25)})
    traj.append(0.0, u=np.linspace(0.0, 1.0, 9))
    traj.append(0.5, u=np.linspace(1.0, 2.0, 9))
    paths = traj.write_csv(tmp_path)
    csvs = [p for p in paths if p.suffix == ".csv"]
    assert csvs
    lines = csvs[0].read_text().splitlines()
    assert lines[0] == "t,y,value"
    assert len(lines) == 1 + 2 * 9
    # values round-trip exactly through repr
    first = lines[1].split(",")
    assert float(first[0]) == 0.0 and float(first[2]) == 0.0
    # numpy scalar meta must not break the yaml dump
    meta_path = [p for p in paths if p.suffix == ".yaml"][0]
    meta = yaml.safe_load(meta_path.read_text())
    assert meta["dt"] == 0.25
