"""Smoke tests for the python bindings."""

import math

import pytest

import triflex as tf


def test_geometry_primitives():
    u = tf.unit(tf.Vec2(3.0, 4.0))
    assert u.x == pytest.approx(0.6)
    assert u.y == pytest.approx(0.8)
    assert tf.cross2(tf.Vec2(1, 0), tf.Vec2(0, 1)) == 1.0
    assert tf.signed_angle(tf.Vec2(1, 0), tf.Vec2(0, 1)) == pytest.approx(math.pi / 2)
    with pytest.raises(tf.DegenerateVector):
        tf.unit(tf.Vec2(0.0, 0.0))


def test_third_side_length():
    spec = tf.FormationSpec(d1=30.0, d2=10.0, theta=0.0, c=1.0)
    assert tf.d3_of(spec) == pytest.approx(40.0)
    spec.theta = math.pi / 3
    assert tf.d3_of(spec) == pytest.approx(math.sqrt(1300.0))


def test_collinear_eigenvalues():
    eig = tf.collinear_eigenvalues(30.0, 10.0, 1.0)
    assert eig[0] == pytest.approx(-3.0)
    assert eig[1] == pytest.approx(-1.0)
    assert eig[2].real == pytest.approx(-4.0 / 15.0)

    rep = tf.is_hurwitz(tf.jacobian_collinear(30.0, 10.0, 1.0))
    assert rep["hurwitz"] is True
    rep = tf.is_hurwitz(tf.jacobian_collinear(30.0, 10.0, -1.0))
    assert rep["hurwitz"] is False


def test_error_field_equilibrium():
    spec = tf.FormationSpec(d1=30.0, d2=10.0, theta=0.0, c=0.5)
    de = tf.error_field_collinear(tf.ErrorVec(0.0, 0.0, 0.0), spec)
    assert abs(de.e1) < 1e-14
    assert abs(de.e2) < 1e-14
    assert abs(de.e3) < 1e-14


def test_stationary_collinear_run():
    sc = tf.figure_scenario("collinear-stationary", seed=1)
    res = tf.simulate(sc)
    assert not res.trajectory.aborted
    rep = res.report
    assert abs(rep.final_errors.e1) < 1e-6
    assert abs(rep.final_errors.e2) < 1e-6
    assert rep.classified.name() == "stationary-collinear"
    assert rep.min_link_distance > 0.0


def test_controls_match_loop():
    spec = tf.FormationSpec(d1=30.0, d2=10.0, theta=0.0, c=1.0)
    state = tf.FormationState(tf.Vec2(0, 0), tf.Vec2(30, 0), tf.Vec2(40, 0))
    u = tf.control_for(state, spec)
    for v in (u.u1, u.u2, u.u3):
        assert v.norm() < 1e-12
