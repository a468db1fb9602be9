import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from orthoflow import circleflow as cf
from orthoflow.errors import (AtFixedPoint, BadInputFlow, BadParameters, KindMismatch,
                              NonCancellingResidues, WrongKind)

J1, J1J2 = cf.BASIC_J1, cf.BASIC_J1J2
ANGLE = 2 * math.atan(math.exp(-1))  # 0.7050..., frozen oracle for n=1, a=0, theta=0.5 from the pole


def test_frozen_flow_values():
    flow = cf.make_flow(J1, 1, 0.0)
    assert flow.flow_map(0.5, math.pi / 2) == pytest.approx(ANGLE, abs=1e-13)
    assert flow.flow_map(0.5, math.pi / 2, method="ode") == pytest.approx(ANGLE, abs=1e-10)
    assert cf.f_of(flow, ANGLE) == pytest.approx(math.tanh(0.5), abs=1e-14)
    assert ANGLE == pytest.approx(0.7050268436, abs=1e-10)


@pytest.mark.parametrize("kind,zeros,jac", [
    (J1, (0.0, math.pi), (-2.0, 2.0)),
    (J1J2, tuple(math.pi / 4 + k * math.pi / 2 for k in range(4)), (-2.0, 2.0, -2.0, 2.0)),
])
def test_fixed_points_and_jacobians(kind, zeros, jac):
    flow = cf.make_flow(kind, 1, 0.3)
    assert flow.fixed_points() == pytest.approx(zeros)
    assert flow.jacobians() == pytest.approx(jac, abs=1e-12)
    assert flow.report["ok"]
    assert max(abs(flow.field(z)) for z in zeros) < 1e-15


def test_bad_parameters():
    with pytest.raises(BadParameters):
        cf.make_flow(J1, 0, 0.0)
    with pytest.raises(BadParameters):
        cf.make_flow(J1, 1, 1.0)
    with pytest.raises(BadParameters):
        cf.make_flow("Other", 1, 0.0)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([J1, J1J2]), st.integers(1, 3), st.floats(-0.9, 0.9),
       st.floats(-4, 4), st.floats(-4, 4), st.floats(0, 2 * math.pi))
def test_flow_is_a_one_parameter_group(kind, n, a, s, t, phi):
    flow = cf.make_flow(kind, n, a)
    lhs = flow.flow_map(s + t, phi)
    rhs = flow.flow_map(s, flow.flow_map(t, phi))
    assert cf.angle_dist(lhs, rhs) < 1e-9


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3), st.floats(-0.9, 0.9), st.floats(-3, 3), st.floats(0.01, 2 * math.pi - 0.01))
def test_clock_route_agrees_with_integrator(n, a, theta, phi):
    flow = cf.make_flow(J1, n, a)
    assert cf.angle_dist(flow.flow_map(theta, phi), flow.flow_map(theta, phi, method="ode")) < 1e-8


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3), st.floats(-0.9, 0.9), st.floats(-3, 3), st.floats(0, 2 * math.pi))
def test_tanh_addition_rule(n, a, theta, phi):
    flow = cf.make_flow(J1, n, a)
    f0 = cf.f_of(flow, phi)
    t = math.tanh(theta)
    assert cf.f_of(flow, flow.flow_map(theta, phi)) == pytest.approx((f0 + t) / (1 + f0 * t), abs=1e-9)


def test_f_symmetry_between_arcs():
    # f(-phi) = f(phi): the field is odd under phi -> -phi
    flow = cf.make_flow(J1, 3, 0.0)
    for phi in np.linspace(0.1, 3.0, 13):
        assert cf.f_of(flow, -phi) == pytest.approx(cf.f_of(flow, phi), abs=1e-12)
    assert cf.f_of(flow, 0.0) == 1.0 and cf.f_of(flow, math.pi) == -1.0
    assert cf.f_of(flow, math.pi / 2) == pytest.approx(0.0, abs=1e-15)


def test_f_tilde_special_values_and_transport():
    flow = cf.make_flow(J1J2, 1, 0.3)
    assert cf.f_tilde_of(flow, math.pi / 2).distance(cf.ProjectivePoint.of(0, 1)) < 1e-15
    assert cf.f_tilde_of(flow, 0.0).distance(cf.ProjectivePoint.of(1, 0)) < 1e-15
    for z, sign in zip(flow.fixed_points(), (1, -1, 1, -1)):
        assert cf.f_tilde_of(flow, z).distance(cf.ProjectivePoint.of(sign, 1)) < 1e-15
    for phi in np.linspace(0.1, 6.0, 17):
        for th in (-1.5, 0.4, 2.0):
            got = cf.f_tilde_of(flow, flow.flow_map(th, phi))
            assert got.distance(cf.f_tilde_of(flow, phi).transport(th)) < 1e-9
    with pytest.raises(WrongKind):
        cf.f_tilde_of(cf.make_flow(J1, 1, 0.0), 1.0)
    with pytest.raises(WrongKind):
        cf.f_of(flow, 1.0)


def test_transit_time():
    flow = cf.make_flow(J1, 1, 0.0)
    # clock = -log(tan(phi/2))/2 for n = 1, a = 0
    ref = 0.5 * (math.log(math.tan(1.0)) - math.log(math.tan(0.5)))
    assert cf.transit_time(flow, 2.0, 1.0) == pytest.approx(ref, abs=1e-13)
    assert cf.transit_time(flow, 2.0, 0.0) == math.inf
    with pytest.raises(AtFixedPoint):
        cf.transit_time(flow, 0.0, 1.0)


@pytest.mark.parametrize("kind,n,a,expected", [
    (J1, 1, 0.5, math.pi * 0.5 / math.sqrt(0.75)),          # 1.8137993642
    (J1, 2, 0.3, 2 * math.pi * 0.3 / math.sqrt(0.91)),
    (J1J2, 2, 0.4, -2 * 2 * math.pi * 0.4 / math.sqrt(0.84)),
    (J1, 1, 0.0, 0.0),
])
def test_principal_value_invariant(kind, n, a, expected):
    assert cf.pv_global_invariant(cf.make_flow(kind, n, a)) == pytest.approx(expected, abs=1e-7)


def test_non_cancelling_residues():
    class Unbalanced:
        # both zeros repelling: residues 1/g' do not cancel
        def fixed_points(self):
            return (0.0, math.pi)

        def field_derivative(self, z):
            return 1.0

    odd = Unbalanced()
    with pytest.raises(NonCancellingResidues):
        cf.pv_global_invariant(odd)


def test_conjugacy():
    same = cf.conjugacy_map(cf.make_flow(J1, 1, 0.2), cf.make_flow(J1, 1, 0.2))
    assert same.success and same.defect < 1e-10
    jac = cf.conjugacy_map(cf.make_flow(J1, 1, 0.0), cf.make_flow(J1, 2, 0.0))
    assert not jac.success and jac.certificate == "Jacobian mismatch -2 vs -1"
    asym = cf.conjugacy_map(cf.make_flow(J1, 1, 0.0), cf.make_flow(J1, 1, 0.5))
    assert not asym.success and "one-sided derivatives" in asym.certificate
    with pytest.raises(KindMismatch):
        cf.conjugacy_map(cf.make_flow(J1, 1, 0.0), cf.make_flow(J1J2, 1, 0.0))


def test_lift_reproduces_the_flow():
    base = cf.make_flow(J1J2, 2, 0.4)
    lifted = cf.lift_double_cover(cf.project_to_rp1(base))
    assert lifted.fixed_points() == pytest.approx(base.fixed_points())
    for th in (-2.0, 0.3, 3.0):
        for phi in np.linspace(0, 2 * math.pi, 23, endpoint=False):
            assert cf.angle_dist(lifted.flow_map(th, phi), base.flow_map(th, phi)) < 1e-12
    assert cf.conjugacy_map(lifted, base).success
    with pytest.raises(BadInputFlow):
        cf.project_to_rp1(cf.make_flow(J1, 1, 0.0))


def test_extension_to_second_component():
    pair = cf.extend_to_F(cf.make_pair(cf.make_flow(J1, 1, 0.2)))
    for phi in (0.3, 1.2, 2.5):
        assert pair.f(phi, -1) == -pair.f(phi, 1)
        th = 0.7
        assert pair.f(pair.flow_map(th, phi, -1), -1) == pytest.approx(
            (pair.f(phi, -1) + math.tanh(th)) / (1 + pair.f(phi, -1) * math.tanh(th)), abs=1e-12)
    with pytest.raises(ValueError):
        cf.make_pair(cf.make_flow(J1, 1, 0.2)).f(1.0, -1)
    with pytest.raises(WrongKind):
        cf.extend_to_F(cf.make_pair(cf.make_flow(J1J2, 1, 0.2)))


def test_projective_point():
    p = cf.ProjectivePoint.of(-1.0, -1.0)
    assert (p.a, p.b) == pytest.approx((2 ** -0.5, 2 ** -0.5))
    t = cf.ProjectivePoint.of(0.0, 1.0).transport(0.8)
    assert t.a / t.b == pytest.approx(math.tanh(0.8))
    with pytest.raises(ValueError):
        cf.ProjectivePoint.of(0.0, 0.0)
