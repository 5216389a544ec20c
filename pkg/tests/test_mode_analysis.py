import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from darboux_linkage.darboux_factor import DesignParams, factorize
from darboux_linkage.dq_core import equiv_residual
from darboux_linkage.linkage_model import coupler_transform, trace_point
from darboux_linkage.mode_analysis import (
    assembly2_curve_branch,
    assembly2_curve_roots,
    assembly2_exists,
    assembly2_joint_values,
    assembly2_rot_branch,
    classify_discriminant,
    closure_residual,
    enumerate_modes,
    eval_F,
    eval_F_factored,
    eval_F_scale,
    mode_A,
    mode_B,
    mode_B_decomposition,
    mode_B_poles,
    mode_B_v3,
    rot_branch_discriminant,
    special_rotation_modes,
    special_rotation_polynomial,
    sweep,
)

SQ2 = math.sqrt(2)
GEN = factorize(DesignParams.create(1, 2, 1, 0, z1=0, z2=0))
DEG = factorize(DesignParams.create(SQ2, SQ2, 1, 0, z=0, z3=0))
HALF5 = math.sqrt(5) / 2
DEG12 = factorize(DesignParams.create(1, 2, HALF5, 0, z=0, z3=0))


def generic_design(b, c, q1, q2, z1, z2):
    return factorize(DesignParams.create(b, c, q1, q2, z1=z1, z2=z2))


generic_draw = st.tuples(
    st.floats(-3, 3), st.floats(-3, 3), st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2)
).filter(
    lambda p: math.hypot(p[0], p[1]) > 0.3
    and math.hypot(p[2], p[3]) > 0.1
    and abs(p[0] ** 2 + p[1] ** 2 - 4 * (p[2] ** 2 + p[3] ** 2)) > 0.05 * (p[0] ** 2 + p[1] ** 2)
)


def test_F_examples():
    assert eval_F(0, 0, GEN.params) == 16
    assert abs(eval_F(0, 16 / 13, GEN.params)) < 1e-12


def test_mode_A_values():
    jv = mode_A(GEN.params, 1.0)
    assert (jv.v1, jv.v2, jv.v3, jv.v4) == (1, 1, 1, 0)
    assert (jv.tau, jv.s) == (-1, 0.5)
    assert mode_A(GEN.params, 0.0).v4 == math.inf
    assert mode_A(GEN.params, math.inf).revolute == (math.inf,) * 4


def test_mode_B_values():
    jv = mode_B(GEN.params, 0.0)
    assert jv.v3 == pytest.approx(16 / 13, abs=1e-15)
    assert jv.v4 == pytest.approx(0.75, abs=1e-15)
    assert jv.tau == pytest.approx(-4, abs=1e-12)
    assert jv.s == 2.0
    assert closure_residual(GEN, jv, 1).max < 1e-12
    assert mode_B_poles(GEN.params) == (-0.5, 2.0)
    assert mode_B(GEN.params, 2.0).v4 == math.inf


def test_mode_B_through_pole_closes():
    for v1 in mode_B_poles(GEN.params):
        assert closure_residual(GEN, mode_B(GEN.params, v1), 1).max < 1e-12


@settings(max_examples=40, deadline=None)
@given(generic_draw, st.floats(-8, 8))
def test_mode_B_closes_and_zeroes_F(draw, v1):
    f = generic_design(*draw)
    try:
        jv = mode_B(f.params, v1)
    except ZeroDivisionError:
        assume(False)
    assert closure_residual(f, jv, 1).max < 1e-9
    if math.isfinite(jv.v3):
        assert abs(eval_F(v1, jv.v3, f.params)) < 1e-9 * eval_F_scale(v1, jv.v3, f.params)


def test_degenerate_F_factorization_grid():
    b, c = DEG.params.b, DEG.params.c
    for v1 in np.linspace(-3, 3, 13):
        for v3 in np.linspace(-3, 3, 13):
            full = eval_F(v1, v3, DEG.params)
            assert full == pytest.approx(2 * (b * b + c * c) * eval_F_factored(v1, v3, DEG.params), abs=1e-9)


def test_special_rotation_modes_close_and_trace_circles():
    modes = {m.branch: m for m in enumerate_modes(DEG, 1)}
    assert sorted(modes) == ["A", "B", "C+", "C-"]
    for label, v1 in (("C+", 1 + SQ2), ("C-", 1 - SQ2)):
        m = modes[label]
        assert m(0.3).v1 == pytest.approx(v1) and m(0.3).v4 == pytest.approx(1.0)
        assert sweep(DEG, m).max_residual < 1e-9
        traj = trace_point(DEG, m, (1, 0.5, 0.2), np.linspace(-5, 5, 50))
        pts = traj.xyz()
        radius = np.hypot(pts[:, 0], pts[:, 1])
        assert np.ptp(radius) < 1e-9 and np.ptp(pts[:, 2]) < 1e-9
        assert np.ptp(pts[:, 0]) > 0.1


def test_special_rotation_polynomial_matches_coupler():
    modes = {m.branch: m for m in enumerate_modes(DEG, 1)}
    for sign, label in ((1.0, "C+"), (-1.0, "C-")):
        poly = special_rotation_polynomial(DEG.params, sign)
        for v3 in (-2.0, 0.1, 1.7):
            assert equiv_residual(poly(v3), coupler_transform(DEG, modes[label](v3))) < 1e-9


def test_no_special_modes_for_generic_design():
    assert special_rotation_modes(GEN.params) == []
    assert [m.branch for m in enumerate_modes(GEN, 1)] == ["A", "B"]


def test_mode_B_decomposition_generic():
    darboux, rotation = mode_B_decomposition(GEN.params)
    product = darboux * rotation
    for v1 in (-1.5, 0.0, 0.7, 3.0):
        inverse_coupler = coupler_transform(GEN, mode_B(GEN.params, v1)).conj()
        assert equiv_residual(product(v1), inverse_coupler) < 1e-9


def test_mode_B_rotation_is_real_on_degenerate_design():
    _, rotation = mode_B_decomposition(DEG.params)
    assert max(abs(c.primal.z) for c in rotation.coeffs) < 1e-9


def test_mode_B_on_degenerate_design_closes():
    assert sweep(DEG, enumerate_modes(DEG, 1)[1]).max_residual < 1e-9


def test_assembly2_existence():
    assert assembly2_exists(DEG.params)
    assert not assembly2_exists(GEN.params)
    assert enumerate_modes(GEN, 2) == []
    with pytest.raises(ValueError):
        enumerate_modes(GEN, 3)


def test_rot_branch_examples():
    assert rot_branch_discriminant(DEG.params, 0.0) == pytest.approx(-4)
    branches = assembly2_rot_branch(DEG.params)
    assert [b.realness for b in branches] == ["complex", "complex"]
    assert all(b(1.0) is None for b in branches)
    branches = assembly2_rot_branch(DEG12.params)
    v1s = sorted(b(0.5).v1 for b in branches)
    assert v1s == pytest.approx([-3.0, -1.0])
    for b in branches:
        for v3 in (-2.0, 0.0, 0.4, 5.0):
            res = closure_residual(DEG12, b(v3), 2)
            assert res.closed(1e-9)


def test_curve_branch_example():
    sols = assembly2_curve_branch(DEG.params, 0.0, -3.0)
    assert [s.v1 for s in sols] == pytest.approx([(10 + 2 * math.sqrt(41)) / 4, (10 - 2 * math.sqrt(41)) / 4])
    for jv in sols:
        assert jv.v4 == pytest.approx(-4 / 3)
        assert jv.v2 == pytest.approx(-1 / jv.v1)
        assert closure_residual(DEG, jv, 2).closed(1e-9)
    assert [s.v1 for s in assembly2_curve_branch(DEG12.params, 0.0, -3.0)] == pytest.approx([2 + math.sqrt(5), 2 - math.sqrt(5)])
    with pytest.raises(ValueError):
        assembly2_curve_branch(DEG12.params, 0.0, 0.0)


def test_curve_roots_discriminant_sign():
    roots, d = assembly2_curve_roots(DEG12.params, 0.0, -3.0)
    assert d > 0 and len(roots) == 2
    real = sum(bool(assembly2_curve_roots(DEG.params, 0.0, v)[0]) for v in np.linspace(-10, 10, 101))
    assert 0 < real < 101


def test_assembly2_with_offsets_closes():
    rng = np.random.default_rng(3)
    for _ in range(20):
        b, c = rng.uniform(-3, 3, size=2)
        phi = rng.uniform(0, 2 * math.pi)
        r = math.hypot(b, c) / 2
        f = factorize(DesignParams.create(b, c, r * math.cos(phi), r * math.sin(phi),
                                          z=rng.uniform(-1, 1), z3=rng.uniform(-1, 1)))
        for m in enumerate_modes(f, 2):
            rep = sweep(f, m, samples=40)
            if rep.evaluated:
                assert rep.max_residual < 1e-9, m.branch
        for m in enumerate_modes(f, 1):
            assert sweep(f, m, samples=40).max_residual < 1e-9, m.branch


def test_tau_limits_at_joint4_pole():
    # v4 = inf on mode B at v1 = -b/c; tau must follow v3 there
    jv = mode_B(GEN.params, -0.5)
    assert jv.v4 == math.inf and jv.tau == jv.v3
    near = mode_B(GEN.params, -0.5 + 1e-7)
    assert near.tau == pytest.approx(jv.tau, rel=1e-5)


def test_assembly2_joint_values_pole():
    jv = assembly2_joint_values(DEG12.params, 0.0, 1.0, 2.0)
    assert jv.v2 == math.inf


def test_classify_discriminant():
    assert classify_discriminant(1.0) == "real"
    assert classify_discriminant(-1.0) == "complex"
    assert classify_discriminant(1e-14) == "boundary"


def test_mode_B_v3_limits():
    assert mode_B_v3(GEN.params, 0.0) == pytest.approx(16 / 13)
