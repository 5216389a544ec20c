"""Acceptance suite: one group of tests per numbered criterion.

Run ``pytest tests/test_acceptance.py`` for the per-criterion PASS/FAIL
summary printed at the end of the session.
"""

import json
import math

import numpy as np
import pytest

from darboux_linkage.cli import main
from darboux_linkage.darboux_factor import DesignParams, factorize, is_degenerate
from darboux_linkage.dq_core import dq_equiv, equiv_residual
from darboux_linkage.files import (
    dumps_linkage,
    linkage_to_dict,
    load_linkage,
    params_hash,
    read_trajectory,
    trajectory_to_csv,
    trajectory_to_json,
)
from darboux_linkage.linkage_model import coupler_transform, plane_fit_rms, conic_fit_residual, trace_point
from darboux_linkage.mode_analysis import (
    assembly2_curve_branch,
    assembly2_exists,
    assembly2_rot_branch,
    closure_residual,
    enumerate_modes,
    eval_F,
    eval_F_factored,
    mode_A,
    mode_B,
    mode_B_decomposition,
    rot_branch_discriminant,
    sweep,
)

SQ2 = math.sqrt(2)
TOL = 1e-9


def reference_generic():
    return factorize(DesignParams.create(1, 2, 1, 0, z1=0, z2=0))


def reference_degenerate():
    return factorize(DesignParams.create(SQ2, SQ2, 1, 0, z=0, z3=0))


def random_valid_params(rng, degenerate):
    while True:
        b, c = rng.uniform(-3, 3, size=2)
        if math.hypot(b, c) < 0.2:
            continue
        if degenerate:
            phi = rng.uniform(0, 2 * math.pi)
            r = math.hypot(b, c) / 2
            return DesignParams.create(b, c, r * math.cos(phi), r * math.sin(phi),
                                       z=rng.uniform(-2, 2), z3=rng.uniform(-2, 2))
        q1, q2 = rng.uniform(-2, 2, size=2)
        if math.hypot(q1, q2) < 0.1 or is_degenerate(b, c, q1, q2):
            continue
        # keep the generic denominator b^2 + c^2 - 4|q|^2 away from zero
        if abs(b * b + c * c - 4 * (q1 * q1 + q2 * q2)) < 0.05 * (b * b + c * c):
            continue
        return DesignParams.create(b, c, q1, q2, z1=rng.uniform(-2, 2), z2=rng.uniform(-2, 2))


# -- 1 ---------------------------------------------------------------------------


@pytest.mark.criterion(1, "factorization identity on the reference design and 200 random draws")
def test_criterion_1_factorization_identity():
    assert reference_generic().residual < TOL
    rng = np.random.default_rng(20240601)
    worst = 0.0
    for i in range(200):
        f = factorize(random_valid_params(rng, degenerate=(i % 5 == 0)))
        worst = max(worst, f.residual)
    assert worst < TOL


# -- 2 ---------------------------------------------------------------------------


@pytest.mark.criterion(2, "derived constants reproduced and cross-validated")
def test_criterion_2_offsets_and_direction():
    f = reference_generic()
    assert abs(f.y1 - 0.25) < TOL and abs(f.y2 - 1.0) < TOL
    n = f.P2[0].primal.vector
    assert np.allclose(n, (4 / 9, 8 / 9, -1 / 9), atol=TOL, rtol=0)
    assert f.residual < TOL


@pytest.mark.criterion(2, "derived constants reproduced and cross-validated")
def test_criterion_2_mode_A_constants():
    f = reference_generic()
    jv = mode_A(f.params, 1.0)
    assert abs(jv.tau + 1) < TOL and abs(jv.s - 0.5) < TOL
    assert closure_residual(f, jv, 1).max < TOL


@pytest.mark.criterion(2, "derived constants reproduced and cross-validated")
def test_criterion_2_mode_B_constants():
    f = reference_generic()
    jv = mode_B(f.params, 0.0)
    assert abs(jv.v3 - 16 / 13) < TOL and abs(jv.v4 - 0.75) < TOL
    assert abs(jv.tau + 4) < TOL and abs(jv.s - 2) < TOL
    assert closure_residual(f, jv, 1).max < TOL
    assert abs(eval_F(0.0, jv.v3, f.params)) < TOL


# -- 3 ---------------------------------------------------------------------------


@pytest.mark.criterion(3, "mode A reproduces the prescribed motion")
def test_criterion_3_mode_A_is_prescribed_motion():
    f = reference_generic()
    samples = [float(v) for v in np.linspace(-10, 10, 100)]
    for v1 in samples:
        X = coupler_transform(f, mode_A(f.params, v1))
        assert dq_equiv(X, f.M(v1), tol=TOL), v1


# -- 4 ---------------------------------------------------------------------------


@pytest.mark.criterion(4, "mode-A trajectories are planar ellipses, mode B is not planar")
def test_criterion_4_ellipse():
    f = reference_generic()
    t = np.linspace(-10, 10, 400)
    a = trace_point(f, lambda v: mode_A(f.params, v), (1, 0, 0), t).xyz()
    assert len(a) == 400
    assert plane_fit_rms(a) < 1e-9
    assert conic_fit_residual(a) < 1e-8
    b = trace_point(f, lambda v: mode_B(f.params, v), (1, 0, 0), t).xyz()
    assert plane_fit_rms(b) > 1e-3


# -- 5 ---------------------------------------------------------------------------


@pytest.mark.criterion(5, "degenerate design: factored F, rotation modes, real mode-B rotation")
def test_criterion_5_F_factors():
    p = reference_degenerate().params
    scale = 2 * (p.b**2 + p.c**2)
    for v1 in np.linspace(-4, 4, 17):
        for v3 in np.linspace(-4, 4, 17):
            assert abs(eval_F(v1, v3, p) - scale * eval_F_factored(v1, v3, p)) < TOL


@pytest.mark.criterion(5, "degenerate design: factored F, rotation modes, real mode-B rotation")
def test_criterion_5_rotation_modes():
    f = reference_degenerate()
    modes = {m.branch: m for m in enumerate_modes(f, 1)}
    for label, v1 in (("C+", 1 + SQ2), ("C-", 1 - SQ2)):
        m = modes[label]
        jv = m(0.5)
        assert abs(jv.v1 - v1) < TOL and abs(jv.v4 - 1) < TOL
        assert sweep(f, m, samples=100).max_residual < TOL
        pts = trace_point(f, m, (1, 0, 0), np.linspace(-10, 10, 100)).xyz()
        assert np.ptp(np.hypot(pts[:, 0], pts[:, 1])) < TOL
        assert np.ptp(pts[:, 2]) < TOL


@pytest.mark.criterion(5, "degenerate design: factored F, rotation modes, real mode-B rotation")
def test_criterion_5_mode_B_rotation_real():
    _, rotation = mode_B_decomposition(reference_degenerate().params)
    assert max(abs(c.primal.z) for c in rotation.coeffs) < TOL


# -- 6 ---------------------------------------------------------------------------


@pytest.mark.criterion(6, "second assembly: existence and closed-form branches")
def test_criterion_6_existence_sweep():
    rng = np.random.default_rng(7)
    hits = 0
    for i in range(1000):
        b, c = rng.uniform(-3, 3, size=2)
        phi = rng.uniform(0, 2 * math.pi)
        # a third of the draws on the boundary, a third just off it, the rest anywhere
        r = math.hypot(b, c) / 2
        if i % 3 == 0:
            q = r
        elif i % 3 == 1:
            q = r * (1 + rng.choice([-1, 1]) * 10.0 ** rng.uniform(-6, -2))
        else:
            q = rng.uniform(0.05, 3)
        q1, q2 = q * math.cos(phi), q * math.sin(phi)
        cond = b * b + c * c - 4 * (q1 * q1 + q2 * q2)
        p = DesignParams(b, c, q1, q2)
        expected = abs(cond) < TOL * (b * b + c * c)
        assert assembly2_exists(p) == expected
        hits += expected
    assert 300 <= hits <= 400


@pytest.mark.criterion(6, "second assembly: existence and closed-form branches")
def test_criterion_6_rotation_branch():
    f = reference_degenerate()
    assert abs(rot_branch_discriminant(f.params, 0.0) + 4) < TOL
    assert all(not m.real for m in assembly2_rot_branch(f.params))
    g = factorize(DesignParams.create(1, 2, math.sqrt(5) / 2, 0, z=0, z3=0))
    branches = assembly2_rot_branch(g.params)
    v1s = sorted(m(1.0).v1 for m in branches)
    assert np.allclose(v1s, [-3, -1], atol=TOL, rtol=0)
    for m in branches:
        assert abs(m(1.0).v4 - 2) < TOL
        assert sweep(g, m, samples=100).max_residual < TOL


@pytest.mark.criterion(6, "second assembly: existence and closed-form branches")
def test_criterion_6_curve_branch():
    f = reference_degenerate()
    sols = assembly2_curve_branch(f.params, 0.0, -3.0)
    want = sorted([(10 - 2 * math.sqrt(41)) / 4, (10 + 2 * math.sqrt(41)) / 4], reverse=True)
    assert np.allclose([s.v1 for s in sols], want, atol=TOL, rtol=0)
    for jv in sols:
        assert closure_residual(f, jv, 2).closed(TOL)


# -- 7 ---------------------------------------------------------------------------


@pytest.mark.criterion(7, "mode-B motion splits into a Darboux factor and a z-rotation")
def test_criterion_7_mode_B_decomposition():
    rng = np.random.default_rng(11)
    for _ in range(20):
        f = factorize(random_valid_params(rng, degenerate=False))
        darboux, rotation = mode_B_decomposition(f.params)
        product = darboux * rotation
        for v1 in rng.uniform(-5, 5, size=20):
            # the product parametrizes the inverse pose (base seen from the coupler)
            relative = coupler_transform(f, mode_B(f.params, float(v1))).conj()
            assert equiv_residual(product(float(v1)), relative) < TOL


# -- 8 ---------------------------------------------------------------------------


@pytest.fixture
def linkage_files(tmp_path):
    paths = []
    for name, args in (
        ("generic", ["--b", "1", "--c", "2", "--q1", "1", "--q2", "0", "--z1", "0", "--z2", "0"]),
        ("degenerate", ["--b", repr(SQ2), "--c", repr(SQ2), "--q1", "1", "--q2", "0", "--z", "0", "--z3", "0"]),
    ):
        path = tmp_path / f"{name}.json"
        assert main(["synth", *args, "-o", str(path)]) == 0
        paths.append(path)
    return paths


@pytest.mark.criterion(8, "command line: synth, verify, fault injection and lossless files")
def test_criterion_8_synth_verify(linkage_files):
    for path in linkage_files:
        assert main(["verify", str(path)]) == 0


@pytest.mark.criterion(8, "command line: synth, verify, fault injection and lossless files")
def test_criterion_8_fault_injection(linkage_files, tmp_path):
    data = json.loads(linkage_files[0].read_text())
    data["factors"]["P1"][0][6] += 1e-3
    bad = tmp_path / "bad.json"
    bad.write_text(dumps_linkage(data))
    assert main(["verify", str(bad)]) == 2


@pytest.mark.criterion(8, "command line: synth, verify, fault injection and lossless files")
def test_criterion_8_round_trips(linkage_files, tmp_path):
    for path in linkage_files:
        f, data = load_linkage(str(path))
        assert dumps_linkage(linkage_to_dict(f)) == path.read_text()
        for fmt in ("csv", "json"):
            out = tmp_path / f"{path.stem}.{fmt}"
            assert main(["trace", str(path), "--branch", "B", "--samples", "80", "-o", str(out)]) == 0
            traj = read_trajectory(str(out))
            text = trajectory_to_csv(traj, params_hash(data)) if fmt == "csv" else trajectory_to_json(traj, params_hash(data))
            assert text == out.read_text()
