"""The closed 4RC chain: poses, closure residuals and point trajectories.

Joint parameters follow the half-angle convention of linear motion
polynomials: a revolute factor ``t - h`` evaluated at ``v`` gives the joint
pose, and ``v = inf`` is the identity. The cylindrical joint contributes
``(tau - k)(1 - eps s k)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .darboux_factor import DesignParams, Factorization
from .dq_core import (
    DEFAULT_TOL,
    EK,
    ONE,
    DualQuaternion,
    K,
    ProjectivePoint,
    act_on_point,
)
from .motion_poly import poly_eval


@dataclass(frozen=True)
class JointValues:
    v1: float
    v2: float
    v3: float
    v4: float
    tau: float = math.inf
    s: float = 0.0

    def __post_init__(self):
        for name in ("v1", "v2", "v3", "v4", "tau"):
            if math.isnan(getattr(self, name)):
                raise ValueError(f"{name} is NaN")
        if not math.isfinite(self.s):
            raise ValueError("slide s must be finite")

    @property
    def revolute(self) -> tuple[float, float, float, float]:
        return (self.v1, self.v2, self.v3, self.v4)


@dataclass(frozen=True)
class ClosureResidual:
    components: tuple[float, ...]
    mode: int
    # squared length of the (i, j) part; only meaningful for mode 2
    spread: float = 0.0

    @property
    def max(self) -> float:
        return max(abs(v) for v in self.components)

    def closed(self, tol: float = DEFAULT_TOL) -> bool:
        if self.mode == 2 and self.spread <= 1e-6:
            return False
        return self.max < tol


def cylinder_pose(tau: float, s: float) -> DualQuaternion:
    """``(tau - k)(1 - eps s k)``; ``tau = inf`` drops the rotation."""
    rot = ONE if math.isinf(tau) else tau * ONE - K
    return rot * (ONE - s * EK)


def coupler_transform(f: Factorization, jv: JointValues) -> DualQuaternion:
    """``P1(v1) P2(v2) P3(v3) P4(v4)``: the distal link relative to the base."""
    out = ONE
    for factor, v in zip(f.factors, jv.revolute):
        out = out * poly_eval(factor, v)
    return out


def chain_pose(f: Factorization, jv: JointValues) -> DualQuaternion:
    return coupler_transform(f, jv) * cylinder_pose(jv.tau, jv.s)


def closure_residual_1(C: DualQuaternion) -> ClosureResidual:
    """Coefficients of i, j, k, eps, eps i, eps j, eps k of the normalized pose."""
    m = C.max_abs()
    if m == 0:
        raise ValueError("zero pose")
    coeffs = [v / m for v in C.coeffs]
    return ClosureResidual(tuple(coeffs[1:]), mode=1)


def closure_residual_2(C: DualQuaternion, params: DesignParams) -> ClosureResidual:
    """Residual for the assembly with anti-aligned z-axes.

    The coefficients of 1, k, eps, eps i, eps j, eps k must vanish and the
    i and j coefficients must satisfy
    ``(b q1 - c q2) c_i + (b q2 + c q1) c_j = 0``. The pose must not be the
    identity, which :attr:`ClosureResidual.spread` records.
    """
    m = C.max_abs()
    if m == 0:
        raise ValueError("zero pose")
    p0, ci, cj, p3, d0, d1, d2, d3 = (v / m for v in C.coeffs)
    b, c, q1, q2 = params.b, params.c, params.q1, params.q2
    lin = ((b * q1 - c * q2) * ci + (b * q2 + c * q1) * cj) / math.hypot(b * q1 - c * q2, b * q2 + c * q1)
    return ClosureResidual((p0, lin, p3, d0, d1, d2, d3), mode=2, spread=ci * ci + cj * cj)


def cylinder_from_coupler(X: DualQuaternion) -> tuple[float, float]:
    """``(tau, s)`` closing the chain in the aligned assembly, by a linear solve.

    Writes ``X = x0 + x3 k + eps(y0 + y3 k)`` and matches it with the inverse
    of the cylinder pose, ``(tau + k) + eps s (tau k - 1)``; the other four
    coefficients of ``X`` are left to the closure residual.
    """
    x0, x3 = X.primal.w, X.primal.z
    y0, y3 = X.dual.w, X.dual.z
    r = x0 * x0 + x3 * x3
    if r == 0:
        raise ValueError("coupler pose has no rotation about the z-axis")
    tau = math.inf if x3 == 0 else x0 / x3
    s = (y3 * x0 - y0 * x3) / r
    return tau, s


@dataclass
class Trajectory:
    label: str
    assembly: int
    point: tuple[float, float, float]
    rows: list[tuple[float, float, float, float]] = field(default_factory=list)
    skipped: list[float] = field(default_factory=list)

    def xyz(self) -> np.ndarray:
        return np.array([r[1:] for r in self.rows], dtype=float).reshape(-1, 3)


def trace_point(
    f: Factorization,
    curve: Callable[[float], Optional[JointValues]],
    pt: ProjectivePoint | Sequence[float],
    t_samples: Sequence[float],
    label: str = "",
    assembly: int = 1,
) -> Trajectory:
    """Image of ``pt`` under the coupler motion at each sample of the driving parameter.

    Samples where ``curve`` returns ``None`` (poles, complex roots) or the
    coupler pose degenerates are recorded in ``skipped``. Rows come out
    sorted by the parameter.
    """
    if not isinstance(pt, ProjectivePoint):
        pt = ProjectivePoint.from_cartesian(pt)
    traj = Trajectory(label, assembly, pt.cartesian())
    for t in sorted(float(t) for t in t_samples):
        try:
            jv = curve(t)
        except (ZeroDivisionError, ValueError, OverflowError):
            jv = None
        if jv is None:
            traj.skipped.append(t)
            continue
        X = coupler_transform(f, jv)
        if X.primal.norm2() == 0 or not all(math.isfinite(v) for v in X.coeffs):
            traj.skipped.append(t)
            continue
        img = act_on_point(X, pt).cartesian()
        traj.rows.append((t, *img))
    return traj


def plane_fit_rms(points: np.ndarray) -> float:
    """RMS distance to the least-squares plane through ``points``."""
    pts = np.asarray(points, dtype=float)
    centered = pts - pts.mean(axis=0)
    sv = np.linalg.svd(centered, compute_uv=False)
    return float(sv[-1] / math.sqrt(len(pts)))


def conic_fit_residual(points: np.ndarray) -> float:
    """Algebraic RMS residual of the best conic through planar points.

    Points are projected onto their best-fit plane, centered and scaled to
    unit RMS radius; the conic has a unit-norm coefficient vector over
    ``x^2, xy, y^2, x, y, 1``.
    """
    pts = np.asarray(points, dtype=float)
    centered = pts - pts.mean(axis=0)
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    uv = centered @ vt[:2].T
    scale = math.sqrt(float(np.mean(np.sum(uv * uv, axis=1))))
    if scale == 0:
        return 0.0
    x, y = (uv / scale).T
    design = np.column_stack([x * x, x * y, y * y, x, y, np.ones_like(x)])
    sv = np.linalg.svd(design, compute_uv=False)
    return float(sv[-1] / math.sqrt(len(pts)))
