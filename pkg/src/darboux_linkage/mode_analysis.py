"""Operation and assembly modes of the 4RC Darboux linkage.

Assembly 1 closes the chain with the z-axes of base and coupler aligned,
assembly 2 with them anti-aligned (only possible when
``b^2 + c^2 = 4(q1^2 + q2^2)``). Every branch is a closed-form curve in one
driving joint parameter.

Branch labels:

* ``A``: the prescribed vertical Darboux motion (assembly 1, driver v1).
* ``B``: the second generic mode, trajectories of degree six (assembly 1, v1).
* ``C+``/``C-``: z-axis rotations, degenerate parameters only (assembly 1, v3).
* ``II-rot+``/``II-rot-``: v4 = c/b in assembly 2 (driver v3).
* ``II-curve+``/``II-curve-``: the two roots of the quadratic in v1 (assembly 2, v3).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .darboux_factor import DesignParams, Factorization, degeneracy, is_degenerate
from .dq_core import DEFAULT_TOL, EK, EPS, K, ONE
from .linkage_model import (
    ClosureResidual,
    JointValues,
    chain_pose,
    closure_residual_1,
    closure_residual_2,
    coupler_transform,
    cylinder_from_coupler,
)
from .motion_poly import MotionPolynomial

BOUNDARY_BAND = 1e-12

INF = math.inf


def _ratio(num: float, den: float) -> float:
    """``num / den`` on the extended real line; ``0/0`` raises."""
    if den == 0:
        if num == 0:
            raise ZeroDivisionError("indeterminate 0/0 in mode formula")
        return INF
    return num / den


def _half_angle_double(v: float) -> float:
    """``(v^2 - 1) / (2 v)``: parameter of the doubled joint."""
    if math.isinf(v):
        return INF
    return _ratio(v * v - 1.0, 2.0 * v)


def _tau_aligned(v3: float, v4: float) -> float:
    """``-(v3 v4 + 1) / (v3 - v4)`` with its limits at infinity."""
    if math.isinf(v3) and math.isinf(v4):
        raise ZeroDivisionError("tau undefined with v3 = v4 = inf")
    if math.isinf(v4):
        return v3
    if math.isinf(v3):
        return -v4
    return _ratio(-(v3 * v4 + 1.0), v3 - v4)


def _tau_opposed(v3: float, v4: float) -> float:
    """``(v3 - v4) / (v3 v4 + 1)`` with its limits at infinity."""
    if math.isinf(v3) and math.isinf(v4):
        raise ZeroDivisionError("tau undefined with v3 = v4 = inf")
    if math.isinf(v4):
        return _ratio(-1.0, v3)
    if math.isinf(v3):
        return _ratio(1.0, v4)
    return _ratio(v3 - v4, v3 * v4 + 1.0)


def slide_aligned(params: DesignParams, v1: float) -> float:
    return -(params.b * v1 - params.c) / (v1 * v1 + 1.0)


def slide_opposed(params: DesignParams, v1: float) -> float:
    """Slide of the C-joint in assembly 2.

    ``z`` enters with a negative sign under the convention
    ``(z1, z2) = z (b q2 + c q1, -b q1 + c q2)``.
    """
    b, c = params.b, params.c
    z = params.z or 0.0
    return (-z * (b * b + c * c) * (v1 * v1 + 1.0) + 2.0 * b * v1 - 2.0 * c) / (2.0 * (v1 * v1 + 1.0))


def classify_discriminant(d: float) -> str:
    if d > BOUNDARY_BAND:
        return "real"
    if d < -BOUNDARY_BAND:
        return "complex"
    return "boundary"


@dataclass
class ModeSolution:
    """One operation mode as a curve in its driving parameter.

    ``curve`` returns ``None`` where the branch has no real point for that
    parameter value.
    """

    assembly: int
    branch: str
    driver: str
    curve: Callable[[float], Optional[JointValues]]
    real: bool = True
    poles: tuple[float, ...] = ()
    discriminant: Optional[float] = None
    realness: str = "real"
    notes: list[str] = field(default_factory=list)

    def __call__(self, t: float) -> Optional[JointValues]:
        return self.curve(t)


# -- assembly 1 ----------------------------------------------------------------


def eval_F(v1: float, v3: float, params: DesignParams) -> float:
    """The non-trivial resultant factor in ``(v1, v3)``, fully expanded."""
    b, c, q1, q2 = params.b, params.c, params.q1, params.q2
    return (
        8*b*c*q1**2*v1**3*v3 + 8*b*c*q2**2*v1**3*v3 + b**4*v1**3 - b**4*v1**2*v3
        + 2*b**2*c**2*v1**3 - 2*b**2*c**2*v1**2*v3 + 4*b**2*q1**2*v1**3
        + 12*b**2*q1**2*v1**2*v3 + 4*b**2*q2**2*v1**3 + 12*b**2*q2**2*v1**2*v3
        + c**4*v1**3 - c**4*v1**2*v3 - 4*c**2*q1**2*v1**3
        - 12*c**2*q1**2*v1**2*v3 - 4*c**2*q2**2*v1**3 - 12*c**2*q2**2*v1**2*v3
        - 24*b*c*q1**2*v1**2 - 24*b*c*q1**2*v1*v3
        - 24*b*c*q2**2*v1**2 - 24*b*c*q2**2*v1*v3 + v1*b**4 - b**4*v3
        + 2*v1*c**2*b**2 - 2*b**2*c**2*v3 - 12*b**2*q1**2*v1
        - 4*b**2*q1**2*v3 - 12*b**2*q2**2*v1 - 4*b**2*q2**2*v3 + v1*c**4 - c**4*v3
        + 12*c**2*q1**2*v1 + 4*c**2*q1**2*v3
        + 12*c**2*q2**2*v1 + 4*c**2*q2**2*v3 + 8*b*c*q1**2 + 8*b*c*q2**2
    )


def eval_F_scale(v1: float, v3: float, params: DesignParams) -> float:
    """Magnitude of the largest monomial in :func:`eval_F`, for relative tests."""
    b, c = abs(params.b), abs(params.c)
    q = params.q1**2 + params.q2**2
    m = max(1.0, abs(v1)) ** 3 * max(1.0, abs(v3))
    return 24.0 * max(b, c, 1.0) ** 4 * max(q, 1.0) * m


def eval_F_factored(v1: float, v3: float, params: DesignParams) -> float:
    """``(b v1^2 - 2 c v1 - b)(c v1 v3 + b v1 + b v3 - c)``, valid on degenerate parameters.

    On those parameters :func:`eval_F` equals ``2 (b^2 + c^2)`` times this.
    """
    b, c = params.b, params.c
    return (b * v1 * v1 - 2 * c * v1 - b) * (c * v1 * v3 + b * v1 + b * v3 - c)


def mode_A(params: DesignParams, v1: float) -> JointValues:
    """The prescribed motion: ``v2 = v3 = v1`` and joint 4 at the double angle."""
    if math.isinf(v1):
        return JointValues(INF, INF, INF, INF, INF, 0.0)
    return JointValues(v1, v1, v1, _half_angle_double(v1), -v1, slide_aligned(params, v1))


def mode_B_v3(params: DesignParams, v1: float) -> float:
    b, c = params.b, params.c
    s2 = (b * b + c * c) ** 2
    qq = 4 * params.q1**2 + 4 * params.q2**2
    num = v1 * (v1 * v1 + 1) * s2 + ((b * b - c * c) * (v1**3 - 3 * v1) - 6 * b * c * v1 * v1 + 2 * b * c) * qq
    den = (v1 * v1 + 1) * s2 - ((b * b - c * c) * (3 * v1 * v1 - 1) + 2 * b * c * v1**3 - 6 * b * c * v1) * qq
    return _ratio(num, den)


def mode_B_v4(params: DesignParams, v1: float) -> float:
    b, c = params.b, params.c
    num = -(b * v1 + c * v1 + b - c) * (b * v1 - c * v1 - b - c)
    den = 2 * (c * v1 + b) * (b * v1 - c)
    return _ratio(num, den)


def mode_B(params: DesignParams, v1: float) -> JointValues:
    v3 = mode_B_v3(params, v1)
    v4 = mode_B_v4(params, v1)
    return JointValues(v1, v1, v3, v4, _tau_aligned(v3, v4), slide_aligned(params, v1))


def mode_B_poles(params: DesignParams) -> tuple[float, ...]:
    """Parameters where ``v4`` passes through infinity."""
    b, c = params.b, params.c
    poles = []
    if c != 0:
        poles.append(-b / c)
    if b != 0:
        poles.append(c / b)
    return tuple(sorted(poles))


def mode_B_decomposition(params: DesignParams) -> tuple[MotionPolynomial, MotionPolynomial]:
    """Vertical Darboux factor and quadratic z-rotation factor of mode B.

    With ``t = v1`` the product parametrizes the pose of the C-joint, that is
    the conjugate (inverse) of :func:`coupler_transform` along mode B. Both
    factors live in the commutative span of ``1, k, eps, eps k``.
    """
    b, c = params.b, params.c
    plus = b * b + c * c + 4 * params.q1**2 + 4 * params.q2**2
    minus = degeneracy(b, c, params.q1, params.q2)
    # (t^2+1)(bt - c - (ct+b)k) + eps(bt - c)(ct + b + (bt - c)k)
    darboux = MotionPolynomial((
        -c * ONE - b * K + EPS * (-b * c) + EK * (c * c),
        b * ONE - c * K + EPS * (b * b - c * c) + EK * (-2 * b * c),
        -c * ONE - b * K + EPS * (b * c) + EK * (b * b),
        b * ONE - c * K,
    ))
    # -(b t^2 - 2 c t - b) plus + (c t^2 + 2 b t - c) minus k
    rotation = MotionPolynomial((
        b * plus * ONE - c * minus * K,
        2 * c * plus * ONE + 2 * b * minus * K,
        -b * plus * ONE + c * minus * K,
    ))
    return darboux, rotation


def special_rotation_modes(params: DesignParams, tol: Optional[float] = None) -> list[ModeSolution]:
    """The two z-rotation modes ``v1 = (c +- sqrt(b^2 + c^2)) / b``, ``v4 = c / b``.

    They exist only on degenerate parameters. ``tau`` and ``s`` are solved
    per sample from the coupler pose (:func:`cylinder_from_coupler`), since
    no closed form is needed for them.
    """
    tol = params.tol if tol is None else tol
    b, c = params.b, params.c
    if not is_degenerate(b, c, params.q1, params.q2, tol) or b == 0:
        return []
    root = math.sqrt(b * b + c * c)
    out = []
    for sign, label in ((1.0, "C+"), (-1.0, "C-")):
        v1 = (c + sign * root) / b
        out.append(ModeSolution(1, label, "v3", _SpecialRotation(params, v1, c / b)))
    return out


@dataclass(frozen=True)
class _SpecialRotation:
    params: DesignParams
    v1: float
    v4: float
    factorization: Optional[Factorization] = None

    def bind(self, f: Factorization) -> _SpecialRotation:
        return _SpecialRotation(self.params, self.v1, self.v4, f)

    def __call__(self, v3: float) -> JointValues:
        if self.factorization is None:
            raise ValueError("special rotation modes need a factorization; use enumerate_modes")
        partial = JointValues(self.v1, self.v1, v3, self.v4)
        tau, s = cylinder_from_coupler(coupler_transform(self.factorization, partial))
        return JointValues(self.v1, self.v1, v3, self.v4, tau, s)


def special_rotation_polynomial(params: DesignParams, sign: float) -> MotionPolynomial:
    """Coupler motion of branch ``C+`` (sign +1) or ``C-`` (sign -1) in ``t = v3``."""
    b, c = params.b, params.c
    r = math.sqrt(b * b + c * c)
    a = 2 * (c * r + sign * (b * b + c * c))
    e = -b * b * r
    # a (ct + b - (bt - c)k) + eps e (bt - c + (ct + b)k)
    return MotionPolynomial((
        a * b * ONE + a * c * K + e * (-c) * EPS + e * b * EK,
        a * c * ONE - a * b * K + e * b * EPS + e * c * EK,
    ))


# -- assembly 2 ----------------------------------------------------------------


def assembly2_exists(params: DesignParams, tol: Optional[float] = None) -> bool:
    tol = params.tol if tol is None else tol
    return is_degenerate(params.b, params.c, params.q1, params.q2, tol)


def rot_branch_discriminant(params: DesignParams, z3: float) -> float:
    b, c = params.b, params.c
    return -3 * b * b + 8 * b * z3 + c * c - 4 * z3 * z3


def assembly2_rot_branch(params: DesignParams, z3: Optional[float] = None) -> list[ModeSolution]:
    """Solutions of the first factor ``b v4 - c`` of the last closure equation.

    Returns two branches (flagged complex when the discriminant is negative)
    or an empty list when assembly 2 does not exist.
    """
    z3 = params.z3 if z3 is None else z3
    if not assembly2_exists(params):
        return []
    b, c = params.b, params.c
    if b == 0 or b - 2 * z3 == 0:
        raise ValueError("rotation branch needs b != 0 and b != 2 z3")
    d = rot_branch_discriminant(params, z3)
    kind = classify_discriminant(d)
    out = []
    for sign, label in ((1.0, "II-rot+"), (-1.0, "II-rot-")):
        if kind == "complex":
            curve = _Unreal()
            v1 = None
        else:
            v1 = (-c + sign * math.sqrt(max(d, 0.0))) / (b - 2 * z3)
            curve = _Assembly2Curve(params, v1, c / b)
        sol = ModeSolution(2, label, "v3", curve, real=kind != "complex", discriminant=d, realness=kind)
        if v1 is not None:
            sol.notes.append(f"v1 = {v1!r}, v4 = {c / b!r}")
        out.append(sol)
    return out


@dataclass(frozen=True)
class _Unreal:
    def __call__(self, t: float) -> None:
        return None


def assembly2_joint_values(params: DesignParams, v1: float, v3: float, v4: float) -> JointValues:
    """Fill in ``v2 = -1/v1``, ``tau`` and ``s`` for an assembly-2 point."""
    v2 = INF if v1 == 0 else -1.0 / v1
    return JointValues(v1, v2, v3, v4, _tau_opposed(v3, v4), slide_opposed(params, v1))


@dataclass(frozen=True)
class _Assembly2Curve:
    params: DesignParams
    v1: float
    v4: float

    def __call__(self, v3: float) -> JointValues:
        return assembly2_joint_values(self.params, self.v1, v3, self.v4)


def curve_branch_quadratic(params: DesignParams, z3: float, v3: float) -> tuple[float, float, float]:
    """Coefficients ``(A, B, C)`` of ``A v1^2 + B v1 + C = 0`` for fixed ``v3``."""
    b, c = params.b, params.c
    qa = -v3 * v3 * z3 + c * v3 + b - z3
    qb = c * v3 * v3 + c
    qc = b * v3 * v3 - v3 * v3 * z3 + c * v3 + 2 * b - z3
    return qa, qb, qc


def assembly2_curve_roots(params: DesignParams, z3: float, v3: float) -> tuple[list[float], float]:
    """Real roots in ``v1`` (larger first) and the discriminant."""
    qa, qb, qc = curve_branch_quadratic(params, z3, v3)
    if qa == 0:
        if qb == 0:
            return [], 0.0
        return [-qc / qb], qb * qb
    d = qb * qb - 4 * qa * qc
    kind = classify_discriminant(d / max(qb * qb, abs(4 * qa * qc), 1.0))
    if kind == "complex":
        return [], d
    r = math.sqrt(max(d, 0.0))
    # numerically stable pair
    q = -0.5 * (qb + math.copysign(r, qb)) if qb != 0 else -0.5 * r
    roots = [q / qa, qc / q] if q != 0 else [0.0, 0.0]
    return sorted(roots, reverse=True), d


def assembly2_curve_branch(params: DesignParams, z3: Optional[float], v3: float) -> list[JointValues]:
    """All real assembly-2 configurations with ``v4 = (v3^2 - 1)/(2 v3)``."""
    z3 = params.z3 if z3 is None else z3
    if not assembly2_exists(params):
        return []
    if v3 == 0:
        raise ValueError("v3 = 0 puts v4 at its pole")
    v4 = _half_angle_double(v3)
    roots, _ = assembly2_curve_roots(params, z3, v3)
    return [assembly2_joint_values(params, v1, v3, v4) for v1 in roots]


@dataclass(frozen=True)
class _CurveRoot:
    params: DesignParams
    index: int

    def __call__(self, v3: float) -> Optional[JointValues]:
        if v3 == 0:
            return None
        sols = assembly2_curve_branch(self.params, None, v3)
        if len(sols) <= self.index:
            return None
        return sols[self.index]


# -- enumeration and checks ----------------------------------------------------


def enumerate_modes(f: Factorization, assembly: int = 1) -> list[ModeSolution]:
    params = f.params
    if assembly == 1:
        modes = [
            ModeSolution(1, "A", "v1", lambda v1: mode_A(params, v1), poles=(0.0,)),
            ModeSolution(1, "B", "v1", lambda v1: mode_B(params, v1), poles=mode_B_poles(params)),
        ]
        for m in special_rotation_modes(params):
            m.curve = m.curve.bind(f)
            modes.append(m)
        return modes
    if assembly == 2:
        if not assembly2_exists(params):
            return []
        modes = assembly2_rot_branch(params)
        for index, label in ((0, "II-curve+"), (1, "II-curve-")):
            modes.append(ModeSolution(2, label, "v3", _CurveRoot(params, index), poles=(0.0,)))
        return modes
    raise ValueError(f"assembly must be 1 or 2, got {assembly}")


def closure_residual(f: Factorization, jv: JointValues, assembly: int) -> ClosureResidual:
    C = chain_pose(f, jv)
    if assembly == 1:
        return closure_residual_1(C)
    return closure_residual_2(C, f.params)


@dataclass
class SweepReport:
    branch: str
    assembly: int
    samples: int
    evaluated: int
    max_residual: float
    skipped: list[float]

    @property
    def real(self) -> bool:
        return self.evaluated > 0


def sweep(
    f: Factorization,
    mode: ModeSolution,
    samples: int = 100,
    span: tuple[float, float] = (-10.0, 10.0),
    avoid: float = 1e-3,
) -> SweepReport:
    """Closure residual of ``mode`` over evenly spaced driving parameters.

    Samples within ``avoid`` of a listed pole are evaluated anyway through
    the extended-real convention; only unevaluable ones are skipped.
    """
    worst = 0.0
    evaluated = 0
    skipped = []
    for t in np.linspace(span[0], span[1], samples):
        t = float(t)
        try:
            jv = mode(t)
        except (ZeroDivisionError, ValueError):
            jv = None
        if jv is None:
            skipped.append(t)
            continue
        res = closure_residual(f, jv, mode.assembly)
        if mode.assembly == 2 and res.spread <= 1e-6:
            worst = max(worst, 1.0)
        worst = max(worst, res.max)
        evaluated += 1
    return SweepReport(mode.branch, mode.assembly, samples, evaluated, worst, skipped)


def coincides_with_A(params: DesignParams, v1: float, tol: float = DEFAULT_TOL) -> bool:
    """Whether mode B passes through mode A at ``v1`` (that is ``v3(v1) = v1``)."""
    v3 = mode_B_v3(params, v1)
    return math.isfinite(v3) and abs(v3 - v1) <= tol * max(1.0, abs(v1))
