"""Factorization of the vertical Darboux motion into a 4R chain.

For the vertical Darboux motion ``M`` about the z-axis, ``(t^2 + 1) M``
splits as ``P1 P2 P3 P4 P4`` with monic linear rotation factors. The
repeated factor ``P4`` becomes a single revolute joint driven at the double
angle, so the chain has four revolute joints and closes with a cylindrical
joint on the z-axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .dq_core import (
    DEFAULT_TOL,
    EI,
    EJ,
    EK,
    EPS,
    ONE,
    DualQuaternion,
    K,
    PlueckerLine,
    Quaternion,
    axis_of_linear,
)
from .motion_poly import (
    MotionPolynomial,
    coeff_residual,
    poly_div_right,
    poly_mul,
)


class InvalidDesign(ValueError):
    """Design parameters violate a construction precondition."""


class VerificationFailure(Exception):
    """The assembled factors do not reproduce ``(t^2 + 1) M``."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


def degeneracy(b: float, c: float, q1: float, q2: float) -> float:
    """``b^2 + c^2 - 4 q1^2 - 4 q2^2``; zero selects the special branch."""
    return b * b + c * c - 4.0 * q1 * q1 - 4.0 * q2 * q2


def is_degenerate(b: float, c: float, q1: float, q2: float, tol: float = DEFAULT_TOL) -> bool:
    return abs(degeneracy(b, c, q1, q2)) < tol * (b * b + c * c)


@dataclass(frozen=True)
class DesignParams:
    """Design parameters of the linkage.

    ``b`` and ``c`` fix the Darboux motion, ``q1`` and ``q2`` the offset of
    the doubled joint. The remaining freedom is ``(z1, z2)`` in the generic
    branch and ``(z, z3)`` in the degenerate one; use :meth:`create` to get
    the branch-dependent quantities filled in.
    """

    b: float
    c: float
    q1: float
    q2: float
    z1: float = 0.0
    z2: float = 0.0
    z3: float = 0.0
    z: Optional[float] = None
    tol: float = DEFAULT_TOL

    @classmethod
    def create(
        cls,
        b: float,
        c: float,
        q1: float,
        q2: float,
        z1: Optional[float] = None,
        z2: Optional[float] = None,
        z: Optional[float] = None,
        z3: Optional[float] = None,
        tol: float = DEFAULT_TOL,
    ) -> DesignParams:
        b, c, q1, q2 = float(b), float(c), float(q1), float(q2)
        for name, v in (("b", b), ("c", c), ("q1", q1), ("q2", q2)):
            if not math.isfinite(v):
                raise InvalidDesign(f"{name} must be finite")
        if b == 0 and c == 0:
            raise InvalidDesign("(b, c) must not both vanish")
        if q1 == 0 and q2 == 0:
            raise InvalidDesign("(q1, q2) must not both vanish")
        if is_degenerate(b, c, q1, q2, tol):
            if z1 is not None or z2 is not None:
                raise InvalidDesign(
                    "b^2 + c^2 = 4(q1^2 + q2^2): z1, z2 are derived from z; pass z and z3 instead"
                )
            zz = float(z) if z is not None else 0.0
            return cls(
                b, c, q1, q2,
                z1=zz * (b * q2 + c * q1),
                z2=zz * (-b * q1 + c * q2),
                z3=float(z3) if z3 is not None else 0.0,
                z=zz,
                tol=tol,
            )
        if z is not None or z3 is not None:
            raise InvalidDesign(
                "b^2 + c^2 != 4(q1^2 + q2^2): z3 is derived; pass z1 and z2 instead of z, z3"
            )
        z1 = float(z1) if z1 is not None else 0.0
        z2 = float(z2) if z2 is not None else 0.0
        g = degeneracy(b, c, q1, q2)
        # P2 axis direction has k-component -g, so this makes the moment orthogonal to it
        z3 = (4.0 * (b * q1 - c * q2) * z1 + 4.0 * (b * q2 + c * q1) * z2) / g
        return cls(b, c, q1, q2, z1=z1, z2=z2, z3=z3, z=None, tol=tol)

    @property
    def degenerate(self) -> bool:
        return self.z is not None

    @property
    def condition(self) -> float:
        return degeneracy(self.b, self.c, self.q1, self.q2)


def make_vertical_darboux(b: float, c: float) -> MotionPolynomial:
    """``M = (t^2 + 1)(t - k) + eps(-b k t + c k)(t - k)``."""
    return MotionPolynomial((
        -K + c * EPS,
        ONE - b * EPS + c * EK,
        -K - b * EK,
        ONE,
    ))


def make_P4(q1: float, q2: float) -> MotionPolynomial:
    return MotionPolynomial.linear(K + q1 * EI + q2 * EJ)


def p3_offsets(b: float, c: float, q1: float, q2: float) -> tuple[float, float]:
    """The dual coefficients ``(y1, y2)`` of ``P3``."""
    r = q1 * q1 + q2 * q2
    if r == 0:
        raise InvalidDesign("(q1, q2) must not both vanish")
    y1 = (b * b * q1 - 2 * b * c * q2 - c * c * q1 + 4 * q1**3 + 4 * q1 * q2 * q2) / (4 * r)
    y2 = (b * b * q2 + 2 * b * c * q1 - c * c * q2 + 4 * q1 * q1 * q2 + 4 * q2**3) / (4 * r)
    return y1, y2


def make_P3(params: DesignParams) -> MotionPolynomial:
    y1, y2 = p3_offsets(params.b, params.c, params.q1, params.q2)
    return MotionPolynomial.linear(-K - y1 * EI - y2 * EJ)


def p2_direction(b: float, c: float, q1: float, q2: float) -> tuple[float, float, float]:
    """Unit axis of the circular translation left after removing ``P3 P4^2``."""
    d = b * b + c * c + 4 * q1 * q1 + 4 * q2 * q2
    return (
        4 * (b * q1 - c * q2) / d,
        4 * (b * q2 + c * q1) / d,
        -degeneracy(b, c, q1, q2) / d,
    )


def make_P2(params: DesignParams) -> MotionPolynomial:
    """``P2 = t + n - eps(z1 i + z2 j + z3 k)``."""
    if not params.degenerate and abs(params.condition) < params.tol * (params.b**2 + params.c**2):
        raise InvalidDesign("generic branch requested on degenerate parameters")
    n = p2_direction(params.b, params.c, params.q1, params.q2)
    h = DualQuaternion(Quaternion(0.0, -n[0], -n[1], -n[2]), Quaternion(0.0, params.z1, params.z2, params.z3))
    return MotionPolynomial.linear(h)


def make_Q(params: DesignParams) -> MotionPolynomial:
    """``(t^2 + 1) M`` with the two ``P4`` factors divided off on the right."""
    target = poly_mul(MotionPolynomial.real([1.0, 0.0, 1.0]), make_vertical_darboux(params.b, params.c))
    h4 = -make_P4(params.q1, params.q2)[0]
    q, _ = poly_div_right(target, h4)
    q, _ = poly_div_right(q, h4)
    return q


def make_P1(params: DesignParams, tol: Optional[float] = None) -> MotionPolynomial:
    """Left cofactor of ``P2 P3 P4^2`` in ``(t^2 + 1) M``, found by right division."""
    tol = params.tol if tol is None else tol
    target = poly_mul(MotionPolynomial.real([1.0, 0.0, 1.0]), make_vertical_darboux(params.b, params.c))
    rest = target
    for name, factor in (
        ("P4", make_P4(params.q1, params.q2)),
        ("P4", make_P4(params.q1, params.q2)),
        ("P3", make_P3(params)),
        ("P2", make_P2(params)),
    ):
        rest, rem = poly_div_right(rest, -factor[0])
        scale = max(1.0, rest.max_abs())
        if rem.max_abs() > tol * scale:
            raise VerificationFailure(f"{name} is not a right factor", rem.max_abs())
    return rest


def closed_form_P1(params: DesignParams) -> MotionPolynomial:
    """Reference closed form of ``P1``, kept only as a cross-check of :func:`make_P1`.

    In the degenerate branch its z-term carries the opposite sign
    from what division gives; the two agree when ``z == 0``.
    """
    b, c, q1, q2 = params.b, params.c, params.q1, params.q2
    z1, z2, z3 = params.z1, params.z2, params.z3
    if not params.degenerate:
        n = p2_direction(b, c, q1, q2)
        g = degeneracy(b, c, q1, q2)
        r4 = 4 * q1 * q1 + 4 * q2 * q2
        di = (2 * q2 * (b * c + 2 * q1 * q2 + 2 * z1 * q2) - q1 * (b * b - c * c - 4 * q1 * q1 - 4 * q1 * z1)) / r4
        dj = -(2 * q1 * (b * c - 2 * q1 * q2 - 2 * q1 * z2) + q2 * (b * b - c * c - 4 * q2 * q2 - 4 * q2 * z2)) / r4
        dk = (4 * (b * q1 - c * q2) * z1 + 4 * (b * q2 + c * q1) * z2 - b * g) / g
        const = DualQuaternion(Quaternion(0.0, -n[0], -n[1], -n[2]), Quaternion(0.0, di, dj, dk))
    else:
        s = b * b + c * c
        f = (s * params.z - 2 * c) / s
        const = DualQuaternion(
            Quaternion(0.0, -2 * (b * q1 - c * q2) / s, -2 * (b * q2 + c * q1) / s, 0.0),
            Quaternion(0.0, -f * (b * q2 + c * q1), f * (b * q1 - c * q2), z3 - b),
        )
    return MotionPolynomial((const, ONE))


@dataclass(frozen=True)
class Factorization:
    params: DesignParams
    M: MotionPolynomial
    P1: MotionPolynomial
    P2: MotionPolynomial
    P3: MotionPolynomial
    P4: MotionPolynomial
    y1: float
    y2: float
    z3: float
    residual: float
    closed_form_deviation: float

    @property
    def factors(self) -> tuple[MotionPolynomial, ...]:
        return (self.P1, self.P2, self.P3, self.P4)

    def product(self) -> MotionPolynomial:
        return product_of(self.factors)


def product_of(factors) -> MotionPolynomial:
    """``P1 P2 P3 P4 P4`` for factors given in chain order."""
    p1, p2, p3, p4 = factors
    out = poly_mul(p1, p2)
    out = poly_mul(out, p3)
    out = poly_mul(out, p4)
    return poly_mul(out, p4)


def factorization_residual(factors, b: float, c: float) -> float:
    target = poly_mul(MotionPolynomial.real([1.0, 0.0, 1.0]), make_vertical_darboux(b, c))
    return coeff_residual(product_of(factors), target)


def factorize(params: DesignParams) -> Factorization:
    """Build all four factors and verify ``P1 P2 P3 P4^2 = (t^2 + 1) M``.

    Raises:
        VerificationFailure: if the product misses the target by more than
            ``params.tol`` relative to the largest coefficient involved.
    """
    M = make_vertical_darboux(params.b, params.c)
    P4 = make_P4(params.q1, params.q2)
    P3 = make_P3(params)
    P2 = make_P2(params)
    P1 = make_P1(params)
    y1, y2 = p3_offsets(params.b, params.c, params.q1, params.q2)
    residual = factorization_residual((P1, P2, P3, P4), params.b, params.c)
    scale = max(1.0, P1.max_abs(), P2.max_abs())
    if residual > params.tol * scale:
        raise VerificationFailure("factor product does not reproduce (t^2+1) M", residual)
    deviation = coeff_residual(P1, closed_form_P1(params))
    return Factorization(params, M, P1, P2, P3, P4, y1, y2, params.z3, residual, deviation)


@dataclass(frozen=True)
class Joint:
    name: str
    kind: str  # "R" or "C"
    axis: PlueckerLine


@dataclass(frozen=True)
class LinkageDescription:
    design: DesignParams
    joints: tuple[Joint, ...] = field(default_factory=tuple)


Z_AXIS = PlueckerLine((0.0, 0.0, 1.0), (0.0, 0.0, 0.0))


def extract_linkage(f: Factorization) -> LinkageDescription:
    joints = []
    for name, poly in zip(("P1", "P2", "P3", "P4"), f.factors):
        axis = axis_of_linear(-poly[0])
        if not isinstance(axis, PlueckerLine):
            raise VerificationFailure(f"{name} is a translation, expected a rotation", 0.0)
        joints.append(Joint(name, "R", axis))
    joints.append(Joint("C", "C", Z_AXIS))
    return LinkageDescription(f.params, tuple(joints))
