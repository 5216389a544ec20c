"""Dual quaternion arithmetic for rigid-body displacements.

A dual quaternion ``h = p + eps*d`` stores the eight Study parameters of a
displacement. Scalar multiples represent the same displacement, so most
comparisons here work on a canonical projective representative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

DEFAULT_TOL = 1e-9

Number = Union[int, float]


@dataclass(frozen=True)
class Quaternion:
    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def __add__(self, other: Quaternion) -> Quaternion:
        return Quaternion(self.w + other.w, self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: Quaternion) -> Quaternion:
        return Quaternion(self.w - other.w, self.x - other.x, self.y - other.y, self.z - other.z)

    def __neg__(self) -> Quaternion:
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            a0, a1, a2, a3 = self.w, self.x, self.y, self.z
            b0, b1, b2, b3 = other.w, other.x, other.y, other.z
            return Quaternion(
                a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
                a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
                a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
                a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
            )
        if isinstance(other, (int, float)):
            return Quaternion(self.w * other, self.x * other, self.y * other, self.z * other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            return self * other
        return NotImplemented

    def conj(self) -> Quaternion:
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def norm2(self) -> float:
        return self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z

    @property
    def vector(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)

    def __iter__(self):
        return iter((self.w, self.x, self.y, self.z))


@dataclass(frozen=True)
class DualNumber:
    re: float
    du: float = 0.0

    def __mul__(self, other: DualNumber) -> DualNumber:
        return DualNumber(self.re * other.re, self.re * other.du + self.du * other.re)

    def isclose(self, other: DualNumber, tol: float = DEFAULT_TOL) -> bool:
        scale = max(1.0, abs(self.re), abs(self.du), abs(other.re), abs(other.du))
        return abs(self.re - other.re) <= tol * scale and abs(self.du - other.du) <= tol * scale


@dataclass(frozen=True)
class DualQuaternion:
    """``primal + eps*dual`` with ``eps**2 == 0`` and eps central."""

    primal: Quaternion = Quaternion()
    dual: Quaternion = Quaternion()

    @classmethod
    def from_coeffs(cls, coeffs: Sequence[Number]) -> DualQuaternion:
        """Build from ``(p0, p1, p2, p3, d0, d1, d2, d3)``."""
        if len(coeffs) != 8:
            raise ValueError(f"expected 8 coefficients, got {len(coeffs)}")
        c = [float(v) for v in coeffs]
        return cls(Quaternion(*c[:4]), Quaternion(*c[4:]))

    @classmethod
    def real(cls, value: Number) -> DualQuaternion:
        return cls(Quaternion(float(value)))

    @property
    def coeffs(self) -> tuple[float, ...]:
        return (*self.primal, *self.dual)

    def __iter__(self):
        return iter(self.coeffs)

    def __add__(self, other):
        if isinstance(other, (int, float)):
            other = DualQuaternion.real(other)
        if not isinstance(other, DualQuaternion):
            return NotImplemented
        return DualQuaternion(self.primal + other.primal, self.dual + other.dual)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, float)):
            other = DualQuaternion.real(other)
        if not isinstance(other, DualQuaternion):
            return NotImplemented
        return DualQuaternion(self.primal - other.primal, self.dual - other.dual)

    def __rsub__(self, other):
        if isinstance(other, (int, float)):
            return DualQuaternion.real(other) - self
        return NotImplemented

    def __neg__(self) -> DualQuaternion:
        return DualQuaternion(-self.primal, -self.dual)

    def __mul__(self, other):
        if isinstance(other, DualQuaternion):
            return DualQuaternion(
                self.primal * other.primal,
                self.primal * other.dual + self.dual * other.primal,
            )
        if isinstance(other, (int, float)):
            return DualQuaternion(self.primal * other, self.dual * other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            return self * other
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, float)):
            return self * (1.0 / other)
        return NotImplemented

    def conj(self) -> DualQuaternion:
        return DualQuaternion(self.primal.conj(), self.dual.conj())

    def eps_conj(self) -> DualQuaternion:
        """The epsilon-conjugate ``p - eps*d``."""
        return DualQuaternion(self.primal, -self.dual)

    def norm(self) -> DualNumber:
        return dq_norm(self)

    def max_abs(self) -> float:
        return max(abs(v) for v in self.coeffs)

    def normalized(self) -> DualQuaternion:
        return normalize(self)

    def is_zero(self) -> bool:
        return all(v == 0.0 for v in self.coeffs)


ONE = DualQuaternion.from_coeffs((1, 0, 0, 0, 0, 0, 0, 0))
I = DualQuaternion.from_coeffs((0, 1, 0, 0, 0, 0, 0, 0))
J = DualQuaternion.from_coeffs((0, 0, 1, 0, 0, 0, 0, 0))
K = DualQuaternion.from_coeffs((0, 0, 0, 1, 0, 0, 0, 0))
EPS = DualQuaternion.from_coeffs((0, 0, 0, 0, 1, 0, 0, 0))
EI = DualQuaternion.from_coeffs((0, 0, 0, 0, 0, 1, 0, 0))
EJ = DualQuaternion.from_coeffs((0, 0, 0, 0, 0, 0, 1, 0))
EK = DualQuaternion.from_coeffs((0, 0, 0, 0, 0, 0, 0, 1))
ZERO = DualQuaternion()


@dataclass(frozen=True)
class ProjectivePoint:
    x0: float
    x1: float
    x2: float
    x3: float

    def __post_init__(self):
        if self.x0 == 0 and self.x1 == 0 and self.x2 == 0 and self.x3 == 0:
            raise ValueError("projective point cannot have all-zero coordinates")

    @classmethod
    def from_cartesian(cls, xyz: Iterable[Number]) -> ProjectivePoint:
        x, y, z = (float(v) for v in xyz)
        return cls(1.0, x, y, z)

    def cartesian(self) -> tuple[float, float, float]:
        if self.x0 == 0:
            raise ValueError("point at infinity has no cartesian coordinates")
        return (self.x1 / self.x0, self.x2 / self.x0, self.x3 / self.x0)


@dataclass(frozen=True)
class PlueckerLine:
    direction: tuple[float, float, float]
    moment: tuple[float, float, float]

    def __post_init__(self):
        if not any(self.direction):
            raise ValueError("line direction must be nonzero")

    @property
    def coords(self) -> tuple[float, ...]:
        return (*self.direction, *self.moment)

    def pluecker_defect(self) -> float:
        return sum(a * b for a, b in zip(self.direction, self.moment))

    def normalized(self) -> PlueckerLine:
        """Unit direction, sign fixed so the first nonzero coordinate is positive."""
        n = math.sqrt(sum(v * v for v in self.direction))
        coords = [v / n for v in self.coords]
        for v in coords:
            if v != 0:
                if v < 0:
                    coords = [-u for u in coords]
                break
        return PlueckerLine(tuple(coords[:3]), tuple(coords[3:]))


@dataclass(frozen=True)
class TranslationDirection:
    direction: tuple[float, float, float]


def dq_mul(a: DualQuaternion, b: DualQuaternion) -> DualQuaternion:
    return a * b


def dq_conj(h: DualQuaternion) -> DualQuaternion:
    return h.conj()


def dq_norm(h: DualQuaternion) -> DualNumber:
    """``h * conj(h)`` reduced to its real and dual-scalar parts.

    The vector parts of the product vanish identically, so only the two
    scalars are returned.
    """
    p, d = h.primal, h.dual
    return DualNumber(p.norm2(), 2.0 * (p.w * d.w + p.x * d.x + p.y * d.y + p.z * d.z))


def study_check(h: DualQuaternion, tol: float = DEFAULT_TOL) -> bool:
    scale = h.max_abs()
    if scale == 0 or h.primal.norm2() == 0:
        return False
    return abs(dq_norm(h).du) <= tol * scale * scale


def act_on_point(h: DualQuaternion, pt: ProjectivePoint) -> ProjectivePoint:
    """Image of ``pt`` under the displacement ``h``.

    Evaluates ``(p - eps*d)(x0 + eps*x)(conj(p) + eps*conj(d))``.
    """
    if h.primal.norm2() == 0:
        raise ValueError("dual quaternion with zero primal part is not a displacement")
    x = DualQuaternion(Quaternion(pt.x0), Quaternion(0.0, pt.x1, pt.x2, pt.x3))
    img = h.eps_conj() * x * DualQuaternion(h.primal.conj(), h.dual.conj())
    return ProjectivePoint(img.primal.w, img.dual.x, img.dual.y, img.dual.z)


def axis_of_linear(h: DualQuaternion, tol: float = DEFAULT_TOL) -> PlueckerLine | TranslationDirection:
    """Joint axis of the linear motion polynomial ``t - h``.

    A rotation about ``[p1, p2, p3, -d1, -d2, -d3]`` when the primal vector
    part is nonzero, else a translation along ``[d1, d2, d3]``.
    """
    scale = max(h.max_abs(), 1.0)
    if abs(h.dual.w) > tol * scale:
        raise ValueError(f"t - h violates the Study condition (d0 = {h.dual.w})")
    p, d = h.primal, h.dual
    if any(abs(v) > tol * scale for v in p.vector):
        return PlueckerLine(p.vector, (-d.x, -d.y, -d.z))
    return TranslationDirection(d.vector)


def normalize(h: DualQuaternion) -> DualQuaternion:
    """Canonical projective representative.

    Divide by the coefficient of largest magnitude, then flip the sign so the
    first coefficient that is nonzero (relative to the largest) is positive.
    """
    coeffs = h.coeffs
    m = max(coeffs, key=abs)
    if m == 0:
        raise ValueError("cannot normalize the zero dual quaternion")
    scaled = [v / m for v in coeffs]
    for v in scaled:
        if abs(v) > 1e-12:
            if v < 0:
                scaled = [-u for u in scaled]
            break
    return DualQuaternion.from_coeffs(scaled)


def dq_equiv(a: DualQuaternion, b: DualQuaternion, tol: float = DEFAULT_TOL) -> bool:
    """True if ``a`` and ``b`` differ by a nonzero real factor."""
    return equiv_residual(a, b) <= tol


def equiv_residual(a: DualQuaternion, b: DualQuaternion) -> float:
    """Distance between the normalized representatives of ``a`` and ``b``.

    Both signs are tried, so the result does not depend on which coefficient
    happens to decide the sign convention.
    """
    na = [v / a.max_abs() for v in a.coeffs]
    nb = [v / b.max_abs() for v in b.coeffs]
    plus = max(abs(u - v) for u, v in zip(na, nb))
    minus = max(abs(u + v) for u, v in zip(na, nb))
    return min(plus, minus)
