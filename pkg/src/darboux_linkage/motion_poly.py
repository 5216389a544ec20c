"""Polynomials in one real indeterminate with dual quaternion coefficients.

The indeterminate ``t`` commutes with every coefficient; coefficients do not
commute with each other, so left and right division differ.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .dq_core import DEFAULT_TOL, ONE, ZERO, DualQuaternion, equiv_residual


def _trim(coeffs: Iterable[DualQuaternion]) -> tuple[DualQuaternion, ...]:
    out = list(coeffs)
    while out and out[-1].is_zero():
        out.pop()
    return tuple(out)


@dataclass(frozen=True)
class MotionPolynomial:
    """Dense coefficient list; ``coeffs[i]`` multiplies ``t**i``."""

    coeffs: tuple[DualQuaternion, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(self.coeffs))

    @classmethod
    def linear(cls, h: DualQuaternion) -> MotionPolynomial:
        """The monic linear polynomial ``t - h``."""
        return cls((-h, ONE))

    @classmethod
    def real(cls, coeffs: Sequence[float]) -> MotionPolynomial:
        return cls(tuple(DualQuaternion.real(c) for c in coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, i: int) -> DualQuaternion:
        return self.coeffs[i]

    def __add__(self, other: MotionPolynomial) -> MotionPolynomial:
        n = max(len(self), len(other))
        a = self.coeffs + (ZERO,) * (n - len(self))
        b = other.coeffs + (ZERO,) * (n - len(other))
        return MotionPolynomial(tuple(x + y for x, y in zip(a, b)))

    def __neg__(self) -> MotionPolynomial:
        return MotionPolynomial(tuple(-c for c in self.coeffs))

    def __sub__(self, other: MotionPolynomial) -> MotionPolynomial:
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, MotionPolynomial):
            return poly_mul(self, other)
        if isinstance(other, (int, float, DualQuaternion)):
            return MotionPolynomial(tuple(c * other for c in self.coeffs))
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, DualQuaternion)):
            return MotionPolynomial(tuple(other * c for c in self.coeffs))
        return NotImplemented

    def __call__(self, t: float) -> DualQuaternion:
        return poly_eval(self, t)

    def conj(self) -> MotionPolynomial:
        return poly_conj(self)

    def norm(self) -> MotionPolynomial:
        return poly_norm(self)

    def max_abs(self) -> float:
        return max((c.max_abs() for c in self.coeffs), default=0.0)

    def as_array(self) -> np.ndarray:
        """Coefficients as a ``(degree + 1, 8)`` array."""
        return np.array([c.coeffs for c in self.coeffs], dtype=float).reshape(-1, 8)

    @classmethod
    def from_array(cls, arr) -> MotionPolynomial:
        arr = np.asarray(arr, dtype=float)
        return cls(tuple(DualQuaternion.from_coeffs(row) for row in arr))


def poly_mul(a: MotionPolynomial, b: MotionPolynomial) -> MotionPolynomial:
    if not a.coeffs or not b.coeffs:
        return MotionPolynomial()
    out = [ZERO] * (len(a) + len(b) - 1)
    for i, x in enumerate(a.coeffs):
        for j, y in enumerate(b.coeffs):
            out[i + j] = out[i + j] + x * y
    return MotionPolynomial(tuple(out))


def poly_eval(a: MotionPolynomial, t: float) -> DualQuaternion:
    """Evaluate at a real ``t``; ``t = +-inf`` yields the leading coefficient.

    The infinite value is the limit of ``a(t) / t**deg``, so a monic linear
    factor evaluates to the identity there.
    """
    if not a.coeffs:
        return ZERO
    if math.isinf(t):
        return a.coeffs[-1]
    acc = a.coeffs[-1]
    for c in reversed(a.coeffs[:-1]):
        acc = acc * t + c
    return acc


def poly_conj(a: MotionPolynomial) -> MotionPolynomial:
    return MotionPolynomial(tuple(c.conj() for c in a.coeffs))


def poly_norm(a: MotionPolynomial) -> MotionPolynomial:
    return poly_mul(a, poly_conj(a))


def is_motion_polynomial(a: MotionPolynomial, tol: float = DEFAULT_TOL) -> bool:
    """True if the norm polynomial is real, judged relative to its largest coefficient."""
    n = poly_norm(a)
    scale = n.max_abs()
    if scale == 0:
        return False
    for c in n.coeffs:
        if max(abs(v) for v in c.coeffs[1:]) > tol * scale:
            return False
    return True


def poly_div_right(a: MotionPolynomial, h: DualQuaternion) -> tuple[MotionPolynomial, DualQuaternion]:
    """Divide by ``t - h`` on the right: ``a = q * (t - h) + r``."""
    n = a.degree
    if n < 1:
        return MotionPolynomial(), (a.coeffs[0] if a.coeffs else ZERO)
    q = [ZERO] * n
    q[n - 1] = a.coeffs[n]
    for i in range(n - 1, 0, -1):
        q[i - 1] = a.coeffs[i] + q[i] * h
    r = a.coeffs[0] + q[0] * h
    return MotionPolynomial(tuple(q)), r


def poly_div_left(a: MotionPolynomial, h: DualQuaternion) -> tuple[MotionPolynomial, DualQuaternion]:
    """Divide by ``t - h`` on the left: ``a = (t - h) * q + r``."""
    n = a.degree
    if n < 1:
        return MotionPolynomial(), (a.coeffs[0] if a.coeffs else ZERO)
    q = [ZERO] * n
    q[n - 1] = a.coeffs[n]
    for i in range(n - 1, 0, -1):
        q[i - 1] = a.coeffs[i] + h * q[i]
    r = a.coeffs[0] + h * q[0]
    return MotionPolynomial(tuple(q)), r


def coeff_residual(a: MotionPolynomial, b: MotionPolynomial) -> float:
    """Largest absolute coefficient difference between two polynomials."""
    d = a - b
    return d.max_abs()


def poly_proportional(
    a: MotionPolynomial,
    b: MotionPolynomial,
    n_samples: int = 20,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
    span: float = 5.0,
) -> bool:
    """Check ``a = lambda(t) * b`` for a real rational ``lambda`` by sampling.

    Samples where either side vanishes (a common real root) are skipped.
    """
    rng = np.random.default_rng(seed)
    checked = 0
    for t in rng.uniform(-span, span, size=n_samples):
        x, y = poly_eval(a, float(t)), poly_eval(b, float(t))
        if x.is_zero() or y.is_zero():
            continue
        if equiv_residual(x, y) > tol:
            return False
        checked += 1
    return checked > 0
