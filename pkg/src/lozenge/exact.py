"""Exact arithmetic kernels used throughout the package.

Two small number systems cover everything the exact code paths need:

* ``SqrtPiPoly`` -- polynomials in g = sqrt(3)/pi with rational
  coefficients.  Coupling values are degree <= 1; determinants of
  coupling matrices stay inside the ring.  Since g is transcendental,
  two expressions agree as real numbers iff they agree coefficientwise,
  which is what makes "exact identity" tests meaningful.
* ``ZetaFrac`` -- the field Q(zeta) with zeta = exp(2*pi*i/3), stored as
  a + b*zeta and reduced via zeta^2 = -1 - zeta.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

SQRT3_OVER_PI = math.sqrt(3.0) / math.pi


def chi(n: int) -> int:
    """Period-3 sign: zeta^n - zeta^(-n) = i*sqrt(3)*chi(n)."""
    return (0, 1, -1)[n % 3]


class SqrtPiPoly:
    """Polynomial in g = sqrt(3)/pi over the rationals."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Fraction | int] = ()):
        cs = [Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def from_pair(cls, rational: Fraction | int, root_part: Fraction | int) -> "SqrtPiPoly":
        return cls((rational, root_part))

    @classmethod
    def zero(cls) -> "SqrtPiPoly":
        return cls(())

    @classmethod
    def one(cls) -> "SqrtPiPoly":
        return cls((1,))

    @property
    def rational_part(self) -> Fraction:
        return self.coeffs[0] if self.coeffs else Fraction(0)

    @property
    def root_part(self) -> Fraction:
        """Coefficient of sqrt(3)/pi (only meaningful for degree <= 1 values)."""
        return self.coeffs[1] if len(self.coeffs) > 1 else Fraction(0)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "SqrtPiPoly") -> "SqrtPiPoly":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return SqrtPiPoly(out)

    def __sub__(self, other: "SqrtPiPoly") -> "SqrtPiPoly":
        return self + (-other)

    def __neg__(self) -> "SqrtPiPoly":
        return SqrtPiPoly(tuple(-c for c in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return SqrtPiPoly(tuple(c * other for c in self.coeffs))
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1 or 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return SqrtPiPoly(out)

    __rmul__ = __mul__

    def exact_div(self, other: "SqrtPiPoly") -> "SqrtPiPoly":
        """Divide by an exact divisor; raises if the division leaves a remainder."""
        if other.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        rem = list(self.coeffs)
        div = other.coeffs
        dq = len(rem) - len(div)
        if dq < 0:
            if not any(rem):
                return SqrtPiPoly(())
            raise ArithmeticError("inexact polynomial division")
        quot = [Fraction(0)] * (dq + 1)
        lead = div[-1]
        for k in range(dq, -1, -1):
            q = rem[k + len(div) - 1] / lead
            quot[k] = q
            if q:
                for j, d in enumerate(div):
                    rem[k + j] -= q * d
        if any(rem):
            raise ArithmeticError("inexact polynomial division")
        return SqrtPiPoly(quot)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = SqrtPiPoly((other,))
        return isinstance(other, SqrtPiPoly) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __float__(self) -> float:
        """Correctly rounded float value, robust against cancellation.

        Coefficients can be astronomically large while the value is tiny
        (binomial sums), so the working precision is chosen from the gap
        between the largest term and the result.
        """
        if not self.coeffs:
            return 0.0
        log2_g = -0.8589190189574097  # log2(sqrt(3)/pi)
        top = max(
            (c.numerator.bit_length() - c.denominator.bit_length()) + k * log2_g
            for k, c in enumerate(self.coeffs)
            if c
        )
        if top < 900:
            g = SQRT3_OVER_PI
            val = 0.0
            for c in reversed(self.coeffs):
                val = val * g + float(c)
            if val != 0.0 and math.log2(abs(val)) > top - 8.0:
                return val
        else:
            val = 0.0

        import mpmath as mp

        # a nonzero coefficient vector is a nonzero number (g transcendental),
        # so an exactly cancelled accumulator only means "not enough digits"
        loss = top - (math.log2(abs(val)) if val else top)
        guard = 80.0
        while True:
            prec = loss + guard
            dps = int(prec * 0.302) + 20
            with mp.workdps(dps):
                gval = mp.sqrt(3) / mp.pi
                acc = mp.mpf(0)
                for c in reversed(self.coeffs):
                    acc = acc * gval + mp.mpf(c.numerator) / mp.mpf(c.denominator)
                if acc != 0:
                    mag = float(mp.log(abs(acc), 2))
                    if mag > top - prec + 70.0:
                        return float(acc)
                    loss = top - mag
                else:
                    loss += guard
            guard *= 2.0

    def evalf(self, g) -> object:
        """Evaluate at an externally supplied g (e.g. an mpmath value)."""
        val = 0 * g
        for c in reversed(self.coeffs):
            val = val * g + Fraction(c)
        return val

    def __repr__(self) -> str:
        if not self.coeffs:
            return "SqrtPiPoly(0)"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                terms.append(str(c))
            elif i == 1:
                terms.append(f"{c}*(sqrt3/pi)")
            else:
                terms.append(f"{c}*(sqrt3/pi)^{i}")
        return " + ".join(terms)


def det_exact(rows: Sequence[Sequence[SqrtPiPoly]]) -> SqrtPiPoly:
    """Fraction-free Bareiss determinant over the polynomial ring."""
    n = len(rows)
    if n == 0:
        return SqrtPiPoly.one()
    m = [list(r) for r in rows]
    if any(len(r) != n for r in m):
        raise ValueError("determinant of a non-square matrix")
    sign = 1
    prev = SqrtPiPoly.one()
    for k in range(n - 1):
        if m[k][k].is_zero():
            for i in range(k + 1, n):
                if not m[i][k].is_zero():
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return SqrtPiPoly.zero()
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = m[i][j] * m[k][k] - m[i][k] * m[k][j]
                m[i][j] = num.exact_div(prev)
        prev = m[k][k]
    return m[n - 1][n - 1] if sign == 1 else -m[n - 1][n - 1]


class ZetaFrac:
    """Element a + b*zeta of Q(zeta), zeta a primitive cube root of unity."""

    __slots__ = ("a", "b")

    def __init__(self, a: Fraction | int = 0, b: Fraction | int = 0):
        self.a = Fraction(a)
        self.b = Fraction(b)

    @classmethod
    def zeta_pow(cls, n: int) -> "ZetaFrac":
        r = n % 3
        if r == 0:
            return cls(1, 0)
        if r == 1:
            return cls(0, 1)
        return cls(-1, -1)  # zeta^2 = -1 - zeta

    def conj(self) -> "ZetaFrac":
        """The automorphism zeta -> zeta^(-1) (complex conjugation on Q(zeta))."""
        return ZetaFrac(self.a - self.b, -self.b)

    def __add__(self, other: "ZetaFrac") -> "ZetaFrac":
        return ZetaFrac(self.a + other.a, self.b + other.b)

    def __sub__(self, other: "ZetaFrac") -> "ZetaFrac":
        return ZetaFrac(self.a - other.a, self.b - other.b)

    def __neg__(self) -> "ZetaFrac":
        return ZetaFrac(-self.a, -self.b)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return ZetaFrac(self.a * other, self.b * other)
        a, b, c, d = self.a, self.b, other.a, other.b
        return ZetaFrac(a * c - b * d, a * d + b * c - b * d)

    __rmul__ = __mul__

    def inverse(self) -> "ZetaFrac":
        norm = self.a * self.a - self.a * self.b + self.b * self.b
        if norm == 0:
            raise ZeroDivisionError("inverse of zero in Q(zeta)")
        cj = self.conj()
        return ZetaFrac(cj.a / norm, cj.b / norm)

    def __truediv__(self, other: "ZetaFrac") -> "ZetaFrac":
        return self * other.inverse()

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def __eq__(self, other) -> bool:
        return isinstance(other, ZetaFrac) and self.a == other.a and self.b == other.b

    def __hash__(self) -> int:
        return hash((self.a, self.b))

    def to_complex(self) -> complex:
        return complex(self.a) + complex(self.b) * complex(-0.5, math.sqrt(3.0) / 2.0)

    def __repr__(self) -> str:
        return f"ZetaFrac({self.a}, {self.b})"


def zeta_bracket(exponent: int, f: ZetaFrac) -> ZetaFrac:
    """Antisymmetrized value zeta^k*f minus its conjugate.

    Because conjugation is the automorphism zeta -> zeta^(-1), this equals
    the bracket of the rational function represented by ``f``.
    """
    v = ZetaFrac.zeta_pow(exponent) * f
    return v - v.conj()
