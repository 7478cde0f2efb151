"""Exact arithmetic in the cyclotomic field K = Q(zeta24).

zeta = exp(i*pi/12) is a primitive 24th root of unity with minimal
polynomial t^8 - t^4 + 1.  The single field K simultaneously contains
every constant the pipeline needs:

    i       = zeta^6
    sqrt2   = zeta - zeta^5 + zeta^3
    sqrt3   = 2*zeta^2 - zeta^6
    sqrt(i) = zeta^3
    i*sqrt3 = 2*zeta^4 - 1

Elements are 8 exact rational coordinates over the power basis
(1, zeta, ..., zeta^7); all operations reduce modulo t^8 = t^4 - 1 and
return canonical forms, so equality is structural.  Internally a value
is an integer vector over one positive common denominator with content
coprime to it, which keeps the hot convolution loop in plain integer
arithmetic.  No floating point enters here except through the explicit
``to_complex`` embedding.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Union

_DEG = 8

Rat = Union[int, Fraction]


class CycNum:
    """An element of Q(zeta24), stored as 8 rational coordinates."""

    __slots__ = ("nums", "den")

    def __init__(self, coeffs: Iterable[Rat] = ()):
        cs = []
        for c in coeffs:
            if isinstance(c, int):
                cs.append(Fraction(c))
            elif isinstance(c, Fraction):
                cs.append(c)
            else:
                raise TypeError(f"cannot coerce {type(c).__name__} into Q(zeta24)")
        if len(cs) > _DEG:
            raise ValueError("at most 8 coordinates")
        cs += [Fraction(0)] * (_DEG - len(cs))
        den = 1
        for c in cs:
            den = den * c.denominator // gcd(den, c.denominator)
        nums = tuple(int(c * den) for c in cs)
        object.__setattr__(self, "nums", nums)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):
        raise AttributeError("CycNum is immutable")

    @staticmethod
    def _make(nums, den) -> "CycNum":
        """Internal: normalize an integer vector / denominator pair."""
        if den < 0:
            den = -den
            nums = [-n for n in nums]
        g = den
        for n in nums:
            if n:
                g = gcd(g, n)
                if g == 1:
                    break
        if g > 1:
            den //= g
            nums = [n // g for n in nums]
        if not any(nums):
            den = 1
        obj = object.__new__(CycNum)
        object.__setattr__(obj, "nums", tuple(nums))
        object.__setattr__(obj, "den", den)
        return obj

    @property
    def coeffs(self) -> tuple:
        """The 8 coordinates as Fractions over (1, zeta, ..., zeta^7)."""
        return tuple(Fraction(n, self.den) for n in self.nums)

    # -- constructors ----------------------------------------------------

    @staticmethod
    def from_rational(q: Rat) -> "CycNum":
        if isinstance(q, int):
            return CycNum._make([q] + [0] * (_DEG - 1), 1)
        return CycNum._make([q.numerator] + [0] * (_DEG - 1), q.denominator)

    @staticmethod
    def zeta_power(k: int) -> "CycNum":
        """zeta^k for any integer k (k may be negative)."""
        k %= 24
        coeffs = [0] * 24
        coeffs[k] = 1
        return CycNum._make(_reduce_int(coeffs), 1)

    # -- canonical predicates ---------------------------------------------

    def is_zero(self) -> bool:
        return not any(self.nums)

    def is_rational(self) -> bool:
        """True iff the element lies in Q (coordinates 1..7 vanish)."""
        return not any(self.nums[1:])

    def is_integer(self) -> bool:
        return self.is_rational() and self.den == 1

    def rational_part(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("not a rational element")
        return Fraction(self.nums[0], self.den)

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, CycNum):
            return other
        if isinstance(other, (int, Fraction)):
            return CycNum.from_rational(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        da, db = self.den, o.den
        if da == db:
            return CycNum._make([a + b for a, b in zip(self.nums, o.nums)], da)
        return CycNum._make(
            [a * db + b * da for a, b in zip(self.nums, o.nums)], da * db
        )

    __radd__ = __add__

    def __neg__(self):
        return CycNum._make([-a for a in self.nums], self.den)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        da, db = self.den, o.den
        if da == db:
            return CycNum._make([a - b for a, b in zip(self.nums, o.nums)], da)
        return CycNum._make(
            [a * db - b * da for a, b in zip(self.nums, o.nums)], da * db
        )

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b = self.nums, o.nums
        prod = [0] * (2 * _DEG - 1)
        for i in range(_DEG):
            ai = a[i]
            if ai:
                for j in range(_DEG):
                    if b[j]:
                        prod[i + j] += ai * b[j]
        return CycNum._make(_reduce_int(prod), self.den * o.den)

    __rmul__ = __mul__

    def inverse(self) -> "CycNum":
        """Multiplicative inverse, solving M_a x = 1 for the multiplication
        matrix of the element over the power basis.

        The integer system is triangularized with Bareiss elimination
        (exact division pivoting); the minimal polynomial is irreducible,
        so the matrix is regular for every nonzero element.
        """
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in Q(zeta24)")
        # columns of M: coefficients of nums * t^j reduced mod t^8 = t^4 - 1
        col = list(self.nums)
        mat = [[0] * _DEG for _ in range(_DEG)]
        rhs = [self.den] + [0] * (_DEG - 1)
        for j in range(_DEG):
            for i in range(_DEG):
                mat[i][j] = col[i]
            top = col[_DEG - 1]
            col = [0] + col[: _DEG - 1]
            if top:
                col[4] += top
                col[0] -= top
        x = _solve_int_system(mat, rhs)
        den = 1
        for c in x:
            den = den * c.denominator // gcd(den, c.denominator)
        return CycNum._make([int(c * den) for c in x], den)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- comparison / hashing ----------------------------------------------

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.den == o.den and self.nums == o.nums

    def __hash__(self):
        return hash((self.nums, self.den))

    # -- embeddings ---------------------------------------------------------

    def to_complex(self) -> complex:
        acc = 0j
        for k in range(_DEG):
            n = self.nums[k]
            if n:
                acc += n * _ZETA_POWERS[k]
        return acc / self.den

    # -- text format ----------------------------------------------------------

    def serialize(self) -> str:
        """Canonical text form ``a0/b0,...,a7/b7`` over (1, zeta, ..., zeta^7)."""
        return ",".join(f"{c.numerator}/{c.denominator}" for c in self.coeffs)

    @staticmethod
    def parse(text: str) -> "CycNum":
        parts = text.strip().split(",")
        if len(parts) != _DEG:
            raise ValueError(f"expected 8 coordinates, got {len(parts)}")
        return CycNum([Fraction(p) for p in parts])

    def __repr__(self):
        if self.is_rational():
            return f"CycNum({Fraction(self.nums[0], self.den)})"
        return f"CycNum[{self.serialize()}]"

    def __str__(self):
        if self.is_zero():
            return "0"
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if k == 0:
                terms.append(str(c))
            elif c == 1:
                terms.append(f"z^{k}" if k > 1 else "z")
            else:
                terms.append(f"{c}*z^{k}" if k > 1 else f"{c}*z")
        return " + ".join(terms)


def _reduce_int(coeffs: list) -> list:
    """Reduce an integer coefficient list modulo t^8 = t^4 - 1 to degree < 8."""
    cs = list(coeffs)
    for k in range(len(cs) - 1, _DEG - 1, -1):
        c = cs[k]
        if c:
            cs[k] = 0
            cs[k - 4] += c
            cs[k - 8] -= c
    return cs[:_DEG]


def _solve_int_system(mat, rhs):
    """Solve an integer 8x8 system exactly (Bareiss + rational back-substitution)."""
    n = _DEG
    a = [row[:] + [rhs[i]] for i, row in enumerate(mat)]
    prev = 1
    for k in range(n):
        piv = k
        while piv < n and a[piv][k] == 0:
            piv += 1
        if piv == n:
            raise ArithmeticError("singular multiplication matrix")
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
        for i in range(k + 1, n):
            for j in range(k + 1, n + 1):
                a[i][j] = (a[k][k] * a[i][j] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    x = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        s = Fraction(a[i][n])
        for j in range(i + 1, n):
            s -= a[i][j] * x[j]
        x[i] = s / a[i][i]
    return x


import cmath as _cmath

_ZETA_POWERS = tuple(_cmath.exp(1j * _cmath.pi * k / 12) for k in range(_DEG))

# Field constants.  zeta = exp(i*pi/12).
ZERO = CycNum()
ONE = CycNum([1])
ZETA = CycNum.zeta_power(1)
I = CycNum.zeta_power(6)
SQRT2 = CycNum.zeta_power(1) - CycNum.zeta_power(5) + CycNum.zeta_power(3)
SQRT3 = CycNum([0, 0, 2, 0, 0, 0, -1, 0])
SQRT_I = CycNum.zeta_power(3)
I_SQRT3 = CycNum([-1, 0, 0, 0, 2, 0, 0, 0])
HALF = CycNum([Fraction(1, 2)])


def rat(p: int, q: int = 1) -> CycNum:
    """Shorthand for the rational element p/q."""
    return CycNum.from_rational(Fraction(p, q))
