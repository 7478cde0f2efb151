"""Univariate polynomials and rational functions over Q(zeta24).

Two derivation charts act on rational functions:

  * the x1-chart with the plain derivation d/dx1,
  * the w-chart, w^2 = x1, with delta = (1/(2w)) d/dw.

In the w-chart delta(w^2) = 1, so delta realizes d/dx1 on functions of
sqrt(x1) while keeping every coefficient a bona fide rational function
of w.  Rational functions are kept canonical at all times (gcd of
numerator and denominator removed, denominator monic, zero = 0/1), so
equality is structural.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable

from .cyclo import CycNum, ONE, ZERO, rat


def _as_cyc(c) -> CycNum:
    if isinstance(c, CycNum):
        return c
    if isinstance(c, (int, Fraction)):
        return CycNum.from_rational(c)
    raise TypeError(f"cannot coerce {type(c).__name__} into K")


class Poly:
    """Polynomial over K with ascending coefficients, canonical (no trailing zeros)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [_as_cyc(c) for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def leading(self) -> CycNum:
        if self.is_zero():
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __getitem__(self, k: int) -> CycNum:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else ZERO

    # arithmetic ---------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Poly):
            return other
        if isinstance(other, (CycNum, int, Fraction)):
            return Poly([_as_cyc(other)])
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n = max(len(self.coeffs), len(o.coeffs))
        return Poly([self[k] + o[k] for k in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return Poly([-c for c in self.coeffs])

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.is_zero() or o.is_zero():
            return Poly()
        out = [ZERO] * (len(self.coeffs) + len(o.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(o.coeffs):
                out[i + j] = out[i + j] + a * b
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = Poly([ONE])
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def divmod(self, other: "Poly"):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return Poly(), self
        quo = [ZERO] * (dq + 1)
        inv_lead = other.leading().inverse()
        for k in range(dq, -1, -1):
            top = rem[k + other.degree]
            if top.is_zero():
                continue
            f = top * inv_lead
            quo[k] = f
            for i, b in enumerate(other.coeffs):
                rem[k + i] = rem[k + i] - f * b
        return Poly(quo), Poly(rem)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.coeffs == o.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    # structure ------------------------------------------------------------

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        inv = self.leading().inverse()
        return Poly([c * inv for c in self.coeffs])

    def derivative(self) -> "Poly":
        return Poly([self.coeffs[k] * rat(k) for k in range(1, len(self.coeffs))])

    def shift(self, k: int) -> "Poly":
        """Multiply by x^k."""
        if self.is_zero():
            return self
        return Poly((ZERO,) * k + self.coeffs)

    def eval(self, x):
        """Horner evaluation; x may be CycNum, complex, RatFn, Poly..."""
        if self.is_zero():
            return ZERO if not isinstance(x, complex) else 0j
        acc = None
        for c in reversed(self.coeffs):
            cx = c.to_complex() if isinstance(x, complex) else c
            acc = cx if acc is None else acc * x + cx
        return acc

    def compose_affine(self, a: CycNum, b: CycNum) -> "Poly":
        """p(a*x + b) by Horner."""
        lin = Poly([b, a])
        acc = Poly()
        for c in reversed(self.coeffs):
            acc = acc * lin + Poly([c])
        return acc

    def inflate(self) -> "Poly":
        """p(x) -> p(w^2): space coefficients two apart."""
        out = []
        for c in self.coeffs:
            out.append(c)
            out.append(ZERO)
        return Poly(out[:-1] if out else out)

    def is_even(self) -> bool:
        return all(c.is_zero() for c in self.coeffs[1::2])

    def deflate(self) -> "Poly":
        """Inverse of inflate for even polynomials: p(w) = q(w^2) -> q."""
        if not self.is_even():
            raise ValueError("polynomial is not even in w")
        return Poly(self.coeffs[0::2])

    def value_at_negated(self) -> "Poly":
        """p(-x)."""
        return Poly([(-c if k % 2 else c) for k, c in enumerate(self.coeffs)])

    def serialize(self) -> str:
        return "[" + "; ".join(c.serialize() for c in self.coeffs) + "]"

    @staticmethod
    def parse(text: str) -> "Poly":
        text = text.strip()
        if not (text.startswith("[") and text.endswith("]")):
            raise ValueError("polynomial must be bracketed")
        inner = text[1:-1].strip()
        if not inner:
            return Poly()
        return Poly([CycNum.parse(p) for p in inner.split(";")])

    def __repr__(self):
        if self.is_zero():
            return "Poly(0)"
        return "Poly(" + " + ".join(f"({c})*x^{k}" for k, c in enumerate(self.coeffs) if not c.is_zero()) + ")"


def _int_primitive(p: Poly) -> Poly:
    """Scale so every coefficient is an integer vector with content 1.

    Clears coordinate denominators and strips the common integer content;
    the result generates the same ideal, which is all gcd needs.  Keeping
    the remainder sequence primitive is what prevents coefficient blowup.
    """
    if p.is_zero():
        return p
    den = 1
    for c in p.coeffs:
        den = den * c.den // gcd(den, c.den)
    content = 0
    scaled = []
    for c in p.coeffs:
        f = den // c.den
        nums = [n * f for n in c.nums]
        scaled.append(nums)
        for n in nums:
            if n:
                content = gcd(content, n)
    if content == 0:
        return Poly()
    return Poly([CycNum._make([n // content for n in nums], 1) for nums in scaled])


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd by the Euclidean algorithm over K.

    Remainders are rescaled to integer coefficient vectors with content 1
    between steps; stripping the rational content is what keeps the
    integer coordinates from snowballing along the remainder sequence.
    """
    if a.is_zero():
        return b.monic()
    if b.is_zero():
        return a.monic()
    a = _int_primitive(a)
    b = _int_primitive(b)
    if a.degree < b.degree:
        a, b = b, a
    while not b.is_zero():
        _, r = a.divmod(b)
        a, b = b, _int_primitive(r)
    return a.monic()


X = Poly([0, 1])
P_ONE = Poly([1])


class Chart:
    """A coordinate chart carrying the derivation used by operators.

    X1_CHART differentiates with d/dx1; W_CHART (w^2 = x1) uses
    delta = (1/(2w)) d/dw, which satisfies delta(w^2) = 1.
    """

    __slots__ = ("name",)

    def __init__(self, name: str):
        object.__setattr__(self, "name", name)

    def __setattr__(self, name, value):
        raise AttributeError("Chart is immutable")

    def __eq__(self, other):
        return isinstance(other, Chart) and self.name == other.name

    def __hash__(self):
        return hash(("chart", self.name))

    def __repr__(self):
        return f"Chart({self.name})"

    def derive(self, f: "RatFn") -> "RatFn":
        if self.name != "w":
            return f.derivative_plain()
        # w-chart: (1/(2w)) d/dw
        df = f.derivative_plain()
        return df / RatFn(Poly([0, 2]), P_ONE)


X1_CHART = Chart("x1")
W_CHART = Chart("w")
U_CHART = Chart("u")  # affine images of the x1-chart keep the plain derivation
T_CHART = Chart("t")  # chart at infinity, x = 1/t


class RatFn:
    """Canonical quotient of polynomials over K."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly = P_ONE):
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            num, den = Poly(), P_ONE
        elif den.degree == 0:
            inv = den.coeffs[0].inverse()
            num, den = num * inv, P_ONE
        else:
            if num.degree > 0:
                g = poly_gcd(num, den)
                if g.degree > 0:
                    num, _ = num.divmod(g)
                    den, _ = den.divmod(g)
            if den.degree == 0:
                inv = den.coeffs[0].inverse()
                num, den = num * inv, P_ONE
            else:
                lead_inv = den.leading().inverse()
                num = num * lead_inv
                den = den * lead_inv
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):
        raise AttributeError("RatFn is immutable")

    @staticmethod
    def const(c) -> "RatFn":
        return RatFn(Poly([_as_cyc(c)]), P_ONE)

    @staticmethod
    def var() -> "RatFn":
        return RatFn(X, P_ONE)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.degree <= 0 and self.den.degree == 0

    def constant_value(self) -> CycNum:
        if not self.is_constant():
            raise ValueError("not a constant")
        return self.num[0]

    # arithmetic -----------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, RatFn):
            return other
        if isinstance(other, Poly):
            return RatFn(other, P_ONE)
        if isinstance(other, (CycNum, int, Fraction)):
            return RatFn.const(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return RatFn(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFn(-self.num, self.den)

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return RatFn(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RatFn(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else o / self

    def __pow__(self, n: int):
        if n < 0:
            if self.is_zero():
                raise ZeroDivisionError
            return RatFn(self.den, self.num) ** (-n)
        return RatFn(self.num**n, self.den**n)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((self.num, self.den))

    # calculus ---------------------------------------------------------------

    def derivative_plain(self) -> "RatFn":
        """Quotient-rule derivative with respect to the chart variable."""
        return RatFn(
            self.num.derivative() * self.den - self.num * self.den.derivative(),
            self.den * self.den,
        )

    def derive(self, chart: Chart) -> "RatFn":
        return chart.derive(self)

    def eval(self, x):
        dv = self.den.eval(x)
        if isinstance(dv, CycNum) and dv.is_zero():
            raise ZeroDivisionError("evaluation at a pole")
        if isinstance(dv, complex) and dv == 0:
            raise ZeroDivisionError("evaluation at a pole")
        return self.num.eval(x) / dv

    def compose_affine(self, a: CycNum, b: CycNum) -> "RatFn":
        return RatFn(self.num.compose_affine(a, b), self.den.compose_affine(a, b))

    def inflate(self) -> "RatFn":
        """f(x) -> f(w^2)"""
        return RatFn(self.num.inflate(), self.den.inflate())

    def is_even(self) -> bool:
        """Invariance under w -> -w."""
        return self.num * self.den.value_at_negated() == self.num.value_at_negated() * self.den

    def deflate(self) -> "RatFn":
        """For an even function of w, the function of x1 = w^2 it defines."""
        den_ev = self.den * self.den.value_at_negated()
        num_ev = self.num * self.den.value_at_negated()
        if not (den_ev.is_even() and num_ev.is_even()):
            raise ValueError("rational function is not even in w")
        return RatFn(num_ev.deflate(), den_ev.deflate())

    def serialize(self) -> str:
        return f"{self.num.serialize()} ÷ {self.den.serialize()}"

    @staticmethod
    def parse(text: str) -> "RatFn":
        if "÷" not in text:
            raise ValueError("rational function must contain '÷'")
        ntext, dtext = text.split("÷", 1)
        return RatFn(Poly.parse(ntext), Poly.parse(dtext))

    def __repr__(self):
        if self.den == P_ONE:
            return repr(self.num)
        return f"{self.num!r} / {self.den!r}"


R_ZERO = RatFn(Poly())
R_ONE = RatFn(P_ONE)
R_X = RatFn(X)
