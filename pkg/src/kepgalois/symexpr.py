"""Small exact expression DAG over the phase variables.

Expressions are built from constants in K, the variables
x1..x4, p1..p4 and the radicals r1, r2, with sums, products, quotients
and integer powers.  The radicals are first-class variables carrying
registered gradient rules

    dr1/dx1 = x1/r1,  dr1/dx2 = x2/r1,
    dr2/dp3 = p3/r2,  dr2/dp4 = p4/r2,

so differentiation never leaves the rational world; evaluation is exact
when the inputs are exact (CycNum or RatFn values) and complex
otherwise.  There is no general simplifier: identity of expressions is
decided by evaluation at random points of K subject to the radical
constraints r1^2 = x1^2 + x2^2, r2^2 = p3^2 + p4^2.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable

from .cyclo import CycNum, ONE, ZERO, rat

PHASE_VARS = ("x1", "x2", "x3", "x4", "p1", "p2", "p3", "p4")
RADICALS = ("r1", "r2")
CONTROL_VARS = ("u1", "u2")  # only the pseudo-Hamiltonian carries these
ALL_VARS = PHASE_VARS + RADICALS + CONTROL_VARS

_RADICAL_RULES = {
    ("r1", "x1"): "x1",
    ("r1", "x2"): "x2",
    ("r2", "p3"): "p3",
    ("r2", "p4"): "p4",
}


class Expr:
    __slots__ = ()

    def diff(self, v: str) -> "Expr":
        raise NotImplementedError

    def eval(self, env: dict):
        raise NotImplementedError

    # operator sugar -----------------------------------------------------

    def __add__(self, other):
        return add(self, _as_expr(other))

    def __radd__(self, other):
        return add(_as_expr(other), self)

    def __sub__(self, other):
        return add(self, mul(Const(rat(-1)), _as_expr(other)))

    def __rsub__(self, other):
        return add(_as_expr(other), mul(Const(rat(-1)), self))

    def __neg__(self):
        return mul(Const(rat(-1)), self)

    def __mul__(self, other):
        return mul(self, _as_expr(other))

    def __rmul__(self, other):
        return mul(_as_expr(other), self)

    def __truediv__(self, other):
        return quot(self, _as_expr(other))

    def __rtruediv__(self, other):
        return quot(_as_expr(other), self)

    def __pow__(self, n: int):
        return pow_(self, n)


def _as_expr(e) -> Expr:
    if isinstance(e, Expr):
        return e
    if isinstance(e, (int, Fraction)):
        return Const(CycNum.from_rational(e))
    if isinstance(e, CycNum):
        return Const(e)
    raise TypeError(f"cannot treat {type(e).__name__} as an expression")


class Const(Expr):
    __slots__ = ("value",)

    def __init__(self, value: CycNum):
        object.__setattr__(self, "value", value)

    def __setattr__(self, k, v):
        raise AttributeError("immutable")

    def diff(self, v):
        return _E_ZERO

    def eval(self, env):
        if env.get("__complex__"):
            return self.value.to_complex()
        return self.value

    def __repr__(self):
        return f"{self.value}"


class Var(Expr):
    __slots__ = ("name",)

    def __init__(self, name: str):
        if name not in ALL_VARS:
            raise ValueError(f"unknown variable {name!r}")
        object.__setattr__(self, "name", name)

    def __setattr__(self, k, v):
        raise AttributeError("immutable")

    def diff(self, v):
        if v not in PHASE_VARS:
            raise ValueError("differentiation is with respect to phase variables only")
        if self.name == v:
            return _E_ONE
        rule = _RADICAL_RULES.get((self.name, v))
        if rule is not None:
            return quot(Var(rule), Var(self.name))
        return _E_ZERO

    def eval(self, env):
        try:
            return env[self.name]
        except KeyError:
            raise KeyError(f"variable {self.name} not assigned") from None

    def __repr__(self):
        return self.name


class Add(Expr):
    __slots__ = ("terms",)

    def __init__(self, terms: tuple):
        object.__setattr__(self, "terms", terms)

    def __setattr__(self, k, v):
        raise AttributeError("immutable")

    def diff(self, v):
        return add(*[t.diff(v) for t in self.terms])

    def eval(self, env):
        acc = None
        for t in self.terms:
            val = t.eval(env)
            acc = val if acc is None else acc + val
        return acc

    def __repr__(self):
        return "(" + " + ".join(map(repr, self.terms)) + ")"


class Mul(Expr):
    __slots__ = ("factors",)

    def __init__(self, factors: tuple):
        object.__setattr__(self, "factors", factors)

    def __setattr__(self, k, v):
        raise AttributeError("immutable")

    def diff(self, v):
        terms = []
        for i, f in enumerate(self.factors):
            df = f.diff(v)
            if isinstance(df, Const) and df.value.is_zero():
                continue
            terms.append(mul(*(self.factors[:i] + (df,) + self.factors[i + 1:])))
        return add(*terms)

    def eval(self, env):
        acc = None
        for f in self.factors:
            val = f.eval(env)
            acc = val if acc is None else acc * val
        return acc

    def __repr__(self):
        return "(" + "*".join(map(repr, self.factors)) + ")"


class Quot(Expr):
    __slots__ = ("a", "b")

    def __init__(self, a: Expr, b: Expr):
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def __setattr__(self, k, v):
        raise AttributeError("immutable")

    def diff(self, v):
        da, db = self.a.diff(v), self.b.diff(v)
        return quot(add(mul(da, self.b), mul(Const(rat(-1)), mul(self.a, db))), mul(self.b, self.b))

    def eval(self, env):
        den = self.b.eval(env)
        if isinstance(den, CycNum) and den.is_zero():
            raise ZeroDivisionError("singular evaluation: zero denominator")
        if isinstance(den, complex) and den == 0:
            raise ZeroDivisionError("singular evaluation: zero denominator")
        return self.a.eval(env) / den

    def __repr__(self):
        return f"({self.a!r})/({self.b!r})"


class Pow(Expr):
    __slots__ = ("base", "n")

    def __init__(self, base: Expr, n: int):
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "n", n)

    def __setattr__(self, k, v):
        raise AttributeError("immutable")

    def diff(self, v):
        db = self.base.diff(v)
        return mul(Const(rat(self.n)), pow_(self.base, self.n - 1), db)

    def eval(self, env):
        b = self.base.eval(env)
        if self.n < 0:
            if isinstance(b, CycNum) and b.is_zero():
                raise ZeroDivisionError("singular evaluation: zero base with negative power")
            if isinstance(b, complex) and b == 0:
                raise ZeroDivisionError("singular evaluation: zero base with negative power")
        return b ** self.n

    def __repr__(self):
        return f"({self.base!r})^{self.n}"


_E_ZERO = Const(ZERO)
_E_ONE = Const(ONE)


def add(*terms) -> Expr:
    flat = []
    const = ZERO
    for t in terms:
        t = _as_expr(t)
        if isinstance(t, Add):
            flat.extend(t.terms)
        elif isinstance(t, Const):
            const = const + t.value
        else:
            flat.append(t)
    if not const.is_zero() or not flat:
        flat.append(Const(const))
    if len(flat) == 1:
        return flat[0]
    return Add(tuple(flat))


def mul(*factors) -> Expr:
    flat = []
    const = ONE
    for f in factors:
        f = _as_expr(f)
        if isinstance(f, Mul):
            flat.extend(f.factors)
        elif isinstance(f, Const):
            const = const * f.value
        else:
            flat.append(f)
    if const.is_zero():
        return _E_ZERO
    if not const == ONE or not flat:
        flat.insert(0, Const(const))
    if len(flat) == 1:
        return flat[0]
    return Mul(tuple(flat))


def quot(a, b) -> Expr:
    a, b = _as_expr(a), _as_expr(b)
    if isinstance(b, Const):
        return mul(Const(b.value.inverse()), a)
    if isinstance(a, Const) and a.value.is_zero():
        return _E_ZERO
    return Quot(a, b)


def pow_(base, n: int) -> Expr:
    base = _as_expr(base)
    if n == 0:
        return _E_ONE
    if n == 1:
        return base
    if isinstance(base, Const):
        return Const(base.value**n)
    return Pow(base, n)


def differentiate(e: Expr, v: str) -> Expr:
    """Partial derivative with the registered radical rules applied."""
    return _as_expr(e).diff(v)


def evaluate(e: Expr, point: dict):
    """Evaluate at an assignment of CycNum, RatFn, or complex values.

    The caller is responsible for radical consistency (r1^2 = x1^2 + x2^2,
    r2^2 = p3^2 + p4^2) whenever r1, r2 appear.
    """
    env = dict(point)
    env["__complex__"] = any(isinstance(val, complex) for val in point.values())
    return _as_expr(e).eval(env)


# -- random consistent points and probabilistic identity -----------------------


def random_point_K(rng, on_S: bool = False) -> dict:
    """A random exact point of the phase space with consistent radicals.

    Radical consistency is arranged with the Pythagorean parametrization
    (a^2 - b^2, 2ab, a^2 + b^2); on S the constraints x2 = x4 = p2 = p4 = 0,
    r1 = x1, r2 = -p3 hold instead.
    """

    def q():
        return CycNum.from_rational(Fraction(rng.randint(-6, 6), rng.randint(1, 4)))

    def nonzero_q():
        v = q()
        while v.is_zero():
            v = q()
        return v

    if on_S:
        x1 = nonzero_q()
        p3 = nonzero_q()
        return {
            "x1": x1, "x2": ZERO, "x3": q(), "x4": ZERO,
            "p1": q(), "p2": ZERO, "p3": p3, "p4": ZERO,
            "r1": x1, "r2": -p3,
        }
    a, b = nonzero_q(), nonzero_q()
    c, d = nonzero_q(), nonzero_q()
    x1, x2, r1 = a * a - b * b, rat(2) * a * b, a * a + b * b
    p3, p4, r2 = c * c - d * d, rat(2) * c * d, c * c + d * d
    return {
        "x1": x1, "x2": x2, "x3": q(), "x4": q(),
        "p1": q(), "p2": q(), "p3": p3, "p4": p4,
        "r1": r1, "r2": r2,
    }


def exprs_equal(e1: Expr, e2: Expr, rng, points: int = 12, on_S: bool = False) -> bool:
    """Probabilistic identity test by exact evaluation at random points."""
    checked = 0
    while checked < points:
        pt = random_point_K(rng, on_S=on_S)
        try:
            v1 = evaluate(e1, pt)
            v2 = evaluate(e2, pt)
        except ZeroDivisionError:
            continue
        if not (v1 - v2).is_zero():
            return False
        checked += 1
    return True
