"""Non-commutative scalar differential operators over K(x).

A DiffOp is sum a_k D^k with rational-function coefficients in a chart
whose derivation D satisfies the Ore relation D*a = a*D + delta(a).
The module provides exact multiplication, right Euclidean division,
hyperexponential twists, affine and inversion changes of variable,
cyclic-vector reduction of first-order systems, order reduction by a
known solution, indicial data at regular singular points, and formal
power series solution checks.  Everything here is exact over Q(zeta24);
floating point appears only in the root *recognition* heuristics, whose
output is always re-verified exactly before being trusted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .cyclo import CycNum, I, I_SQRT3, ONE, SQRT2, SQRT3, ZERO, ZETA, rat
from .ratfn import (
    Chart,
    P_ONE,
    Poly,
    R_ONE,
    R_ZERO,
    RatFn,
    T_CHART,
    U_CHART,
    W_CHART,
    X,
    X1_CHART,
    poly_gcd,
)


class ChartMismatch(ValueError):
    pass


class NotASolution(ValueError):
    """Raised when an order reduction is attempted with a non-solution."""

    def __init__(self, residual):
        self.residual = residual
        super().__init__("claimed solution is not annihilated; residual operator attached")


def _as_ratfn(c) -> RatFn:
    if isinstance(c, RatFn):
        return c
    if isinstance(c, Poly):
        return RatFn(c)
    if isinstance(c, (CycNum, int, Fraction)):
        return RatFn.const(c)
    raise TypeError(f"cannot use {type(c).__name__} as an operator coefficient")


class DiffOp:
    """sum a_k D^k with a_n != 0; the zero operator has empty coefficients."""

    __slots__ = ("chart", "coeffs")

    def __init__(self, chart: Chart, coeffs: Sequence = ()):
        cs = [_as_ratfn(c) for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        object.__setattr__(self, "chart", chart)
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("DiffOp is immutable")

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def leading(self) -> RatFn:
        if self.is_zero():
            raise ValueError("zero operator")
        return self.coeffs[-1]

    def coeff(self, k: int) -> RatFn:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else R_ZERO

    def _check(self, other: "DiffOp"):
        if self.chart != other.chart:
            raise ChartMismatch(f"{self.chart!r} vs {other.chart!r}")

    def __add__(self, other):
        if not isinstance(other, DiffOp):
            return NotImplemented
        self._check(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return DiffOp(self.chart, [self.coeff(k) + other.coeff(k) for k in range(n)])

    def __neg__(self):
        return DiffOp(self.chart, [-c for c in self.coeffs])

    def __sub__(self, other):
        if not isinstance(other, DiffOp):
            return NotImplemented
        return self + (-other)

    def scale(self, f) -> "DiffOp":
        """Left multiplication by a function."""
        f = _as_ratfn(f)
        return DiffOp(self.chart, [f * c for c in self.coeffs])

    def apply(self, f: RatFn) -> RatFn:
        """Act on a rational function."""
        f = _as_ratfn(f)
        acc = R_ZERO
        d = f
        for k, c in enumerate(self.coeffs):
            if k > 0:
                d = d.derive(self.chart)
            acc = acc + c * d
        return acc

    def monic(self) -> "DiffOp":
        lead = self.leading()
        return DiffOp(self.chart, [c / lead for c in self.coeffs])

    def __eq__(self, other):
        if not isinstance(other, DiffOp):
            return NotImplemented
        return self.chart == other.chart and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.chart, self.coeffs))

    def serialize(self) -> str:
        lines = [f"chart: {self.chart.name}", f"order: {self.order}"]
        for k, c in enumerate(self.coeffs):
            lines.append(f"a{k}: {c.serialize()}")
        return "\n".join(lines) + "\n"

    @staticmethod
    def parse(text: str) -> "DiffOp":
        lines = [ln for ln in text.strip().splitlines() if ln.strip()]
        if not lines[0].startswith("chart:"):
            raise ValueError("operator text must begin with 'chart:'")
        chart = Chart(lines[0].split(":", 1)[1].strip())
        order = int(lines[1].split(":", 1)[1])
        coeffs = []
        for k, ln in enumerate(lines[2:]):
            key, val = ln.split(":", 1)
            if key.strip() != f"a{k}":
                raise ValueError(f"expected coefficient a{k}, got {key!r}")
            coeffs.append(RatFn.parse(val))
        if len(coeffs) != order + 1:
            raise ValueError("coefficient count does not match order")
        return DiffOp(chart, coeffs)

    def __repr__(self):
        if self.is_zero():
            return "DiffOp(0)"
        return f"DiffOp({self.chart.name}, order {self.order})"


def op_D(chart: Chart) -> DiffOp:
    return DiffOp(chart, [R_ZERO, R_ONE])


def op_from_fn(chart: Chart, f) -> DiffOp:
    return DiffOp(chart, [_as_ratfn(f)])


def _compose_D(L: DiffOp) -> DiffOp:
    """D o L  =  sum (delta(b_j) D^j + b_j D^(j+1))."""
    out = [R_ZERO] * (len(L.coeffs) + 1)
    for j, b in enumerate(L.coeffs):
        out[j] = out[j] + b.derive(L.chart)
        out[j + 1] = out[j + 1] + b
    return DiffOp(L.chart, out)


def op_mul(L1: DiffOp, L2: DiffOp) -> DiffOp:
    """Ore product L1 o L2 (composition of actions)."""
    L1._check(L2)
    if L1.is_zero() or L2.is_zero():
        return DiffOp(L1.chart, [])
    acc = DiffOp(L1.chart, [])
    power = L2  # D^k o L2, built incrementally
    for k, a in enumerate(L1.coeffs):
        if k > 0:
            power = _compose_D(power)
        if not a.is_zero():
            acc = acc + power.scale(a)
    return acc


def right_divide(L: DiffOp, R: DiffOp):
    """L = Q o R + Rem with order(Rem) < order(R); exact."""
    L._check(R)
    if R.is_zero():
        raise ZeroDivisionError("right division by the zero operator")
    Q = DiffOp(L.chart, [])
    Rem = L
    while not Rem.is_zero() and Rem.order >= R.order:
        d = Rem.order - R.order
        c = Rem.leading() / R.leading()
        mono = DiffOp(L.chart, [R_ZERO] * d + [c])
        Q = Q + mono
        Rem = Rem - op_mul(mono, R)
    return Q, Rem


def twist(L: DiffOp, r) -> DiffOp:
    """Gauge transform substituting D -> D + r.

    If r = f'/f for a hyperexponential f, then ker(twist(L, r)) is
    (1/f) * ker(L); equivalently twist(L, r)(h) = (1/f) L(f h).
    """
    r = _as_ratfn(r)
    chart = L.chart
    acc = DiffOp(chart, [])
    power = DiffOp(chart, [R_ONE])  # (D + r)^k
    shifted = DiffOp(chart, [r, R_ONE])
    for k, a in enumerate(L.coeffs):
        if k > 0:
            power = op_mul(shifted, power)
        if not a.is_zero():
            acc = acc + power.scale(a)
    return acc


def affine_subst(L: DiffOp, a: CycNum, b: CycNum, new_chart: Chart = U_CHART) -> DiffOp:
    """Rewrite L in the variable u = a*x + b (so d/dx = a * d/du).

    Only valid for charts with the plain derivation; the w-chart has no
    affine reparametrizations compatible with delta.
    """
    if L.chart.name == "w":
        raise ChartMismatch("affine substitution is not defined in the w-chart")
    if a.is_zero():
        raise ValueError("affine substitution needs a != 0")
    ainv = a.inverse()
    coeffs = []
    apow = R_ONE
    for k, c in enumerate(L.coeffs):
        if k > 0:
            apow = apow * RatFn.const(a)
        # x = (u - b)/a
        coeffs.append(c.compose_affine(ainv, -b * ainv) * apow)
    return DiffOp(new_chart, coeffs)


def _ratfn_at_inverse(f: RatFn) -> RatFn:
    """f(1/t) as a rational function of t."""
    dn, dd = f.num.degree, f.den.degree
    if f.is_zero():
        return R_ZERO
    rn = Poly(tuple(reversed(f.num.coeffs)))
    rd = Poly(tuple(reversed(f.den.coeffs)))
    m = max(dn, dd)
    return RatFn(rn.shift(m - dn), rd.shift(m - dd))


def invert_variable(L: DiffOp, new_chart: Chart = T_CHART) -> DiffOp:
    """Rewrite L at infinity via x = 1/t (so d/dx = -t^2 d/dt)."""
    if L.chart.name == "w":
        raise ChartMismatch("inversion is not defined in the w-chart")
    minus_t2_D = DiffOp(new_chart, [R_ZERO, RatFn(Poly([0, 0, -1]))])
    acc = DiffOp(new_chart, [])
    power = DiffOp(new_chart, [R_ONE])
    for k, c in enumerate(L.coeffs):
        if k > 0:
            power = op_mul(minus_t2_D, power)
        if not c.is_zero():
            acc = acc + power.scale(_ratfn_at_inverse(c))
    return acc


def to_x1_chart(L: DiffOp) -> DiffOp:
    """Descend a w-chart operator with even coefficients to the x1-chart.

    delta acts as d/dx1, so only the coefficients change representation.
    """
    if L.chart.name != "w":
        raise ChartMismatch("expected a w-chart operator")
    return DiffOp(X1_CHART, [c.deflate() for c in L.coeffs])


def to_w_chart(L: DiffOp) -> DiffOp:
    if L.chart.name != "x1":
        raise ChartMismatch("expected an x1-chart operator")
    return DiffOp(W_CHART, [c.inflate() for c in L.coeffs])


# ---------------------------------------------------------------------------
# cyclic vector reduction
# ---------------------------------------------------------------------------


def cyclic_reduce(sys, coord: int) -> DiffOp:
    """Scalar operator annihilating coordinate ``coord`` of every solution
    of the first-order system X' = A X.

    Builds the iterated linear forms L_0 = e_coord,
    L_{j+1} = L_j A + delta(L_j), and eliminates exactly over the
    coefficient field; the first linear dependency yields the monic
    operator.  A dependency below the system dimension is legitimate
    (the operator order simply drops).
    """
    entries = sys.entries
    chart = sys.chart
    n = len(entries)
    if not (0 <= coord < n):
        raise IndexError("coordinate index out of range")

    def step(row):
        new = []
        for j in range(n):
            s = row[j].derive(chart)
            for k in range(n):
                if not row[k].is_zero():
                    s = s + row[k] * entries[k][j]
            new.append(s)
        return new

    rows = [[R_ONE if j == coord else R_ZERO for j in range(n)]]
    while True:
        dep = _dependency(rows)
        if dep is not None:
            break
        if len(rows) == n + 1:
            raise RuntimeError("no dependency found at order n; elimination bug")
        rows.append(step(rows[-1]))
    # dep: c_0 .. c_{m-1} with L_m = sum c_i L_i
    m = len(rows) - 1
    coeffs = [-c for c in dep] + [R_ONE]
    return DiffOp(chart, coeffs)


def _dependency(rows) -> Optional[list]:
    """If the last row depends on the earlier ones, return the coefficients
    expressing it; otherwise None."""
    *basis, target = rows
    if not basis:
        return [] if all(c.is_zero() for c in target) else None
    return _solve_in_span(basis, target)


def _solve_in_span(basis, target) -> Optional[list]:
    """Coefficients c with target = sum c_i basis_i, or None."""
    n = len(target)
    m = len(basis)
    # augmented transpose system: solve B^T c = target over K(x)
    rowsA = [[basis[i][j] for i in range(m)] for j in range(n)]
    rhs = list(target)
    c = [R_ZERO] * m
    piv_rows = []
    col = 0
    rowmask = list(range(n))
    used = []
    for i in range(m):
        piv = None
        for j in rowmask:
            if not rowsA[j][i].is_zero():
                piv = j
                break
        if piv is None:
            continue
        rowmask.remove(piv)
        used.append((piv, i))
        inv = rowsA[piv][i]
        for j in rowmask:
            f = rowsA[j][i]
            if not f.is_zero():
                fac = f / inv
                for k in range(i, m):
                    rowsA[j][k] = rowsA[j][k] - fac * rowsA[piv][k]
                rhs[j] = rhs[j] - fac * rhs[piv]
    # rows not used as pivots must have zero rhs for consistency
    for j in rowmask:
        if not rhs[j].is_zero():
            return None
    # back substitution in pivot order (reversed)
    for piv, i in reversed(used):
        s = rhs[piv]
        for k in range(i + 1, m):
            if not rowsA[piv][k].is_zero():
                s = s - rowsA[piv][k] * c[k]
        c[i] = s / rowsA[piv][i]
    return c


# ---------------------------------------------------------------------------
# order reduction by a known solution
# ---------------------------------------------------------------------------


def reduce_order(L: DiffOp, r0) -> DiffOp:
    """Reduce the order of L using a solution y0 given by its logarithmic
    derivative r0 = y0'/y0 (rational even when y0 itself is algebraic).

    twist(L, r0)(h) = (1/y0) L(y0 h); since L(y0) = 0 the twisted operator
    has zero constant coefficient and factors as L3 o D.  The returned L3
    annihilates z = (X/y0)' for every solution X of L.
    """
    T = twist(L, _as_ratfn(r0))
    if not T.coeff(0).is_zero():
        raise NotASolution(T)
    return DiffOp(L.chart, T.coeffs[1:])


# ---------------------------------------------------------------------------
# exact recognition of algebraic numbers (verification-gated heuristics)
# ---------------------------------------------------------------------------

_RECOG_BASIS = None


def _recognition_basis():
    global _RECOG_BASIS
    if _RECOG_BASIS is None:
        cands = [
            I,
            I_SQRT3,
            SQRT2 * I,
            SQRT2 * SQRT3 * I,
            ZETA,
            ZETA**3,
            ZETA**5,
            ZETA**7,
            SQRT2,
            SQRT3,
            SQRT2 * SQRT3,
        ]
        _RECOG_BASIS = [(g, g.to_complex()) for g in cands]
    return _RECOG_BASIS


def _rationalize(x: float, max_den: int = 48) -> Optional[Fraction]:
    # loose tolerance on purpose: clustered numeric roots (multiple exact
    # roots) arrive with ~1e-5 error, and every candidate is re-verified
    # exactly before use
    f = Fraction(x).limit_denominator(max_den)
    if abs(float(f) - x) < 1e-4:
        return f
    return None


def recognize_cycnum(z: complex) -> Optional[CycNum]:
    """Attempt to express a numeric value exactly in K as q0 + q1*g for a
    small catalog of generators g; candidates are only accepted by callers
    after exact re-verification, so false positives are harmless and false
    negatives merely downgrade a root to numeric status.
    """
    if abs(z.imag) < 1e-5:
        q = _rationalize(z.real)
        if q is not None and abs(float(q) - z.real) < 1e-4:
            return CycNum.from_rational(q)
    out = []
    for g, gz in _recognition_basis():
        if abs(gz.imag) < 1e-12:
            if abs(z.imag) < 1e-5:
                q1 = _rationalize(z.real / gz.real)
                if q1 is not None:
                    out.append(CycNum.from_rational(q1) * g)
            continue
        q1 = _rationalize(z.imag / gz.imag)
        if q1 is None:
            continue
        q0 = _rationalize(z.real - float(q1) * gz.real)
        if q0 is None:
            continue
        cand = CycNum.from_rational(q0) + CycNum.from_rational(q1) * g
        out.append(cand)
    for cand in out:
        if abs(cand.to_complex() - z) < 1e-4:
            return cand
    return None


def sqrt_in_K(d: CycNum) -> Optional[CycNum]:
    """A square root of d inside K, when one exists and is recognizable."""
    import cmath

    z = cmath.sqrt(d.to_complex())
    for cand in (recognize_cycnum(z), recognize_cycnum(-z)):
        if cand is not None and cand * cand == d:
            return cand
    return None


def kpoly_roots(p: Poly):
    """Roots of a K-coefficient polynomial with multiplicity.

    Returns (exact, numeric): exact roots are CycNum values verified by
    substitution (and deflated out, so multiplicities are honest); the
    rest are double-precision approximations of the residual factor.
    """
    exact = []
    work = p
    if work.is_zero():
        raise ValueError("zero polynomial")
    # strip the root at 0 first
    v = 0
    while work.degree >= 1 and work.coeffs[0].is_zero():
        work, _ = work.divmod(X)
        v += 1
    exact.extend([ZERO] * v)
    # rational candidates from the component gcd over Q
    changed = True
    while changed and work.degree >= 1:
        changed = False
        for r in _rational_root_candidates(work):
            val = work.eval(r)
            if isinstance(val, CycNum) and val.is_zero():
                work, _ = work.divmod(Poly([-r, ONE]))
                exact.append(r)
                changed = True
                break
        if changed:
            continue
        # numeric roots of the residual, recognition attempted one by one
        if work.degree >= 1:
            for z in _numeric_roots(work):
                cand = recognize_cycnum(z)
                if cand is not None and work.eval(cand).is_zero():
                    work, _ = work.divmod(Poly([-cand, ONE]))
                    exact.append(cand)
                    changed = True
                    break
    numeric = list(_numeric_roots(work)) if work.degree >= 1 else []
    return exact, numeric


def _rational_root_candidates(p: Poly):
    """Rational roots must annihilate every coordinate component polynomial."""
    comps = []
    for k in range(8):
        comp = [c.coeffs[k] for c in p.coeffs]
        if any(x != 0 for x in comp):
            comps.append(comp)
    # gcd over Q of the component polynomials
    g = None
    for comp in comps:
        q = Poly([CycNum.from_rational(x) for x in comp])
        g = q if g is None else poly_gcd(g, q)
        if g.degree == 0:
            return []
    if g is None or g.degree == 0:
        return []
    # integer-scale g, then p/q candidates with p | const, q | lead
    den = 1
    from math import gcd as igcd

    for c in g.coeffs:
        f = c.rational_part()
        den = den * f.denominator // igcd(den, f.denominator)
    ints = [int(c.rational_part() * den) for c in g.coeffs]
    lo = next((x for x in ints if x != 0), 0)
    hi = ints[-1]
    cands = set()
    for pn in _divisors(abs(lo)):
        for qn in _divisors(abs(hi)):
            cands.add(Fraction(pn, qn))
            cands.add(Fraction(-pn, qn))
    return [CycNum.from_rational(c) for c in sorted(cands)]


def _divisors(n: int):
    if n == 0:
        return [1]
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            out.append(n // d)
        d += 1
    return sorted(set(out))


def _numeric_roots(p: Poly):
    cs = [c.to_complex() for c in reversed(p.coeffs)]
    return [complex(z) for z in np.roots(cs)]


# ---------------------------------------------------------------------------
# indicial data and formal series
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IndicialData:
    point: object  # CycNum or the string "inf"
    regular: bool
    polynomial: Optional[Poly]  # indicial polynomial in rho, None if irregular
    exponents: tuple  # exact CycNum roots (with multiplicity)
    numeric_exponents: tuple  # residual approximations
    all_exact: bool


def _falling(k: int) -> Poly:
    """rho (rho-1) ... (rho-k+1) as a polynomial in rho."""
    acc = Poly([ONE])
    for j in range(k):
        acc = acc * Poly([rat(-j), ONE])
    return acc


def indicial_data(L: DiffOp, point) -> IndicialData:
    """Indicial polynomial and local exponents of L at a finite point or 'inf'.

    Applies the Fuchs pole-order criterion after monic normalization; an
    irregular point is reported with regular=False and no exponents.
    """
    if L.chart.name == "w":
        raise ChartMismatch("indicial data expects a plain chart")
    if point == "inf":
        return _replace_point(indicial_data(invert_variable(L), ZERO), "inf")
    pt = point if isinstance(point, CycNum) else CycNum.from_rational(point)
    if not pt.is_zero():
        Lsh = affine_subst(L, ONE, -pt, Chart(L.chart.name))
        return _replace_point(indicial_data(Lsh, ZERO), pt)
    n = L.order
    lead = L.leading()
    beta = [None] * (n + 1)
    regular = True
    for k in range(n + 1):
        m = L.coeff(k) / lead
        if m.is_zero():
            beta[k] = ZERO
            continue
        val = _valuation_at_zero(m)
        if val < -(n - k):
            regular = False
            break
        if val > -(n - k):
            beta[k] = ZERO
        else:
            beta[k] = _leading_coeff_at_zero(m, val)
    if not regular:
        return IndicialData(ZERO, False, None, (), (), True)
    chi = Poly()
    for k in range(n + 1):
        if not beta[k].is_zero():
            chi = chi + _falling(k) * beta[k]
    exact, numeric = kpoly_roots(chi)
    return IndicialData(
        ZERO, True, chi, tuple(exact), tuple(numeric), not numeric
    )


def _replace_point(d: IndicialData, point) -> IndicialData:
    return IndicialData(point, d.regular, d.polynomial, d.exponents, d.numeric_exponents, d.all_exact)


def _valuation_at_zero(f: RatFn) -> int:
    vn = next(k for k, c in enumerate(f.num.coeffs) if not c.is_zero())
    vd = next(k for k, c in enumerate(f.den.coeffs) if not c.is_zero())
    return vn - vd


def _leading_coeff_at_zero(f: RatFn, val: int) -> CycNum:
    vn = next(k for k, c in enumerate(f.num.coeffs) if not c.is_zero())
    vd = vn - val
    return f.num.coeffs[vn] / f.den.coeffs[vd]


@dataclass(frozen=True)
class FormalSeries:
    """x^rho (c_0 + c_1 x + ... + c_N x^N) at a finite point or infinity.

    The expansion variable is local: x - point for finite points, 1/x at
    infinity.  c_0 must be nonzero.
    """

    point: object
    rho: CycNum
    coeffs: tuple
    # truncation order is implicit: len(coeffs) - 1

    def __post_init__(self):
        if not self.coeffs or self.coeffs[0].is_zero():
            raise ValueError("formal series must have nonzero leading coefficient")

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1


def hypergeometric_series(a: CycNum, b: CycNum, c: CycNum, n_terms: int = 41) -> FormalSeries:
    """The Gauss 2F1(a, b; c; u) series at u = 0 with exact K coefficients,
    via c_{k+1} = c_k (a+k)(b+k) / ((c+k)(1+k))."""
    coeffs = [ONE]
    ck = ONE
    for k in range(n_terms - 1):
        kk = rat(k)
        denom = (c + kk) * rat(k + 1)
        if denom.is_zero():
            raise ZeroDivisionError("hypergeometric recurrence hits c = negative integer")
        ck = ck * (a + kk) * (b + kk) / denom
        coeffs.append(ck)
    return FormalSeries(ZERO, ZERO, tuple(coeffs))


def series_check(L: DiffOp, s: FormalSeries):
    """Apply L to the truncated series; return the residual coefficients.

    The residual is reported as a dict {exponent offset: CycNum} for every
    offset that is fully determined by the known coefficients (offsets that
    could receive contributions from truncated tail terms are omitted).
    ``annihilated to order N`` means the dict is all zeros.
    """
    if s.point == "inf":
        L = invert_variable(L)
    else:
        pt = s.point
        if not pt.is_zero():
            L = affine_subst(L, ONE, -pt, Chart(L.chart.name))
    if L.chart.name == "w":
        raise ChartMismatch("series check expects a plain chart")
    n = L.order
    # clear denominators: multiplying L on the left by a polynomial does not
    # change the kernel
    denlcm = P_ONE
    for c in L.coeffs:
        g = poly_gcd(denlcm, c.den)
        q, _ = c.den.divmod(g)
        denlcm = denlcm * q
    polys = []
    for c in L.coeffs:
        q, r = (c.num * denlcm).divmod(c.den)
        assert r.is_zero()
        polys.append(q)
    N = s.order
    rho = s.rho
    residual = {}
    max_reliable = N - n
    for k, pk in enumerate(polys):
        if pk.is_zero():
            continue
        for j, cj in enumerate(s.coeffs):
            if cj.is_zero():
                continue
            # D^k acting on x^(rho + j)
            fall = ONE
            for t in range(k):
                fall = fall * (rho + rat(j - t))
            if fall.is_zero():
                continue
            base = cj * fall
            for i, pi in enumerate(pk.coeffs):
                if pi.is_zero():
                    continue
                e = j - k + i
                if e <= max_reliable + n:  # keep a margin; filtered below
                    residual[e] = residual.get(e, ZERO) + base * pi
    reliable = {e: v for e, v in residual.items() if e <= max_reliable}
    return {e: v for e, v in sorted(reliable.items()) if not v.is_zero()}, max_reliable


# ---------------------------------------------------------------------------
# operators of the pipeline: the order-4 equation fixtures
# ---------------------------------------------------------------------------


def hyp_fixture(variant: str = "printed") -> DiffOp:
    """The order-4 scalar equation for the first normal coordinate, as an
    x1-chart fixture.

    variant='printed' keeps the last coefficient's denominator factor
    (x1 - 1)^3 exactly as displayed; variant='typofix' reads it as
    (x1 - i)^3, consistent with every other coefficient's singularity.
    Which variant (if either) annihilates (i - x1)/sqrt(x1) is decided
    empirically by the pipeline, never assumed.
    """
    x_minus_i = Poly([-I, ONE])
    a4 = R_ONE
    a3 = RatFn(Poly([6 * I, rat(-10)]), Poly([ZERO, I, rat(-1)]))
    a2 = RatFn(
        Poly([I, rat(-3)]) * Poly([23 * I, rat(-29)]),
        Poly([rat(4)]) * x_minus_i**2 * X**2,
    )
    a1 = RatFn(
        -(Poly([I, rat(-3)]) * Poly([I, rat(7)])),
        Poly([rat(4)]) * x_minus_i**2 * X**3,
    )
    if variant == "printed":
        last_den_factor = Poly([rat(-1), ONE])
    elif variant == "typofix":
        last_den_factor = x_minus_i
    else:
        raise ValueError("variant must be 'printed' or 'typofix'")
    a0 = RatFn(Poly([I, rat(3)]), Poly([rat(4)]) * last_den_factor**3 * X**4)
    return DiffOp(X1_CHART, [a0, a1, a2, a3, a4])


def hypergeometric_operator(a: CycNum, b: CycNum, c: CycNum, chart: Chart = U_CHART) -> DiffOp:
    """u(1-u) D^2 + (c - (a+b+1)u) D - ab."""
    c2 = RatFn(Poly([ZERO, ONE, rat(-1)]))
    c1 = RatFn(Poly([c, -(a + b + ONE)]))
    c0 = RatFn.const(-(a * b))
    return DiffOp(chart, [c0, c1, c2])
