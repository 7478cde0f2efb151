"""Operator algebra: Ore products, division, twists, substitutions,
cyclic reduction, order reduction, indicial data, series checks."""

import random
from fractions import Fraction

import pytest

from kepgalois.cyclo import CycNum, I, I_SQRT3, ONE, ZERO, rat
from kepgalois.opalgebra import (
    DiffOp,
    NotASolution,
    affine_subst,
    cyclic_reduce,
    hyp_fixture,
    hypergeometric_operator,
    hypergeometric_series,
    indicial_data,
    invert_variable,
    kpoly_roots,
    op_D,
    op_mul,
    recognize_cycnum,
    reduce_order,
    right_divide,
    series_check,
    sqrt_in_K,
    twist,
    FormalSeries,
)
from kepgalois.ratfn import P_ONE, Poly, R_ONE, R_ZERO, RatFn, W_CHART, X, X1_CHART


D = op_D(X1_CHART)
x = RatFn(X)


def mono(*coeffs):
    return DiffOp(X1_CHART, [RatFn.const(c) if not isinstance(c, (RatFn, Poly)) else c for c in coeffs])


class _Sys:
    def __init__(self, entries, chart=X1_CHART):
        self.entries = entries
        self.chart = chart


def _rand_ratfn(rng, deg=1):
    def rc():
        coords = [Fraction(0)] * 8
        coords[rng.randrange(8)] = Fraction(rng.randint(-2, 2), rng.randint(1, 2))
        return CycNum(coords)

    num = Poly([rc() for _ in range(rng.randint(1, deg + 1))])
    den = Poly()
    while den.is_zero():
        den = Poly([rc() for _ in range(rng.randint(1, deg + 1))])
    return RatFn(num, den)


def _rand_op(rng, order=2):
    cs = [_rand_ratfn(rng) for _ in range(order)]
    return DiffOp(X1_CHART, cs + [R_ONE])


# -- multiplication ---------------------------------------------------------


def test_leibniz_on_generators():
    # D o x = x D + 1
    L = op_mul(D, DiffOp(X1_CHART, [x]))
    assert L == DiffOp(X1_CHART, [R_ONE, x])


def test_mul_by_identity():
    rng = random.Random(3)
    L = _rand_op(rng, 3)
    one = DiffOp(X1_CHART, [R_ONE])
    assert op_mul(L, one) == L
    assert op_mul(one, L) == L


def test_product_applied_to_function():
    # (D - 1/x)(D + 1/x) checked by acting on x^2
    L1 = DiffOp(X1_CHART, [-1 / x, R_ONE])
    L2 = DiffOp(X1_CHART, [1 / x, R_ONE])
    P = op_mul(L1, L2)
    f = RatFn(X) ** 2
    assert P.apply(f) == L1.apply(L2.apply(f))
    assert P.order == 2
    assert P.leading() == R_ONE


def test_ore_associativity_random():
    rng = random.Random(17)
    for _ in range(5):
        L1, L2, L3 = (_rand_op(rng, 1) for _ in range(3))
        assert op_mul(op_mul(L1, L2), L3) == op_mul(L1, op_mul(L2, L3))


def test_order_and_leading_multiplicative():
    rng = random.Random(23)
    L1, L2 = _rand_op(rng, 2), _rand_op(rng, 3)
    P = op_mul(L1, L2)
    assert P.order == 5
    assert P.leading() == L1.leading() * L2.leading()


# -- right division -----------------------------------------------------------


def test_divide_by_self():
    rng = random.Random(5)
    L = _rand_op(rng, 2)
    Q, R = right_divide(L, L)
    assert Q == DiffOp(X1_CHART, [R_ONE])
    assert R.is_zero()


def test_divide_constructed_factor():
    # L = minimal operator of {x, x^2}: D^2 - (2/x) D + 2/x^2; x solves D - 1/x
    L = DiffOp(X1_CHART, [2 / (x * x), -2 / x, R_ONE])
    R = DiffOp(X1_CHART, [-1 / x, R_ONE])
    Q, Rem = right_divide(L, R)
    assert Rem.is_zero()
    assert op_mul(Q, R) == L
    # sanity: both claimed solutions annihilated
    assert L.apply(x).is_zero()
    assert L.apply(x * x).is_zero()


def test_divide_reconstruction_random():
    rng = random.Random(11)
    for _ in range(4):
        L = _rand_op(rng, 3)
        R = _rand_op(rng, rng.randint(1, 2))
        Q, Rem = right_divide(L, R)
        assert (Rem.is_zero() or Rem.order < R.order)
        assert op_mul(Q, R) + Rem == L


# -- twist -----------------------------------------------------------------------


def test_twist_first_order():
    r = 1 / x
    assert twist(D, r) == DiffOp(X1_CHART, [r, R_ONE])


def test_twist_involution():
    rng = random.Random(7)
    L = _rand_op(rng, 2)
    r = _rand_ratfn(rng)
    assert twist(twist(L, r), -r) == L


def test_twist_moves_sqrt_solution():
    # sqrt(x) solves D - 1/(2x); twisting by r = 1/(2x) moves it to constants
    L = DiffOp(X1_CHART, [RatFn(Poly([rat(-1, 2)]), X), R_ONE])
    T = twist(L, RatFn(Poly([rat(1, 2)]), X))
    assert T.apply(R_ONE).is_zero()


# -- affine substitution and inversion -------------------------------------------


def test_affine_first_order():
    # u = i x + 1: D_x becomes i D_u
    L = affine_subst(D, I, ONE)
    assert L.coeffs == (R_ZERO, RatFn.const(I))


def test_affine_round_trip():
    rng = random.Random(13)
    L = _rand_op(rng, 2)
    a, b = I, rat(3)
    M = affine_subst(L, a, b)
    back = affine_subst(M, a.inverse(), -b * a.inverse(), X1_CHART)
    assert back == L


def test_affine_moves_singularities():
    # x1 = -i(u - 1) maps {0, i} to {1, 0} for the order-4 fixture
    L = hyp_fixture("typofix")
    M = affine_subst(L, I, ONE)
    lead_den_roots, numeric = kpoly_roots(M.monic().coeff(0).den)
    assert not numeric
    assert set(lead_den_roots) == {ZERO, ONE}


def test_invert_variable_euler():
    # Euler operator x^2 D^2 + x D - 1 is invariant in form under x -> 1/t
    L = DiffOp(X1_CHART, [RatFn.const(rat(-1)), RatFn(X), RatFn(X**2)])
    M = invert_variable(L)
    d = indicial_data(M, ZERO)
    assert d.regular
    assert set(d.exponents) == {rat(1), rat(-1)}


# -- cyclic reduction ---------------------------------------------------------------


def test_cyclic_reduce_diagonal():
    sys = _Sys([[1 / x, R_ZERO], [R_ZERO, 2 / x]])
    L = cyclic_reduce(sys, 0)
    assert L == DiffOp(X1_CHART, [-1 / x, R_ONE])


def test_cyclic_reduce_companion_round_trip():
    # companion of D^2 - x
    sys = _Sys([[R_ZERO, R_ONE], [x, R_ZERO]])
    L = cyclic_reduce(sys, 0)
    assert L == DiffOp(X1_CHART, [-x, R_ZERO, R_ONE])


def test_cyclic_reduce_numeric_oracle():
    """Trajectory of coordinate k of a random 3x3 rational system matches the
    trajectory of the scalar ODE cyclic_reduce returns, integrated from
    matched initial data (classical RK4, fine steps, away from poles)."""
    rng = random.Random(2025)
    entries = [[_rand_ratfn(rng, 1) for _ in range(3)] for _ in range(3)]
    sys = _Sys(entries)
    L = cyclic_reduce(sys, 0)
    n = L.order
    assert 1 <= n <= 3

    # numeric RHS for the system and for the companion form of L
    Anum = [[c for c in row] for row in entries]

    def sys_rhs(t, y):
        return [sum(Anum[i][j].eval(complex(t)) * y[j] for j in range(3)) for i in range(3)]

    Lm = L.monic()

    def scal_rhs(t, y):
        out = list(y[1:]) + [0j]
        out[-1] = -sum(Lm.coeff(k).eval(complex(t)) * y[k] for k in range(n))
        return out

    def rk4(rhs, y0, t0, t1, steps):
        y = list(y0)
        h = (t1 - t0) / steps
        t = t0
        for _ in range(steps):
            k1 = rhs(t, y)
            k2 = rhs(t + h / 2, [a + h / 2 * b for a, b in zip(y, k1)])
            k3 = rhs(t + h / 2, [a + h / 2 * b for a, b in zip(y, k2)])
            k4 = rhs(t + h, [a + h * b for a, b in zip(y, k3)])
            y = [a + h / 6 * (b + 2 * c + 2 * d + e) for a, b, c, d, e in zip(y, k1, k2, k3, k4)]
            t += h
        return y

    # matched initial data at t0: scalar state = derivatives of coordinate 0,
    # from the iterated linear forms
    t0, t1 = 2.0, 2.2
    y0 = [0.3 + 0.1j, -0.2j, 0.5]
    rows = [[R_ONE, R_ZERO, R_ZERO]]
    for _ in range(n - 1):
        last = rows[-1]
        rows.append(
            [
                last[j].derive(X1_CHART)
                + sum((last[k] * entries[k][j] for k in range(3)), R_ZERO)
                for j in range(3)
            ]
        )
    z0 = [sum(r[j].eval(complex(t0)) * y0[j] for j in range(3)) for r in rows]
    yf = rk4(sys_rhs, y0, t0, t1, 4000)
    zf = rk4(scal_rhs, z0, t0, t1, 4000)
    assert abs(yf[0] - zf[0]) < 1e-8


def test_cyclic_reduce_even_in_w():
    """A3-shaped systems in the w-chart reduce to operators rational in x1."""
    from kepgalois.variational import paper_normal_block_fixture

    sys = paper_normal_block_fixture()
    L = cyclic_reduce(sys, 0)
    assert L.order == 4
    for c in L.coeffs:
        assert c.is_even()


# -- order reduction -----------------------------------------------------------------


def test_reduce_order_basic():
    # L = D^2 has solutions {1, x}; reduce by y0 = x (r0 = 1/x):
    # z = (X/x)' satisfies x z' + 2 z = 0
    L = DiffOp(X1_CHART, [R_ZERO, R_ZERO, R_ONE])
    L3 = reduce_order(L, 1 / x)
    got = L3.monic()
    assert got == DiffOp(X1_CHART, [2 / x, R_ONE])


def test_reduce_order_rejects_non_solution():
    L = DiffOp(X1_CHART, [R_ONE, R_ZERO, R_ONE])  # D^2 + 1
    with pytest.raises(NotASolution):
        reduce_order(L, 1 / x)


def test_reduce_order_constructed_kernel():
    # minimal operator of {x, x^2}; reduce by y0 = x; z = (x^2/x)' = 1 must
    # be annihilated by the reduced operator
    L = DiffOp(X1_CHART, [2 / (x * x), -2 / x, R_ONE])
    L1 = reduce_order(L, 1 / x)
    assert L1.apply(R_ONE).is_zero()


# -- indicial data ---------------------------------------------------------------------


def test_indicial_euler():
    L = DiffOp(X1_CHART, [RatFn.const(rat(-1)), RatFn(X), RatFn(X**2)])
    d = indicial_data(L, ZERO)
    assert d.regular and d.all_exact
    assert set(d.exponents) == {rat(1), rat(-1)}


def test_indicial_hyp_contains_minus_half():
    d = indicial_data(hyp_fixture("typofix"), ZERO)
    assert d.regular
    assert rat(-1, 2) in d.exponents


def test_indicial_hypergeometric():
    a, b, c = rat(1, 3), rat(1, 5), rat(1, 2)
    HG = hypergeometric_operator(a, b, c)
    d0 = indicial_data(HG, ZERO)
    assert set(d0.exponents) == {ZERO, ONE - c}
    d1 = indicial_data(HG, ONE)
    assert set(d1.exponents) == {ZERO, c - a - b}
    dinf = indicial_data(HG, "inf")
    assert set(dinf.exponents) == {a, b}


def test_indicial_irregular_flagged():
    # Airy-type D^2 - x is irregular at infinity
    L = DiffOp(X1_CHART, [-x, R_ZERO, R_ONE])
    d = indicial_data(L, "inf")
    assert not d.regular


def test_ordinary_point():
    L = DiffOp(X1_CHART, [R_ONE, R_ZERO, R_ONE])
    d = indicial_data(L, ZERO)
    assert d.regular
    assert set(d.exponents) == {ZERO, ONE}


# -- series ---------------------------------------------------------------------------------


def test_series_check_exponential():
    coeffs = []
    f = Fraction(1)
    for k in range(41):
        coeffs.append(CycNum.from_rational(f))
        f /= k + 1
    s = FormalSeries(ZERO, ZERO, tuple(coeffs))
    L = DiffOp(X1_CHART, [RatFn.const(rat(-1)), R_ONE])  # D - 1
    bad, upto = series_check(L, s)
    assert bad == {}
    assert upto >= 39


def test_series_check_detects_perturbation():
    coeffs = []
    f = Fraction(1)
    for k in range(41):
        coeffs.append(CycNum.from_rational(f))
        f /= k + 1
    coeffs[7] = coeffs[7] + 1
    s = FormalSeries(ZERO, ZERO, tuple(coeffs))
    L = DiffOp(X1_CHART, [RatFn.const(rat(-1)), R_ONE])
    bad, _ = series_check(L, s)
    assert min(bad) in (6, 7)


def test_hypergeometric_series_solves_its_operator():
    a, b, c = rat(1, 3), rat(1, 5), rat(1, 2)
    s = hypergeometric_series(a, b, c, 41)
    HG = hypergeometric_operator(a, b, c, X1_CHART)
    bad, upto = series_check(HG, s)
    assert bad == {} and upto >= 38


# -- recognition helpers ------------------------------------------------------------------------


def test_sqrt_in_K():
    s = sqrt_in_K(rat(-2))
    assert s is not None and s * s == rat(-2)
    s3 = sqrt_in_K(rat(-3))
    assert s3 is not None and s3 * s3 == rat(-3)
    assert sqrt_in_K(rat(5)) is None  # sqrt(5) is not in Q(zeta24)


def test_kpoly_roots_quadratic_in_K():
    # rho^2 - rho + 1 has roots (1 +/- i sqrt3)/2
    p = Poly([ONE, rat(-1), ONE])
    exact, numeric = kpoly_roots(p)
    assert not numeric
    half = rat(1, 2)
    assert set(exact) == {half + half * I_SQRT3, half - half * I_SQRT3}


def test_kpoly_roots_multiplicity():
    p = Poly([-I, ONE]) ** 3 * X**2
    exact, numeric = kpoly_roots(p)
    assert not numeric
    assert sorted(str(e) for e in exact) == sorted(str(e) for e in [ZERO, ZERO, I, I, I])


def test_recognize_simple_values():
    assert recognize_cycnum(0.5 + 0j) == rat(1, 2)
    v = recognize_cycnum(complex(0, 3**0.5))
    assert v == I_SQRT3
