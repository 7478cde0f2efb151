"""Restricted dynamics, first integral, and the exact collision branches."""

import random

import pytest

from kepgalois.cyclo import CycNum, I, ONE, SQRT2, ZERO, rat
from kepgalois.mechanics import (
    CollisionBranch,
    ansatz_residuals,
    first_integral_C,
    maximized_hamiltonian,
    paper_constants_residual,
    poisson_bracket,
    restricted_field,
    restricted_hamiltonian,
    solve_collision_ansatz,
)
from kepgalois.symexpr import Const, Var, differentiate, evaluate, exprs_equal, mul, random_point_K


def test_restricted_field_exact_forms():
    f = restricted_field()
    rng = random.Random(0)
    x1, x3, p1, p3 = Var("x1"), Var("x3"), Var("p1"), Var("p3")
    assert exprs_equal(f[0], x3, rng)
    assert exprs_equal(f[1], rat(-1) - Const(ONE) / x1**2, rng)
    assert exprs_equal(f[2], rat(-2) * p3 / x1**3, rng)
    assert exprs_equal(f[3], -p1, rng)


def test_second_order_forms():
    # xddot1 = d/dt x3 = field_x3; pddot3 = d/dt(-p1) = -field_p1 = 2 p3/x1^3
    f = restricted_field()
    rng = random.Random(5)
    assert exprs_equal(-f[2], rat(2) * Var("p3") / Var("x1") ** 3, rng)


def test_canonical_pair_bracket():
    rng = random.Random(1)
    assert exprs_equal(poisson_bracket(Var("x1"), Var("p1")), Const(ONE), rng)
    assert exprs_equal(poisson_bracket(Var("x3"), Var("p3")), Const(ONE), rng)
    assert exprs_equal(poisson_bracket(Var("x1"), Var("p3")), Const(ZERO), rng)


def test_first_integral_commutes_with_H():
    rng = random.Random(2)
    br = poisson_bracket(restricted_hamiltonian(), first_integral_C())
    assert exprs_equal(br, Const(ZERO), rng)


def test_bracket_antisymmetry_on_C():
    rng = random.Random(3)
    C = first_integral_C()
    assert exprs_equal(poisson_bracket(C, C), Const(ZERO), rng)


def test_restricted_field_is_hamiltonian_field():
    # field_i = {coord_i, H|S} under the fixed convention
    rng = random.Random(4)
    H = restricted_hamiltonian()
    f = restricted_field()
    for coord, fi in zip(("x1", "x3", "p1", "p3"), f):
        assert exprs_equal(poisson_bracket(Var(coord), H), fi, rng, points=8)


def test_homogeneity_of_maximized_H():
    """H(x, lam*p, lam*r2) = lam * H(x, p, r2) as an exact identity at
    random consistent points."""
    H = maximized_hamiltonian()
    rng = random.Random(6)
    lam = rat(3, 2)
    ok = 0
    while ok < 10:
        pt = random_point_K(rng)
        scaled = dict(pt)
        for k in ("p1", "p2", "p3", "p4", "r2"):
            scaled[k] = pt[k] * lam
        try:
            v1 = evaluate(H, scaled)
            v2 = evaluate(H, pt) * lam
        except ZeroDivisionError:
            continue
        assert (v1 - v2).is_zero()
        ok += 1


# -- collision branches ----------------------------------------------------------


def test_branches_nonempty_and_exact():
    branches = solve_collision_ansatz()
    assert branches
    for br in branches:
        assert all(r.is_zero() for r in br.field_residuals())
        assert br.c_residual().is_zero()
        assert br.h_value().is_zero()


def test_alpha_squares_to_minus_two():
    # the C = 2i constraint factors as x3^2 = -2 (x1 - i)^2 / x1
    for br in solve_collision_ansatz():
        assert br.alpha * br.alpha == rat(-2)


def test_gauge_x3_equals_sqrt2_p3():
    branches = solve_collision_ansatz()
    assert any((br.x3 - br.p3 * SQRT2).is_zero() for br in branches)


def test_two_sign_branches():
    branches = solve_collision_ansatz()
    alphas = {br.alpha for br in branches}
    assert len(branches) == 2
    assert alphas == {next(iter(alphas)), -next(iter(alphas))}


def test_paper_constants_residual_nonzero():
    res = paper_constants_residual()
    # the x1-equation and the p3-equation hold, the x3 and p1 equations fail
    fields = res["field"]
    assert fields[0].is_zero()
    assert not fields[1].is_zero()
    assert not fields[2].is_zero()
    assert fields[3].is_zero()
    assert not res["C"].is_zero()
    assert not res["H"].is_zero()


def test_branch_C_value_is_2i():
    for br in solve_collision_ansatz():
        # C - 2i == 0 along the branch
        assert br.c_residual().is_zero()
