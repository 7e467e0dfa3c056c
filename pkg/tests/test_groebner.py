import itertools

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from surfres.algebra.linalg import solve
from surfres.groebner import (GroebnerBudgetError, divide_exact, eliminate, gcd, groebner, intersect,
                              radical_principal, saturate_by)

from conftest import polys, ring
from test_algebra import to_sympy

R0 = ring(0)
R2 = ring(2)
R3 = ring(3)


def P(text, R=R0):
    return R.parse(text)


def test_linear_ideal():
    G = groebner([P("x"), P("x + y")])
    assert sorted(g.to_str() for g in G.polys) == ["x", "y"]


def test_elimination_example():
    assert eliminate([P("z - x^2"), P("z - y")], [2]) == [P("x^2 - y")]
    assert eliminate([P("z")], [2]) == []
    assert eliminate([P("x - 1"), P("y"), P("z")], [1, 2]) == [P("x - 1")]


def test_unit_ideal():
    G = groebner([R0.one()])
    assert G.is_unit()
    assert G.polys == [R0.one()]
    assert G.dimension() == -1


def test_membership_examples():
    assert groebner([P("x"), P("x + y")]).contains(P("y"))
    assert groebner([P("x^2 + y^3"), P("y")]).contains(P("x^2"))
    assert not groebner([P("x^2"), P("y")]).contains(P("x"))


def test_dimension_examples():
    assert groebner([P("x"), P("z")]).dimension() == 1
    assert groebner([P("x"), P("y"), P("z")]).dimension() == 0
    assert groebner([P("z^2 - x^2*y"), P("z"), P("x*y"), P("x^2")]).dimension() == 1


def _frac(c):
    from fractions import Fraction
    c = sympy.Rational(c)
    return Fraction(int(c.p), int(c.q))


def _sympy_basis(gens, p):
    x, y, z = sympy.symbols("x y z")
    exprs = [to_sympy(g).as_expr() for g in gens]
    kw = {"modulus": p} if p else {"domain": "QQ"}
    return sympy.groebner(exprs, x, y, z, order="grevlex", **kw)


@pytest.mark.parametrize("p", [0, 2, 3])
def test_reduced_basis_matches_sympy(p):
    R = ring(p)

    @given(st.lists(polys(R, max_terms=3, max_deg=3), min_size=1, max_size=3))
    def check(gens):
        gens = [g for g in gens if g.terms]
        if not gens:
            return
        ours = groebner(gens)
        theirs = _sympy_basis(gens, p)
        if ours.is_unit():
            assert list(theirs.exprs) == [1]
            return
        # reduced bases are unique: same size, and each generates the other's ideal
        assert len(ours.polys) == len(theirs.exprs)
        assert all(theirs.contains(to_sympy(g).as_expr()) for g in ours.polys)
        for q in theirs.exprs:
            back = R.zero()
            for mon, c in sympy.Poly(q, *sympy.symbols("x y z")).terms():
                back = back + R.monomial(mon, R.field.coerce(int(c) % p) if p else _frac(c))
            assert ours.contains(back)
    check()


def _monomials_upto(R, d):
    for total in range(d + 1):
        for e in itertools.product(range(total + 1), repeat=R.nvars):
            if sum(e) == total:
                yield e


def linear_membership(f, gens, bound):
    """f in the ideal iff f = sum m_i g_j for monomials m with deg(m g_j) <= bound (linear algebra)."""
    R = f.ring
    F = R.field
    columns = []
    for g in gens:
        for m in _monomials_upto(R, bound - g.degree()):
            columns.append(R.monomial(m) * g)
    mons = sorted({e for c in columns for e in c.terms} | set(f.terms))
    rows = [[c.coeff(e) for c in columns] for e in mons]
    rhs = [f.coeff(e) for e in mons]
    if not columns:
        return f.is_zero()
    return solve(rows, rhs, F) is not None


@given(st.lists(polys(R3, max_terms=3, max_deg=2), min_size=1, max_size=2), polys(R3, max_terms=3, max_deg=2),
       polys(R3, max_terms=2, max_deg=2))
def test_membership_agrees_with_linear_algebra(gens, a, b):
    gens = [g for g in gens if g.terms]
    if not gens:
        return
    G = groebner(gens)
    f = a * gens[0] + (b * gens[-1] if len(gens) > 1 else b)
    if not f.terms or f.degree() > 8:
        return
    # f in I can certify with degree bound 8 only when a representation of that degree exists
    if linear_membership(f, gens, 8):
        assert G.contains(f)
    if not G.contains(f):
        assert not linear_membership(f, gens, 8)


def min_vertex_cover(supports, n):
    for k in range(n + 1):
        for cover in itertools.combinations(range(n), k):
            if all(any(e[i] for i in cover) for e in supports):
                return k
    return n


@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3)).filter(any),
                min_size=1, max_size=4))
def test_monomial_dimension_is_n_minus_vertex_cover(exps):
    G = groebner([R0.monomial(e) for e in exps])
    assert G.dimension() == 3 - min_vertex_cover(exps, 3)


def test_normal_form_is_deterministic():
    G = groebner([P("x^2 - y"), P("x*y - z")])
    f = P("x^3*y + z^2 + x")
    assert G.reduce(f) == G.reduce(f)
    assert G.reduce(f - G.reduce(f)).is_zero()


def test_budget_error():
    with pytest.raises(GroebnerBudgetError):
        groebner([P("x^3 - y*z^2 + 1"), P("y^3 - x*z + 2"), P("z^3 - x*y^2 + x")], max_pairs=2)


def test_saturation_and_intersection():
    assert groebner(saturate_by([P("x*y"), P("x*z")], P("x"))).polys == groebner([P("y"), P("z")]).polys
    I = intersect([P("x")], [P("y")])
    assert groebner(I).polys == [P("x*y")]


def test_division_gcd_radical():
    f = P("(x + y)^2*(z - x)")
    assert divide_exact(f, P("x + y")) == P("(x + y)*(z - x)")
    with pytest.raises(ArithmeticError):
        divide_exact(f, P("x - y"))
    g = gcd(f, P("(x + y)*(z + 1)"))
    assert g == P("x + y") or g == P("-x - y")
    assert radical_principal(P("x^3*(y - 1)^2", R2)) == P("x*(y - 1)", R2) or \
        radical_principal(P("x^3*(y - 1)^2", R2)) == P("x*y + x", R2)
