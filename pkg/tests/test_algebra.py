import math
from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from surfres.algebra import (QQ, FieldError, ParseError, Ring, TruncationError, binom_mod, make_field,
                             parse_poly)
from surfres.algebra.fields import extension, field_from_spec, is_irreducible, parse_modulus
from surfres.algebra.linalg import inverse, kernel, rank, rref, solve

from conftest import XYZ, polys, ring

R0 = ring(0)
R2 = ring(2)
R3 = ring(3)
R5 = ring(5)


def to_sympy(f):
    x, y, z = sympy.symbols("x y z")
    gens = (x, y, z)[: f.nvars]
    expr = 0
    for e, c in f.terms.items():
        coef = sympy.Rational(c.numerator, c.denominator) if isinstance(c, Fraction) else int(c)
        expr += coef * sympy.prod(g ** k for g, k in zip(gens, e))
    p = f.field.char
    return sympy.Poly(expr, *gens, modulus=p) if p else sympy.Poly(expr, *gens, domain="QQ")


# order, leading form

def test_order_examples():
    assert R0.parse("x^2*y + z^4").order() == 3
    assert R0.parse("1 + x").order() == 0
    assert R0.zero().order() == math.inf


def test_order_of_jet_past_reliable_degree_raises():
    with pytest.raises(TruncationError):
        R0.zero(trunc=4).order()


def test_leading_form_examples():
    assert R0.parse("z^2 - x^2*y").leading_form() == R0.parse("z^2")
    f = R0.parse("x^2 + y^2 + z^2")
    assert f.leading_form() == f
    assert R0.parse("x + x^2").leading_form() == R0.parse("x")
    with pytest.raises(ValueError):
        R0.zero().leading_form()


# Hasse derivatives

def test_hasse_examples():
    assert R0.parse("x^2").derivative(0, 1) == R0.parse("2*x")
    assert R2.parse("x^2").derivative(0, 1).is_zero()
    assert R2.parse("x^2").derivative(0, 2) == R2.one()


def test_hasse_lowers_reliable_degree():
    f = R0.parse("x^3 + y", trunc=5)
    assert f.derivative(0, 2).trunc == 3


@given(st.integers(0, 12), st.integers(0, 6), st.integers(0, 6), st.sampled_from([0, 2, 3, 5]))
def test_divided_power_law(n, i, j, p):
    R = ring(p)
    x = R.var(0)
    f = x ** n
    lhs = f.derivative(0, j).derivative(0, i)
    rhs = f.derivative(0, i + j).scale(R.field.from_int(math.comb(i + j, i)))
    assert lhs == rhs


# substitution

def test_substitution_examples():
    f = R2.parse("z^2 + x^2*y^2")
    assert f.subs({2: R2.parse("z + x*y")}) == R2.parse("z^2")
    g = R0.parse("z^2 - x^2*y")
    img = [R0.parse("x"), R0.parse("x*y"), R0.parse("x*z")]
    assert g.subs(img) == R0.parse("x^2*(z^2 - x*y)")
    assert g.subs(R0.gens()) == g


def test_substitution_truncation_follows_orders():
    f = R0.parse("x + y^2", trunc=4)
    h = f.subs({0: R0.parse("x*y")})
    assert h.trunc == 4
    assert h.agrees_with(R0.parse("x*y + y^2"))


@given(polys(R3), polys(R3), polys(R3, max_terms=3, max_deg=2), polys(R3, max_terms=3, max_deg=2))
def test_substitution_is_a_ring_map(f, g, a, b):
    img = [a, b, R3.var(2)]
    assert (f + g).subs(img) == f.subs(img) + g.subs(img)
    assert (f * g).subs(img) == f.subs(img) * g.subs(img)


# arithmetic against an independent implementation

@pytest.mark.parametrize("R", [R0, R2, R5], ids=["Q", "F2", "F5"])
def test_product_matches_sympy(R):
    f = R.parse("x^3 - 2*x*y + z^2 + 1")
    g = R.parse("y^2 + 3*x*z - z")
    assert to_sympy(f * g) == to_sympy(f) * to_sympy(g)
    assert to_sympy(f ** 3) == to_sympy(f) ** 3


@given(polys(R5), polys(R5))
def test_sum_and_product_match_sympy_over_f5(f, g):
    assert to_sympy(f + g) == to_sympy(f) + to_sympy(g)
    assert to_sympy(f * g) == to_sympy(f) * to_sympy(g)


@given(polys(R0, min_order=0), polys(R0, min_order=0))
def test_order_is_additive(f, g):
    if f.is_zero() or g.is_zero():
        return
    assert (f * g).order() == f.order() + g.order()


@pytest.mark.parametrize("p", [2, 3, 5])
def test_frobenius_on_random_polys(p):
    R = ring(p)

    @given(polys(R), polys(R))
    def check(a, b):
        assert (a + b) ** p == a ** p + b ** p
    check()


# binomials mod p

def test_binom_examples():
    assert binom_mod(4, 2, 2) == 0
    assert binom_mod(4, 4, 2) == 1
    assert binom_mod(6, 3, 3) == 2


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_binom_matches_factorials(p):
    for r in range(513):
        for lam in range(r + 1):
            assert binom_mod(r, lam, p) == math.comb(r, lam) % p


# fields

def test_prime_field_arithmetic():
    F = make_field(7)
    assert F.mul(3, 5) == 1
    assert F.inv(3) == 5
    assert F.pth_root(F.pow(4, 7)) == 4


def test_extension_field_has_q_elements_and_frobenius():
    F = make_field(3, 2)
    elems = list(F.elements())
    assert len(elems) == 9
    assert sorted(F.pow(a, 3) for a in elems) == sorted(elems)
    for a in elems:
        if a:
            assert F.mul(a, F.inv(a)) == F.one
        assert F.pth_root(F.pow(a, 3)) == a


def test_f4_spec_round_trip():
    F = make_field(2, 2)
    spec = F.spec()
    assert spec == {"char": "2^2", "irreducible": "a^2 + a + 1"}
    G = field_from_spec(spec)
    assert G.spec() == spec
    assert field_from_spec({"char": "0"}) is QQ or field_from_spec({"char": "0"}).char == 0


def test_bad_field_specs():
    with pytest.raises((FieldError, ValueError)):
        field_from_spec({"char": "4"})
    with pytest.raises((FieldError, ValueError)):
        field_from_spec({"char": "2^2", "irreducible": "a^2 + 1"})


def test_modulus_parsing_and_irreducibility():
    assert parse_modulus("a^2 + a + 1", 2) == (1, 1, 1)
    assert is_irreducible((1, 1, 1), 2)
    assert not is_irreducible((1, 0, 1), 2)


def test_extension_embeds_base_field():
    F = make_field(2, 2)
    big, embed = extension(F, 2)
    assert len(list(big.elements())) == 16
    a = F.gen()
    assert big.add(big.mul(embed(a), embed(a)), big.add(embed(a), big.one)) == big.zero


# parser

def test_parse_and_print_round_trip():
    f = R0.parse("(x - 1/2*y)^2 + 3*z")
    assert R0.parse(f.to_str()) == f
    F4 = Ring(make_field(2, 2), XYZ)
    g = F4.parse("a*x^2 + (a + 1)*y")
    assert F4.parse(g.to_str()) == g


@pytest.mark.parametrize("text", ["x^^2", "x +", "w + 1", "x^y", "(x + y"])
def test_parse_errors_carry_a_location(text):
    with pytest.raises(ParseError):
        parse_poly(text, R0)


# linear algebra

def test_rref_rank_kernel_solve_inverse():
    F = QQ
    rows = [[F.coerce(v) for v in r] for r in ([1, 2, 3], [2, 4, 6], [1, 0, 1])]
    assert rank(rows, F) == 2
    red, piv = rref(rows, F)
    assert piv == [0, 1]
    for v in kernel(rows, 3, F):
        assert all(sum(a * b for a, b in zip(r, v)) == 0 for r in rows)
    sol = solve(rows, [F.coerce(6), F.coerce(12), F.coerce(2)], F)
    assert [sum(a * b for a, b in zip(r, sol)) for r in rows] == [6, 12, 2]
    m = [[F.coerce(2), F.coerce(1)], [F.coerce(1), F.coerce(1)]]
    inv = inverse(m, F)
    assert inv == [[1, -1], [-1, 2]]
