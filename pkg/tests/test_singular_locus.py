import itertools
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from surfres.singular_locus import (UnsupportedCase, approximate_objects, coefficient_ideal, good_parameters,
                                    hasse_ideal, is_good_tau1, nu, sing_locus, tau_directrix)

from conftest import polys, ring

R0 = ring(0)
R2 = ring(2)
R3 = ring(3)


def P(text, R=R0):
    return R.parse(text)


def brute_order_at(gens, point):
    """Order after moving the point to the origin by an explicit translation."""
    R = gens[0].ring
    shift = [R.var(i) + R.const(c) for i, c in enumerate(point)]
    orders = [g.subs(shift).order() for g in gens]
    return min(orders)


def brute_sing(gens, r):
    F = gens[0].ring.field
    pts = itertools.product(list(F.elements()), repeat=gens[0].ring.nvars)
    return {p for p in pts if brute_order_at(gens, p) >= r}


def locus_points(gens, r):
    L = sing_locus(gens, r)
    F = gens[0].ring.field
    pts = itertools.product(list(F.elements()), repeat=gens[0].ring.nvars)
    return {p for p in pts if L.contains_point(p)}


def test_nu_examples():
    assert nu([P("z^2 - x^2*y")]) == 2
    assert nu([P("x"), P("y"), P("z")]) == 1
    assert nu([P("1 + x")]) == 0
    with pytest.raises(ValueError):
        nu([R0.zero()])


def test_sing_locus_examples():
    L = sing_locus([P("z^2 - x^2*y")], 2)
    assert L.germ.kind == "curve"
    assert {tuple(sorted(g.to_str() for g in L.germ.ideal))} == {("x", "z")}
    L2 = sing_locus([P("z^2 + x^2*y", R2)], 2)
    assert L2.germ.kind == "curve"
    assert sing_locus([P("z^2 - x^2*y")], 3).germ.kind == "empty"


def test_sing_locus_matches_brute_force_over_f5():
    R5 = ring(5)
    g = [R5.parse("z^2 - x^2*y")]
    assert locus_points(g, 2) == brute_sing(g, 2)


def test_sing_locus_matches_brute_force_over_f4():
    R4 = ring(2, 2)
    g = [R4.parse("z^2 + x^2*y")]
    pts = locus_points(g, 2)
    assert pts == brute_sing(g, 2)
    assert pts == {(0, b, 0) for b in R4.field.elements()}


@pytest.mark.parametrize("q", [(2, 1), (3, 1), (5, 1)])
def test_sing_locus_oracle_on_random_ideals(q):
    R = ring(*q)

    @given(st.lists(polys(R, max_terms=4, max_deg=3), min_size=1, max_size=2), st.integers(1, 3))
    def check(gens, r):
        gens = [g for g in gens if g.terms]
        if not gens:
            return
        assert locus_points(gens, r) == brute_sing(gens, r)
    check()


def test_hasse_ideal_has_all_low_derivatives():
    J = hasse_ideal([P("x^3")], 3)
    assert set(g.to_str() for g in J if g.terms) >= {"x^3", "3*x^2", "3*x"}


def test_tau_examples():
    d = tau_directrix([P("z^2 - x^2*y")])
    assert d.tau == 1 and d.forms == [P("z")]
    assert tau_directrix([P("x^2 + y^2 + z^2")]).tau == 3
    d2 = tau_directrix([P("x^2 + y^2 + z^2", R2)])
    assert d2.tau == 1
    assert d2.forms[0] ** 2 == P("x^2 + y^2 + z^2", R2)


def test_tau_minimality_against_subspace_enumeration():
    # over F_3 every linear subspace can be listed; no smaller one carries the leading forms
    f = P("x^2 + 2*y^2 + z^3", R3)
    d = tau_directrix([f])
    assert d.tau == 2
    for w in itertools.product(range(3), repeat=3):
        if not any(w):
            continue
        shift = [R3.var(i) + R3.const(c) if c else R3.var(i) for i, c in enumerate(w)]
        L = f.leading_form()
        invariant = L.subs(shift) == L
        # tau = 3 - dim(invariant directions); only multiples of (0, 0, 1) leave x^2 + 2y^2 alone
        assert invariant == (w[0] == 0 and w[1] == 0)


def test_approximate_objects():
    forms, h = approximate_objects([P("z^2 - x^2*y")])
    assert forms == [P("z")] and h == P("z")
    forms2, h2 = approximate_objects([P("x^2 + y^2 + z^2", R2)])
    assert h2 ** 2 == P("x^2 + y^2 + z^2", R2)
    forms3, _ = approximate_objects([P("x^2 + y^2 + z^2")])
    assert len(forms3) == 3
    with pytest.raises(UnsupportedCase):
        approximate_objects([P("z^2 - x^3")], center=[P("x"), P("y")])


def test_good_parameters():
    assert good_parameters([P("z^2 - x^2*y")]).is_identity()
    f = P("(z + x)^2 - x^3")
    sub = good_parameters([f])
    g = sub.apply(f)
    assert is_good_tau1([g])
    assert g.leading_form() == P("z^2")
    h = P("x^2 + y^2 + z^5")
    assert tau_directrix([h]).tau == 2
    assert good_parameters([h]).is_identity()
    assert nu([h.subs({2: R0.zero()})]) == 2


def test_coefficient_ideal_examples():
    R2v = lambda t, C: C[0].ring.parse(t)  # noqa: E731
    C = coefficient_ideal([P("z^2 - x^3")], 2, 2)
    assert C == [R2v("-x^3", C)]
    C = coefficient_ideal([P("z^2 + x*z + y^3")], 2, 2)
    assert sorted(c.to_str() for c in C) == ["x^2", "y^3"]
    assert all(c.is_zero() for c in coefficient_ideal([P("z^2")], 2, 2))


def _coefficient_order(C):
    live = [c for c in C if c.terms]
    return math.inf if not live else min(c.order() for c in live)


@given(polys(R0, max_terms=4, max_deg=4), st.sampled_from([2, 3]))
def test_coefficient_ideal_equivalence(f, r):
    # write H = z^r + f with f free of high z powers; nu(H) >= r iff nu(C(H)) >= r!
    R = f.ring
    H = R.var(2) ** r + f
    C = coefficient_ideal([H], 2, r)
    assert (nu([H]) >= r) == (_coefficient_order(C) >= math.factorial(r))
