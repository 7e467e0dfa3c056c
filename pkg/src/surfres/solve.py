"""Rational points of small polynomial systems, by enumeration (finite fields) or elimination (Q)."""
from __future__ import annotations

from itertools import product
from typing import Sequence

import sympy

from .algebra import Poly
from .groebner import groebner


class ExtensionNeeded(Exception):
    """The locus is nonempty over the algebraic closure but has no rational point."""

    def __init__(self, message: str, minimal_polynomial: str = ""):
        super().__init__(message)
        self.minimal_polynomial = minimal_polynomial


def enumerate_points(gens: Sequence[Poly], free: Sequence[int], fixed: dict[int, object] | None = None) -> list[tuple]:
    """All points over a finite field with the ``free`` coordinates ranging and the rest fixed."""
    ring = gens[0].ring
    F = ring.field
    fixed = fixed or {}
    elems = list(F.elements())
    out = []
    for vals in product(elems, repeat=len(free)):
        pt = [fixed.get(i, F.zero) for i in range(ring.nvars)]
        for i, v in zip(free, vals):
            pt[i] = v
        if all(F.is_zero(g.evaluate(pt)) for g in gens):
            out.append(tuple(pt))
    return out


def _rational_roots(f: Poly, var: int) -> list:
    """Rational roots of a univariate polynomial over Q."""
    t = sympy.Symbol("t")
    deg = max(e[var] for e in f.terms)
    coeffs = [sympy.Rational(0)] * (deg + 1)
    for e, c in f.terms.items():
        coeffs[deg - e[var]] = sympy.Rational(c.numerator, c.denominator)
    roots = sympy.Poly(coeffs, t, domain=sympy.QQ).ground_roots()
    from fractions import Fraction
    return sorted(Fraction(int(r.p), int(r.q)) for r in roots)


def _univariate_roots(f: Poly, var: int) -> list:
    F = f.field
    if F.is_finite():
        out = []
        for a in F.elements():
            pt = [F.zero] * f.nvars
            pt[var] = a
            if F.is_zero(f.evaluate(pt)):
                out.append(a)
        return out
    return _rational_roots(f, var)


def solve_zero_dimensional(gens: Sequence[Poly], free: Sequence[int], fixed: dict[int, object] | None = None) -> list[tuple]:
    """Rational solutions of a system in the ``free`` variables, other variables set to ``fixed`` values.

    Works by a lexicographic basis and back substitution.  Raises ``ValueError``
    when the system is not zero-dimensional in the free variables.
    """
    ring = gens[0].ring
    F = ring.field
    fixed = dict(fixed or {})
    free = list(free)
    for i in range(ring.nvars):
        if i not in free:
            fixed.setdefault(i, F.zero)
    pinned = {i: ring.const(v) for i, v in fixed.items()}
    system = [g.subs(pinned) if pinned else g for g in gens]
    system = [g for g in system if g.terms]
    if any(not g.variables() for g in system):
        return []
    if not free:
        return [tuple(fixed.get(i, F.zero) for i in range(ring.nvars))] if not system else []
    if not system:
        raise ValueError("positive-dimensional system")
    G = groebner(system, "lex")
    if G.is_unit():
        return []
    # lex with variable order x0 > x1 > ...: the last free variable is eliminated last
    last = max(free)
    uni = [p for p in G.polys if p.variables() <= {last}]
    if not uni:
        raise ValueError("positive-dimensional system")
    out = []
    for root in _univariate_roots(uni[0], last):
        sub_fixed = dict(fixed)
        sub_fixed[last] = root
        out.extend(solve_zero_dimensional(G.polys, [v for v in free if v != last], sub_fixed))
    return sorted(set(out), key=lambda pt: tuple(str(c) for c in pt))


def has_points_over_closure(gens: Sequence[Poly], fixed: dict[int, object] | None = None) -> bool:
    ring = gens[0].ring
    pinned = {i: ring.const(v) for i, v in (fixed or {}).items()}
    system = [g.subs(pinned) if pinned else g for g in gens]
    system = [g for g in system if g.terms]
    if not system:
        return True
    return not groebner(system).is_unit()
