"""Order, the locus Sing_r, the directrix dimension tau, good parameters and the coefficient ideal."""
from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial
from typing import Sequence

from .algebra import Poly, Ring, TruncationError, multi_indices_below, monomials_of_degree
from .algebra.linalg import kernel, rank, rref
from .coords import Substitution, linear_substitution
from .groebner import (GroebnerBasis, eliminate, gcd_many, groebner, radical_principal,
                       saturate_maximal)


class UnsupportedCase(Exception):
    """A configuration outside what the chart-level engine handles."""


# order

def nu(gens: Sequence[Poly]) -> int:
    """Order of the ideal at the origin: the least order of a generator."""
    nonzero = [g for g in gens if not g.is_zero()]
    if not nonzero:
        raise ValueError("order of the zero ideal")
    known = [g.order() for g in nonzero if g.terms]
    best = min(known) if known else None
    for g in nonzero:
        if not g.terms and (best is None or g.trunc + 1 < best):
            raise TruncationError("order of the ideal is not determined by the known terms")
    return best


def order_at(gens: Sequence[Poly], point: Sequence) -> int:
    """Brute-force order at a rational point: recentre and take the order."""
    return nu([g.translate(point) for g in gens])


def hasse_ideal(gens: Sequence[Poly], r: int) -> list[Poly]:
    """All Hasse derivatives of orders below r of all generators."""
    out, seen = [], set()
    for g in gens:
        if not g.is_exact():
            raise TruncationError("Sing_r needs exact generators")
        for e in multi_indices_below(g.nvars, r):
            d = g.hasse(e)
            if d.terms:
                key = frozenset(d.terms.items())
                if key not in seen:
                    seen.add(key)
                    out.append(d)
    return out


# germ of a locus at the origin

@dataclass
class Germ:
    kind: str  # empty | point | curve | singular-curve | surface | singular-surface
    ideal: list = field(default_factory=list)
    graph: dict | None = None  # dependent var -> polynomial in the free vars
    note: str = ""

    @property
    def dimension(self) -> int:
        return {"empty": -1, "point": 0, "curve": 1, "singular-curve": 1,
                "surface": 2, "singular-surface": 2}[self.kind]


def _linear_rows(polys: Sequence[Poly]) -> list[list]:
    return [p.linear_part() for p in polys if any(not p.field.is_zero(c) for c in p.linear_part())]


def graph_parametrization(eqs: Sequence[Poly], dependent: Sequence[int], check: Sequence[Poly],
                          max_degree: int = 24) -> dict[int, Poly] | None:
    """Polynomials phi with eqs(dep=phi(free)) = 0, found degree by degree.

    ``eqs`` must have an invertible Jacobian in the dependent variables at the
    origin.  Returns None when no polynomial graph of degree <= max_degree
    annihilates every polynomial in ``check``.
    """
    ring = eqs[0].ring
    F = ring.field
    free = [i for i in range(ring.nvars) if i not in dependent]
    jac = [[p.linear_part()[j] for j in dependent] for p in eqs]
    if rank(jac, F) < len(dependent):
        raise ValueError("Jacobian in the dependent variables is singular")
    phi = {j: ring.zero() for j in dependent}

    def substituted(p):
        return p.subs({j: phi[j] for j in dependent})

    def solves_all():
        return all(not substituted(p).terms for p in check)

    for d in range(1, max_degree + 1):
        residuals = [substituted(p) for p in eqs]
        for mono in monomials_of_degree(len(free), d):
            exp = [0] * ring.nvars
            for i, a in zip(free, mono):
                exp[i] = a
            rhs = [F.neg(res.terms.get(tuple(exp), F.zero)) for res in residuals]
            aug = [row + [b] for row, b in zip(jac, rhs)]
            red, piv = rref(aug, F)
            sol = [F.zero] * len(dependent)
            for r_, pc in zip(red, piv):
                if pc < len(dependent):
                    sol[pc] = r_[len(dependent)]
            for j, c in zip(dependent, sol):
                if not F.is_zero(c):
                    phi[j] = phi[j] + ring.monomial(exp, c)
        if solves_all():
            return dict(phi)
    return None


def _pick_independent(polys: Sequence[Poly], columns: Sequence[int], count: int) -> list[Poly]:
    F = polys[0].field
    chosen, rows = [], []
    for p in sorted(polys, key=lambda q: (len(q.terms), q.degree())):
        row = [p.linear_part()[j] for j in columns]
        if rank(rows + [row], F) > len(rows):
            chosen.append(p)
            rows.append(row)
            if len(chosen) == count:
                break
    return chosen


def germ_of(gens: Sequence[Poly], basis: GroebnerBasis | None = None) -> Germ:
    """Shape of the zero set of an ideal near the origin (2 or 3 variables)."""
    ring = gens[0].ring
    F = ring.field
    n = ring.nvars
    G = basis or groebner(gens)
    if G.is_unit() or not G.origin_in_zero_set():
        return Germ("empty")
    if G.dimension() == 0:
        return Germ("point", [ring.var(i) for i in range(n)])
    sat = saturate_maximal(G.polys)
    if sat.is_unit() or not sat.origin_in_zero_set():
        return Germ("point", [ring.var(i) for i in range(n)])
    h = gcd_many(sat.polys)
    if h is not None and h.variables() and F.is_zero(h.constant_term()):
        f = radical_principal(h)
        lin = f.linear_part()
        top = "curve" if n == 2 else "surface"
        if all(F.is_zero(c) for c in lin):
            return Germ("singular-" + top, [f])
        order = [1, 0] if n == 2 else [2, 1, 0]
        dep = next(j for j in order if not F.is_zero(lin[j]))
        graph = graph_parametrization([f], [dep], [f])
        return Germ(top, [f], graph, "" if graph is not None else "not a polynomial graph")
    if n == 2:
        return Germ("point", [ring.var(i) for i in range(n)])
    K = list(sat.polys)
    for drop in range(n):
        E = eliminate(sat.polys, [drop])
        g = gcd_many(E) if E else None
        if g is not None and g.variables():
            K.append(radical_principal(g))
    for keep in range(n):
        U = eliminate(sat.polys, [v for v in range(n) if v != keep])
        g1 = gcd_many(U) if U else None
        if g1 is not None and g1.variables():
            K.append(radical_principal(g1))
    rows = _linear_rows(K)
    rk = rank(rows, F) if rows else 0
    if rk < n - 1:
        return Germ("singular-curve", K)
    ker = kernel(rows, n, F)[0]
    free = next(i for i in (1, 0, 2) if not F.is_zero(ker[i]))
    dep = [j for j in range(n) if j != free]
    eqs = _pick_independent(K, dep, len(dep))
    graph = graph_parametrization(eqs, dep, list(sat.polys))
    if graph is None:
        return Germ("curve", eqs, None, "not a polynomial graph")
    curve = [ring.var(j) - graph[j] for j in dep]
    return Germ("curve", curve, graph)


@dataclass
class SingularLocus:
    r: int
    defining_ideal: list
    basis: GroebnerBasis
    germ: Germ

    @property
    def components(self) -> list[tuple[int, list]]:
        if self.germ.kind == "empty":
            return []
        return [(self.germ.dimension, self.germ.ideal)]

    def contains_point(self, point) -> bool:
        F = self.basis.ring.field
        return all(F.is_zero(p.evaluate(point)) for p in self.basis.polys)


def sing_locus(gens: Sequence[Poly], r: int) -> SingularLocus:
    if r < 1:
        raise ValueError("r must be positive")
    J = hasse_ideal(gens, r)
    ring = gens[0].ring
    if not J:
        J = [ring.zero()]
        G = GroebnerBasis(ring, "grevlex", [])
        n = ring.nvars
        return SingularLocus(r, J, G, Germ("surface" if n == 3 else "curve", [], None,
                                           "every generator vanishes identically"))
    G = groebner(J)
    return SingularLocus(r, J, G, germ_of(J, G))


# directrix

@dataclass
class Directrix:
    tau: int
    basis: list  # linear forms, as coefficient rows
    forms: list  # the same as Poly objects
    exact: bool = True


def leading_forms(gens: Sequence[Poly]) -> tuple[int, list[Poly]]:
    r = nu(gens)
    return r, [g.homogeneous_part(r) for g in gens if not g.is_zero() and g.order() == r]


def _is_translation_invariant(forms: Sequence[Poly], w: Sequence) -> bool:
    ring = forms[0].ring
    shift = [ring.var(i) + ring.const(c) if not ring.field.is_zero(c) else ring.var(i)
             for i, c in enumerate(w)]
    return all(L.subs(shift) == L for L in forms)


def tau_directrix(gens: Sequence[Poly]) -> Directrix:
    """Smallest space T of linear forms with every leading form of order nu in k[T]."""
    r, forms = leading_forms(gens)
    ring = gens[0].ring
    F = ring.field
    n = ring.nvars
    # vectors w with d/dw L = 0 for every form; in characteristic 0 these are exactly the directions
    # of translation invariance
    cond: dict = {}
    for L in forms:
        for j in range(n):
            d = L.derivative(j)
            for e, c in d.terms.items():
                cond.setdefault((id(L), e), [F.zero] * n)[j] = c
    rows = list(cond.values())
    U = kernel(rows, n, F) if rows else [[F.one if i == j else F.zero for i in range(n)] for j in range(n)]
    if F.char and U:
        # the invariance subspace is Galois-stable, so it is spanned by its rational points
        from itertools import product
        pts = []
        for coeffs in product(list(F.elements()), repeat=len(U)):
            if all(F.is_zero(c) for c in coeffs):
                continue
            w = [F.zero] * n
            for c, u in zip(coeffs, U):
                w = [F.add(a, F.mul(c, b)) for a, b in zip(w, u)]
            if _is_translation_invariant(forms, w):
                pts.append(w)
        U, _ = rref(pts, F) if pts else ([], [])
    T = kernel(U, n, F) if U else [[F.one if i == j else F.zero for i in range(n)] for j in range(n)]
    T = _canonical_basis(T, F)
    polys = []
    for row in T:
        acc = ring.zero()
        for c, g in zip(row, ring.gens()):
            if not F.is_zero(c):
                acc = acc + g.scale(c)
        polys.append(acc)
    return Directrix(len(T), T, polys)


def _canonical_basis(rows: list[list], F) -> list[list]:
    """Echelon basis read from the last coordinate backwards (so z is preferred as a pivot)."""
    if not rows:
        return []
    rev = [list(reversed(r)) for r in rows]
    red, _ = rref(rev, F)
    return [list(reversed(r)) for r in red]


# good parameters

def good_parameters(gens: Sequence[Poly], directrix: Directrix | None = None) -> Substitution:
    """Linear change after which the directrix is z (tau=1) or (x, y) (tau=2)."""
    ring = gens[0].ring
    F = ring.field
    n = ring.nvars
    d = directrix or tau_directrix(gens)
    unit = [[F.one if i == j else F.zero for j in range(n)] for i in range(n)]
    if d.tau == 0 or d.tau == n:
        return Substitution.identity(ring)
    if d.tau == 1:
        ell = d.basis[0]
        j = n - 1 if not F.is_zero(ell[n - 1]) else max(i for i in range(n) if not F.is_zero(ell[i]))
        rest = [unit[i] for i in range(n) if i != j]
        rows = rest + [ell]
    elif d.tau == 2 and n == 3:
        rows = None
        plane, _ = rref(d.basis, F)
        for j in (2, 1, 0):
            cand = [plane[0], plane[1], unit[j]]
            if rank(cand, F) == 3:
                rows = cand
                break
    else:
        raise UnsupportedCase(f"good parameters for tau={d.tau} in {n} variables")
    if rows == unit:
        return Substitution.identity(ring)
    return linear_substitution(ring, rows)


def is_good_tau1(gens: Sequence[Poly]) -> bool:
    """b_00r != 0 for every generator of order r."""
    r = nu(gens)
    ring = gens[0].ring
    exp = (0,) * (ring.nvars - 1) + (r,)
    return all(not ring.field.is_zero(g.coeff(exp)) for g in gens if not g.is_zero() and g.order() == r)


# coefficient ideal

def coefficient_ideal(gens: Sequence[Poly], var: int, r: int) -> list[Poly]:
    """Generators a_i^(r!/(r-i)) (i < r) in the remaining variables."""
    ring = gens[0].ring
    small = Ring(ring.field, [nm for i, nm in enumerate(ring.names) if i != var])
    out = []
    for g in gens:
        for k, a in g.expand_in(var).items():
            if k >= r or not a.terms:
                continue
            drop = {tuple(x for i, x in enumerate(e) if i != var): c for e, c in a.terms.items()}
            b = Poly(small, drop, a.trunc)
            out.append(b ** (factorial(r) // (r - k)))
    return out or [small.zero()]


def approximate_objects(gens: Sequence[Poly], directrix: Directrix | None = None,
                        center: Sequence[Poly] | None = None) -> tuple[list[Poly], Poly]:
    """Approximate manifold V(T) and one approximate hypersurface containing it (and the centre)."""
    d = directrix or tau_directrix(gens)
    hyper = d.forms[-1] if d.forms else gens[0].ring.zero()
    if center:
        G = groebner(list(center))
        if not G.contains(hyper):
            for h in d.forms:
                if G.contains(h):
                    return d.forms, h
            raise UnsupportedCase("the centre does not lie in an approximate hypersurface")
    return d.forms, hyper
