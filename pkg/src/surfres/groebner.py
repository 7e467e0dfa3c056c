"""Buchberger's algorithm with the normal selection strategy and Gebauer-Moeller pair pruning.

Also: normal forms, ideal membership, dimension of the zero set, elimination,
saturation, intersection, and gcd / squarefree part of polynomials.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Callable, Iterable, Sequence

from .algebra import Poly, Ring


class GroebnerBudgetError(RuntimeError):
    """Pair or degree budget exhausted before the basis was complete."""


def grevlex_key(e):
    return (sum(e), tuple(-a for a in reversed(e)))


def lex_key(e):
    return tuple(e)


def block_key(first: Sequence[int]) -> Callable:
    """Elimination order: the variables in ``first`` beat everything else."""
    first = tuple(first)

    def key(e):
        a = tuple(e[i] for i in first)
        b = tuple(x for i, x in enumerate(e) if i not in first)
        return (sum(a), grevlex_key(a)[1], sum(b), grevlex_key(b)[1])

    return key


def order_key(order) -> Callable:
    if callable(order):
        return order
    if order == "grevlex":
        return grevlex_key
    if order == "lex":
        return lex_key
    if isinstance(order, tuple) and order[0] == "block":
        return block_key(order[1])
    raise ValueError(f"unknown monomial order {order!r}")


def _divides(a, b) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def _disjoint(a, b) -> bool:
    return all(x == 0 or y == 0 for x, y in zip(a, b))


class _Elem:
    __slots__ = ("terms", "lm", "lc")

    def __init__(self, terms, lm, lc):
        self.terms, self.lm, self.lc = terms, lm, lc


def _make_monic(terms: dict, key, F) -> _Elem | None:
    if not terms:
        return None
    lm = max(terms, key=key)
    inv = F.inv(terms[lm])
    return _Elem({e: F.mul(c, inv) for e, c in terms.items()}, lm, F.one)


def _reduce_terms(f: dict, basis: list[_Elem], key, F, full: bool = True) -> dict:
    """Remainder of f on division by a list of monic polynomials."""
    f = dict(f)
    rem: dict = {}
    n = len(next(iter(f))) if f else 0
    add, mul, neg, zero = F.add, F.mul, F.neg, F.zero
    while f:
        lm = max(f, key=key)
        c = f[lm]
        for g in basis:
            if _divides(g.lm, lm):
                shift = tuple(lm[i] - g.lm[i] for i in range(n))
                factor = neg(c)
                for e, v in g.terms.items():
                    t = tuple(e[i] + shift[i] for i in range(n))
                    nv = add(f.get(t, zero), mul(factor, v))
                    if nv == zero:
                        f.pop(t, None)
                    else:
                        f[t] = nv
                break
        else:
            rem[lm] = c
            del f[lm]
            if not full:
                rem.update(f)
                return rem
    return rem


def _spoly(a: _Elem, b: _Elem, F) -> dict:
    lcm = _lcm(a.lm, b.lm)
    n = len(lcm)
    sa = tuple(lcm[i] - a.lm[i] for i in range(n))
    sb = tuple(lcm[i] - b.lm[i] for i in range(n))
    out = {}
    for e, c in a.terms.items():
        out[tuple(e[i] + sa[i] for i in range(n))] = c
    for e, c in b.terms.items():
        t = tuple(e[i] + sb[i] for i in range(n))
        v = F.sub(out.get(t, F.zero), c)
        if v == F.zero:
            out.pop(t, None)
        else:
            out[t] = v
    return out


DEFAULT_PAIR_BUDGET = 20000


def _buchberger(elems: list[_Elem], key, F, max_pairs: int) -> list[_Elem]:
    polys: list[_Elem] = []
    G: list[int] = []
    B: list[tuple[int, int]] = []

    def update(h: int):
        nonlocal G, B
        hl = polys[h].lm
        C = [g for g in G]
        D: list[int] = []
        while C:
            g1 = C.pop(0)
            l1 = _lcm(hl, polys[g1].lm)
            keep = _disjoint(hl, polys[g1].lm)
            if not keep:
                keep = not any(_divides(_lcm(hl, polys[g2].lm), l1) for g2 in C) and \
                    not any(_divides(_lcm(hl, polys[g2].lm), l1) for g2 in D)
            if keep:
                D.append(g1)
        E = [(g, h) for g in D if not _disjoint(hl, polys[g].lm)]
        newB = []
        for (g1, g2) in B:
            l12 = _lcm(polys[g1].lm, polys[g2].lm)
            if not _divides(hl, l12) or _lcm(polys[g1].lm, hl) == l12 or _lcm(hl, polys[g2].lm) == l12:
                newB.append((g1, g2))
        B = newB + E
        G = [g for g in G if not _divides(hl, polys[g].lm)] + [h]

    for el in elems:
        r = _reduce_terms(el.terms, [polys[g] for g in G], key, F)
        m = _make_monic(r, key, F)
        if m is None:
            continue
        polys.append(m)
        update(len(polys) - 1)

    processed = 0
    while B:
        best = min(range(len(B)), key=lambda i: (
            sum(_lcm(polys[B[i][0]].lm, polys[B[i][1]].lm)),
            key(_lcm(polys[B[i][0]].lm, polys[B[i][1]].lm)), B[i]))
        g1, g2 = B.pop(best)
        processed += 1
        if processed > max_pairs:
            raise GroebnerBudgetError(f"pair budget {max_pairs} exhausted")
        s = _spoly(polys[g1], polys[g2], F)
        r = _reduce_terms(s, [polys[g] for g in G], key, F)
        m = _make_monic(r, key, F)
        if m is None:
            continue
        polys.append(m)
        update(len(polys) - 1)

    basis = [polys[g] for g in G]
    # minimalize and interreduce
    basis = [b for b in basis if not any(o is not b and _divides(o.lm, b.lm) for o in basis)]
    out = []
    for b in basis:
        others = [o for o in basis if o is not b]
        r = _reduce_terms(b.terms, others, key, F)
        out.append(_make_monic(r, key, F))
    out.sort(key=lambda el: key(el.lm))
    return out


@dataclass
class GroebnerBasis:
    ring: Ring
    order: object
    elems: list = dc_field(repr=False)

    @property
    def key(self):
        return order_key(self.order)

    @property
    def polys(self) -> list[Poly]:
        return [Poly(self.ring, dict(el.terms), clean=True) for el in self.elems]

    def leading_monomials(self) -> list[tuple]:
        return [el.lm for el in self.elems]

    def is_unit(self) -> bool:
        zero = (0,) * self.ring.nvars
        return any(el.lm == zero for el in self.elems)

    def is_zero_ideal(self) -> bool:
        return not self.elems

    def reduce(self, f: Poly) -> Poly:
        if not f.is_exact():
            raise ValueError("normal forms need exact polynomials")
        return Poly(self.ring, _reduce_terms(f.terms, self.elems, self.key, self.ring.field), clean=True)

    def contains(self, f: Poly) -> bool:
        return not self.reduce(f).terms

    def contains_ideal(self, gens: Iterable[Poly]) -> bool:
        return all(self.contains(g) for g in gens)

    def dimension(self) -> int:
        """Krull dimension of the quotient, from the leading monomials (-1 for the unit ideal)."""
        if self.is_unit():
            return -1
        n = self.ring.nvars
        lms = self.leading_monomials()
        best = 0
        for mask in range(1 << n):
            size = bin(mask).count("1")
            if size <= best:
                continue
            ok = True
            for lm in lms:
                if all((mask >> i) & 1 for i, a in enumerate(lm) if a):
                    ok = False
                    break
            if ok:
                best = size
        return best

    def origin_in_zero_set(self) -> bool:
        return all(el.terms.get((0,) * self.ring.nvars, self.ring.field.zero) == self.ring.field.zero
                   for el in self.elems)

    def __len__(self):
        return len(self.elems)


def groebner(gens: Iterable[Poly], order="grevlex", max_pairs: int = DEFAULT_PAIR_BUDGET) -> GroebnerBasis:
    gens = [g for g in gens]
    if not gens:
        raise ValueError("need at least one generator to fix the ring")
    ring = gens[0].ring
    for g in gens:
        if not g.is_exact():
            raise ValueError("Groebner bases need exact polynomials")
    key = order_key(order)
    F = ring.field
    elems = [m for m in (_make_monic(g.terms, key, F) for g in gens) if m is not None]
    elems.sort(key=lambda el: key(el.lm))
    return GroebnerBasis(ring, order, _buchberger(elems, key, F, max_pairs))


# ring extensions used by elimination tricks

def extended_ring(ring: Ring, extra: Sequence[str]) -> Ring:
    names = list(ring.names)
    for nm in extra:
        base, k = nm, 0
        while nm in names:
            k += 1
            nm = f"{base}{k}_"
        names.append(nm)
    return Ring(ring.field, names)


def embed(f: Poly, big: Ring) -> Poly:
    pad = (0,) * (big.nvars - f.ring.nvars)
    return Poly(big, {e + pad: c for e, c in f.terms.items()}, f.trunc, clean=True)


def restrict(f: Poly, small: Ring) -> Poly:
    n = small.nvars
    out = {}
    for e, c in f.terms.items():
        if any(e[n:]):
            raise ValueError("polynomial involves an eliminated variable")
        out[e[:n]] = c
    return Poly(small, out, f.trunc, clean=True)


def eliminate(gens: Sequence[Poly], variables: Sequence[int], max_pairs: int = DEFAULT_PAIR_BUDGET) -> list[Poly]:
    """Generators of the ideal intersected with the subring free of ``variables``."""
    G = groebner(gens, ("block", tuple(variables)), max_pairs)
    return [p for p, el in zip(G.polys, G.elems) if not any(el.lm[i] for i in variables)
            and not any(e[i] for e in el.terms for i in variables)]


def saturate_by(gens: Sequence[Poly], f: Poly, max_pairs: int = DEFAULT_PAIR_BUDGET) -> list[Poly]:
    """I : f^infinity via the Rabinowitsch trick."""
    ring = gens[0].ring
    big = extended_ring(ring, ["s_"])
    s = big.var(ring.nvars)
    J = [embed(g, big) for g in gens] + [big.one() - s * embed(f, big)]
    out = eliminate(J, [ring.nvars], max_pairs)
    return [restrict(p, ring) for p in out]


def saturate_maximal(gens: Sequence[Poly], variables: Sequence[int] | None = None,
                     max_pairs: int = DEFAULT_PAIR_BUDGET) -> GroebnerBasis:
    """I : (x_1,...,x_n)^infinity as the intersection of the I : x_i^infinity."""
    ring = gens[0].ring
    variables = range(ring.nvars) if variables is None else variables
    acc = None
    for i in variables:
        part = saturate_by(gens, ring.var(i), max_pairs)
        acc = part if acc is None else intersect(acc, part, max_pairs)
    return groebner(acc, "grevlex", max_pairs)


def intersect(I: Sequence[Poly], J: Sequence[Poly], max_pairs: int = DEFAULT_PAIR_BUDGET) -> list[Poly]:
    ring = (list(I) or list(J))[0].ring
    big = extended_ring(ring, ["t_"])
    t = big.var(ring.nvars)
    gens = [t * embed(f, big) for f in I] + [(big.one() - t) * embed(g, big) for g in J]
    gens = [g for g in gens if g.terms]
    if not gens:
        return []
    return [restrict(p, ring) for p in eliminate(gens, [ring.nvars], max_pairs)]


def divide_exact(f: Poly, g: Poly) -> Poly:
    """Quotient f/g, raising ArithmeticError when g does not divide f."""
    if not g.terms:
        raise ZeroDivisionError("division by zero polynomial")
    ring = f.ring
    F = ring.field
    key = grevlex_key
    glm = max(g.terms, key=key)
    ginv = F.inv(g.terms[glm])
    rem = dict(f.terms)
    quo: dict = {}
    n = ring.nvars
    while rem:
        lm = max(rem, key=key)
        if not _divides(glm, lm):
            raise ArithmeticError("not divisible")
        shift = tuple(lm[i] - glm[i] for i in range(n))
        c = F.mul(rem[lm], ginv)
        quo[shift] = c
        for e, v in g.terms.items():
            t = tuple(e[i] + shift[i] for i in range(n))
            nv = F.sub(rem.get(t, F.zero), F.mul(c, v))
            if nv == F.zero:
                rem.pop(t, None)
            else:
                rem[t] = nv
    return Poly(ring, quo, clean=True)


def normalize(f: Poly) -> Poly:
    return f.monic(grevlex_key) if f.terms else f


def gcd(f: Poly, g: Poly, max_pairs: int = DEFAULT_PAIR_BUDGET) -> Poly:
    if not f.terms:
        return normalize(g)
    if not g.terms:
        return normalize(f)
    if not f.variables() or not g.variables():
        return f.ring.one()
    lcm_gens = intersect([f], [g], max_pairs)
    lcm = min(lcm_gens, key=lambda p: grevlex_key(max(p.terms, key=grevlex_key)))
    return normalize(divide_exact(f * g, lcm))


def gcd_many(polys: Iterable[Poly]) -> Poly | None:
    acc = None
    for p in polys:
        if not p.terms:
            continue
        acc = normalize(p) if acc is None else gcd(acc, p)
        if acc is not None and not acc.variables():
            return acc
    return acc


def pth_root_poly(f: Poly) -> Poly:
    F = f.field
    p = F.char
    out = {}
    for e, c in f.terms.items():
        if any(a % p for a in e):
            raise ArithmeticError("not a p-th power")
        out[tuple(a // p for a in e)] = F.pth_root(c)
    return Poly(f.ring, out, clean=True)


def radical_principal(f: Poly) -> Poly:
    """Squarefree part of f (product of its distinct irreducible factors), normalized."""
    if not f.terms:
        return f
    if not f.variables():
        return f.ring.one()
    partials = [f.derivative(i) for i in range(f.nvars)]
    if all(not d.terms for d in partials):
        return radical_principal(pth_root_poly(f))
    g = gcd_many([f] + partials)
    u = normalize(divide_exact(f, g))
    w = g
    while True:
        c = gcd(w, u)
        if not c.variables():
            break
        w = divide_exact(w, c)
    if not w.variables():
        return u
    return normalize(u * radical_principal(pth_root_poly(w)))
