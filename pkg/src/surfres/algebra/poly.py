"""Sparse multivariate polynomials and truncated power series over an exact field.

A ``Poly`` is a map from exponent tuples to nonzero coefficients together with a
reliable degree ``trunc``.  ``trunc=None`` means the polynomial is exact; an
integer ``D`` means every term of degree at most ``D`` is known and nothing is
known above ``D``.
"""
from __future__ import annotations

import math
from typing import Iterable, Mapping, Sequence

from .fields import Field


class TruncationError(ArithmeticError):
    """An answer depends on terms above the reliable degree."""


def _min_trunc(*values):
    vals = [v for v in values if v is not None]
    return min(vals) if vals else None


def binom_mod(n: int, k: int, p: int) -> int:
    """Binomial coefficient reduced mod p by Lucas' theorem (p=0 means no reduction)."""
    if k < 0 or k > n:
        return 0
    if p == 0:
        from math import comb
        return comb(n, k)
    out = 1
    from math import comb
    while n or k:
        n, nd = divmod(n, p)
        k, kd = divmod(k, p)
        if kd > nd:
            return 0
        out = out * comb(nd, kd) % p
    return out


class Ring:
    """Coefficient field plus variable names."""

    def __init__(self, field: Field, names: Sequence[str] = ("x", "y", "z")):
        self.field = field
        self.names = tuple(names)
        self.nvars = len(self.names)

    def __eq__(self, other):
        return isinstance(other, Ring) and other.field == self.field and other.names == self.names

    def __hash__(self):
        return hash((self.field, self.names))

    def __repr__(self):
        return f"Ring({self.field!r}, {self.names})"

    def zero(self, trunc=None) -> "Poly":
        return Poly(self, {}, trunc)

    def one(self) -> "Poly":
        return self.const(self.field.one)

    def const(self, c) -> "Poly":
        return Poly(self, {(0,) * self.nvars: c})

    def var(self, i) -> "Poly":
        if isinstance(i, str):
            i = self.names.index(i)
        e = [0] * self.nvars
        e[i] = 1
        return Poly(self, {tuple(e): self.field.one})

    def gens(self) -> list["Poly"]:
        return [self.var(i) for i in range(self.nvars)]

    def monomial(self, exp, c=None) -> "Poly":
        return Poly(self, {tuple(exp): self.field.one if c is None else c})

    def parse(self, text: str, trunc=None) -> "Poly":
        from .parse import parse_poly
        p = parse_poly(text, self)
        return p.truncate(trunc) if trunc is not None else p

    def index(self, name: str) -> int:
        return self.names.index(name)


class Poly:
    __slots__ = ("ring", "terms", "trunc")

    def __init__(self, ring: Ring, terms: Mapping | None = None, trunc: int | None = None, clean: bool = False):
        self.ring = ring
        self.trunc = trunc
        if terms is None:
            self.terms = {}
        elif clean:
            self.terms = terms
        else:
            F = ring.field
            t = {}
            for e, c in terms.items():
                if trunc is not None and sum(e) > trunc:
                    continue
                if not F.is_zero(c):
                    t[tuple(e)] = c
            self.terms = t

    # basic views

    @property
    def field(self) -> Field:
        return self.ring.field

    @property
    def nvars(self) -> int:
        return self.ring.nvars

    def is_exact(self) -> bool:
        return self.trunc is None

    def is_zero(self) -> bool:
        """True only for the exact zero polynomial."""
        return not self.terms and self.trunc is None

    def has_no_terms(self) -> bool:
        return not self.terms

    def copy(self) -> "Poly":
        return Poly(self.ring, dict(self.terms), self.trunc, clean=True)

    def coeff(self, exp):
        exp = tuple(exp)
        if self.trunc is not None and sum(exp) > self.trunc:
            raise TruncationError(f"coefficient of {exp} lies above the reliable degree {self.trunc}")
        return self.terms.get(exp, self.field.zero)

    def constant_term(self):
        return self.terms.get((0,) * self.nvars, self.field.zero)

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def order(self) -> int | float:
        """Lowest total degree of a nonzero term; inf for the exact zero polynomial."""
        if self.terms:
            return min(sum(e) for e in self.terms)
        if self.trunc is None:
            return math.inf
        raise TruncationError(f"order exceeds the reliable degree {self.trunc}")

    def order_lower_bound(self) -> float:
        if self.terms:
            return min(sum(e) for e in self.terms)
        return float("inf") if self.trunc is None else self.trunc + 1

    def homogeneous_part(self, d: int) -> "Poly":
        if self.trunc is not None and d > self.trunc:
            raise TruncationError(f"degree {d} part lies above the reliable degree {self.trunc}")
        return Poly(self.ring, {e: c for e, c in self.terms.items() if sum(e) == d}, clean=True)

    def leading_form(self) -> "Poly":
        """Lowest-degree homogeneous part (the initial form at the origin)."""
        if self.is_zero():
            raise ValueError("the zero polynomial has no leading form")
        return self.homogeneous_part(self.order())

    def variables(self) -> set[int]:
        return {i for e in self.terms for i, a in enumerate(e) if a}

    def truncate(self, d: int | None) -> "Poly":
        if d is None:
            return self
        if self.trunc is not None and self.trunc <= d:
            return self
        return Poly(self.ring, {e: c for e, c in self.terms.items() if sum(e) <= d}, d, clean=True)

    def cap(self, d: int | None) -> "Poly":
        """Keep exactness when every term already has degree at most ``d``."""
        if d is None or (self.trunc is None and self.degree() <= d):
            return self
        return self.truncate(d)

    # arithmetic

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.ring is not self.ring and other.ring != self.ring:
                raise ValueError("polynomials from different rings")
            return other
        return self.ring.const(self.field.coerce(other))

    def __add__(self, other):
        other = self._coerce(other)
        F = self.field
        t = dict(self.terms)
        for e, c in other.terms.items():
            v = F.add(t[e], c) if e in t else c
            if F.is_zero(v):
                t.pop(e, None)
            else:
                t[e] = v
        trunc = _min_trunc(self.trunc, other.trunc)
        if trunc is not None:
            t = {e: c for e, c in t.items() if sum(e) <= trunc}
        return Poly(self.ring, t, trunc, clean=True)

    __radd__ = __add__

    def __neg__(self):
        F = self.field
        return Poly(self.ring, {e: F.neg(c) for e, c in self.terms.items()}, self.trunc, clean=True)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c) -> "Poly":
        F = self.field
        if F.is_zero(c):
            return Poly(self.ring, {}, self.trunc, clean=True)
        return Poly(self.ring, {e: F.mul(v, c) for e, v in self.terms.items()}, self.trunc, clean=True)

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return self.scale(self.field.coerce(other))
        other = self._coerce(other)
        trunc = None
        if self.trunc is not None or other.trunc is not None:
            a = float("inf") if self.trunc is None else self.trunc + other.order_lower_bound()
            b = float("inf") if other.trunc is None else other.trunc + self.order_lower_bound()
            m = min(a, b)
            trunc = None if m == float("inf") else int(m)
        F = self.field
        add, mul = F.add, F.mul
        out: dict = {}
        n = self.nvars
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(e1[i] + e2[i] for i in range(n))
                if trunc is not None and sum(e) > trunc:
                    continue
                v = mul(c1, c2)
                if e in out:
                    v = add(out[e], v)
                out[e] = v
        zero = F.zero
        out = {e: c for e, c in out.items() if c != zero}
        return Poly(self.ring, out, trunc, clean=True)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if not isinstance(other, Poly):
            try:
                other = self._coerce(other)
            except Exception:
                return NotImplemented
        return self.ring == other.ring and self.trunc == other.trunc and self.terms == other.terms

    def __hash__(self):
        return hash((frozenset(self.terms.items()), self.trunc))

    def agrees_with(self, other: "Poly") -> bool:
        """Equal on the common reliable range."""
        d = _min_trunc(self.trunc, other.trunc)
        a = self.truncate(d) if d is not None else self
        b = other.truncate(d) if d is not None else other
        return a.terms == b.terms

    # calculus

    def hasse(self, exps: Sequence[int]) -> "Poly":
        """Hasse derivative: x^n maps to C(n,k) x^(n-k), binomials taken in the field."""
        F = self.field
        p = F.char
        out = {}
        for e, c in self.terms.items():
            coef = 1
            for a, k in zip(e, exps):
                coef *= binom_mod(a, k, p)
                if coef == 0:
                    break
            if coef == 0:
                continue
            v = F.mul(c, F.from_int(coef))
            if not F.is_zero(v):
                out[tuple(a - k for a, k in zip(e, exps))] = v
        trunc = None if self.trunc is None else self.trunc - sum(exps)
        if trunc is not None and trunc < 0:
            raise TruncationError("derivative order exceeds the reliable degree")
        return Poly(self.ring, out, trunc, clean=True)

    def derivative(self, var: int, k: int = 1) -> "Poly":
        e = [0] * self.nvars
        e[var] = k
        return self.hasse(e)

    # substitution

    def subs(self, images: Mapping[int, "Poly"] | Sequence["Poly"]) -> "Poly":
        """Simultaneous substitution of polynomials (or series) for variables."""
        ring = self.ring
        if not isinstance(images, Mapping):
            images = dict(enumerate(images))
        full = []
        for i in range(self.nvars):
            img = images.get(i, images.get(ring.names[i])) if isinstance(images, Mapping) else None
            full.append(ring.var(i) if img is None else img)
        target = full[0].ring if full else ring
        min_order = min((g.order_lower_bound() for g in full), default=1)
        cap = None
        if self.trunc is not None:
            if min_order < 1:
                raise TruncationError("substituting a unit into a truncated series")
            cap = int((self.trunc + 1) * min_order - 1) if min_order != float("inf") else None
        cache: dict = {}

        def power(i, k):
            if (i, k) not in cache:
                j = k
                while j > 0 and (i, j) not in cache:
                    j -= 1
                acc = cache[(i, j)] if j else target.one()
                for m in range(j + 1, k + 1):
                    acc = (acc * full[i]).cap(cap)
                    cache[(i, m)] = acc
            return cache[(i, k)]

        total = target.zero(cap)
        pieces = []
        for e, c in self.terms.items():
            term = target.const(c)
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
            pieces.append(term)
        for t in pieces:
            total = total + t
        if cap is not None:
            total = total.truncate(cap) if total.trunc is None or total.trunc > cap else total
        return total

    def translate(self, point: Sequence) -> "Poly":
        """Recentre at ``point``: f(x + point)."""
        if self.trunc is not None and any(not self.field.is_zero(a) for a in point):
            raise TruncationError("cannot translate a truncated series away from the origin")
        ring = self.ring
        return self.subs([ring.var(i) + ring.const(a) if not self.field.is_zero(a) else ring.var(i)
                          for i, a in enumerate(point)])

    def evaluate(self, point: Sequence):
        if self.trunc is not None:
            raise TruncationError("cannot evaluate a truncated series")
        F = self.field
        total = F.zero
        for e, c in self.terms.items():
            v = c
            for a, k in zip(point, e):
                if k:
                    v = F.mul(v, F.pow(a, k))
            total = F.add(total, v)
        return total

    def divide_monomial(self, exp: Sequence[int]) -> "Poly":
        """Exact division by a monomial; raises if some term is not divisible."""
        out = {}
        for e, c in self.terms.items():
            if any(a < b for a, b in zip(e, exp)):
                raise ArithmeticError(f"term {e} is not divisible by {tuple(exp)}")
            out[tuple(a - b for a, b in zip(e, exp))] = c
        trunc = None if self.trunc is None else self.trunc - sum(exp)
        return Poly(self.ring, out, trunc, clean=True)

    def var_valuation(self, var: int) -> int:
        """Largest k with var^k dividing every known term."""
        if not self.terms:
            raise ValueError("valuation of a polynomial without terms")
        return min(e[var] for e in self.terms)

    def expand_in(self, var: int) -> dict[int, "Poly"]:
        """Coefficients of powers of ``var``: {k: a_k} with a_k free of ``var``."""
        out: dict[int, dict] = {}
        for e, c in self.terms.items():
            k = e[var]
            rest = list(e)
            rest[var] = 0
            out.setdefault(k, {})[tuple(rest)] = c
        return {k: Poly(self.ring, t, None if self.trunc is None else self.trunc - k, clean=True)
                for k, t in out.items()}

    def map_coefficients(self, fn, ring: Ring) -> "Poly":
        return Poly(ring, {e: fn(c) for e, c in self.terms.items()}, self.trunc)

    def monic(self, order_key) -> "Poly":
        if not self.terms:
            return self
        lead = max(self.terms, key=order_key)
        return self.scale(self.field.inv(self.terms[lead]))

    def linear_part(self) -> list:
        n = self.nvars
        out = []
        for i in range(n):
            e = [0] * n
            e[i] = 1
            out.append(self.terms.get(tuple(e), self.field.zero))
        return out

    # printing

    def sorted_terms(self):
        """Terms in descending graded-lex order."""
        return sorted(self.terms.items(), key=lambda t: (sum(t[0]), t[0]), reverse=True)

    def to_str(self, names: Sequence[str] | None = None) -> str:
        names = tuple(names or self.ring.names)
        F = self.field
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k)
            cs = F.fmt(c)
            neg = cs.startswith("-")
            body = cs[1:] if neg else cs
            if mono:
                text = mono if body == "1" else f"{body}*{mono}"
            else:
                text = body
            parts.append(("-" if neg else "+", text))
        if not parts:
            text = "0"
        else:
            sign, first = parts[0]
            text = ("-" if sign == "-" else "") + first
            for sign, t in parts[1:]:
                text += f" {sign} {t}"
        if self.trunc is not None:
            text += f" + O({self.trunc + 1})"
        return text

    def __str__(self):
        return self.to_str()

    def __repr__(self):
        return f"Poly({self.to_str()!r})"


def monomials_of_degree(nvars: int, d: int) -> Iterable[tuple[int, ...]]:
    if nvars == 1:
        yield (d,)
        return
    for a in range(d, -1, -1):
        for rest in monomials_of_degree(nvars - 1, d - a):
            yield (a,) + rest


def multi_indices_below(nvars: int, r: int) -> Iterable[tuple[int, ...]]:
    """All exponent vectors of total degree < r."""
    for d in range(r):
        yield from monomials_of_degree(nvars, d)


def ideal_order(gens: Iterable[Poly]) -> int:
    orders = [g.order() for g in gens if not g.is_zero()]
    if not orders:
        raise ValueError("order of the zero ideal")
    return min(orders)
