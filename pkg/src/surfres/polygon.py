"""Projected Newton polygons for tau=1, the invariants alpha..epsilon and Omega, and the tau=2 gamma.

For an ideal of order r with coordinates (x, y, z), each term x^i y^j z^k (k < r)
projects to (i/(r-k), j/(r-k)).  The polygon is the convex hull of these points
plus the positive quadrant.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Iterable, NamedTuple, Sequence

from .algebra import Poly, TruncationError

INF = math.inf


def fmt_rat(v) -> str:
    if v == INF:
        return "inf"
    v = Fraction(v)
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def parse_rat(s: str):
    return INF if s == "inf" else Fraction(s)


class Omega(NamedTuple):
    """(beta, 1/epsilon, alpha), compared lexicographically."""
    beta: Fraction
    inv_epsilon: object
    alpha: Fraction

    def to_json(self) -> list[str]:
        return [fmt_rat(self.beta), fmt_rat(self.inv_epsilon), fmt_rat(self.alpha)]

    @staticmethod
    def from_json(v: Sequence[str]) -> "Omega":
        return Omega(*(parse_rat(s) for s in v))


@dataclass(frozen=True)
class Invariants:
    alpha: Fraction
    beta: Fraction
    gamma: Fraction
    delta: Fraction
    epsilon: Fraction

    @property
    def inv_epsilon(self):
        return INF if self.epsilon == 0 else 1 / self.epsilon

    @property
    def omega(self) -> Omega:
        return Omega(self.beta, self.inv_epsilon, self.alpha)

    @property
    def lowest_on_gamma(self) -> tuple[Fraction, Fraction]:
        return (self.gamma - self.delta, self.delta)

    def to_json(self) -> dict:
        return {"alpha": fmt_rat(self.alpha), "beta": fmt_rat(self.beta), "gamma": fmt_rat(self.gamma),
                "delta": fmt_rat(self.delta), "epsilon": fmt_rat(self.epsilon),
                "omega": self.omega.to_json()}


def pareto_hull(points: Iterable[tuple]) -> list[tuple]:
    """Vertices of conv(points) + Q^2_{>=0}, a increasing and b strictly decreasing."""
    pts = sorted(set(points))
    front = []
    for p in pts:
        if not front or p[1] < front[-1][1]:
            if front and front[-1][0] == p[0]:
                front[-1] = p
            else:
                front.append(p)
    hull: list[tuple] = []
    for p in front:
        while len(hull) >= 2:
            o, a = hull[-2], hull[-1]
            cross = (a[0] - o[0]) * (p[1] - o[1]) - (a[1] - o[1]) * (p[0] - o[0])
            if cross <= 0:
                hull.pop()
            else:
                break
        hull.append(p)
    return hull


@dataclass
class Polygon:
    r: int
    points: frozenset
    vertices: list
    certified: bool = True
    bound: object = INF  # points with a + b >= bound may be missing (jets)
    coords: tuple = (0, 1, 2)

    @property
    def is_empty(self) -> bool:
        return not self.vertices

    def contains(self, p) -> bool:
        """Membership in the recession-closed hull."""
        if self.is_empty:
            return False
        vs = self.vertices
        if p[0] < vs[0][0] or p[1] < vs[-1][1]:
            return False
        for u, v in zip(vs, vs[1:]):
            if (v[0] - u[0]) * (p[1] - u[1]) - (v[1] - u[1]) * (p[0] - u[0]) < 0:
                return False
        return True

    def invariants(self) -> Invariants:
        if self.is_empty:
            raise ValueError("invariants of an empty polygon")
        if not self.certified:
            raise TruncationError("polygon invariants read from an uncertified region")
        vs = self.vertices
        alpha, beta = vs[0]
        gamma = min(a + b for a, b in vs)
        delta = min(b for a, b in vs if a + b == gamma)
        epsilon = Fraction(0) if len(vs) == 1 else (vs[0][1] - vs[1][1]) / (vs[1][0] - vs[0][0])
        return Invariants(alpha, beta, gamma, delta, epsilon)

    def on_lattice(self) -> bool:
        m = factorial(self.r)
        return all((a * m).denominator == 1 and (b * m).denominator == 1 for a, b in self.vertices)

    def order_dropped(self) -> bool:
        return any(a + b < 1 for a, b in self.vertices)

    def to_json(self) -> dict:
        out = {
            "r": self.r,
            "points": sorted([fmt_rat(a), fmt_rat(b)] for a, b in self.points),
            "vertices": [[fmt_rat(a), fmt_rat(b)] for a, b in self.vertices],
            "certified": self.certified,
        }
        if not self.is_empty and self.certified:
            out["invariants"] = self.invariants().to_json()
        return out


def project_term(exp, r: int, coords=(0, 1, 2)):
    i, j, k = (exp[c] for c in coords)
    if k >= r:
        return None
    return (Fraction(i, r - k), Fraction(j, r - k))


def build_delta(gens: Sequence[Poly], r: int, coords=(0, 1, 2)) -> Polygon:
    pts = set()
    bound = INF
    for g in gens:
        for e in g.terms:
            p = project_term(e, r, coords)
            if p is not None:
                pts.add(p)
        if g.trunc is not None:
            bound = min(bound, min(Fraction(g.trunc + 1 - k, r - k) for k in range(r)))
    hull = pareto_hull(pts)
    certified = bound == INF
    return Polygon(r, frozenset(pts), hull, certified, bound, tuple(coords))


SIGMA = {
    "Tr1": lambda a, b: (a + b - 1, b),
    "Tr2": lambda a, b: (a, a + b - 1),
    "Tr3": lambda a, b: (a - 1, b),
    "Tr4": lambda a, b: (a, b - 1),
}


def sigma_map(P: Polygon, kind: str) -> Polygon:
    f = SIGMA[kind]
    pts = frozenset(f(a, b) for a, b in P.points)
    return Polygon(P.r, pts, pareto_hull(pts), P.certified, P.bound, P.coords)


def vertex_form(g: Poly, vertex, r: int, coords=(0, 1, 2)) -> Poly:
    """b_00r z^r plus the terms of g projecting onto ``vertex``."""
    z = coords[2]
    keep = {}
    for e, c in g.terms.items():
        if e[z] == r and sum(e) == r:
            keep[e] = c
            continue
        if project_term(e, r, coords) == tuple(vertex):
            keep[e] = c
    return Poly(g.ring, keep, clean=True)


# tau = 2

def gamma_tau2(gens: Sequence[Poly], r: int, coords=(0, 1, 2)):
    """min k/(r-(i+j)) over terms with i+j < r; infinity when J lies in (x,y)^r."""
    x, y, z = coords
    best = INF
    for g in gens:
        if g.trunc is not None:
            raise TruncationError("gamma needs exact generators")
        for e in g.terms:
            s = e[x] + e[y]
            if s < r:
                best = min(best, Fraction(e[z], r - s))
    return best


def bracket_form(g: Poly, r: int, gamma, coords=(0, 1, 2)) -> Poly:
    """Weighted-initial part along (i+j) gamma + k = r gamma."""
    x, y, z = coords
    if gamma == INF:
        keep = {e: c for e, c in g.terms.items() if e[x] + e[y] == r and e[z] == 0}
    else:
        keep = {e: c for e, c in g.terms.items() if (e[x] + e[y]) * gamma + e[z] == r * gamma}
    return Poly(g.ring, keep, clean=True)


def invariants_by_sweep(points: Iterable[tuple]):
    """Alpha..epsilon straight from the point set without building a hull."""
    pts = list(points)
    alpha = min(a for a, b in pts)
    beta = min(b for a, b in pts if a == alpha)
    gamma = min(a + b for a, b in pts)
    delta = min(b for a, b in pts if a + b == gamma)
    eps = Fraction(0)
    for a, b in pts:
        if a > alpha and b < beta:
            eps = max(eps, (beta - b) / (a - alpha))
    return alpha, beta, gamma, delta, eps
