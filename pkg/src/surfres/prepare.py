"""Coordinate preparation: vertex preparation, translations, very well preparation (tau=1),
solvability for tau=2, and the delta invariant of a plane ideal."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import comb
from typing import Sequence

from .algebra import Poly, Ring
from .algebra.linalg import solve as linsolve
from .coords import Substitution
from .polygon import INF, Polygon, bracket_form, build_delta, gamma_tau2, vertex_form
from .singular_locus import nu


class PreparationBudget(RuntimeError):
    pass


@dataclass
class PreparationStep:
    kind: str  # vertex-prep | translation | tau2-solve | delta-translation | linear
    substitution: Substitution
    eta: object = None
    vertex: tuple | None = None
    n: int | None = None

    def to_json(self) -> dict:
        F = self.substitution.ring.field
        out = {"kind": self.kind, "substitution": self.substitution.to_text()}
        if self.eta is not None:
            out["eta"] = [F.fmt(e) for e in self.eta] if isinstance(self.eta, tuple) else F.fmt(self.eta)
        if self.vertex is not None:
            out["vertex"] = [str(v) for v in self.vertex]
        if self.n is not None:
            out["n"] = self.n
        return out


@dataclass
class Prepared:
    gens: list
    steps: list = field(default_factory=list)
    complete: bool = True
    case: str | None = None
    note: str = ""

    def substitution(self, ring: Ring) -> Substitution:
        sub = Substitution.identity(ring)
        for st in self.steps:
            sub = sub.then(st.substitution)
        return sub


def _p_power_split(r: int, p: int) -> tuple[int, int]:
    """r = r0 * p^s with p not dividing r0 (s = 0 in characteristic 0)."""
    s = 0
    if p:
        while r % p == 0:
            r //= p
            s += 1
    return r, s


def _iterated_root(F, a, s: int):
    for _ in range(s):
        a = F.pth_root(a)
    return a


def _pattern(ring: Ring, lead, base: Poly, eta, r: int, z: int) -> Poly:
    """lead * (z - eta * base)^r."""
    return ((ring.var(z) - base.scale(eta)) ** r).scale(lead)


# tau = 1 vertices

def vertex_test(gens: Sequence[Poly], r: int, vertex, coords=(0, 1, 2)):
    """("prepared", None) or ("solvable", eta) for a vertex of the polygon."""
    a, b = vertex
    if Fraction(a).denominator != 1 or Fraction(b).denominator != 1:
        return "prepared", None
    a, b = int(a), int(b)
    ring = gens[0].ring
    F = ring.field
    x, y, z = coords
    exp = [0] * ring.nvars
    exp[x], exp[y] = a, b
    mono = ring.monomial(exp)
    r0, s = _p_power_split(r, F.char)
    q = F.char ** s if F.char else 1
    zr = [0] * ring.nvars
    zr[z] = r
    eta = None
    for g in gens:
        lead = g.terms.get(tuple(zr), F.zero)
        if F.is_zero(lead):
            continue
        key = [0] * ring.nvars
        key[x], key[y], key[z] = a * q, b * q, (r0 - 1) * q
        c = g.terms.get(tuple(key), F.zero)
        eta = _iterated_root(F, F.neg(F.div(c, F.mul(F.from_int(r0), lead))), s)
        break
    if eta is None or F.is_zero(eta):
        return "prepared", None
    for g in gens:
        lead = g.terms.get(tuple(zr), F.zero)
        form = vertex_form(g, (a, b), r, coords)
        if F.is_zero(lead):
            if form.terms:
                return "prepared", None
            continue
        if form != _pattern(ring, lead, mono, eta, r, z):
            return "prepared", None
    return "solvable", eta


def vertex_substitution(ring: Ring, vertex, eta, coords=(0, 1, 2)) -> Substitution:
    """z -> z + eta x^a y^b, i.e. the new z is z - eta x^a y^b."""
    x, y, z = coords
    exp = [0] * ring.nvars
    exp[x], exp[y] = int(vertex[0]), int(vertex[1])
    return Substitution.single(ring, z, ring.var(z) + ring.monomial(exp, eta), "vertex-prep")


GENERATOR_DEGREE_CAP = 512


def _degree(gens: Sequence[Poly]) -> int:
    return max(g.degree() for g in gens)


def well_prepare(gens: Sequence[Poly], r: int, max_steps: int = 64, max_degree: int = 64,
                 coords=(0, 1, 2)) -> Prepared:
    """Remove solvable vertices, smallest first, until none is left or a budget is hit."""
    gens = list(gens)
    ring = gens[0].ring
    steps: list[PreparationStep] = []
    while True:
        P = build_delta(gens, r, coords)
        target = None
        for v in sorted(P.vertices):
            status, eta = vertex_test(gens, r, v, coords)
            if status == "solvable":
                target = (v, eta)
                break
        if target is None:
            return Prepared(gens, steps, True)
        v, eta = target
        if len(steps) >= max_steps or v[0] + v[1] > max_degree or _degree(gens) > GENERATOR_DEGREE_CAP:
            return Prepared(gens, steps, False, note="formally unprepared: preparation budget exhausted")
        sub = vertex_substitution(ring, v, eta, coords)
        gens = sub.apply_all(gens)
        steps.append(PreparationStep("vertex-prep", sub, eta, (int(v[0]), int(v[1]))))


def translation(ring: Ring, n: int, eta, coords=(0, 1, 2)) -> Substitution:
    """y -> y + eta x^n, i.e. the new y is y - eta x^n."""
    x, y, _ = coords
    exp = [0] * ring.nvars
    exp[x] = n
    return Substitution.single(ring, y, ring.var(y) + ring.monomial(exp, eta), "translation")


def translate_and_reprepare(gens: Sequence[Poly], r: int, n: int, eta, max_steps: int = 64,
                            coords=(0, 1, 2)) -> Prepared:
    ring = gens[0].ring
    sub = translation(ring, n, eta, coords)
    if n * _degree(gens) > GENERATOR_DEGREE_CAP:
        return Prepared(list(gens), [], False, note="translation would exceed the degree budget")
    moved = sub.apply_all(gens)
    prep = well_prepare(moved, r, max_steps, coords=coords)
    prep.steps.insert(0, PreparationStep("translation", sub, eta, None, n))
    return prep


def _face_coefficients(gens, r, n, c0, coords) -> list[dict[int, dict[int, object]]]:
    """Per generator: {k: {j: coeff}} for terms projecting onto the line a + n b = c0."""
    x, y, z = coords
    out = []
    for g in gens:
        per = {}
        for e, c in g.terms.items():
            k = e[z]
            if k >= r:
                continue
            if Fraction(e[x] + n * e[y], r - k) == c0:
                per.setdefault(k, {})[e[y]] = c
        out.append(per)
    return out


def _candidate_etas(gens, r, n, c0, coords) -> list:
    """Translation parameters worth trying to raise the lowest point on a line."""
    ring = gens[0].ring
    F = ring.field
    if F.is_finite():
        return [e for e in F.elements() if not F.is_zero(e)]
    from .solve import _rational_roots
    one = Ring(F, ("t",))
    cands = set()
    zr = [0] * ring.nvars
    zr[coords[2]] = r
    for g, per in zip(gens, _face_coefficients(gens, r, n, c0, coords)):
        polys = {k: Poly(one, {(j,): c for j, c in d.items()}) for k, d in per.items()}
        for P in polys.values():
            if P.degree() >= 1:
                cands.update(_rational_roots(P, 0))
        lead = g.terms.get(tuple(zr), F.zero)
        if not F.is_zero(lead) and r - 1 in polys:
            Pr1 = polys[r - 1]
            for k, P in polys.items():
                if k == r - 1:
                    continue
                Q = P * (one.const(F.from_int(r) * lead) ** (r - k)) - (Pr1 ** (r - k)).scale(lead * comb(r, k))
                if Q.degree() >= 1:
                    cands.update(_rational_roots(Q, 0))
    cands.discard(0)
    return sorted(cands)[:24]


def _lowest_on_line(P: Polygon, n: int, c0) -> Fraction:
    """Second coordinate of the lowest polygon vertex on a + n b = c0."""
    on = [b for a, b in P.vertices if a + n * b == c0]
    return min(on) if on else INF


def very_well_prepare(gens: Sequence[Poly], r: int, max_steps: int = 64, allow_translation: bool = True,
                      coords=(0, 1, 2)) -> Prepared:
    """Well prepare, then search translations maximizing delta (case 1) or d (case 2c)."""
    prep = well_prepare(gens, r, max_steps, coords=coords)
    gens, steps = prep.gens, list(prep.steps)
    complete = prep.complete
    while True:
        P = build_delta(gens, r, coords)
        if P.is_empty:
            return Prepared(gens, steps, complete, "empty")
        inv = P.invariants()
        alpha, beta = inv.alpha, inv.beta
        if inv.lowest_on_gamma != (alpha, beta):
            case, n, c0, current = "1", 1, inv.gamma, inv.delta
        elif inv.epsilon == 0:
            return Prepared(gens, steps, complete, "2a")
        elif (1 / inv.epsilon).denominator != 1:
            return Prepared(gens, steps, complete, "2b")
        else:
            n = int(1 / inv.epsilon)
            case, c0 = "2c", alpha + n * beta
            current = _lowest_on_line(P, n, c0)
        if not allow_translation:
            return Prepared(gens, steps, complete, case, "translations disabled")
        remaining = max_steps - len(steps) - 1
        if remaining < 0:
            return Prepared(gens, steps, False, case, "very well preparation budget exhausted")
        best = None
        blocked = False
        for eta in _candidate_etas(gens, r, n, c0, coords):
            trial = translate_and_reprepare(gens, r, n, eta, remaining, coords)
            if not trial.steps:
                blocked = True
                continue
            Q = build_delta(trial.gens, r, coords)
            if Q.is_empty:
                continue
            if case == "1":
                value = Q.invariants().delta
            else:
                value = _lowest_on_line(Q, n, c0)
            if value > current and (best is None or value > best[0]):
                best = (value, trial)
        if best is None:
            if blocked:
                return Prepared(gens, steps, False, case, "translation would exceed the degree budget")
            return Prepared(gens, steps, complete, case)
        gens = best[1].gens
        steps.extend(best[1].steps)
        complete = complete and best[1].complete


# tau = 2

def tau2_solvability(gens: Sequence[Poly], r: int, coords=(0, 1, 2)):
    """("solvable", (alpha, beta)) when every [g] is L_g(x - alpha z^g, y - beta z^g), else ("not-solvable", None)."""
    gamma = gamma_tau2(gens, r, coords)
    if gamma == INF or Fraction(gamma).denominator != 1:
        return "not-solvable", None
    gamma = int(gamma)
    ring = gens[0].ring
    F = ring.field
    x, y, z = coords
    brackets, lforms = [], []
    for g in gens:
        brackets.append(bracket_form(g, r, gamma, coords))
        lforms.append(Poly(ring, {e: c for e, c in g.terms.items() if e[x] + e[y] == r and e[z] == 0}))

    def matches(al, be):
        zx = [0] * ring.nvars
        zx[z] = gamma
        shift = {x: ring.var(x) - ring.monomial(zx, al), y: ring.var(y) - ring.monomial(zx, be)}
        return all(B == L.subs(shift) for B, L in zip(brackets, lforms))

    if F.is_finite():
        for al, be in product(list(F.elements()), repeat=2):
            if (F.is_zero(al) and F.is_zero(be)):
                continue
            if matches(al, be):
                return "solvable", (al, be)
        return "not-solvable", None
    rows, rhs = [], []
    for B, L in zip(brackets, lforms):
        for i in range(r):
            j = r - 1 - i
            e = [0] * ring.nvars
            e[x], e[y], e[z] = i, j, gamma
            ex = [0] * ring.nvars
            ex[x], ex[y] = i + 1, j
            ey = [0] * ring.nvars
            ey[x], ey[y] = i, j + 1
            ca = F.neg(F.mul(F.from_int(i + 1), L.terms.get(tuple(ex), F.zero)))
            cb = F.neg(F.mul(F.from_int(j + 1), L.terms.get(tuple(ey), F.zero)))
            rows.append([ca, cb])
            rhs.append(B.terms.get(tuple(e), F.zero))
    sol = linsolve(rows, rhs, F)
    if sol is None or (F.is_zero(sol[0]) and F.is_zero(sol[1])):
        return "not-solvable", None
    if matches(sol[0], sol[1]):
        return "solvable", (sol[0], sol[1])
    return "not-solvable", None


def tau2_prepare(gens: Sequence[Poly], r: int, max_steps: int = 64, coords=(0, 1, 2)) -> Prepared:
    """Substitute until the ideal is not solvable (bounded)."""
    gens = list(gens)
    ring = gens[0].ring
    x, y, z = coords
    steps = []
    while True:
        status, sol = tau2_solvability(gens, r, coords)
        if status != "solvable":
            return Prepared(gens, steps, True)
        if len(steps) >= max_steps:
            return Prepared(gens, steps, False, note="tau=2 solvability budget exhausted")
        gamma = int(gamma_tau2(gens, r, coords))
        zx = [0] * ring.nvars
        zx[z] = gamma
        imgs = list(ring.gens())
        imgs[x] = ring.var(x) + ring.monomial(zx, sol[0])
        imgs[y] = ring.var(y) + ring.monomial(zx, sol[1])
        sub = Substitution(ring, tuple(imgs), "tau2-solve")
        gens = sub.apply_all(gens)
        steps.append(PreparationStep("tau2-solve", sub, sol))


# plane ideals

def delta_of(gens: Sequence[Poly], r: int, coords=(0, 1)):
    """min i/(r-j) over terms with j < r; infinity when y^r divides everything."""
    x, y = coords
    best = INF
    for g in gens:
        for e in g.terms:
            if e[y] < r:
                best = min(best, Fraction(e[x], r - e[y]))
    return best


def plane_good_parameters(gens: Sequence[Poly]) -> Substitution:
    """Linear change so that some generator of order r has a nonzero y^r coefficient."""
    ring = gens[0].ring
    F = ring.field
    r = nu(gens)
    forms = [g.homogeneous_part(r) for g in gens if g.order() == r]
    if any(not F.is_zero(L.terms.get((0, r), F.zero)) for L in forms):
        return Substitution.identity(ring)
    if any(not F.is_zero(L.terms.get((r, 0), F.zero)) for L in forms):
        return Substitution(ring, (ring.var(1), ring.var(0)), "linear")
    candidates = F.elements() if F.is_finite() else (F.from_int(c) for c in range(1, 4 * r + 2))
    for c in candidates:
        if F.is_zero(c):
            continue
        sub = Substitution(ring, (ring.var(0) + ring.var(1).scale(c), ring.var(1)), "linear")
        if any(not F.is_zero(sub.apply(L).terms.get((0, r), F.zero)) for L in forms):
            return sub
    from .solve import ExtensionNeeded
    raise ExtensionNeeded("no good parameters over the current field")


def delta_2d(gens: Sequence[Poly], r: int | None = None, max_steps: int = 64) -> Prepared:
    """Maximize delta over y -> y + b x^n; ``case`` holds delta as text."""
    gens = list(gens)
    ring = gens[0].ring
    F = ring.field
    r = nu(gens) if r is None else r
    steps = []
    r0, s = _p_power_split(r, F.char)
    q = F.char ** s if F.char else 1
    while True:
        d = delta_of(gens, r)
        if d == INF or Fraction(d).denominator != 1:
            break
        n = int(d)
        b = None
        for g in gens:
            lead = g.terms.get((0, r), F.zero)
            if F.is_zero(lead):
                continue
            c = g.terms.get((n * q, (r0 - 1) * q), F.zero)
            b = _iterated_root(F, F.neg(F.div(c, F.mul(F.from_int(r0), lead))), s)
            break
        if b is None or F.is_zero(b):
            break
        ok = True
        for g in gens:
            lead = g.terms.get((0, r), F.zero)
            face = Poly(ring, {e: c for e, c in g.terms.items()
                               if (e[1] < r and Fraction(e[0], r - e[1]) == d) or e == (0, r)})
            target = ((ring.var(1) - ring.monomial((n, 0), b)) ** r).scale(lead)
            if face != target:
                ok = False
                break
        if not ok:
            break
        if len(steps) >= max_steps:
            return Prepared(gens, steps, False, str(d), "delta maximization budget exhausted")
        sub = Substitution.single(ring, 1, ring.var(1) + ring.monomial((n, 0), b), "delta-translation")
        gens = sub.apply_all(gens)
        steps.append(PreparationStep("delta-translation", sub, b, None, n))
    return Prepared(gens, steps, True, str(delta_of(gens, r)) if delta_of(gens, r) != INF else "inf")
