"""Chart maps of point and curve blow-ups, weak transforms, divisor bookkeeping and permissibility."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .algebra import Poly, Ring
from .algebra.linalg import rank
from .coords import Substitution
from .groebner import groebner, normalize, radical_principal
from .singular_locus import hasse_ideal, nu
from .solve import ExtensionNeeded, _univariate_roots, enumerate_points, solve_zero_dimensional


# divisors

@dataclass
class DivisorRecord:
    plus: list = field(default_factory=list)
    minus: list = field(default_factory=list)

    def components(self) -> list[Poly]:
        return list(self.plus) + list(self.minus)

    def to_json(self) -> dict:
        return {"plus": [p.to_str() for p in self.plus], "minus": [p.to_str() for p in self.minus]}

    @staticmethod
    def from_json(ring: Ring, data: dict) -> "DivisorRecord":
        return DivisorRecord([ring.parse(t) for t in data.get("plus", [])],
                             [ring.parse(t) for t in data.get("minus", [])])

    def apply(self, sub: Substitution) -> "DivisorRecord":
        """Rewrite the components in new coordinates (an automorphism, so no strict transform)."""
        return DivisorRecord([normalize(sub.apply(h)) for h in self.plus],
                             [normalize(sub.apply(h)) for h in self.minus])

    def eta(self, point: Sequence | None = None) -> int:
        return eta_count(self, point)


def passes_through_origin(h: Poly) -> bool:
    return h.field.is_zero(h.constant_term())


def eta_count(divisors: DivisorRecord, point: Sequence | None = None) -> int:
    """Number of E-minus components through the point (the origin by default)."""
    count = 0
    for h in divisors.minus:
        v = h.constant_term() if point is None else h.evaluate(point)
        if h.field.is_zero(v):
            count += 1
    return count


def strict_transform(h: Poly, sub: Substitution, exc: int) -> Poly:
    pulled = sub.apply(h)
    if not pulled.terms:
        raise ArithmeticError("divisor component pulled back to zero")
    k = pulled.var_valuation(exc)
    e = [0] * pulled.nvars
    e[exc] = k
    return normalize(pulled.divide_monomial(e))


def transform_divisors(div: DivisorRecord, sub: Substitution, exc: int, order_kept: bool) -> DivisorRecord:
    """Strict transforms through the new origin, plus the exceptional component, by the E+/E- rule."""
    ring = sub.images[0].ring
    F = normalize(ring.var(exc))

    def carry(comps):
        out = []
        for h in comps:
            s = strict_transform(h, sub, exc)
            if s.variables() and passes_through_origin(s) and s != F and s not in out:
                out.append(s)
        return out

    plus, minus = carry(div.plus), carry(div.minus)
    minus = [h for h in minus if h not in plus]
    if order_kept:
        return DivisorRecord(plus + [F], minus)
    return DivisorRecord([], [h for h in plus + minus] + [F])


# chart maps

def point_chart(ring: Ring, chart: int, shifts: dict | None = None) -> Substitution:
    """Blow-up of the origin, chart where ``chart`` generates the exceptional divisor.

    Old variable x_chart stays; every other x_j becomes x_chart * (x_j + shift_j).
    """
    shifts = shifts or {}
    F = ring.field
    v = ring.var(chart)
    imgs = []
    for j in range(ring.nvars):
        if j == chart:
            imgs.append(v)
        else:
            c = shifts.get(j, F.zero)
            imgs.append(v * (ring.var(j) + ring.const(c)) if not F.is_zero(c) else v * ring.var(j))
    return Substitution(ring, tuple(imgs), "point-blowup",
                        {"chart": ring.names[chart], "shifts": {ring.names[j]: F.fmt(c) for j, c in shifts.items()}})


def curve_chart(ring: Ring, center: Sequence[int], chart: int, shift=None) -> Substitution:
    """Blow-up of the coordinate curve V(center[0], center[1]); ``chart`` is one of the two."""
    F = ring.field
    u, w = center
    other = w if chart == u else u
    v = ring.var(chart)
    imgs = list(ring.gens())
    if shift is not None and not F.is_zero(shift):
        imgs[other] = v * (ring.var(other) + ring.const(shift))
    else:
        imgs[other] = v * ring.var(other)
    return Substitution(ring, tuple(imgs), "curve-blowup",
                        {"chart": ring.names[chart], "center": [ring.names[u], ring.names[w]],
                         "shift": F.fmt(shift) if shift is not None else "0"})


def weak_transform(gens: Sequence[Poly], sub: Substitution, exc: int, power: int) -> list[Poly]:
    """Substituted generators divided by exc^power; raises when the division is not exact."""
    e = [0] * gens[0].nvars
    e[exc] = power
    out = []
    for g in gens:
        pulled = sub.apply(g)
        out.append(pulled.divide_monomial(e))
    return out


def classify_tr(sub: Substitution):
    """("Tr1", eta) | ("Tr2", None) | ("Tr3", None) | ("Tr4", None) | ("other", None) for a 3-variable chart map."""
    ring = sub.ring
    if ring.nvars != 3:
        return "other", None
    x, y, z = ring.gens()
    ix, iy, iz = sub.images
    F = ring.field
    if ix == x and iz == x * z:
        if iy == y:
            return "Tr3", None
        rest = iy - x * y
        if not rest.terms:
            return "Tr1", F.zero
        if set(rest.terms) == {(1, 0, 0)}:
            return "Tr1", rest.terms[(1, 0, 0)]
    if ix == x * y and iy == y and iz == y * z:
        return "Tr2", None
    if ix == x and iy == y and iz == y * z:
        return "Tr4", None
    return "other", None


# permissibility

def _linear_rank(polys: Sequence[Poly]) -> int:
    if not polys:
        return 0
    return rank([p.linear_part() for p in polys], polys[0].field)


def transversal(center: Sequence[Poly], comps: Sequence[Poly]) -> tuple[bool, str]:
    """First-order normal-crossings test of a smooth centre against divisor components at the origin."""
    through = [h for h in comps if passes_through_origin(h)]
    if _linear_rank(through) < len(through):
        return False, "divisor components through the point are not in normal crossings"
    G = groebner(list(center))
    outside = [h for h in through if not G.contains(h)]
    if _linear_rank(list(center) + outside) < len(center) + len(outside):
        return False, "centre is tangent to a divisor component it does not lie in"
    return True, ""


def permissible_check(gens: Sequence[Poly], r: int, center: Sequence[Poly],
                      divisors: DivisorRecord | None = None) -> list[str]:
    """Empty list when the centre is permissible; otherwise the failed checks."""
    problems = []
    G = groebner(list(center))
    if G.is_unit() or not G.origin_in_zero_set():
        return ["centre does not pass through the origin"]
    if not all(G.contains(d) for d in hasse_ideal(gens, r)):
        problems.append("centre is not contained in Sing_r")
    if _linear_rank(list(center)) < len(center):
        problems.append("centre is not nonsingular at the origin")
    if divisors is not None and not problems:
        ok, why = transversal(center, divisors.components())
        if not ok:
            problems.append(why)
    return problems


# fiber search

@dataclass
class FiberPoint:
    sub: Substitution
    exc: int
    gens: list
    order: int
    label: str
    sampled: bool = False


def _restricted(J: Sequence[Poly], zero_vars: Sequence[int]) -> list[Poly]:
    ring = J[0].ring
    pin = {v: ring.zero() for v in zero_vars}
    out = [g.subs(pin) for g in J]
    return [g for g in out if g.terms]


def _irrational_factor(system: Sequence[Poly], free: Sequence[int], fixed: dict) -> Poly | None:
    """A univariate polynomial with roots outside the field, or None when every point is rational.

    Zero-dimensional systems only.
    """
    ring = system[0].ring
    F = ring.field
    pinned = {i: ring.const(fixed.get(i, F.zero)) for i in range(ring.nvars) if i not in free}
    sysp = [g.subs(pinned) for g in system]
    sysp = [g for g in sysp if g.terms]
    if not sysp or not free or any(not g.variables() for g in sysp):
        return None
    G = groebner(sysp, "lex")
    if G.is_unit():
        return None
    last = max(free)
    uni = [p for p in G.polys if p.variables() <= {last}]
    if not uni:
        return None
    rad = radical_principal(uni[0])
    roots = _univariate_roots(rad, last)
    if len(roots) < rad.degree():
        return rad
    for a in roots:
        fx = dict(fixed)
        fx[last] = a
        bad = _irrational_factor(G.polys, [v for v in free if v != last], fx)
        if bad is not None:
            return bad
    return None


def _points_in(J: Sequence[Poly], free: Sequence[int], zero_vars: Sequence[int]) -> tuple[list, bool]:
    """Rational points of V(J) with ``zero_vars`` = 0 and ``free`` ranging; flag says 'sampled'."""
    ring = J[0].ring
    F = ring.field
    system = _restricted(J, zero_vars)
    if any(not g.variables() for g in system):
        return [], False
    if not system:
        system = [ring.zero()]
    if F.is_finite():
        return enumerate_points(system, free, {v: F.zero for v in zero_vars}), False
    try:
        return solve_zero_dimensional(system, free, {v: F.zero for v in zero_vars}), False
    except ValueError:
        pts = []
        for v in free:
            extra = ring.var(v)
            try:
                pts.extend(solve_zero_dimensional(system + [extra], free, {u: F.zero for u in zero_vars}))
            except ValueError:
                continue
        return sorted(set(pts), key=lambda p: tuple(str(c) for c in p)), True


def _check_rational(J, free, zero_vars, what: str):
    ring = J[0].ring
    F = ring.field
    system = _restricted(J, zero_vars)
    if not system or any(not g.variables() for g in system):
        return
    G = groebner(system)
    if G.is_unit():
        return
    if G.dimension() - len(zero_vars) > 0 and len(free) > 1:
        return  # a curve of points: its rational points are used
    bad = _irrational_factor(system, free, {v: F.zero for v in zero_vars})
    if bad is not None:
        raise ExtensionNeeded(f"points of the exceptional fiber ({what}) are not rational", bad.to_str())


def point_fiber(gens: Sequence[Poly], r: int, power: int) -> tuple[list[FiberPoint], FiberPoint | None, bool]:
    """Points of the exceptional fiber of the origin blow-up where the weak transform keeps order r.

    Returns (points, witness chart with order below r or None, sampled flag).
    """
    ring = gens[0].ring
    n = ring.nvars
    F = ring.field
    found, witness, sampled = [], None, False
    for chart in range(n):
        base = point_chart(ring, chart)
        W = weak_transform(gens, base, chart, power)
        origin_order = nu(W)
        if origin_order < r and witness is None:
            witness = FiberPoint(base, chart, W, origin_order, ring.names[chart])
        J = hasse_ideal(W, r)
        zero_vars = [chart] + list(range(chart))  # earlier charts already cover points with those coords nonzero
        free = [j for j in range(n) if j not in zero_vars]
        if not J:
            raise ExtensionNeeded("weak transform vanishes identically")
        _check_rational(J, free, zero_vars, f"chart {ring.names[chart]}")
        pts, smp = _points_in(J, free, zero_vars)
        sampled = sampled or smp
        for pt in pts:
            shifts = {j: pt[j] for j in free if not F.is_zero(pt[j])}
            sub = point_chart(ring, chart, shifts)
            child = weak_transform(gens, sub, chart, power)
            found.append(FiberPoint(sub, chart, child, nu(child), _label(ring, chart, shifts)))
    return found, witness, sampled


def curve_fiber(gens: Sequence[Poly], r: int, power: int, center: Sequence[int]) -> tuple[list[FiberPoint], FiberPoint | None, bool]:
    """Points over the origin in the blow-up of the coordinate curve V(center)."""
    ring = gens[0].ring
    F = ring.field
    u, w = center
    t = next(i for i in range(ring.nvars) if i not in center)
    found, witness, sampled = [], None, False
    for chart, other in ((u, w), (w, u)):
        base = curve_chart(ring, center, chart)
        W = weak_transform(gens, base, chart, power)
        o = nu(W)
        if o < r and witness is None:
            witness = FiberPoint(base, chart, W, o, ring.names[chart])
        J = hasse_ideal(W, r)
        if chart == u:
            zero_vars, free = [u, t], [w]
        else:
            zero_vars, free = [w, t, u], []
        _check_rational(J, free, zero_vars, f"chart {ring.names[chart]}")
        pts, smp = _points_in(J, free, zero_vars)
        sampled = sampled or smp
        for pt in pts:
            c = pt[other] if free else None
            sub = curve_chart(ring, center, chart, c)
            child = weak_transform(gens, sub, chart, power)
            label = ring.names[chart] + ("" if c is None or F.is_zero(c) else f"[{ring.names[other]}+{F.fmt(c)}]")
            found.append(FiberPoint(sub, chart, child, nu(child), label))
    return found, witness, sampled


def _label(ring: Ring, chart: int, shifts: dict) -> str:
    F = ring.field
    extra = ",".join(f"{ring.names[j]}+{F.fmt(c)}" for j, c in sorted(shifts.items()))
    return ring.names[chart] + (f"[{extra}]" if extra else "")
