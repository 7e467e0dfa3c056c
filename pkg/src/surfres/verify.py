"""Independent re-check of a chart tree.

Nothing here calls the engine's preparation, polygon or blow-up code: orders,
projected points, hull vertices, invariants, directrix dimensions, chart
shapes and divisor transforms are recomputed from the raw polynomials with
separate (slower, simpler) routines.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import factorial
from typing import Sequence

from .algebra import Poly, Ring
from .algebra.linalg import rank

INF = math.inf


@dataclass
class Report:
    failures: list = field(default_factory=list)
    checked: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures

    def fail(self, node, check: str, detail: str = "") -> None:
        self.failures.append({"node": node, "check": check, "detail": detail})

    def count(self, check: str) -> None:
        self.checked[check] = self.checked.get(check, 0) + 1

    def to_json(self) -> dict:
        return {"ok": self.ok, "failures": self.failures, "checked": dict(sorted(self.checked.items()))}


def _rat(v) -> str:
    if v == INF:
        return "inf"
    v = Fraction(v)
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def _order(polys: Sequence[Poly]) -> int | float:
    degs = [sum(e) for g in polys for e in g.terms]
    return min(degs) if degs else INF


def _points(polys: Sequence[Poly], r: int) -> set:
    """(i/(r-k), j/(r-k)) for every term x^i y^j z^k with k < r."""
    out = set()
    for g in polys:
        for i, j, k in g.terms:
            if k < r:
                out.add((Fraction(i, r - k), Fraction(j, r - k)))
    return out


def _vertices(points: set) -> list:
    """Vertices of the hull plus the quadrant, by testing each point against all pairs."""
    pts = sorted(points)
    out = []
    for p in pts:
        if any(q != p and q[0] <= p[0] and q[1] <= p[1] for q in pts):
            continue
        extreme = True
        for u in pts:
            for v in pts:
                if not (u[0] < p[0] < v[0]):
                    continue
                # height of the segment uv above a = p[0]
                t = (p[0] - u[0]) / (v[0] - u[0])
                if u[1] + t * (v[1] - u[1]) <= p[1]:
                    extreme = False
                    break
            if not extreme:
                break
        if extreme:
            out.append(p)
    return out


def _invariants(points: set):
    alpha = min(a for a, _ in points)
    beta = min(b for a, b in points if a == alpha)
    gamma = min(a + b for a, b in points)
    delta = min(b for a, b in points if a + b == gamma)
    eps = Fraction(0)
    for a, b in points:
        if a > alpha and b < beta:
            eps = max(eps, (beta - b) / (a - alpha))
    return alpha, beta, gamma, delta, eps


def _omega(points: set):
    alpha, beta, _, _, eps = _invariants(points)
    return (beta, INF if eps == 0 else 1 / eps, alpha)


def _gamma2(polys: Sequence[Poly], r: int):
    best = INF
    for g in polys:
        for i, j, k in g.terms:
            if i + j < r:
                best = min(best, Fraction(k, r - i - j))
    return best


def _delta2(polys: Sequence[Poly], r: int):
    best = INF
    for g in polys:
        for i, j in g.terms:
            if j < r:
                best = min(best, Fraction(i, r - j))
    return best


def _leading_forms(polys: Sequence[Poly], r: int) -> list[Poly]:
    out = []
    for g in polys:
        top = {e: c for e, c in g.terms.items() if sum(e) == r}
        if top:
            out.append(Poly(g.ring, top))
    return out


def _tau(polys: Sequence[Poly]) -> int:
    """Codimension of the translations fixing every leading form."""
    r = _order(polys)
    ring = polys[0].ring
    F = ring.field
    n = ring.nvars
    forms = _leading_forms(polys, r)
    if F.char == 0:
        # the linear forms among all (r-1)-st partial derivatives span T
        rows = []
        for L in forms:
            for alpha in product(range(r), repeat=n):
                if sum(alpha) != r - 1:
                    continue
                d = L
                for v, a in enumerate(alpha):
                    for _ in range(a):
                        d = d.derivative(v)
                if d.terms:
                    rows.append([d.coeff(tuple(1 if i == v else 0 for i in range(n))) for v in range(n)])
        return rank(rows, F) if rows else 0
    invariant = []
    for w in product(list(F.elements()), repeat=n):
        shifted = [ring.var(i) + ring.const(w[i]) for i in range(n)]
        if all(L.subs(shifted) == L for L in forms):
            invariant.append(list(w))
    return n - (rank(invariant, F) if invariant else 0)


def _same_up_to_scalar(f: Poly, g: Poly) -> bool:
    if set(f.terms) != set(g.terms):
        return False
    if not f.terms:
        return True
    F = f.field
    e = next(iter(f.terms))
    a, b = f.terms[e], g.terms[e]
    return all(F.mul(c, b) == F.mul(g.terms[m], a) for m, c in f.terms.items())


def _same_components(a: Sequence[Poly], b: Sequence[Poly]) -> bool:
    if len(a) != len(b):
        return False
    used = [False] * len(b)
    for f in a:
        hit = next((i for i, g in enumerate(b) if not used[i] and _same_up_to_scalar(f, g)), None)
        if hit is None:
            return False
        used[hit] = True
    return True


def _pull(f: Poly, images: Sequence[Poly]) -> Poly:
    return f.subs(list(images))


def _strict(f: Poly, images: Sequence[Poly], exc: int) -> Poly:
    g = _pull(f, images)
    k = min(e[exc] for e in g.terms)
    return Poly(g.ring, {tuple(v - k if i == exc else v for i, v in enumerate(e)): c for e, c in g.terms.items()})


def _scaled_shift(img: Poly, exc: int, j: int):
    """c when img == x_exc * (x_j + c), else None."""
    ring = img.ring
    rest = img - ring.var(exc) * ring.var(j)
    if not rest.terms:
        return ring.field.zero
    e = tuple(1 if i == exc else 0 for i in range(ring.nvars))
    if set(rest.terms) == {e}:
        return rest.terms[e]
    return None


def _chart_shape(images: Sequence[Poly], exc: int):
    """(set of scaled variables, shifts) or None when the map is not a blow-up chart."""
    ring = images[0].ring
    if images[exc] != ring.var(exc):
        return None
    scaled, shifts = set(), {}
    for j, img in enumerate(images):
        if j == exc or img == ring.var(j):
            continue
        c = _scaled_shift(img, exc, j)
        if c is None:
            return None
        scaled.add(j)
        if not ring.field.is_zero(c):
            shifts[j] = c
    return scaled, shifts


def _tr_kind(images: Sequence[Poly], exc):
    ring = images[0].ring
    if ring.nvars != 3 or exc is None:
        return "other", None
    shape = _chart_shape(images, exc)
    if shape is None:
        return "other", None
    scaled, shifts = shape
    if exc == 0 and scaled == {1, 2} and 2 not in shifts:
        return "Tr1", shifts.get(1, ring.field.zero)
    if exc == 1 and scaled == {0, 2} and not shifts:
        return "Tr2", None
    if exc == 0 and scaled == {2} and not shifts:
        return "Tr3", None
    if exc == 1 and scaled == {2} and not shifts:
        return "Tr4", None
    return "other", None


def _chart_label(ring: Ring, images: Sequence[Poly], exc: int) -> str:
    shape = _chart_shape(images, exc)
    shifts = shape[1] if shape else {}
    extra = ",".join(f"{ring.names[j]}+{ring.field.fmt(c)}" for j, c in sorted(shifts.items()))
    return ring.names[exc] + (f"[{extra}]" if extra else "")


SIGMA = {
    "Tr1": lambda a, b: (a + b - 1, b),
    "Tr2": lambda a, b: (a, a + b - 1),
    "Tr3": lambda a, b: (a - 1, b),
    "Tr4": lambda a, b: (a, b - 1),
}


def _in_power_of_coordinates(g: Poly, variables: Sequence[int], r: int) -> bool:
    return all(sum(e[v] for v in variables) >= r for e in g.terms)


def _snc_at_origin(f: Poly | None, comps: Sequence[Poly]) -> bool:
    polys = [h for h in comps if h.field.is_zero(h.constant_term())]
    if f is not None and f.field.is_zero(f.constant_term()):
        polys.append(f)
    if not polys:
        return True
    n = polys[0].nvars
    rows = [[p.coeff(tuple(1 if i == v else 0 for i in range(n))) for v in range(n)] for p in polys]
    return rank(rows, polys[0].field) == len(polys)


def _is_automorphism_at_origin(images: Sequence[Poly]) -> bool:
    ring = images[0].ring
    n = ring.nvars
    if any(not ring.field.is_zero(img.constant_term()) for img in images):
        return False
    rows = [[img.coeff(tuple(1 if i == v else 0 for i in range(n))) for v in range(n)] for img in images]
    return rank(rows, ring.field) == n


# the checks

def _node_polygon(n) -> dict:
    r = n.nu
    pts = _points(n.prepared, r)
    out = {"r": r, "points": sorted([_rat(a), _rat(b)] for a, b in pts),
           "vertices": [[_rat(a), _rat(b)] for a, b in _vertices(pts)],
           "certified": all(g.trunc is None for g in n.prepared)}
    if pts and out["certified"]:
        alpha, beta, gamma, delta, eps = _invariants(pts)
        om = _omega(pts)
        out["invariants"] = {"alpha": _rat(alpha), "beta": _rat(beta), "gamma": _rat(gamma),
                             "delta": _rat(delta), "epsilon": _rat(eps), "omega": [_rat(v) for v in om]}
    return out


def _coefficient_order(polys: Sequence[Poly], r: int):
    best = INF
    for g in polys:
        parts: dict = {}
        for e, c in g.terms.items():
            if e[2] < r:
                parts.setdefault(e[2], []).append(sum(e) - e[2])
        for k, degs in parts.items():
            best = min(best, min(degs) * (factorial(r) // (r - k)))
    return best


def _expected_certificates(n, n_vars: int) -> dict:
    out: dict = {}
    r = n.nu
    if n.center is None or n.center.get("stage") == "snc" or not n.prepared:
        return out
    if n_vars == 2:
        if n.center["kind"] == "point":
            out["delta"] = _rat(_delta2(n.prepared, r))
        return out
    if n.tau == 1:
        pts = _points(n.prepared, r)
        if not pts:
            out["polygon"] = "empty"
        elif not all(g.trunc is None for g in n.prepared):
            out["polygon"] = "uncertified"
        else:
            poly = _node_polygon(n)
            out["omega"] = poly["invariants"]["omega"]
            out["invariants"] = poly["invariants"]
    elif n.tau == 2:
        out["gamma"] = _rat(_gamma2(n.prepared, r))
    return out


def _check_node(t, n, rep: Report) -> None:
    ring = n.ring
    nv = ring.nvars
    rep.count("order")
    if _order(n.generators) != n.nu:
        rep.fail(n.id, "order", f"recorded nu={n.nu}, recomputed {_order(n.generators)}")
    if n.tau is not None:
        rep.count("tau")
        if _tau(n.generators) != n.tau:
            rep.fail(n.id, "tau", f"recorded tau={n.tau}, recomputed {_tau(n.generators)}")
    if n.preparation is not None:
        rep.count("preparation")
        imgs = list(n.preparation.images)
        if not _is_automorphism_at_origin(imgs):
            rep.fail(n.id, "preparation", "coordinate change is not an automorphism fixing the origin")
        elif [g.subs(imgs) for g in n.generators] != list(n.prepared):
            rep.fail(n.id, "preparation", "prepared generators do not match the recorded change")
        elif n.tau == 1 and nv == 3 and n.center and n.center.get("stage") != "snc":
            z_power = (0, 0, n.nu)
            for L in _leading_forms(n.prepared, n.nu):
                if set(L.terms) != {z_power}:
                    rep.fail(n.id, "good-parameters", "a leading form is not a multiple of z^r")
                    break
    expected_certs = _expected_certificates(n, nv)
    recorded = {k: v for k, v in n.certificates.items() if k != "coefficient_order"}
    rep.count("certificates")
    if recorded != expected_certs:
        rep.fail(n.id, "certificates", f"recorded {recorded}, recomputed {expected_certs}")
    if "coefficient_order" in n.certificates or (
            nv == 3 and n.tau == 1 and n.prepared and n.center and n.center.get("stage") != "snc"
            and sum(1 for h in _prep_divisors(n).minus if h.field.is_zero(h.constant_term())) == 1):
        co = _coefficient_order(n.prepared, n.nu)
        rep.count("coefficient-order")
        if n.certificates.get("coefficient_order") != (co if co != INF else "inf"):
            rep.fail(n.id, "coefficient-order", f"recomputed {co}")
    if n.polygon is not None or (nv == 3 and n.tau == 1 and n.prepared and n.center
                                 and n.center.get("stage") != "snc"):
        rep.count("polygon")
        if n.polygon != _node_polygon(n):
            rep.fail(n.id, "polygon", "recorded polygon differs from the recomputed one")


def _prep_divisors(n):
    from .blowup import DivisorRecord
    if n.preparation is None:
        return n.divisors
    imgs = list(n.preparation.images)
    return DivisorRecord([h.subs(imgs) for h in n.divisors.plus], [h.subs(imgs) for h in n.divisors.minus])


def _check_edge(t, parent, n, rep: Report) -> None:
    ring = n.ring
    F = ring.field
    imgs = list(n.substitution.images)
    if parent.center is None or parent.preparation is None:
        rep.fail(n.id, "edge", "parent has no recorded centre")
        return
    kind = parent.center["kind"]
    stage = parent.center.get("stage", "order")
    e = n.exc
    rep.count("chart-shape")
    if e is None:
        rep.fail(n.id, "chart-shape", "no exceptional variable")
        return
    shape = _chart_shape(imgs, e)
    if kind == "hypersurface":
        ok = all(img == ring.var(i) for i, img in enumerate(imgs)) and parent.center.get("vars") == [e]
    elif kind == "point":
        ok = shape is not None and shape[0] == set(range(ring.nvars)) - {e}
    elif kind == "curve":
        u, w = parent.center["vars"]
        other = w if e == u else u
        ok = e in (u, w) and shape is not None and shape[0] == {other} and (e == u or not shape[1])
    else:
        ok = False
    if not ok:
        rep.fail(n.id, "chart-shape", f"substitution does not match a {kind} centre")
        return
    rep.count("weak-transform")
    if n.power != parent.nu:
        rep.fail(n.id, "weak-transform", f"divided by exceptional power {n.power}, centre order {parent.nu}")
    xe = ring.var(e) ** n.power
    for g, h in zip(parent.prepared, n.generators):
        if g.subs(imgs) != h * xe:
            rep.fail(n.id, "weak-transform", "generator times exceptional power differs from the pull-back")
            break
    if len(parent.prepared) != len(n.generators):
        rep.fail(n.id, "weak-transform", "generator count changed")
    rep.count("centre")
    r = parent.nu
    if stage == "order":
        if kind == "point" and parent.nu < 1:
            rep.fail(n.id, "centre", "point centre outside the order locus")
        if kind in ("curve", "hypersurface"):
            if not all(_in_power_of_coordinates(g, parent.center["vars"], r) for g in parent.prepared):
                rep.fail(n.id, "centre", f"centre is not contained in Sing_{r}")
    rep.count("monotonicity")
    if n.nu > parent.nu:
        rep.fail(n.id, "monotonicity", f"order increased {parent.nu} -> {n.nu}")
    if n.nu == parent.nu and n.tau is not None and parent.tau is not None and stage == "order" and n.tau < parent.tau:
        rep.fail(n.id, "monotonicity", f"tau decreased {parent.tau} -> {n.tau} at constant order")
    rep.count("edge-record")
    tr, eta = _tr_kind(imgs, e)
    want = {"chart": _chart_label(ring, imgs, e), "stage": stage, "tr": tr}
    if eta is not None:
        want["eta"] = F.fmt(eta)
    if n.edge.get("witness"):
        want["witness"] = True
        if stage == "order" and n.nu >= parent.nu:
            rep.fail(n.id, "edge-record", "witness chart keeps the order")
        if stage == "snc" and not _snc_at_origin(n.generators[0] if n.nu == 1 else None, n.divisors.components()):
            rep.fail(n.id, "edge-record", "witness chart is not in normal crossings")
    elif stage == "order" and kind != "hypersurface" and n.nu != parent.nu:
        rep.fail(n.id, "edge-record", "non-witness chart without the centre's order")
    if n.edge != want:
        rep.fail(n.id, "edge-record", f"recorded {n.edge}, recomputed {want}")
    if tr in SIGMA and (tr != "Tr1" or F.is_zero(eta)) and parent.tau == 1 and stage == "order" \
            and all(g.trunc is None for g in n.generators):
        rep.count("sigma-law")
        mapped = {SIGMA[tr](a, b) for a, b in _points(parent.prepared, r)}
        if _points(n.generators, r) != mapped:
            rep.fail(n.id, "sigma-law", f"{tr} image of the projected points differs")
    _check_divisors(parent, n, imgs, e, rep)


def _check_divisors(parent, n, imgs, e, rep: Report) -> None:
    rep.count("divisors")
    ring = n.ring
    prev = _prep_divisors(parent)
    F_comp = ring.var(e)

    def carry(comps):
        out = []
        for h in comps:
            s = _strict(h, imgs, e)
            if s.variables() and s.field.is_zero(s.constant_term()) and not _same_up_to_scalar(s, F_comp) \
                    and not any(_same_up_to_scalar(s, o) for o in out):
                out.append(s)
        return out

    plus, minus = carry(prev.plus), carry(prev.minus)
    minus = [h for h in minus if not any(_same_up_to_scalar(h, p) for p in plus)]
    if n.nu == parent.nu:
        want_plus, want_minus = plus + [F_comp], minus
    else:
        want_plus, want_minus = [], plus + minus + [F_comp]
    if not (_same_components(n.divisors.plus, want_plus) and _same_components(n.divisors.minus, want_minus)):
        rep.fail(n.id, "divisors", "divisor record does not follow the transform rule")
    if any(_same_up_to_scalar(a, b) for a in n.divisors.plus for b in n.divisors.minus):
        rep.fail(n.id, "divisors", "a component is in both E+ and E-")


def _paths(t) -> list[dict]:
    """Order-constant chains of point or curve blow-ups, rebuilt from parent links."""
    kids: dict = {}
    for n in t.nodes:
        kids.setdefault(n.parent, []).append(n)

    def link(a, b):
        return (a.center is not None and a.center["kind"] in ("point", "curve")
                and a.center.get("stage", "order") == "order" and b.nu == a.nu)

    out = []

    def walk(chain):
        nxt = [c for c in kids.get(chain[-1].id, []) if link(chain[-1], c)]
        if not nxt:
            if len(chain) > 1:
                out.append({"nodes": [c.id for c in chain], "r": chain[0].nu})
            return
        for c in nxt:
            walk(chain + [c])

    for n in t.nodes:
        if n.parent is not None and link(t.nodes[n.parent], n):
            continue
        if n.nu >= 2 and n.center is not None and n.center["kind"] in ("point", "curve"):
            walk([n])
    return sorted(out, key=lambda p: p["nodes"])


def _descent(t, path: dict, rep: Report) -> None:
    nodes = [t.nodes[i] for i in path["nodes"]]
    nv = nodes[0].ring.nvars
    for a, b in zip(nodes, nodes[1:]):
        r = a.nu
        if nv == 2:
            rep.count("descent-delta")
            da, db = _delta2(a.prepared, r), _delta2(b.prepared, r)
            if db != da - 1:
                rep.fail(b.id, "descent-delta", f"delta {_rat(da)} -> {_rat(db)}")
            continue
        if a.tau != b.tau:
            rep.count("descent-regime-change")
            continue
        if a.tau == 2:
            rep.count("descent-gamma")
            ga, gb = _gamma2(a.prepared, r), _gamma2(b.prepared, r)
            if gb != ga - 1:
                rep.fail(b.id, "descent-gamma", f"gamma {_rat(ga)} -> {_rat(gb)}")
        elif a.tau == 1:
            pa, pb = _points(a.prepared, r), _points(b.prepared, r)
            if not pa or not pb:
                continue
            rep.count("descent-omega")
            oa, ob = _omega(pa), _omega(pb)
            if not ob < oa:
                rep.fail(b.id, "descent-omega", f"Omega {[_rat(v) for v in oa]} -> {[_rat(v) for v in ob]}")
            tr, eta = _tr_kind(list(b.substitution.images), b.exc)
            if tr == "Tr1" and b.ring.field.is_zero(eta) and oa[0] == ob[0] and INF not in (oa[1], ob[1]) \
                    and oa[1] != ob[1]:
                rep.count("descent-inverse-epsilon")
                if ob[1] != oa[1] - 1:
                    rep.fail(b.id, "descent-inverse-epsilon", f"1/epsilon {_rat(oa[1])} -> {_rat(ob[1])}")


def certify(t, job_generators: Sequence[Poly] | None = None, job_divisors=None) -> Report:
    """Re-check every node, edge, focus path and the outcome of a trace."""
    rep = Report()
    nodes = t.nodes
    root = nodes[0]
    if root.parent is not None or any(n.parent is None for n in nodes[1:]):
        rep.fail(0, "tree", "exactly the first node must be the root")
    if job_generators is not None:
        rep.count("root")
        if list(job_generators) != list(root.generators):
            rep.fail(0, "root", "root generators differ from the job")
    if job_divisors is not None:
        if not (_same_components(root.divisors.plus, job_divisors.plus)
                and _same_components(root.divisors.minus, job_divisors.minus)):
            rep.fail(0, "root", "root divisors differ from the job")
    if root.edge != {"stage": "root"} or root.exc is not None or root.power != 0 \
            or any(img != root.ring.var(i) for i, img in enumerate(root.substitution.images)):
        rep.fail(0, "root", "root carries an edge")
    children: dict = {}
    for n in nodes:
        children.setdefault(n.parent, []).append(n)
    for n in nodes:
        _check_node(t, n, rep)
        if n.parent is not None:
            _check_edge(t, nodes[n.parent], n, rep)
    paths = _paths(t)
    rep.count("paths")
    if t.recorded_paths is not None and t.recorded_paths != paths:
        rep.fail(None, "paths", "recorded focus paths differ from the tree")
    for p in paths:
        _descent(t, p, rep)
    _check_outcome(t, children, rep)
    return rep


def _check_outcome(t, children: dict, rep: Report) -> None:
    rep.count("outcome")
    out = t.outcome
    nodes = t.nodes
    principal = len(nodes[0].generators) == 1
    if out.get("charts") != len(nodes):
        rep.fail(None, "outcome", "chart count differs")
    depth = {0: 0}
    for n in nodes[1:]:
        depth[n.id] = depth[n.parent] + 1
    if out.get("max_depth") != max(depth.values()):
        rep.fail(None, "outcome", "max depth differs")
    for n in nodes:
        has_kids = n.id in children
        if n.status == "expanded" and n.center is None:
            rep.fail(n.id, "status", "expanded without a centre")
        if has_kids and n.status != "expanded":
            rep.fail(n.id, "status", f"node with children marked {n.status}")
        if n.status == "resolved":
            if n.nu >= 2:
                rep.fail(n.id, "status", "resolved chart still has order >= 2")
            if principal and not _snc_at_origin(n.generators[0] if n.nu == 1 else None, n.divisors.components()):
                rep.fail(n.id, "status", "resolved chart is not in normal crossings")
        if n.status not in ("expanded", "resolved", "open"):
            rep.fail(n.id, "status", f"unknown status {n.status!r}")
        if n.status == "expanded" and not has_kids and n.center and n.center.get("stage") != "snc":
            rep.fail(n.id, "status", "blow-up without charts")
    opened = [n.id for n in nodes if n.status == "open"]
    status = out.get("status")
    if status == "success" and opened:
        rep.fail(None, "outcome", f"success with open charts {opened}")
    if status in ("budget", "unsupported") and not opened:
        rep.fail(None, "outcome", f"{status} outcome without an open chart")
    if status not in ("success", "budget", "unsupported"):
        rep.fail(None, "outcome", f"unknown outcome {status!r}")
