"""Resolution drivers: the plane loop, the 3-fold order-reduction loop and the finishing passes.

Every node of the chart tree stores the raw weak transform it received, the
coordinate change it applied before choosing a centre, the prepared generators
and the descent certificate read from them.  Trees are built breadth first.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

from .algebra import Poly, Ring, TruncationError
from .algebra.linalg import rank
from .blowup import (DivisorRecord, FiberPoint, classify_tr, curve_chart, curve_fiber, permissible_check,
                     point_chart, point_fiber, eta_count, transform_divisors, weak_transform, _check_rational)
from .coords import Substitution
from .groebner import GroebnerBudgetError, groebner
from .polygon import build_delta, fmt_rat, gamma_tau2
from .prepare import delta_2d, delta_of, plane_good_parameters, tau2_prepare, very_well_prepare, well_prepare
from .singular_locus import (Germ, UnsupportedCase, coefficient_ideal, germ_of, good_parameters, hasse_ideal,
                             nu, tau_directrix)
from .solve import ExtensionNeeded


class BudgetExceeded(RuntimeError):
    pass


@dataclass
class Budgets:
    max_depth: int = 40
    max_prep: int = 64
    max_nodes: int = 4000
    trunc: int | None = None


@dataclass
class Node:
    id: int
    parent: int | None
    depth: int
    substitution: Substitution  # parent's prepared coordinates -> this node's coordinates
    exc: int | None
    power: int
    generators: list
    divisors: DivisorRecord
    nu: int = 0
    tau: int | None = None
    preparation: Substitution | None = None
    prep_steps: list = field(default_factory=list)
    prepared: list = field(default_factory=list)
    prep_divisors: DivisorRecord | None = None
    center: dict | None = None
    polygon: object = None
    certificates: dict = field(default_factory=dict)
    edge: dict = field(default_factory=dict)
    status: str = "pending"
    round: int = 0
    note: str = ""

    @property
    def ring(self) -> Ring:
        return self.generators[0].ring


@dataclass
class Trace:
    job: dict
    nodes: list
    outcome: dict
    field_spec: dict
    names: tuple
    recorded_paths: list | None = None

    def node(self, i: int) -> Node:
        return self.nodes[i]

    def children(self, i: int) -> list[Node]:
        return [n for n in self.nodes if n.parent == i]

    def leaves(self) -> list[Node]:
        parents = {n.parent for n in self.nodes}
        return [n for n in self.nodes if n.id not in parents]

    def paths(self) -> list[dict]:
        return focus_paths(self.nodes)


def focus_paths(nodes: Sequence[Node]) -> list[dict]:
    """Maximal chains of blow-up edges along which the order stays constant."""
    by_parent: dict = {}
    for n in nodes:
        by_parent.setdefault(n.parent, []).append(n)

    def continues(parent: Node, child: Node) -> bool:
        return (child.nu == parent.nu and parent.center is not None
                and parent.center["kind"] in ("point", "curve") and child.edge.get("stage") == "order")

    out = []
    for n in nodes:
        par = nodes[n.parent] if n.parent is not None else None
        if par is not None and continues(par, n):
            continue
        if n.nu < 2 or n.center is None or n.center["kind"] not in ("point", "curve"):
            continue
        stack = [[n]]
        while stack:
            chain = stack.pop()
            nxt = [c for c in by_parent.get(chain[-1].id, []) if continues(chain[-1], c)]
            if not nxt:
                if len(chain) > 1:
                    out.append({"nodes": [c.id for c in chain], "r": n.nu})
                continue
            for c in nxt:
                stack.append(chain + [c])
    out.sort(key=lambda p: p["nodes"])
    return out


# coordinate straightening

def straighten(ring: Ring, graph: dict) -> Substitution:
    """Old x_j = new x_j + graph[j]: afterwards the graph is the coordinate locus of the dependent vars."""
    imgs = list(ring.gens())
    for j, g in graph.items():
        imgs[j] = ring.var(j) + g
    return Substitution(ring, tuple(imgs), "straighten")


def _coordinate_locus(germ: Germ) -> list[int] | None:
    """Dependent variables when the germ is already a coordinate locus."""
    if germ.graph is None:
        return None
    if all(not g.terms for g in germ.graph.values()):
        return sorted(germ.graph)
    return None


def _centre_after(gens: Sequence[Poly], r: int) -> Germ:
    J = hasse_ideal(gens, r)
    if not J:
        return Germ("surface", [], None, "every generator vanishes identically")
    return germ_of(J)


def _aligned(gens: Sequence[Poly], r: int, budgets: Budgets):
    """Coordinates in which a smooth component of Sing_r through the origin is a coordinate locus.

    Returns (substitution, new generators, germ, dependent variables or None).
    """
    ring = gens[0].ring
    sub = Substitution.identity(ring)
    germ = _centre_after(gens, r)
    for _ in range(4):
        if germ.kind not in ("curve", "surface") or germ.graph is None:
            return sub, list(gens), germ, None
        dep = _coordinate_locus(germ)
        if dep is not None:
            return sub, list(gens), germ, dep
        s = straighten(ring, germ.graph)
        gens = s.apply_all(gens)
        sub = sub.then(s)
        germ = _centre_after(gens, r)
    return sub, list(gens), germ, None


def _tau1_certificate(gens: Sequence[Poly], r: int) -> tuple[object, dict]:
    P = build_delta(gens, r)
    if P.is_empty:
        return P, {"polygon": "empty"}
    try:
        inv = P.invariants()
    except TruncationError:
        return P, {"polygon": "uncertified"}
    return P, {"omega": inv.omega.to_json(), "invariants": inv.to_json()}


def analyse_3d(node: Node, budgets: Budgets) -> None:
    """Choose coordinates and a centre for a node of order r = node.nu >= 1."""
    G = node.generators
    ring = node.ring
    r = node.nu
    d = tau_directrix(G)
    node.tau = d.tau
    sub = good_parameters(G, d) if d.tau in (1, 2) else Substitution.identity(ring)
    steps = [] if sub.is_identity() else [{"kind": "linear", "substitution": sub.to_text()}]
    gens = sub.apply_all(G)

    s2, gens, germ, dep = _aligned(gens, r, budgets)
    if not s2.is_identity():
        steps.append({"kind": "straighten", "substitution": s2.to_text()})
        sub = sub.then(s2)

    if germ.kind == "surface" and dep is not None:
        _finish_analysis(node, sub, steps, gens, {"kind": "hypersurface", "vars": dep})
        return
    if germ.kind in ("surface", "singular-surface"):
        raise UnsupportedCase(f"Sing_{r} contains a {germ.kind} that is not a polynomial graph"
                              if germ.kind == "surface" else f"Sing_{r} contains a singular surface")

    if d.tau == 1:
        if germ.kind == "point":
            prep = very_well_prepare(gens, r, budgets.max_prep)
        else:
            prep = well_prepare(gens, r, budgets.max_prep)
        if not prep.complete:
            raise BudgetExceeded(prep.note or "preparation budget exhausted")
        if prep.steps:
            ps = prep.substitution(ring)
            steps.extend(st.to_json() for st in prep.steps)
            sub = sub.then(ps)
            gens = prep.gens
        if germ.kind == "curve" and dep is not None:
            s3, gens, germ, dep = _aligned(gens, r, budgets)
            if not s3.is_identity():
                steps.append({"kind": "straighten", "substitution": s3.to_text()})
                sub = sub.then(s3)
        node.polygon, certs = _tau1_certificate(gens, r)
        node.certificates.update(certs)
        if prep.case:
            node.certificates["preparation_case"] = prep.case
    elif d.tau == 2:
        prep = tau2_prepare(gens, r, budgets.max_prep)
        if not prep.complete:
            raise BudgetExceeded(prep.note)
        if prep.steps:
            steps.extend(st.to_json() for st in prep.steps)
            sub = sub.then(prep.substitution(ring))
            gens = prep.gens
            s3, gens, germ, dep = _aligned(gens, r, budgets)
            if not s3.is_identity():
                steps.append({"kind": "straighten", "substitution": s3.to_text()})
                sub = sub.then(s3)
        node.certificates["gamma"] = fmt_rat(gamma_tau2(gens, r))

    divisors = node.divisors.apply(sub)
    if d.tau == 1 and eta_count(divisors) == 1:
        C = coefficient_ideal(gens, 2, r)
        node.certificates["coefficient_order"] = nu(C) if any(c.terms for c in C) else "inf"

    center = {"kind": "point"}
    if germ.kind == "curve" and dep is not None and len(dep) == 2:
        ideal = [ring.var(j) for j in dep]
        problems = permissible_check(gens, r, ideal, divisors)
        if not problems:
            center = {"kind": "curve", "vars": dep}
        else:
            center = {"kind": "point", "note": problems[0]}
    elif germ.kind in ("singular-curve", "curve"):
        center = {"kind": "point"}
        for pair in ((0, 2), (1, 2), (0, 1)):
            if all(all(sum(e[v] for v in pair) >= r for e in g.terms) for g in gens) \
                    and not permissible_check(gens, r, [ring.var(v) for v in pair], divisors):
                center = {"kind": "curve", "vars": list(pair)}
                node.note = "one smooth component of an intersecting configuration blown up first"
                break
    _finish_analysis(node, sub, steps, gens, center)


def _finish_analysis(node: Node, sub: Substitution, steps: list, gens: list, center: dict) -> None:
    node.preparation = sub
    node.prep_steps = steps
    node.prepared = list(gens)
    node.prep_divisors = node.divisors.apply(sub)
    node.center = center


def analyse_2d(node: Node, budgets: Budgets) -> None:
    G = node.generators
    ring = node.ring
    r = node.nu
    node.tau = tau_directrix(G).tau
    sub = plane_good_parameters(G)
    steps = [] if sub.is_identity() else [{"kind": "linear", "substitution": sub.to_text()}]
    gens = sub.apply_all(G)
    s2, gens, germ, dep = _aligned(gens, r, budgets)
    if not s2.is_identity():
        steps.append({"kind": "straighten", "substitution": s2.to_text()})
        sub = sub.then(s2)
    if germ.kind == "curve" and dep is not None:
        _finish_analysis(node, sub, steps, gens, {"kind": "hypersurface", "vars": dep})
        return
    if germ.kind != "point":
        raise UnsupportedCase(f"Sing_{r} of a plane ideal has a {germ.kind} component")
    prep = delta_2d(gens, r, budgets.max_prep)
    if not prep.complete:
        raise BudgetExceeded(prep.note)
    if prep.steps:
        steps.extend(st.to_json() for st in prep.steps)
        sub = sub.then(prep.substitution(ring))
        gens = prep.gens
    node.certificates["delta"] = fmt_rat(delta_of(gens, r))
    _finish_analysis(node, sub, steps, gens, {"kind": "point"})


# children

def _child(nodes: list, parent: Node, fp: FiberPoint, power: int, stage: str, divisors: DivisorRecord) -> Node:
    tr, eta = classify_tr(fp.sub)
    F = fp.sub.ring.field
    edge = {"chart": fp.label, "stage": stage, "tr": tr}
    if eta is not None:
        edge["eta"] = F.fmt(eta)
    child = Node(len(nodes), parent.id, parent.depth + 1, fp.sub, fp.exc, power, fp.gens,
                 transform_divisors(divisors, fp.sub, fp.exc, fp.order == parent.nu), fp.order)
    child.edge = edge
    if fp.sampled:
        child.note = "fiber points were sampled along a curve"
    nodes.append(child)
    return child


def expand(node: Node, nodes: list) -> list[Node]:
    """Blow up the chosen centre and create the children over the origin."""
    r = node.nu
    gens = node.prepared
    ring = gens[0].ring
    div = node.prep_divisors
    kind = node.center["kind"]
    if kind == "hypersurface":
        w = node.center["vars"][0]
        sub = Substitution(ring, tuple(ring.gens()), "hypersurface-blowup", {"chart": ring.names[w]})
        W = weak_transform(gens, sub, w, r)
        fp = FiberPoint(sub, w, W, nu(W), ring.names[w])
        return [_child(nodes, node, fp, r, "order", div)]
    if kind == "point":
        pts, witness, sampled = point_fiber(gens, r, r)
    else:
        pts, witness, sampled = curve_fiber(gens, r, r, tuple(node.center["vars"]))
    out = []
    for fp in pts:
        fp.sampled = sampled
        out.append(_child(nodes, node, fp, r, "order", div))
    if witness is not None:
        c = _child(nodes, node, witness, r, "order", div)
        c.edge["witness"] = True
        out.append(c)
    return out


# normal crossings

def _minors(polys: Sequence[Poly]) -> list[Poly]:
    """All maximal minors of the Jacobian matrix of ``polys``."""
    from itertools import combinations
    n = polys[0].nvars
    k = len(polys)
    if k > n:
        return []
    jac = [[p.derivative(j) for j in range(n)] for p in polys]

    def det(rows, cols):
        if len(rows) == 1:
            return rows[0][cols[0]]
        acc = rows[0][0].ring.zero()
        for i, c in enumerate(cols):
            term = rows[0][c] * det(rows[1:], [cc for cc in cols if cc != c])
            acc = acc + term if i % 2 == 0 else acc - term
        return acc

    out = [det(jac, list(cols)) for cols in combinations(range(n), k)]
    return [m for m in out if m.terms]


def _through_origin(comps: Sequence[Poly]) -> list[Poly]:
    return [h for h in comps if h.field.is_zero(h.constant_term())]


def is_snc_at_origin(f: Poly | None, comps: Sequence[Poly]) -> bool:
    """V(f) together with the divisor components is simple normal crossings at the origin."""
    polys = _through_origin(comps)
    if f is not None and f.field.is_zero(f.constant_term()):
        polys = [f] + polys
    if not polys:
        return True
    F = polys[0].field
    return rank([p.linear_part() for p in polys], F) == len(polys)


def nsnc_loci(f: Poly | None, comps: Sequence[Poly]) -> list[list[Poly]]:
    """Ideals whose zero sets together form the non-normal-crossings locus."""
    from itertools import combinations
    n = comps[0].nvars if comps else f.nvars
    out = []
    members = ([f] if f is not None else []) + list(comps)
    for k in range(1, min(len(members), n) + 1):
        for group in combinations(members, k):
            if f is not None and group[0] is not f:
                continue
            out.append(list(group) + _minors(list(group)))
    for group in combinations(members, n + 1):
        out.append(list(group))
    return out


def _snc_centre(f: Poly | None, comps: Sequence[Poly]) -> tuple[dict, Substitution]:
    ring = (f or comps[0]).ring
    for ideal in nsnc_loci(f, comps):
        G = groebner(ideal)
        if G.is_unit() or not G.origin_in_zero_set():
            continue
        germ = germ_of(ideal, G)
        if germ.kind == "curve" and germ.graph is not None and ring.nvars == 3:
            dep = sorted(germ.graph)
            return {"kind": "curve", "vars": dep}, straighten(ring, germ.graph)
    return {"kind": "point"}, Substitution.identity(ring)


def analyse_snc(node: Node) -> None:
    f = node.generators[0] if node.nu == 1 else None
    centre, sub = _snc_centre(f, node.divisors.components())
    steps = [] if sub.is_identity() else [{"kind": "straighten", "substitution": sub.to_text()}]
    _finish_analysis(node, sub, steps, sub.apply_all(node.generators), dict(centre, stage="snc"))


def _snc_fiber_points(gens: list, div: DivisorRecord, base: Substitution, exc: int, power: int,
                      zero_vars: list, free: list) -> list[tuple]:
    from .blowup import _points_in, strict_transform
    W = weak_transform(gens, base, exc, power)[0]
    ring = W.ring
    comps = [strict_transform(h, base, exc) for h in div.components()] + [ring.var(exc)]
    f = W if power else None
    pts = set()
    for ideal in nsnc_loci(f, comps):
        if ring.var(exc) not in ideal:
            continue
        _check_rational(ideal, free, zero_vars, "normal crossings")
        found, _ = _points_in(ideal, free, zero_vars)
        pts.update(found)
    return sorted(pts, key=lambda p: tuple(str(c) for c in p))


def expand_snc(node: Node, nodes: list) -> list[Node]:
    gens = node.prepared
    ring = gens[0].ring
    F = ring.field
    n = ring.nvars
    div = node.prep_divisors
    power = node.nu
    out = []
    if node.center["kind"] == "point":
        for chart in range(n):
            base = point_chart(ring, chart)
            zero_vars = [chart] + list(range(chart))
            free = [j for j in range(n) if j not in zero_vars]
            for pt in _snc_fiber_points(gens, div, base, chart, power, zero_vars, free):
                shifts = {j: pt[j] for j in free if not F.is_zero(pt[j])}
                sub = point_chart(ring, chart, shifts)
                W = weak_transform(gens, sub, chart, power)
                label = ring.names[chart] + ("[" + ",".join(f"{ring.names[j]}+{F.fmt(c)}" for j, c in sorted(shifts.items())) + "]" if shifts else "")
                out.append(_child(nodes, node, FiberPoint(sub, chart, W, nu(W), label), power, "snc", div))
    else:
        u, w = node.center["vars"]
        t = next(i for i in range(n) if i not in (u, w))
        for chart, other in ((u, w), (w, u)):
            base = curve_chart(ring, (u, w), chart)
            zero_vars, free = ([u, t], [w]) if chart == u else ([w, t, u], [])
            for pt in _snc_fiber_points(gens, div, base, chart, power, zero_vars, free):
                c = pt[other] if free else None
                sub = curve_chart(ring, (u, w), chart, c)
                W = weak_transform(gens, sub, chart, power)
                label = ring.names[chart] + ("" if c is None or F.is_zero(c) else f"[{ring.names[other]}+{F.fmt(c)}]")
                out.append(_child(nodes, node, FiberPoint(sub, chart, W, nu(W), label), power, "snc", div))
    _snc_witness(node, nodes, out, power, div)
    return out


def _snc_witness(node: Node, nodes: list, out: list, power: int, div: DivisorRecord) -> None:
    """One chart origin in normal crossings, preferably on the strict transform, so the blow-up has a leaf."""
    gens = node.prepared
    ring = gens[0].ring
    if node.center["kind"] == "point":
        bases = [(point_chart(ring, c), c) for c in range(ring.nvars)]
    else:
        u, w = node.center["vars"]
        bases = [(curve_chart(ring, (u, w), c), c) for c in (u, w)]
    taken = {c.edge["chart"] for c in out}
    best = None
    for base, c in bases:
        if ring.names[c] in taken:
            continue
        W = weak_transform(gens, base, c, power)
        o = nu(W)
        comps = transform_divisors(div, base, c, o == node.nu).components()
        if is_snc_at_origin(W[0] if o == 1 else None, comps) and o <= 1:
            fp = FiberPoint(base, c, W, o, ring.names[c])
            if best is None or (o == 1 and best.order == 0):
                best = fp
    if best is not None:
        child = _child(nodes, node, best, power, "snc", div)
        child.edge["witness"] = True
        out.append(child)


# driver

def resolve(gens: Sequence[Poly], divisors: DivisorRecord | None = None, budgets: Budgets | None = None,
            job: dict | None = None, finish: bool | None = None) -> Trace:
    """Blow up until every chart over the origin has order below 2 (and normal crossings when principal)."""
    budgets = budgets or Budgets()
    gens = [g for g in gens if g.terms]
    if not gens:
        raise ValueError("the zero ideal has no resolution")
    ring = gens[0].ring
    analyse = analyse_3d if ring.nvars == 3 else analyse_2d
    principal = len(gens) == 1
    finish = principal if finish is None else finish
    root = Node(0, None, 0, Substitution.identity(ring), None, 0, list(gens), divisors or DivisorRecord(), nu(gens))
    root.edge = {"stage": "root"}
    nodes = [root]
    queue = deque([root])
    outcome = {"status": "success"}
    try:
        while queue:
            node = queue.popleft()
            if node.nu >= 2:
                _check_budget(node, nodes, budgets)
                node.round = node.nu
                analyse(node, budgets)
                node.status = "expanded"
                queue.extend(expand(node, nodes))
            elif finish and not is_snc_at_origin(node.generators[0] if node.nu == 1 else None,
                                                 node.divisors.components()):
                _check_budget(node, nodes, budgets)
                node.round = node.nu
                analyse_snc(node)
                node.status = "expanded"
                queue.extend(expand_snc(node, nodes))
            else:
                node.status = "resolved"
    except (BudgetExceeded, GroebnerBudgetError) as exc:
        outcome = {"status": "budget", "reason": str(exc)}
    except ExtensionNeeded as exc:
        outcome = {"status": "unsupported", "reason": str(exc), "extension_needed": True,
                   "minimal_polynomial": exc.minimal_polynomial}
    except (UnsupportedCase, TruncationError) as exc:
        outcome = {"status": "unsupported", "reason": str(exc)}
    for n in nodes:
        if n.status == "pending":
            n.status = "open"
    outcome["charts"] = len(nodes)
    outcome["max_depth"] = max(n.depth for n in nodes)
    return Trace(job or {}, nodes, outcome, ring.field.spec(), tuple(ring.names))


def _check_budget(node: Node, nodes: list, budgets: Budgets) -> None:
    if node.depth >= budgets.max_depth:
        raise BudgetExceeded(f"depth budget {budgets.max_depth} reached at chart {node.id}")
    if len(nodes) >= budgets.max_nodes:
        raise BudgetExceeded(f"chart budget {budgets.max_nodes} reached")
    if budgets.trunc is not None and max(g.degree() for g in node.generators) > budgets.trunc:
        raise BudgetExceeded(f"chart {node.id} has generators of degree above {budgets.trunc}")


def resolve_with_extension(gens: Sequence[Poly], divisors: DivisorRecord | None = None,
                           budgets: Budgets | None = None, job: dict | None = None,
                           allow_extension: bool = False, degrees: Sequence[int] = (2, 3, 4)) -> Trace:
    """``resolve``; when a rational point is missing, retry once over a finite extension."""
    trace = resolve(gens, divisors, budgets, job)
    if not (allow_extension and trace.outcome.get("extension_needed") and gens[0].field.is_finite()):
        return trace
    from .algebra.fields import extension
    F = gens[0].field
    for k in degrees:
        big, embed = extension(F, k)
        R = Ring(big, gens[0].ring.names)
        lift = [g.map_coefficients(embed, R) for g in gens]
        div = None
        if divisors is not None:
            div = DivisorRecord([h.map_coefficients(embed, R) for h in divisors.plus],
                                [h.map_coefficients(embed, R) for h in divisors.minus])
        t2 = resolve(lift, div, budgets, job)
        t2.outcome["extended_from"] = F.spec()
        if not t2.outcome.get("extension_needed"):
            return t2
    return t2


def resolve_2d(gens: Sequence[Poly], divisors: DivisorRecord | None = None, budgets: Budgets | None = None) -> Trace:
    if gens[0].ring.nvars != 2:
        raise ValueError("resolve_2d needs a plane ideal")
    return resolve(gens, divisors, budgets)


def resolve_3d(gens: Sequence[Poly], divisors: DivisorRecord | None = None, budgets: Budgets | None = None) -> Trace:
    if gens[0].ring.nvars != 3:
        raise ValueError("resolve_3d needs three variables")
    return resolve(gens, divisors, budgets)


def analyse_root(gens: Sequence[Poly], divisors: DivisorRecord | None = None,
                 budgets: Budgets | None = None) -> Node:
    """Run the per-chart analysis once, on the input itself, without blowing up."""
    gens = [g for g in gens if g.terms]
    if not gens:
        raise ValueError("the zero ideal has no invariants")
    ring = gens[0].ring
    node = Node(0, None, 0, Substitution.identity(ring), None, 0, list(gens), divisors or DivisorRecord(), nu(gens))
    node.edge = {"stage": "root"}
    if node.nu >= 1:
        (analyse_3d if ring.nvars == 3 else analyse_2d)(node, budgets or Budgets())
    return node


def chart_map(trace: Trace, node_id: int) -> Substitution:
    """Root coordinates in terms of the coordinates of a chart (before that chart's own preparation)."""
    chain = []
    n = trace.node(node_id)
    while n.parent is not None:
        chain.append(n)
        n = trace.node(n.parent)
    acc = Substitution.identity(n.ring)
    for child in reversed(chain):
        parent = trace.node(child.parent)
        if parent.preparation is not None:
            acc = acc.then(parent.preparation)
        acc = acc.then(child.substitution)
    return acc
