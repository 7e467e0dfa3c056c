"""Canonical JSON for chart trees.

Keys are sorted, separators fixed, rationals printed as "p/q" and field
elements as polynomials in the generator, so emitting a parsed trace gives
back the same bytes.
"""
from __future__ import annotations

import json
from typing import Any

from .algebra import Ring
from .algebra.fields import FieldError, field_from_spec
from .blowup import DivisorRecord
from .coords import Substitution
from .resolver import Node, Trace, focus_paths

VERSION = "1"


class SchemaError(ValueError):
    pass


# coordinate count recorded with each centre kind (0: none)
CENTRE_VARS = {"point": 0, "curve": 2, "hypersurface": 1}


def canonical(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False) + "\n"


def _names(ring: Ring, idx) -> list[str]:
    return [ring.names[i] for i in idx]


def node_to_json(n: Node) -> dict:
    ring = n.ring
    out = {
        "id": n.id,
        "parent": n.parent,
        "substitution": n.substitution.to_text(),
        "exceptional": ring.names[n.exc] if n.exc is not None else None,
        "power": n.power,
        "generators": [g.to_str() for g in n.generators],
        "nu": n.nu,
        "tau": n.tau,
        "divisors": n.divisors.to_json(),
        "edge": dict(n.edge),
        "status": n.status,
    }
    if n.preparation is not None:
        out["preparation"] = n.preparation.to_text()
        out["prepared"] = [g.to_str() for g in n.prepared]
    if n.center is not None:
        c = dict(n.center)
        if "vars" in c:
            c["vars"] = _names(ring, c["vars"])
        c.pop("note", None)
        out["center"] = c
    if n.polygon is not None:
        out["polygon"] = n.polygon if isinstance(n.polygon, dict) else n.polygon.to_json()
    certs = {k: v for k, v in n.certificates.items() if k != "preparation_case"}
    if certs:
        out["certificates"] = certs
    return out


def trace_to_json(t: Trace) -> dict:
    return {
        "version": VERSION,
        "job": t.job,
        "field": t.field_spec,
        "variables": list(t.names),
        "nodes": [node_to_json(n) for n in t.nodes],
        "paths": focus_paths(t.nodes),
        "outcome": t.outcome,
    }


def emit(t: Trace) -> str:
    return canonical(trace_to_json(t))


def _require(data: dict, key: str, where: str):
    if key not in data:
        raise SchemaError(f"{where}: missing '{key}'")
    return data[key]


def parse_trace(text: str) -> Trace:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not JSON: {exc}") from exc
    return trace_from_json(data)


def trace_from_json(data: dict) -> Trace:
    if not isinstance(data, dict):
        raise SchemaError("trace must be an object")
    for key in ("version", "job", "nodes", "paths", "outcome", "field", "variables"):
        _require(data, key, "trace")
    if data["version"] != VERSION:
        raise SchemaError(f"unknown trace version {data['version']!r}")
    if not isinstance(data["nodes"], list) or not data["nodes"]:
        raise SchemaError("trace has no nodes")
    try:
        F = field_from_spec(data["field"])
        ring = Ring(F, tuple(data["variables"]))
        nodes = [node_from_json(ring, nd, i) for i, nd in enumerate(data["nodes"])]
    except SchemaError:
        raise
    except (KeyError, TypeError, ValueError, FieldError) as exc:
        raise SchemaError(f"malformed node data: {exc}") from exc
    for n in nodes:
        n.depth = 0 if n.parent is None else nodes[n.parent].depth + 1
    return Trace(data["job"], nodes, data["outcome"], data["field"], tuple(data["variables"]), data["paths"])


def node_from_json(ring: Ring, nd: dict, position: int) -> Node:
    where = f"node {position}"
    for key in ("id", "parent", "substitution", "generators", "nu", "tau", "divisors"):
        _require(nd, key, where)
    if nd["id"] != position:
        raise SchemaError(f"{where}: id {nd['id']} out of order")
    parent = nd["parent"]
    if parent is not None and not (isinstance(parent, int) and 0 <= parent < position):
        raise SchemaError(f"{where}: parent {parent!r} does not precede the node")
    exc = nd.get("exceptional")
    n = Node(
        id=nd["id"], parent=parent, depth=0,
        substitution=Substitution.from_text(ring, nd["substitution"], "chart"),
        exc=ring.index(exc) if exc is not None else None,
        power=nd.get("power", 0),
        generators=[ring.parse(s) for s in nd["generators"]],
        divisors=DivisorRecord.from_json(ring, nd["divisors"]),
        nu=nd["nu"], tau=nd["tau"],
    )
    n.edge = dict(nd.get("edge", {}))
    n.status = nd.get("status", "open")
    if "preparation" in nd:
        n.preparation = Substitution.from_text(ring, nd["preparation"], "preparation")
        n.prepared = [ring.parse(s) for s in _require(nd, "prepared", where)]
    if "center" in nd:
        c = dict(nd["center"])
        need = CENTRE_VARS.get(c.get("kind"))
        if need is None:
            raise SchemaError(f"{where}: unknown centre kind {c.get('kind')!r}")
        if need and len(c.get("vars", [])) != need:
            raise SchemaError(f"{where}: a {c['kind']} centre needs {need} coordinate(s)")
        if "vars" in c:
            c["vars"] = [ring.index(v) for v in c["vars"]]
        n.center = c
    if "polygon" in nd:
        n.polygon = nd["polygon"]
    n.certificates = dict(nd.get("certificates", {}))
    return n
