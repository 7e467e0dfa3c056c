"""Single-field edits of a trace, for checking that the verifier notices them."""
import copy
import json

from surfres.cli import verify_text
from surfres.trace import SchemaError, canonical


def _bump_rational(s):
    return "inf" if s == "0" else ("0" if s == "inf" else s + "1" if "/" not in s else s.split("/")[0] + "1/" + s.split("/")[1])


def _extra_term(names):
    return f" + {names[0]}^11*{names[-1]}^7"


def _edits(data):
    """Every available (description, mutate) pair; mutate edits a deep copy in place."""
    names = data["variables"]
    out = []
    for i, nd in enumerate(data["nodes"]):
        out.append((f"node {i} nu", lambda d, i=i: d["nodes"][i].__setitem__("nu", d["nodes"][i]["nu"] + 1)))
        if nd.get("tau") in (1, 2):
            out.append((f"node {i} tau", lambda d, i=i: d["nodes"][i].__setitem__("tau", 3 - d["nodes"][i]["tau"])))
        for k in range(len(nd["generators"])):
            out.append((f"node {i} generator {k}",
                        lambda d, i=i, k=k: d["nodes"][i]["generators"].__setitem__(
                            k, d["nodes"][i]["generators"][k] + _extra_term(names))))
        for k in range(len(nd.get("prepared", []))):
            out.append((f"node {i} prepared {k}",
                        lambda d, i=i, k=k: d["nodes"][i]["prepared"].__setitem__(
                            k, d["nodes"][i]["prepared"][k] + _extra_term(names))))
        if nd["parent"] is not None:
            for v in names:
                out.append((f"node {i} substitution {v}",
                            lambda d, i=i, v=v: d["nodes"][i]["substitution"].__setitem__(
                                v, "(" + d["nodes"][i]["substitution"][v] + ")*(1 + " + names[0] + ")")))
            out.append((f"node {i} power", lambda d, i=i: d["nodes"][i].__setitem__("power", d["nodes"][i]["power"] + 1)))
            out.append((f"node {i} edge tr", lambda d, i=i: d["nodes"][i]["edge"].__setitem__(
                "tr", "Tr4" if d["nodes"][i]["edge"].get("tr") != "Tr4" else "Tr3")))
            out.append((f"node {i} divisor added", lambda d, i=i: d["nodes"][i]["divisors"]["plus"].append(names[1])))
        if "preparation" in nd:
            out.append((f"node {i} preparation", lambda d, i=i: d["nodes"][i]["preparation"].__setitem__(
                names[-1], d["nodes"][i]["preparation"][names[-1]] + " + " + names[0] + "^3")))
        if "omega" in nd.get("certificates", {}):
            out.append((f"node {i} omega", lambda d, i=i: d["nodes"][i]["certificates"]["omega"].__setitem__(
                0, _bump_rational(d["nodes"][i]["certificates"]["omega"][0]))))
        for key in ("gamma", "delta"):
            if key in nd.get("certificates", {}):
                out.append((f"node {i} {key}", lambda d, i=i, key=key: d["nodes"][i]["certificates"].__setitem__(
                    key, _bump_rational(d["nodes"][i]["certificates"][key]))))
        if nd.get("polygon") and nd["polygon"].get("vertices"):
            out.append((f"node {i} polygon vertex", lambda d, i=i: d["nodes"][i]["polygon"]["vertices"][0].__setitem__(
                0, _bump_rational(d["nodes"][i]["polygon"]["vertices"][0][0]))))
        if "center" in nd:
            out.append((f"node {i} centre kind", lambda d, i=i: d["nodes"][i]["center"].__setitem__(
                "kind", "point" if d["nodes"][i]["center"]["kind"] != "point" else "curve")))
        out.append((f"node {i} status", lambda d, i=i: d["nodes"][i].__setitem__(
            "status", "open" if d["nodes"][i]["status"] != "open" else "resolved")))
    out.append(("outcome charts", lambda d: d["outcome"].__setitem__("charts", d["outcome"]["charts"] + 1)))
    out.append(("outcome depth", lambda d: d["outcome"].__setitem__("max_depth", d["outcome"]["max_depth"] + 1)))
    out.append(("outcome status", lambda d: d["outcome"].__setitem__(
        "status", "budget" if d["outcome"]["status"] == "success" else "success")))
    out.append(("paths", lambda d: d["paths"].append({"nodes": [0], "r": 2})))
    return out


def tamper(text, rng):
    """Apply one random edit; returns (description, new text)."""
    data = json.loads(text)
    edits = _edits(data)
    while True:
        what, mutate = edits[rng.randrange(len(edits))]
        changed = copy.deepcopy(data)
        mutate(changed)
        if changed != data:
            return what, canonical(changed)


def detected(text):
    """True when the verifier rejects the text, either on schema or on a failed check."""
    try:
        report = verify_text(text)
    except (SchemaError, ValueError):
        return True
    return not report.ok
