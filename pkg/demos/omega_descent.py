"""Watch the polygon invariants shrink along each focus path.

For tau = 1 the triple Omega = (beta, 1/epsilon, alpha) must drop
lexicographically at every blow-up that keeps the order.
"""
from surfres.algebra import QQ, Ring, make_field
from surfres.polygon import build_delta
from surfres.resolver import resolve

CASES = [
    ("z^2 - x^5*y^3", 0),
    ("z^3 + x^5 + y^7", 3),
    ("z^2 + x*y^3 + x^5", 2),  # passes through a Tr1 chart with eta = 1
]


def fmt(v):
    return "inf" if v == float("inf") else str(v)


for text, p in CASES:
    R = Ring(QQ if p == 0 else make_field(p), ("x", "y", "z"))
    trace = resolve([R.parse(text)])
    print(f"{text}  over {'Q' if p == 0 else f'F_{p}'}: {trace.outcome['charts']} charts")
    for path in trace.paths():
        steps = []
        for i in path["nodes"]:
            n = trace.node(i)
            D = build_delta(n.prepared, n.nu)
            if n.tau != 1 or D.is_empty:
                steps.append(f"[{i}] tau={n.tau}")
                continue
            om = D.invariants().omega
            steps.append(f"[{i}] ({', '.join(fmt(v) for v in om)})")
        print("   " + "  ->  ".join(steps))
    print()
