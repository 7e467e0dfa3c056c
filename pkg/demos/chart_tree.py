"""Resolve a surface and print its chart tree.

    python demos/chart_tree.py "z^2 + x^2*y" 2
"""
import sys

from surfres.algebra import QQ, Ring, make_field
from surfres.resolver import resolve


def show(trace):
    for n in trace.nodes:
        pad = "  " * n.depth
        label = n.edge.get("chart", "root")
        centre = n.center["kind"] if n.center else "-"
        gens = ", ".join(g.to_str() for g in n.generators)
        print(f"{pad}[{n.id}] {label:10s} nu={n.nu} tau={n.tau} centre={centre:12s} {gens}")


def main():
    text = sys.argv[1] if len(sys.argv) > 1 else "z^2 + x^2*y"
    p = int(sys.argv[2]) if len(sys.argv) > 2 else 2
    R = Ring(QQ if p == 0 else make_field(p), ("x", "y", "z"))
    trace = resolve([R.parse(text)])
    show(trace)
    print("outcome:", trace.outcome)


if __name__ == "__main__":
    main()
