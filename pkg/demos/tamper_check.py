"""Emit a trace, change one number in it, and let the verifier find the edit."""
import json

from surfres.algebra import QQ, Ring
from surfres.cli import verify_text
from surfres.resolver import resolve
from surfres.trace import canonical, emit

R = Ring(QQ, ("x", "y", "z"))
text = emit(resolve([R.parse("z^2 - x^3 - y^5")]))
print("clean trace:", "ok" if verify_text(text).ok else "rejected")

data = json.loads(text)
victim = data["nodes"][2]
print(f"editing node 2: nu {victim['nu']} -> {victim['nu'] + 1}")
victim["nu"] += 1
report = verify_text(canonical(data))
for f in report.failures:
    print(f"  caught at node {f['node']}: {f['check']} {f['detail']}")
