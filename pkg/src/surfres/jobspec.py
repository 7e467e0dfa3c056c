"""Job files: a small sectioned key = value format.

    [job]
    name = whitney-umbrella-f2
    mode = resolve-3d

    [ring]
    char = 2          # 0, p or p^k
    irreducible = a^2 + a + 1   # only for p^k
    vars = x, y, z

    [ideal]
    generators = z^2 + x^2*y

    [divisors]
    plus =
    minus = x

    [budgets]
    max_depth = 40
    max_prep = 64
    trunc = 30
    allow_extension = true

Generators (and divisor components) are separated by newlines or ';'.
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

from .algebra import ParseError, Poly, Ring
from .algebra.fields import FieldError, field_from_spec
from .blowup import DivisorRecord
from .resolver import Budgets

MODES = ("resolve-2d", "resolve-3d", "invariants", "polygon", "verify")


class JobError(ValueError):
    """Bad job file; the message names the section, key and position."""


@dataclass
class JobSpec:
    name: str
    mode: str
    ring: Ring
    generators: list
    divisors: DivisorRecord
    budgets: Budgets
    allow_extension: bool = False
    source: dict = field(default_factory=dict)
    trace: str | None = None

    def to_json(self) -> dict:
        return self.source


def _split(text: str) -> list[str]:
    parts = []
    for line in text.replace(";", "\n").splitlines():
        line = line.strip()
        if line:
            parts.append(line)
    return parts


def _positive(sec, key: str, default):
    if key not in sec:
        return default
    raw = sec.get(key).strip()
    if raw.lower() in ("", "none"):
        return None if key == "trunc" else default
    try:
        v = int(raw)
    except ValueError:
        raise JobError(f"[budgets] {key}: {raw!r} is not an integer") from None
    if v <= 0:
        raise JobError(f"[budgets] {key}: budgets must be positive, got {v}")
    return v


def _parse_list(ring: Ring, texts: list[str], where: str) -> list[Poly]:
    out = []
    for i, t in enumerate(texts):
        try:
            out.append(ring.parse(t))
        except ParseError as exc:
            raise JobError(f"{where} entry {i + 1} {t!r}: {exc}") from None
    return out


def parse_job(text: str, origin: str = "<job>") -> JobSpec:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
    try:
        cp.read_string(text, source=origin)
    except configparser.Error as exc:
        raise JobError(f"{origin}: {exc}") from None
    for sec in ("job", "ring"):
        if not cp.has_section(sec):
            raise JobError(f"{origin}: missing section [{sec}]")
    job = cp["job"]
    name = job.get("name", Path(origin).stem).strip()
    mode = job.get("mode", "resolve-3d").strip()
    if mode not in MODES:
        raise JobError(f"{origin}: [job] mode {mode!r} is not one of {', '.join(MODES)}")
    rs = cp["ring"]
    names = tuple(v.strip() for v in rs.get("vars", "x, y, z").split(",") if v.strip())
    if len(names) not in (2, 3) or len(set(names)) != len(names):
        raise JobError(f"{origin}: [ring] vars must list 2 or 3 distinct names")
    spec = {"char": rs.get("char", "0").strip()}
    if rs.get("irreducible"):
        spec["irreducible"] = rs.get("irreducible").strip()
    try:
        F = field_from_spec(spec)
    except (FieldError, ValueError) as exc:
        raise JobError(f"{origin}: [ring] {exc}") from None
    ring = Ring(F, names)
    budgets = Budgets()
    allow = False
    if cp.has_section("budgets"):
        b = cp["budgets"]
        budgets = Budgets(max_depth=_positive(b, "max_depth", budgets.max_depth),
                          max_prep=_positive(b, "max_prep", budgets.max_prep),
                          max_nodes=_positive(b, "max_nodes", budgets.max_nodes),
                          trunc=_positive(b, "trunc", None))
        allow = b.get("allow_extension", "false").strip().lower() in ("1", "true", "yes")
    trace = job.get("trace")
    if mode == "verify":
        if not trace:
            raise JobError(f"{origin}: verify jobs need [job] trace")
        return JobSpec(name, mode, ring, [], DivisorRecord(), budgets, allow,
                       {"name": name, "mode": mode, "trace": trace}, trace)
    if not cp.has_section("ideal") or not _split(cp["ideal"].get("generators", "")):
        raise JobError(f"{origin}: [ideal] generators is missing or empty")
    gen_texts = _split(cp["ideal"]["generators"])
    gens = _parse_list(ring, gen_texts, f"{origin}: [ideal] generators")
    if all(not g.terms for g in gens):
        raise JobError(f"{origin}: [ideal] the zero ideal cannot be resolved")
    plus_t, minus_t = [], []
    if cp.has_section("divisors"):
        plus_t = _split(cp["divisors"].get("plus", ""))
        minus_t = _split(cp["divisors"].get("minus", ""))
    divisors = DivisorRecord(_parse_list(ring, plus_t, f"{origin}: [divisors] plus"),
                             _parse_list(ring, minus_t, f"{origin}: [divisors] minus"))
    if mode == "resolve-2d" and len(names) != 2:
        raise JobError(f"{origin}: resolve-2d needs two variables")
    if mode == "resolve-3d" and len(names) != 3:
        raise JobError(f"{origin}: resolve-3d needs three variables")
    source = {"name": name, "mode": mode, "field": F.spec(), "vars": list(names),
              "ideal": [g.to_str() for g in gens],
              "divisors": {"plus": [h.to_str() for h in divisors.plus],
                           "minus": [h.to_str() for h in divisors.minus]},
              "budgets": {"max_depth": budgets.max_depth, "max_prep": budgets.max_prep,
                          "max_nodes": budgets.max_nodes,
                          "trunc": budgets.trunc, "allow_extension": allow}}
    return JobSpec(name, mode, ring, gens, divisors, budgets, allow, source)


def load_job(path: str | Path) -> JobSpec:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise JobError(f"{p}: {exc}") from None
    return parse_job(text, str(p))
