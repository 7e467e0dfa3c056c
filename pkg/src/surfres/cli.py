"""surfres command line: resolve, invariants, polygon, verify, corpus."""
from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from importlib import resources
from pathlib import Path

from .algebra import Ring
from .blowup import DivisorRecord
from .jobspec import JobError, JobSpec, load_job
from .polygon import build_delta
from .resolver import analyse_root, resolve_with_extension
from .singular_locus import UnsupportedCase, nu, sing_locus, tau_directrix
from .solve import ExtensionNeeded
from .trace import SchemaError, canonical, emit, node_to_json, parse_trace
from .verify import certify

EXIT_OK, EXIT_PARSE, EXIT_BUDGET, EXIT_UNSUPPORTED = 0, 1, 2, 3
STATUS_CODES = {"success": EXIT_OK, "budget": EXIT_BUDGET, "unsupported": EXIT_UNSUPPORTED}
PRIMARY = ("omega", "gamma", "delta")


def _with_overrides(job: JobSpec, args) -> JobSpec:
    b = job.budgets
    changes = {}
    for flag, name in (("trunc", "trunc"), ("max_depth", "max_depth"), ("max_prep", "max_prep")):
        v = getattr(args, flag, None)
        if v is not None:
            if v <= 0:
                raise JobError(f"--{flag.replace('_', '-')} must be positive")
            changes[name] = v
    if changes:
        b = replace(b, **changes)
    allow = job.allow_extension or bool(getattr(args, "allow_extension", False))
    src = dict(job.source)
    if "budgets" in src:
        src["budgets"] = {"max_depth": b.max_depth, "max_prep": b.max_prep, "max_nodes": b.max_nodes,
                          "trunc": b.trunc, "allow_extension": allow}
    return replace(job, budgets=b, allow_extension=allow, source=src)


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def run_job(job: JobSpec):
    """Resolve one job; returns the trace."""
    return resolve_with_extension(job.generators, job.divisors, job.budgets, job.to_json(),
                                  allow_extension=job.allow_extension)


def _primary(certs: dict):
    for k in PRIMARY:
        if k in certs:
            return {k: certs[k]}
    return None


def certificate_summary(trace) -> dict:
    """First and last primary certificate along the focus path through the root."""
    nodes = trace.nodes
    initial = _primary(nodes[0].certificates)
    final = initial
    for p in trace.paths():
        if p["nodes"][0] == 0:
            for i in reversed(p["nodes"]):
                c = _primary(nodes[i].certificates)
                if c is not None:
                    final = c
                    break
            break
    return {"initial": initial, "final": final}


# subcommands

def cmd_resolve(args) -> int:
    job = _with_overrides(load_job(args.job), args)
    if job.mode == "verify":
        raise JobError(f"{args.job}: a verify job cannot be resolved")
    trace = run_job(job)
    _write(emit(trace), args.out)
    out = trace.outcome
    print(f"{job.name}: {out['status']} charts={out['charts']} depth={out['max_depth']}"
          + (f" ({out['reason']})" if "reason" in out else ""), file=sys.stderr)
    return STATUS_CODES.get(out["status"], EXIT_UNSUPPORTED)


def invariants_report(job: JobSpec) -> dict:
    G = job.generators
    r = nu(G)
    report: dict = {"job": job.name, "nu": r}
    if r == 0:
        report["note"] = "the ideal is the unit ideal at the origin"
        return report
    d = tau_directrix(G)
    report["tau"] = d.tau
    report["directrix"] = [f.to_str() for f in d.forms]
    report["sing_locus"] = sing_locus(G, r).germ.kind
    node = analyse_root(G, job.divisors, job.budgets)
    report["analysis"] = node_to_json(node)
    return report


def polygon_report(job: JobSpec) -> dict:
    G = job.generators
    r = nu(G)
    if job.ring.nvars != 3:
        raise JobError(f"{job.name}: the polygon report needs three variables")
    report: dict = {"job": job.name, "nu": r}
    if r < 1:
        report["note"] = "the ideal is the unit ideal at the origin"
        return report
    report["given"] = build_delta(G, r).to_json()
    node = analyse_root(G, job.divisors, job.budgets)
    if node.tau == 1 and node.prepared:
        report["prepared"] = build_delta(node.prepared, r).to_json()
        report["preparation"] = node.preparation.to_text()
    else:
        report["note"] = f"no prepared polygon (tau = {node.tau})"
    return report


def _report_cmd(builder):
    def run(args) -> int:
        job = _with_overrides(load_job(args.job), args)
        if job.mode == "verify":
            raise JobError(f"{args.job}: a verify job has no ideal")
        try:
            rep = builder(job)
        except UnsupportedCase as exc:
            print(f"unsupported: {exc}", file=sys.stderr)
            return EXIT_UNSUPPORTED
        except ExtensionNeeded as exc:
            print(f"unsupported: {exc}", file=sys.stderr)
            return EXIT_UNSUPPORTED
        _write(canonical(rep), args.out)
        return EXIT_OK
    return run


def _job_inputs(job: dict, ring: Ring):
    """Generators and divisors named by the trace's job record, read in the trace's ring."""
    try:
        gens = [ring.parse(s) for s in job["ideal"]]
        div = job.get("divisors", {})
        divisors = DivisorRecord([ring.parse(s) for s in div.get("plus", [])],
                                 [ring.parse(s) for s in div.get("minus", [])])
    except (KeyError, TypeError, AttributeError):
        return None, None
    return gens, divisors


def verify_text(text: str):
    trace = parse_trace(text)
    gens, divs = (None, None)
    if isinstance(trace.job, dict) and trace.job:
        try:
            gens, divs = _job_inputs(trace.job, trace.nodes[0].ring)
        except ValueError as exc:
            raise SchemaError(f"job record does not parse: {exc}") from None
    return certify(trace, gens, divs)


def cmd_verify(args) -> int:
    try:
        text = Path(args.trace).read_text()
    except OSError as exc:
        raise SchemaError(f"{args.trace}: {exc}") from None
    rep = verify_text(text)
    _write(canonical(rep.to_json()), args.out)
    for f in rep.failures:
        where = "trace" if f["node"] is None else ("root node 0" if f["node"] == 0 else f"edge {f['node']}")
        print(f"FAIL {where}: {f['check']} {f['detail']}", file=sys.stderr)
    return EXIT_OK if rep.ok else 4


def corpus_row(path: str, overrides: dict, trace_dir: str | None = None) -> dict:
    """Run one corpus job in isolation; any failure becomes a flagged row."""
    row: dict = {"file": Path(path).name}
    t0 = time.perf_counter()
    try:
        job = _with_overrides(load_job(path), argparse.Namespace(**overrides))
        row["name"], row["mode"] = job.name, job.mode
        if job.mode in ("invariants", "polygon"):
            rep = (invariants_report if job.mode == "invariants" else polygon_report)(job)
            row.update(status="success", exit_code=EXIT_OK, report=rep)
        elif job.mode == "verify":
            target = Path(path).parent / job.trace
            rep = verify_text(target.read_text())
            row.update(status="success" if rep.ok else "rejected", exit_code=EXIT_OK if rep.ok else 4,
                       verified=rep.ok)
        else:
            trace = run_job(job)
            text = emit(trace)
            out = trace.outcome
            rep = verify_text(text)
            row.update(status=out["status"], exit_code=STATUS_CODES.get(out["status"], EXIT_UNSUPPORTED),
                       charts=out["charts"], max_depth=out["max_depth"],
                       certificates=certificate_summary(trace), verified=rep.ok)
            if "reason" in out:
                row["reason"] = out["reason"]
            if out.get("extended_from"):
                row["field"] = trace.field_spec
            if trace_dir:
                Path(trace_dir, Path(path).stem + ".trace.json").write_text(text)
    except (JobError, SchemaError) as exc:
        row.update(status="parse-error", exit_code=EXIT_PARSE, reason=str(exc))
    except (UnsupportedCase, ExtensionNeeded) as exc:
        row.update(status="unsupported", exit_code=EXIT_UNSUPPORTED, reason=str(exc))
    except Exception as exc:  # isolate anything else to this row
        row.update(status="error", exit_code=EXIT_UNSUPPORTED, reason=f"{type(exc).__name__}: {exc}")
    row["ok"] = row["exit_code"] == EXIT_OK and row.get("verified", True)
    row["seconds"] = round(time.perf_counter() - t0, 3)
    return row


def bundled_corpus() -> Path:
    return Path(str(resources.files("surfres") / "corpus"))


def run_corpus(directory: str | Path, overrides: dict | None = None, workers: int = 1,
               trace_dir: str | None = None) -> dict:
    files = sorted(str(p) for p in Path(directory).glob("*.job"))
    overrides = overrides or {}
    if trace_dir:
        Path(trace_dir).mkdir(parents=True, exist_ok=True)
    if workers > 1 and len(files) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(corpus_row, files, [overrides] * len(files), [trace_dir] * len(files)))
    else:
        rows = [corpus_row(f, overrides, trace_dir) for f in files]
    return {"jobs": rows, "total": len(rows), "ok": sum(r["ok"] for r in rows),
            "flagged": [r["file"] for r in rows if not r["ok"]]}


def _format_row(r: dict) -> str:
    cert = r.get("certificates") or {}
    ini, fin = cert.get("initial"), cert.get("final")
    c = "" if ini is None else f" {json.dumps(ini, sort_keys=True)} -> {json.dumps(fin, sort_keys=True)}"
    flag = "" if r["ok"] else "  <-- flagged"
    return (f"{r.get('name', r['file']):32s} {r['status']:12s} charts={r.get('charts', '-')!s:>4} "
            f"depth={r.get('max_depth', '-')!s:>3} {r['seconds']:7.2f}s{c}{flag}")


def cmd_corpus(args) -> int:
    directory = args.dir or bundled_corpus()
    if not Path(directory).is_dir():
        raise JobError(f"{directory}: not a directory")
    overrides = {k: getattr(args, k) for k in ("trunc", "max_depth", "max_prep", "allow_extension")}
    summary = run_corpus(directory, overrides, args.jobs, args.traces)
    for r in summary["jobs"]:
        print(_format_row(r), file=sys.stderr)
    print(f"{summary['ok']}/{summary['total']} jobs ok", file=sys.stderr)
    _write(canonical(summary), args.out)
    return EXIT_OK


def _budget_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--trunc", type=int, help="largest generator degree allowed in any chart")
    p.add_argument("--max-depth", type=int, help="deepest chart allowed")
    p.add_argument("--max-prep", type=int, help="preparation steps allowed per chart")
    p.add_argument("--allow-extension", action="store_true",
                   help="retry over a finite extension when a fiber point is not rational")
    p.add_argument("--out", help="write the JSON result here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="surfres", description="Chart-level resolution of singularities.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, fn, hlp in (("resolve", cmd_resolve, "resolve a job and write its trace"),
                          ("invariants", _report_cmd(invariants_report), "order, tau, centre and certificates"),
                          ("polygon", _report_cmd(polygon_report), "characteristic polygon before and after preparation")):
        p = sub.add_parser(name, help=hlp)
        p.add_argument("job")
        _budget_flags(p)
        p.set_defaults(func=fn)
    p = sub.add_parser("verify", help="re-check a trace from its raw data")
    p.add_argument("trace")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.set_defaults(func=cmd_verify)
    p = sub.add_parser("corpus", help="run every *.job file of a directory")
    p.add_argument("dir", nargs="?", help="defaults to the bundled corpus")
    _budget_flags(p)
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--traces", help="directory for per-job trace files")
    p.set_defaults(func=cmd_corpus)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (JobError, SchemaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
