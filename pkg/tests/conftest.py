import sys
from fractions import Fraction
from functools import lru_cache

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from surfres.algebra import QQ, Ring, make_field
from surfres.cli import bundled_corpus, run_job
from surfres.jobspec import load_job

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

XYZ = ("x", "y", "z")


def ring(p=0, k=1, names=XYZ):
    F = QQ if p == 0 else make_field(p, k)
    return Ring(F, tuple(names))


@pytest.fixture
def rq():
    return ring(0)


@pytest.fixture
def r2():
    return ring(2)


@pytest.fixture
def r3():
    return ring(3)


def coefficients(R):
    F = R.field
    if F.is_finite():
        return st.sampled_from(list(F.elements()))
    return st.builds(lambda a, b: F.coerce(Fraction(a, b)), st.integers(-5, 5), st.integers(1, 3))


def polys(R, max_terms=5, max_deg=4, min_order=0):
    exps = st.tuples(*[st.integers(0, max_deg)] * R.nvars).filter(
        lambda e: min_order <= sum(e) <= max_deg + min_order)
    return st.dictionaries(exps, coefficients(R), max_size=max_terms).map(
        lambda d: sum((R.monomial(e, c) for e, c in d.items()), R.zero()))


CORPUS = bundled_corpus()


def corpus_files():
    return sorted(CORPUS.glob("*.job"))


@lru_cache(maxsize=None)
def corpus_trace(name: str):
    """Trace of a bundled job, computed once per session."""
    job = load_job(CORPUS / f"{name}.job")
    return job, run_job(job)


def corpus_names(mode=None):
    out = []
    for p in corpus_files():
        job = load_job(p)
        if mode is None or job.mode == mode:
            out.append(p.stem)
    return out


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        ok, title, detail = results[number]
        terminalreporter.write_line(f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}")
