"""Acceptance criteria, one test each, timed after the numba kernels are compiled.

Each criterion prints a PASS/FAIL line in the pytest terminal summary.
Running this file directly executes the same checks without pytest:

    python3 tests/test_acceptance.py
"""

from __future__ import annotations

import random
import sys
import time

import pytest

from rlsheaf import fixtures as fx
from rlsheaf.algebra import (
    RLMorphism,
    check_morphism,
    is_isomorphic,
    lukasiewicz_chain,
    product_algebra,
    validate_residuated_lattice,
)
from rlsheaf.cli import PUBLISHED_OPENS, etale_morphism_fixtures, reflection_triples
from rlsheaf.colimit import stalk, stalk_routes_agree
from rlsheaf.functors import check_equivalence, check_reflection
from rlsheaf.presheaf import (
    check_gluing,
    check_separation,
    equalizer_agreement,
    is_sheaf,
    validate_presheaf,
)
from rlsheaf.sheafify import etale_of_presheaf, sheafification
from rlsheaf.spectra import classify_filters, enumerate_filters, min_patch_discrepancy, spectrum

SUMMARY: list[str] = []
CRITERIA: list[tuple[int, str, float | None, object]] = []


def criterion(num: int, title: str, limit: float | None = None):
    def register(fn):
        CRITERIA.append((num, title, limit, fn))
        return fn
    return register


def warm_up() -> None:
    """Compile every kernel once so that timings measure steady state."""
    L = lukasiewicz_chain(2)
    validate_residuated_lattice(L)
    enumerate_filters(L)
    validate_residuated_lattice(product_algebra(L, L))


def run_criterion(num, title, limit, fn) -> tuple[bool, str]:
    start = time.perf_counter()
    try:
        detail = fn() or ""
        ok, why = True, ""
    except AssertionError as exc:
        ok, why, detail = False, str(exc) or "assertion failed", ""
    elapsed = time.perf_counter() - start
    budget = "" if limit is None else f" < {limit:g} s"
    if ok and limit is not None and elapsed >= limit:
        ok, why = False, f"runtime {elapsed:.2f} s exceeds {limit:g} s"
    line = f"{'PASS' if ok else 'FAIL'}  [{num:2d}] {title} ({elapsed:.2f} s{budget})"
    if detail:
        line += f"  {detail}"
    if why:
        line += f"  -- {why}"
    SUMMARY.append(line)
    return ok, line


# ---------------------------------------------------------------------------

TABLE_FILTERS = {
    "a4": {"F1": {"1"}, "F2": {"a", "1"}, "F3": {"b", "1"}, "F4": {"0", "a", "b", "1"}},
    "a6": {"F1": {"1"}, "F2": {"a", "b", "d", "1"}, "F3": {"c", "d", "1"}, "F4": {"d", "1"},
           "F5": {"0", "a", "b", "c", "d", "1"}},
    "a8": {"F1": {"1"}, "F2": {"a", "c", "d", "e", "f", "1"}, "F3": {"c", "e", "1"}, "F4": {"f", "1"},
           "F5": {"0", "a", "b", "c", "d", "e", "f", "1"}},
}

TABLE_CLASSES = {
    "a4": {"maximal": ["F2", "F3"], "minimal_prime": ["F2", "F3"]},
    "a6": {"maximal": ["F2", "F3"], "minimal_prime": ["F1"]},
    "a8": {"maximal": ["F2"], "minimal_prime": ["F3", "F4"]},
}


def _family(sp):
    return sorted(sorted(o) for o in sp.open_families())


@criterion(1, "fixture algebras a4, a6, a8 are residuated lattices")
def c1():
    times = []
    for name in ("a4", "a6", "a8"):
        A = fx.algebra(name)
        t = time.perf_counter()
        rep = validate_residuated_lattice(A)
        dt = time.perf_counter() - t
        assert rep.ok, rep.render()
        assert dt < 1.0, f"{name} took {dt:.2f} s"
        times.append(f"{name} {dt * 1000:.1f} ms")
    return ", ".join(times)


@criterion(2, "filter tables for A4, A6, A8", 1.0)
def c2():
    for name, want in TABLE_FILTERS.items():
        lat = enumerate_filters(fx.algebra(name))
        got = {n: set(m) for n, m in lat.table()}
        assert got == want, f"{name}: {got}"
    return "4/5/5 filters"


@criterion(3, "maximal and minimal prime filters", 1.0)
def c3():
    for name, want in TABLE_CLASSES.items():
        c = classify_filters(fx.algebra(name))
        for kind, names in want.items():
            assert c.names(kind) == names, f"{name} {kind}: {c.names(kind)}"


@criterion(4, "spectral topologies and the Min_p(A8) discrepancy report", 1.0)
def c4():
    sp = spectrum(fx.a4(), "spec", "hull")
    assert _family(sp) == sorted(sorted(o) for o in PUBLISHED_OPENS["Spec_h(A4)"])
    sp = spectrum(fx.a6(), "max", "dual")
    assert _family(sp) == sorted(sorted(o) for o in PUBLISHED_OPENS["Max_d(A6)"])
    on_min = _family(spectrum(fx.a8(), "min", "patch"))
    on_spec = _family(spectrum(fx.a8(), "spec", "patch"))
    rep = min_patch_discrepancy(fx.a8(), PUBLISHED_OPENS["Min_p(A8)"])
    assert rep.first("paper-discrepancy") is not None
    assert rep.info["patch on Min"] == on_min and rep.info["patch on Spec"] == on_spec
    return f"published family reproduced by {rep.info['matches']}"


@criterion(5, "the A6 -> A4 map is a morphism; 10 perturbations fail")
def c5():
    A6, A4 = fx.a6(), fx.a4()
    base = [A4.index(v) for v in ("0", "a", "a", "b", "1", "1")]
    assert check_morphism(RLMorphism(A6, A4, base)).ok
    rng = random.Random(5)
    singles = [(i, v) for i in range(A6.n) for v in range(A4.n) if v != base[i]]
    for i, v in rng.sample(singles, 10):
        mp = list(base)
        mp[i] = v
        rep = check_morphism(RLMorphism(A6, A4, mp))
        assert not rep.ok, f"perturbation at {A6.label(i)} passed"
        assert rep.violations[0].witness, "violation without a witness"


@criterion(6, "one-point, skyscraper and constant presheaf sheaf checks", 5.0)
def c6():
    for name in ("one_point(a4)", "skyscraper(sierpinski, x, a4)", "skyscraper(discrete2, p, a4)"):
        P = fx.presheaf(name)
        for mode in ("strict", "paper"):
            assert is_sheaf(P, mode).ok, f"{name} in {mode} mode"
    C = fx.presheaf("constant(a4, discrete2)")
    p, q = C.base.mask(["p"]), C.base.mask(["q"])
    glue = check_gluing(C, C.base.full, (p, q), "paper")
    v = glue.first("gluing")
    assert v is not None and set(v.witness["family"]) == {"{p}", "{q}"}
    assert len(set(v.witness["family"].values())) == 2
    assert check_separation(C, C.base.full, (p, q), "paper").ok
    sep = check_separation(C, 0, (), "strict")
    w = sep.first("separation")
    assert w is not None and w.witness["cover"] == []
    assert not is_sheaf(C, "strict").ok and not is_sheaf(C, "paper").ok
    return f"paper glue witness {v.witness['family']}; strict separation witness s={w.witness['s']}, t={w.witness['t']}"


@criterion(7, "separation and gluing agree with the equalizer diagram", 60.0)
def c7():
    pool = fx.random_presheaves(7, 120)
    assert len(pool) >= 100
    pairs = 0
    for P in pool:
        assert all(P.base.n <= 3 and P.value(U).n <= 4 for U in P.opens)
        rep = equalizer_agreement(P)
        assert rep.ok, rep.render()
        pairs += rep.info["pairs"]
    return f"{len(pool)} presheaves, {pairs} (open, cover) pairs"


@criterion(8, "Sierpinski presheaf at k=10", 30.0)
def c8():
    P = fx.presheaf("sierpinski_fuzzy(10)")
    assert validate_presheaf(P).ok
    assert is_sheaf(P).ok
    L = lukasiewicz_chain(10)
    sx, sy = stalk(P, "x").algebra, stalk(P, "y").algebra
    assert sx.n == 11 and is_isomorphic(sx, L)
    assert sy.n == 121 and is_isomorphic(sy, product_algebra(L, L))
    sh = sheafification(P)
    for U in P.opens:
        assert is_isomorphic(sh.plus.value(U), P.value(U)), P.key(U)
    assert sh.iota.is_isomorphism()


SHEAF_FIXTURES = {"one_point(a4)", "skyscraper(sierpinski, x, a4)", "skyscraper(sierpinski, y, L2)",
                  "skyscraper(discrete2, p, a4)", "sierpinski_fuzzy(2)", "prsresexa4"}


@criterion(9, "sheafification properties on every fixture", 60.0)
def c9():
    sheaves = 0
    for name in fx.PRESHEAF_FIXTURES:
        P = fx.presheaf(name)
        sh = sheafification(P)
        assert is_sheaf(sh.plus).ok, name
        et2 = etale_of_presheaf(sh.plus)
        for x in range(P.base.n):
            assert is_isomorphic(et2.stalks[x].algebra, sh.etale.stalks[x].algebra), (name, x)
        twice = sheafification(sh.plus)
        assert twice.iota.is_isomorphism(), name
        if name in SHEAF_FIXTURES:
            sheaves += 1
            assert sh.iota.is_isomorphism(), name
        assert (name in SHEAF_FIXTURES) == is_sheaf(P).ok, f"unexpected sheaf verdict for {name}"
    return f"{len(fx.PRESHEAF_FIXTURES)} fixtures, {sheaves} sheaves"


@criterion(10, "counit is an isomorphism and natural", 60.0)
def c10():
    n = 0
    for name in fx.PRESHEAF_FIXTURES:
        rep = check_equivalence(etale_of_presheaf(fx.presheaf(name)).etale)
        assert rep.ok, rep.render()
        n += 1
    maps = etale_morphism_fixtures(10, 10)
    for h, E, F in maps:
        rep = check_equivalence(E, [(h, E, F)])
        assert rep.ok, rep.render()
    return f"{n} spaces, {len(maps)} naturality squares"


@criterion(11, "reflection triangle and uniqueness on 20 triples", 120.0)
def c11():
    triples = reflection_triples(11, 20)
    assert len(triples) == 20
    for P, G, phi in triples:
        rep = check_reflection(P, G, phi)
        assert rep.verdict == "passed", rep.render()


@criterion(12, "fast stalks agree with directed colimits", 60.0)
def c12():
    pool = [fx.presheaf(n) for n in fx.PRESHEAF_FIXTURES] + fx.random_presheaves(12, 100)
    for P in pool:
        for x in P.base.points:
            rep = stalk_routes_agree(P, x)
            assert rep.ok, rep.render()
    return f"{len(pool)} presheaves"


@criterion(13, "modified Sierpinski presheaf is rejected with a -> witness")
def c13():
    for k in (1, 2, 10):
        rep = validate_presheaf(fx.presheaf(f"sierpinski_modified({k})"))
        v = rep.first("restriction.imp")
        assert v is not None, f"k={k}: {rep.render()}"
        assert v.witness["V"] == "{x,y}" and v.witness["U"] == "{x}"


# ---------------------------------------------------------------------------


@pytest.fixture(scope="module", autouse=True)
def _compiled():
    warm_up()


@pytest.mark.parametrize("num,title,limit,fn", CRITERIA, ids=[f"criterion_{c[0]:02d}" for c in CRITERIA])
def test_criterion(num, title, limit, fn):
    ok, line = run_criterion(num, title, limit, fn)
    assert ok, line


if __name__ == "__main__":
    warm_up()
    results = [run_criterion(*c)[0] for c in CRITERIA]
    print("\n".join(SUMMARY))
    sys.exit(0 if all(results) else 1)
