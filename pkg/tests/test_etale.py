import pytest

from rlsheaf import fixtures as fx
from rlsheaf.algebra import is_isomorphic, lukasiewicz_chain, product_algebra
from rlsheaf.etale import (
    EtaleSpace,
    Section,
    equalizer,
    identity_etale,
    section_algebra,
    sections,
    stalk_discreteness,
    validate_etale_morphism,
    validate_etale_space,
)
from rlsheaf.presheaf import sierpinski_fuzzy_presheaf
from rlsheaf.sheafify import etale_of_presheaf
from rlsheaf.topology import FinTopSpace


def et(name):
    return etale_of_presheaf(fx.presheaf(name)).etale


def twisted_double():
    """Two copies of L1 over the Sierpinski space, glued with a twist over {x,y}."""
    S = FinTopSpace.sierpinski()
    pts = ["0x", "1x", "0y", "1y"]
    total = FinTopSpace.from_opens(pts, [[], ["0x"], ["1x"], ["0x", "1x"], ["0x", "1y"], ["1x", "0y"],
                                         ["0x", "1x", "1y"], ["0x", "1x", "0y"], pts])
    L1 = lukasiewicz_chain(1)
    return EtaleSpace(S, total, [0, 0, 1, 1], [0, 1, 0, 1], {0: L1, 1: L1}, "twisted")


def test_sierpinski_etale_space_is_valid():
    E = etale_of_presheaf(sierpinski_fuzzy_presheaf(2)).etale
    rep = validate_etale_space(E)
    assert rep.ok, rep.render()
    assert rep.info["pointwise_closure"] and rep.info["t2_continuity"]


def test_identity_etale_space():
    E = identity_etale(FinTopSpace.sierpinski())
    assert validate_etale_space(E).ok
    for U in E.base.opens:
        assert len(sections(E, U)) == 1
    assert stalk_discreteness(E).ok


def test_twisted_double_fails_with_continuity_witness():
    E = twisted_double()
    rep = validate_etale_space(E)
    assert rep.info["projection"]["local_homeomorphism"]
    v = rep.first("continuity")
    assert v is not None and "at" in v.witness
    assert rep.first("pointwise_closure") is not None
    assert rep.first("agreement") is None


def test_section_counts():
    E = et("sierpinski_fuzzy(2)")
    assert len(sections(E, E.base.full)) == 9
    assert len(sections(E, 0)) == 1 and sections(E, 0)[0].values == ()


@pytest.mark.parametrize("k", [1, 2, 4])
def test_section_algebras(k):
    E = etale_of_presheaf(sierpinski_fuzzy_presheaf(k)).etale
    assert section_algebra(E, 0).algebra.n == 1
    x = E.base.mask(["x"])
    assert is_isomorphic(section_algebra(E, x).algebra, lukasiewicz_chain(k))


def test_sections_over_disjoint_union_form_a_product(A4):
    E = et("constant(a4, discrete2)")
    p, q = E.base.mask(["p"]), E.base.mask(["q"])
    whole = section_algebra(E, p | q).algebra
    prod = product_algebra(section_algebra(E, p).algebra, section_algebra(E, q).algebra)
    assert whole.n == 16 and is_isomorphic(whole, prod)


def test_equalizer_of_sections():
    E = et("constant(a4, discrete2)")
    full = E.base.full
    secs = sections(E, full)
    s = secs[0]
    assert equalizer(s, s) == full
    p = E.base.index("p")
    t = next(u for u in secs if u.at(p) != s.at(p) and u.values[1:] == s.values[1:])
    assert equalizer(s, t) == E.base.mask(["q"])
    u = next(u for u in secs if all(a != b for a, b in zip(u.values, s.values)))
    assert equalizer(s, u) == 0


def test_etale_morphisms():
    E = et("constant(a4, discrete2)")
    ident = tuple(range(E.total.n))
    assert validate_etale_morphism(ident, E, E).ok
    # swap bottom and top inside the fiber over p: continuous, but not a stalk morphism
    fib = E.fiber(E.base.index("p"))
    swap = list(ident)
    swap[fib[0]], swap[fib[-1]] = fib[-1], fib[0]
    rep = validate_etale_morphism(swap, E, E)
    v = next(v for v in rep.violations if v.check.startswith("stalk."))
    assert v.witness["point"] == "p"


def test_fiber_violation_is_reported():
    E = et("constant(a4, discrete2)")
    q0 = E.fiber(E.base.index("q"))[0]
    h = [q0] * E.total.n
    assert validate_etale_morphism(h, E, E).first("fiber") is not None


@pytest.mark.parametrize("name", ["sierpinski_fuzzy(2)", "prsresexa8", "constant(L2, sierpinski)"])
def test_stalk_discreteness(name):
    assert stalk_discreteness(et(name)).ok


def test_section_restrict_and_label():
    E = et("sierpinski_fuzzy(1)")
    s = sections(E, E.base.full)[3]
    r = s.restrict(E.base.mask(["x"]))
    assert isinstance(r, Section) and r.values == (s.at(E.base.index("x")),)
    assert s.label().startswith("[")
