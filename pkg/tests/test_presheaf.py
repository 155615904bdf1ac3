import json

import numpy as np
import pytest

from rlsheaf import fixtures as fx
from rlsheaf.algebra import RLMorphism, is_isomorphic, one_element
from rlsheaf.errors import FormatError, PreconditionError
from rlsheaf.presheaf import (
    PresheafMorphism,
    check_equalizer,
    check_gluing,
    check_separation,
    compatible_families,
    equalizer_agreement,
    filter_quotient_presheaf,
    identity_morphism,
    is_sheaf,
    parse_presheaf,
    quotient_presheaf,
    sierpinski_fuzzy_presheaf,
    validate_presheaf,
    validate_presheaf_morphism,
)
from rlsheaf.spectra import enumerate_filters, spectrum
from rlsheaf.topology import open_covers


@pytest.mark.parametrize("name", fx.PRESHEAF_FIXTURES)
def test_every_builtin_fixture_validates(name):
    assert validate_presheaf(fx.presheaf(name)).ok


def test_functor_laws_by_hand():
    P = fx.presheaf("prsresexa6")
    for U in P.opens:
        assert np.array_equal(P.res(U, U).map, np.arange(P.value(U).n))
    for W in P.opens:
        for V in P.opens:
            for U in P.opens:
                if W & ~V == 0 and V & ~U == 0:
                    assert np.array_equal(P.res(U, W).map, P.res(V, W).map[P.res(U, V).map])


@pytest.mark.parametrize("k", [1, 2, 10])
def test_modified_sierpinski_is_rejected_with_imp_witness(k):
    rep = validate_presheaf(fx.presheaf(f"sierpinski_modified({k})"))
    assert not rep.ok
    v = rep.first("imp")
    assert v is not None and v.check == "restriction.imp"
    assert (v.witness["V"], v.witness["U"]) == ("{x,y}", "{x}")


def test_sierpinski_fuzzy_shape():
    P = sierpinski_fuzzy_presheaf(2)
    S = P.base
    xy, x = S.mask(["x", "y"]), S.mask(["x"])
    assert P.value(xy).n == 9 and P.value(x).n == 3 and P.value(0).n == 1
    nu = P.value(xy).index("(1/2,1)")
    assert P.value(x).label(P.restrict(xy, x, nu)) == "1/2"


@pytest.mark.parametrize("k", [1, 2, 3, 5, 10])
def test_sierpinski_fuzzy_is_a_sheaf(k):
    assert is_sheaf(sierpinski_fuzzy_presheaf(k)).ok


def test_separation_with_the_whole_open_in_cover():
    P = fx.presheaf("constant(a4, discrete2)")
    for O in P.opens:
        for cover in open_covers(P.base, O):
            if O in cover:
                assert check_separation(P, O, cover).ok


def test_constant_presheaf_modes():
    P = fx.presheaf("constant(a4, discrete2)")
    s = check_separation(P, 0, ())
    assert not s.ok and s.violations[0].witness["cover"] == []
    assert not s.info["unit_criterion"]
    for O in P.opens:
        for cover in open_covers(P.base, O, "paper"):
            assert check_separation(P, O, cover, "paper").ok
    p, q = P.base.mask(["p"]), P.base.mask(["q"])
    g = check_gluing(P, P.base.full, (p, q), "paper")
    assert not g.ok
    fam = g.violations[0].witness["family"]
    assert set(fam) == {"{p}", "{q}"} and fam["{p}"] != fam["{q}"]
    # in strict mode that family is not compatible: the empty intersection keeps both values
    strict = list(compatible_families(P, (p, q), "strict"))
    assert all(a == b for a, b in strict)
    assert check_gluing(P, P.base.full, (p, q), "strict").ok


def test_is_sheaf_verdicts():
    assert is_sheaf(fx.presheaf("one_point(a4)")).ok
    for mode in ("strict", "paper"):
        assert is_sheaf(fx.presheaf("skyscraper(sierpinski, x, a4)"), mode).ok
    C = fx.presheaf("constant(a4, discrete2)")
    strict, paper = is_sheaf(C, "strict"), is_sheaf(C, "paper")
    assert strict.first("separation") is not None
    assert paper.first("separation") is None and paper.first("gluing") is not None


def test_sheaf_value_on_empty_is_terminal():
    for name in fx.PRESHEAF_FIXTURES:
        P = fx.presheaf(name)
        if is_sheaf(P).ok:
            assert P.value(0).n == 1


def test_equalizer_examples():
    P = fx.presheaf("prsresexa4")
    U, V = P.base.mask(["F2"]), P.base.mask(["F3"])
    rep = check_equalizer(P, P.base.full, (U, V))
    assert rep.ok and rep.info["equalized"] == 4
    S = fx.presheaf("skyscraper(sierpinski, x, a4)")
    for O in S.opens:
        for cover in open_covers(S.base, O):
            assert check_equalizer(S, O, cover).ok
    C = fx.presheaf("constant(a4, discrete2)")
    rep = check_equalizer(C, 0, ())
    assert rep.first("injective") is not None


@pytest.mark.parametrize("name", fx.PRESHEAF_FIXTURES)
def test_equalizer_agrees_with_separation_and_gluing(name):
    assert equalizer_agreement(fx.presheaf(name)).ok


def test_skyscraper_values():
    S = fx.space("sierpinski")
    P = fx.presheaf("skyscraper(sierpinski, y, a4)")
    for U in S.opens:
        assert P.value(U).n == (4 if U >> S.index("y") & 1 else 1)


def test_filter_quotient_reproduces_prsresexa4(A4):
    base = spectrum(A4, "spec", "hull").topology
    lat = enumerate_filters(A4)
    P = filter_quotient_presheaf(A4, base, {"F2": lat.by_name("F2"), "F3": lat.by_name("F3")})
    ref = fx.presheaf("prsresexa4")
    for U in P.opens:
        assert is_isomorphic(P.value(U), ref.value(U))


def test_filter_quotient_with_top_filters(A4):
    base = fx.space("sierpinski")
    P = filter_quotient_presheaf(A4, base, {"x": ["1"], "y": ["1"]})
    for V, U in P.inclusions():
        if U:
            assert np.array_equal(P.res(V, U).map, np.arange(4))


def test_quotient_presheaf_requires_antitone_filters(A4):
    base = fx.space("sierpinski")
    lat = enumerate_filters(A4)
    x, xy = base.mask(["x"]), base.full
    with pytest.raises(PreconditionError):
        quotient_presheaf(A4, base, {0: lat.by_name("F4"), x: lat.by_name("F1"), xy: lat.by_name("F2")})


def test_json_roundtrip():
    P = fx.presheaf("prsresexa6")
    Q = parse_presheaf(json.loads(json.dumps(P.to_json())))
    assert validate_presheaf(Q).ok
    for U in P.opens:
        assert P.value(U).same_tables(Q.value(U))
    for V, U in P.inclusions():
        assert np.array_equal(P.res(V, U).map, Q.res(V, U).map)


def test_missing_value_is_a_format_error():
    P = fx.presheaf("prsresexa4")
    data = P.to_json()
    del data["values"]["F2"]
    with pytest.raises(FormatError):
        Q = parse_presheaf(data)
        validate_presheaf(Q)


def test_naturality_check_finds_broken_square():
    P = fx.presheaf("sierpinski_fuzzy(1)")
    ok = identity_morphism(P)
    assert validate_presheaf_morphism(ok).ok
    xy = P.base.full
    # negating alpha on {x,y} alone is an automorphism there, but the restriction to {x} sees it
    A = P.value(xy)
    swap = [A.index(f"({1 - int(a)},{b})") for a, b in (lab.strip("()").split(",") for lab in A.elems)]
    comps = dict(ok.components)
    comps[xy] = RLMorphism(A, A, swap)
    bad = PresheafMorphism(P, P, comps, "bad")
    rep = validate_presheaf_morphism(bad)
    assert not rep.ok


def test_one_element_presheaf_everywhere_is_a_sheaf():
    base = fx.space("sierpinski")
    one = one_element()
    P = quotient_presheaf(one, base, {U: 1 for U in base.opens})
    assert is_sheaf(P).ok
