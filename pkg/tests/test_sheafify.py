import random

import numpy as np
import pytest

from rlsheaf import fixtures as fx
from rlsheaf.algebra import is_isomorphic, product_algebra
from rlsheaf.etale import identity_etale, validate_etale_space
from rlsheaf.presheaf import identity_morphism, is_sheaf, sierpinski_fuzzy_presheaf, validate_presheaf_morphism
from rlsheaf.sheafify import (
    check_plus_sections,
    etale_of_morphism,
    etale_of_presheaf,
    induced_plus_morphism,
    plus_identity,
    ps_of_etale_morphism,
    sections_presheaf,
    sheafification,
)
from rlsheaf.topology import FinTopSpace


def test_germ_space_of_sierpinski_l2():
    et = etale_of_presheaf(sierpinski_fuzzy_presheaf(2))
    E = et.etale
    assert E.total.n == 12
    assert [len(E.fiber(b)) for b in range(2)] == [3, 9]
    assert validate_etale_space(E).ok
    # germ-map images over {x} are single points and are open
    x = E.base.mask(["x"])
    for s in range(3):
        img = sum(1 << t for t in et.germ_section(x, s))
        assert E.total.is_open(img)


def test_sections_of_identity_space_are_one_point():
    P = sections_presheaf(identity_etale(FinTopSpace.sierpinski())).presheaf
    assert all(P.value(U).n == 1 for U in P.opens)
    assert is_sheaf(P).ok


def test_constant_presheaf_sheafifies_to_product(A4):
    sh = sheafification(fx.presheaf("constant(a4, discrete2)"))
    top = sh.plus.value(sh.plus.base.full)
    assert top.n == 16 and is_isomorphic(top, product_algebra(A4, A4))
    assert sh.plus.value(0).n == 1


@pytest.mark.parametrize("name", fx.PRESHEAF_FIXTURES)
def test_plus_is_a_sheaf_with_the_same_stalks(name):
    P = fx.presheaf(name)
    sh = sheafification(P)
    assert is_sheaf(sh.plus).ok
    assert validate_presheaf_morphism(sh.iota).ok
    again = etale_of_presheaf(sh.plus)
    for x in range(P.base.n):
        assert is_isomorphic(again.stalks[x].algebra, sh.etale.stalks[x].algebra)
    assert check_plus_sections(sh).ok


@pytest.mark.parametrize("name", ["prsresexa4", "prsresexa8", "sierpinski_fuzzy(2)", "constant(L2, sierpinski)"])
def test_plus_is_idempotent(name):
    plus = sheafification(fx.presheaf(name)).plus
    twice = sheafification(plus)
    assert twice.iota.is_isomorphism()
    for U in plus.opens:
        assert is_isomorphic(plus.value(U), twice.plus.value(U))


def test_plus_of_identity_is_identity():
    P = fx.presheaf("prsresexa6")
    pm = plus_identity(P)
    assert pm.report.ok and pm.report.info["uniqueness"] == "checked"
    assert pm.morphism.same_as(identity_morphism(sheafification(P).plus))


@pytest.mark.parametrize("seed", [3, 11, 29])
def test_quotient_square_commutes(seed):
    rng = random.Random(seed)
    P = fx.random_presheaf(rng)
    while not hasattr(P, "filters"):
        P = fx.random_presheaf(rng)
    _, q = fx.coarsening(P, rng)
    assert validate_presheaf_morphism(q).ok
    pm = induced_plus_morphism(q)
    assert pm.report.ok, pm.report.render()
    assert pm.report.info["uniqueness"] in ("checked", "not-checked")


def test_perturbed_candidate_breaks_the_triangle():
    P = fx.presheaf("constant(a4, discrete2)")
    sh = sheafification(P)
    E = sh.etale.etale
    # swapping the atoms of the stalk over q is an automorphism of the etale space
    h = list(range(E.total.n))
    a, b = (E.total.index(f"{e}@q") for e in ("a", "b"))
    h[a], h[b] = b, a
    psi = ps_of_etale_morphism(h, E, E, sh.sections, sh.sections)
    assert validate_presheaf_morphism(psi).ok
    assert not psi.same_as(identity_morphism(sh.plus))
    assert not sh.iota.then(psi).same_as(sh.iota)


def test_et_of_identity_is_identity():
    P = fx.presheaf("prsresexa8")
    m = etale_of_morphism(identity_morphism(P))
    assert m.report.ok and m.map == tuple(range(m.source.etale.total.n))


def test_iota_is_not_injective_for_non_separated_presheaf():
    P = fx.presheaf("constant(a4, discrete2)")
    sh = sheafification(P)
    # F(empty) = A4 collapses to the single empty section
    assert not sh.iota[0].is_injective()
    assert not sh.iota.is_isomorphism()


def test_iota_components_send_sections_to_germ_maps():
    sh = sheafification(sierpinski_fuzzy_presheaf(1))
    full = sh.source.base.full
    secs = sh.sections.algebras[full].sections
    for s in range(sh.source.value(full).n):
        got = secs[int(sh.iota[full].map[s])]
        assert got == sh.etale.germ_section(full, s)
    assert np.unique(sh.iota[full].map).size == sh.source.value(full).n
