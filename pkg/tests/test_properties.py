"""Randomised checks of structural invariants over generated algebras and presheaves."""

import random

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from rlsheaf import fixtures as fx
from rlsheaf.algebra import (
    is_filter,
    lukasiewicz_chain,
    mask_members,
    product_algebra,
    quotient_by_filter,
    validate_residuated_lattice,
)
from rlsheaf.colimit import stalk_routes_agree
from rlsheaf.etale import validate_etale_space
from rlsheaf.functors import check_equivalence, iota_dichotomy
from rlsheaf.presheaf import equalizer_agreement, is_sheaf, validate_presheaf
from rlsheaf.sheafify import sheafification
from rlsheaf.spectra import enumerate_filters, generated_filter

SETTINGS = settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])

seeds = st.integers(min_value=0, max_value=2**32 - 1)
small_names = st.sampled_from(fx.SMALL_ALGEBRAS)


def presheaf_from(seed):
    return fx.random_presheaf(random.Random(seed))


@SETTINGS
@given(small_names)
def test_small_algebras_are_residuated_lattices(name):
    assert validate_residuated_lattice(fx.small_algebra(name)).ok


@SETTINGS
@given(small_names, small_names)
def test_products_stay_residuated(a, b):
    A, B = fx.small_algebra(a), fx.small_algebra(b)
    P = product_algebra(A, B)
    assert P.n == A.n * B.n
    assert validate_residuated_lattice(P).ok


@SETTINGS
@given(small_names, st.data())
def test_filters_are_closed_under_intersection(name, data):
    A = fx.small_algebra(name)
    fs = [f.mask for f in enumerate_filters(A).filters]
    f = data.draw(st.sampled_from(fs))
    g = data.draw(st.sampled_from(fs))
    assert (f & g) in fs


@SETTINGS
@given(small_names, st.data())
def test_generated_filter_is_the_least_filter_containing(name, data):
    A = fx.small_algebra(name)
    X = data.draw(st.integers(min_value=0, max_value=(1 << A.n) - 1))
    g = generated_filter(A, X).mask
    assert is_filter(A, mask_members(g)) and X & ~g == 0
    for f in enumerate_filters(A).filters:
        if X & ~f.mask == 0:
            assert g & ~f.mask == 0


@SETTINGS
@given(st.integers(min_value=1, max_value=6), st.data())
def test_quotients_are_residuated_and_the_projection_is_onto(k, data):
    A = lukasiewicz_chain(k) if k % 2 else product_algebra(lukasiewicz_chain(1), lukasiewicz_chain(k // 2))
    f = data.draw(st.sampled_from(enumerate_filters(A).filters))
    Q, q = quotient_by_filter(A, f.mask)
    assert validate_residuated_lattice(Q).ok
    assert sorted(set(int(v) for v in q.map)) == list(range(Q.n))
    # the kernel of the projection is the filter
    assert {i for i in range(A.n) if q.map[i] == Q.top} == set(mask_members(f.mask))


@SETTINGS
@given(seeds)
def test_random_presheaves_are_valid(seed):
    assert validate_presheaf(presheaf_from(seed)).ok


@SETTINGS
@given(seeds)
def test_equalizer_matches_sheaf_verdict(seed):
    assert equalizer_agreement(presheaf_from(seed)).ok


@SETTINGS
@given(seeds)
def test_stalk_routes_agree(seed):
    P = presheaf_from(seed)
    for x in P.base.points:
        assert stalk_routes_agree(P, x).ok


@SETTINGS
@given(seeds)
def test_sheafification_properties(seed):
    P = presheaf_from(seed)
    sh = sheafification(P)
    assert is_sheaf(sh.plus).ok
    assert validate_etale_space(sh.etale.etale).ok
    assert iota_dichotomy(P).ok
    assert sheafification(sh.plus).iota.is_isomorphism()


@SETTINGS
@given(seeds)
def test_counit_is_an_isomorphism(seed):
    E = sheafification(presheaf_from(seed)).etale.etale
    assert check_equivalence(E).ok
