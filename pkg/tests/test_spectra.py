import pytest

from rlsheaf import fixtures as fx
from rlsheaf.algebra import is_filter, lukasiewicz_chain, mask_members, one_element
from rlsheaf.errors import PreconditionError
from rlsheaf.spectra import (
    classify_filters,
    enumerate_filters,
    generated_filter,
    is_prime,
    min_patch_discrepancy,
    spectrum,
    spectrum_topology,
)
from rlsheaf.topology import validate_topology

TABLE_FILTERS = {
    "a4": {"F1": ["1"], "F2": ["a", "1"], "F3": ["b", "1"], "F4": ["0", "a", "b", "1"]},
    "a6": {"F1": ["1"], "F2": ["a", "b", "d", "1"], "F3": ["c", "d", "1"], "F4": ["d", "1"],
           "F5": ["0", "a", "b", "c", "d", "1"]},
    "a8": {"F1": ["1"], "F2": ["a", "c", "d", "e", "f", "1"], "F3": ["c", "e", "1"], "F4": ["f", "1"],
           "F5": ["0", "a", "b", "c", "d", "e", "f", "1"]},
}


def brute_filters(alg):
    out = []
    for m in range(1 << alg.n):
        if is_filter(alg, mask_members(m)):
            out.append(m)
    return sorted(out)


@pytest.mark.parametrize("name", ["a4", "a6", "a8"])
def test_filter_tables(name):
    lat = enumerate_filters(fx.algebra(name))
    got = {n: sorted(m, key=lat.parent.index) for n, m in lat.table()}
    want = {n: sorted(m, key=lat.parent.index) for n, m in TABLE_FILTERS[name].items()}
    assert got == want


@pytest.mark.parametrize("name", ["a4", "a6", "a8", "L3"])
def test_filters_match_subset_oracle(name):
    alg = fx.algebra(name)
    assert sorted(f.mask for f in enumerate_filters(alg)) == brute_filters(alg)


def test_one_element_has_one_filter():
    assert len(enumerate_filters(one_element())) == 1


def test_lattice_closed_under_meet_and_join(A8):
    lat = enumerate_filters(A8)
    masks = {f.mask for f in lat}
    for a in lat:
        for b in lat:
            assert lat.meet(a, b).mask in masks
            assert lat.join(a, b).mask in masks


def test_generated_filter(A4, A8):
    assert sorted(generated_filter(A4, ["a"]).labels()) == ["1", "a"]
    assert generated_filter(A4, []).labels() == ["1"]
    assert sorted(generated_filter(A8, ["f"]).labels()) == ["1", "f"]


def test_classification_tables(A4, A6, A8):
    c = classify_filters(A4)
    assert c.names("maximal") == ["F2", "F3"] and c.names("minimal_prime") == ["F2", "F3"]
    c = classify_filters(A6)
    assert c.names("maximal") == ["F2", "F3"] and c.names("minimal_prime") == ["F1"]
    assert c.names("prime") == ["F1", "F2", "F3"]
    c = classify_filters(A8)
    assert c.names("maximal") == ["F2"] and c.names("minimal_prime") == ["F3", "F4"]
    assert c.names("prime") == ["F2", "F3", "F4"]


def test_two_element_chain_classification():
    L1 = lukasiewicz_chain(1)
    c = classify_filters(L1)
    assert [f.labels() for f in c.prime] == [["1"]]
    assert c.prime == c.maximal == c.minimal_prime


def test_prime_by_definition(A6):
    for f in enumerate_filters(A6):
        proper = f.mask != (1 << A6.n) - 1
        oracle = proper and all(
            not (f.mask >> A6.join[x, y] & 1) or (f.mask >> x & 1) or (f.mask >> y & 1)
            for x in range(A6.n) for y in range(A6.n))
        assert is_prime(A6, f.mask) == oracle


def _fam(sp):
    return sorted(sorted(o) for o in sp.open_families())


def test_table_topologies(A4, A6):
    assert _fam(spectrum(A4, "spec", "hull")) == [[], ["F2"], ["F2", "F3"], ["F3"]]
    assert _fam(spectrum(A6, "max", "dual")) == [[], ["F2"], ["F2", "F3"], ["F3"]]


@pytest.mark.parametrize("kind", ["hull", "dual", "patch"])
@pytest.mark.parametrize("carrier", ["spec", "max", "min"])
def test_spectra_are_topologies(A8, kind, carrier):
    sp = spectrum(A8, carrier, kind)
    assert validate_topology(sp.names, sp.open_families()).ok


def test_min_patch_of_a8_and_discrepancy(A8):
    assert _fam(spectrum(A8, "min", "patch")) == [[], ["F3"], ["F3", "F4"], ["F4"]]
    rep = min_patch_discrepancy(A8, [[], ["F3"], ["F4"], ["F3", "F4"], ["F2", "F3", "F4"]])
    assert rep.first("paper-discrepancy") is not None
    assert rep.info["matches"] == ["dual on Spec", "hull(closed basis) on Spec"]


def test_closed_basis_equals_dual(A8):
    c = classify_filters(A8)
    a = spectrum_topology(A8, c.prime, "hull", closed_basis=True)
    b = spectrum_topology(A8, c.prime, "dual")
    assert _fam(a) == _fam(b)


def test_non_prime_carrier_rejected(A6):
    lat = enumerate_filters(A6)
    with pytest.raises(PreconditionError):
        spectrum_topology(A6, [lat.by_name("F4")], "hull")
