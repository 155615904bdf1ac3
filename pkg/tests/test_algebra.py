import copy
from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from rlsheaf import fixtures as fx
from rlsheaf.algebra import (
    RLMorphism,
    check_morphism,
    enumerate_morphisms,
    find_isomorphism,
    identity,
    is_filter,
    is_isomorphic,
    lukasiewicz_chain,
    mask_members,
    one_element,
    product_algebra,
    product_coords,
    quotient_by_filter,
    residuum_from_product,
    to_mask,
    validate_residuated_lattice,
)
from rlsheaf.errors import FormatError


def brute_axioms(alg):
    """Independent oracle: every axiom by direct quantification."""
    n = alg.n
    R = range(n)
    le = alg.leq
    for x, y in product(R, R):
        ub = [z for z in R if le[x, z] and le[y, z]]
        assert alg.join[x, y] in ub and all(le[alg.join[x, y], z] for z in ub)
        lb = [z for z in R if le[z, x] and le[z, y]]
        assert alg.meet[x, y] in lb and all(le[z, alg.meet[x, y]] for z in lb)
        assert alg.prod[x, y] == alg.prod[y, x]
    for x, y, z in product(R, R, R):
        assert alg.prod[alg.prod[x, y], z] == alg.prod[x, alg.prod[y, z]]
        assert bool(le[alg.prod[x, z], y]) == bool(le[z, alg.imp[x, y]])
    for x in R:
        assert alg.prod[x, alg.top] == x
        assert le[alg.bot, x] and le[x, alg.top]


@pytest.mark.parametrize("name", ["a4", "a6", "a8", "L1", "L3", "L10"])
def test_fixture_algebras_pass_validator_and_oracle(name):
    alg = fx.algebra(name)
    assert validate_residuated_lattice(alg).ok
    brute_axioms(alg)


def test_one_element_algebra_is_valid():
    one = one_element()
    assert one.n == 1
    assert validate_residuated_lattice(one).ok


def test_a4_with_broken_product_fails_adjunction(A4):
    spec = copy.deepcopy(fx.A4_SPEC)
    spec["prod"][1][1] = "a"  # a*b := a
    imp = [[A4.label(A4.imp[x, y]) for y in range(4)] for x in range(4)]
    rep = validate_residuated_lattice({"name": "bad", **spec, "imp": imp})
    v = rep.first("adjunction")
    assert v is not None
    assert (v.witness["x"], v.witness["y"], v.witness["z"]) == ("a", "0", "b")
    # with the residuum re-derived from the broken product the failure persists
    rep = validate_residuated_lattice({"name": "bad", **spec})
    assert rep.first("adjunction") is not None


def test_a4_adjunction_witness_from_oracle():
    A = fx.a4()
    a, b, zero = A.index("a"), A.index("b"), A.index("0")
    bad = np.array(A.prod)
    bad[a, b] = bad[b, a] = a
    # a*b = a is not <= 0, yet b <= a->0 = b: the biconditional breaks at (a, 0, b)
    assert not A.leq[bad[a, b], zero] and A.leq[b, A.imp[a, zero]]


def test_residuum_values_a4(A4):
    i = A4.index
    assert A4.imp[i("a"), i("0")] == i("b")
    assert A4.imp[i("a"), i("a")] == i("1")
    for y in range(A4.n):
        assert A4.imp[A4.top, y] == y
    imp = residuum_from_product(A4.leq, A4.join, A4.prod, A4.bot)
    assert np.array_equal(np.asarray(imp), A4.imp)


def test_lukasiewicz_formulas():
    k = 10
    L = lukasiewicz_chain(k)
    for x, y in product(range(k + 1), repeat=2):
        fx_, fy = Fraction(x, k), Fraction(y, k)
        assert Fraction(L.label(L.prod[x, y])) == max(Fraction(0), fx_ + fy - 1)
        assert Fraction(L.label(L.imp[x, y])) == min(Fraction(1), 1 - fx_ + fy)


def test_mora6a4_is_a_morphism(A6, A4):
    f = RLMorphism(A6, A4, [A4.index(v) for v in ("0", "a", "a", "b", "1", "1")])
    assert check_morphism(f).ok
    assert mask_members(f.coker()) == [A6.index("d"), A6.index("1")]
    assert not f.is_injective()


def test_identity_on_a8(A8):
    f = identity(A8)
    assert check_morphism(f).ok
    assert mask_members(f.coker()) == [A8.top]
    assert f.is_injective()


def test_swap_on_a4_agrees_with_oracle(A4):
    i = A4.index
    f = RLMorphism(A4, A4, [i("0"), i("b"), i("a"), i("1")])
    oracle = all(
        f(getattr(A4, op)[x, y]) == getattr(A4, op)[f(x), f(y)]
        for op in ("join", "meet", "prod", "imp")
        for x in range(4) for y in range(4)
    )
    assert check_morphism(f).ok == oracle


def test_coker_is_filter_and_injectivity(A6, A4):
    for f in enumerate_morphisms(A6, A4):
        assert is_filter(A6, mask_members(f.coker()))
        assert f.is_injective() == (f.coker() == 1 << A6.top)


def test_quotient_a4_by_f2(A4):
    F2 = to_mask(A4, ["a", "1"])
    Q, p = quotient_by_filter(A4, F2)
    assert Q.n == 2
    classes = {}
    for x in range(A4.n):
        classes.setdefault(int(p.map[x]), set()).add(A4.label(x))
    assert sorted(map(sorted, classes.values())) == [["0", "b"], ["1", "a"]]
    assert check_morphism(p).ok


def test_quotient_trivial_cases(A8):
    Q, p = quotient_by_filter(A8, to_mask(A8, ["1"]))
    assert p.is_bijective() and is_isomorphic(Q, A8)
    Q, p = quotient_by_filter(A8, (1 << A8.n) - 1)
    assert Q.n == 1


def test_two_squared_is_a4():
    L1 = lukasiewicz_chain(1)
    P = product_algebra(L1, L1)
    assert P.n == 4
    assert find_isomorphism(P, fx.a4()) is not None


def test_product_with_one_element(A6):
    assert is_isomorphic(product_algebra(A6, one_element()), A6)


def test_l2_squared_componentwise():
    L = lukasiewicz_chain(2)
    P = product_algebra(L, L)
    assert P.n == 9
    for x, y in product(range(P.n), repeat=2):
        (a, b), (c, d) = product_coords([L, L], x), product_coords([L, L], y)
        assert product_coords([L, L], int(P.prod[x, y])) == (int(L.prod[a, c]), int(L.prod[b, d]))
        assert product_coords([L, L], int(P.imp[x, y])) == (int(L.imp[a, c]), int(L.imp[b, d]))


def test_format_errors():
    with pytest.raises(FormatError):
        validate_residuated_lattice({"elements": ["0", "1"]})
    with pytest.raises(FormatError):
        validate_residuated_lattice({"elements": ["0", "1"], "prod": [["0", "z"], ["0", "1"]]})


def test_non_lattice_order_is_rejected():
    data = {"elements": ["0", "a", "b", "1"], "order": [["0", "a"], ["0", "b"]],
            "prod": [["0"] * 4] * 4}
    rep = validate_residuated_lattice(data)
    assert not rep.ok and rep.violations[0].check.startswith("lattice")
