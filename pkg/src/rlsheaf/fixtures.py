"""Built-in algebras, spaces and presheaves, plus seeded random generators."""

from __future__ import annotations

import random
from functools import lru_cache

import numpy as np

from .algebra import FinResLat, RLMorphism, lukasiewicz_chain, make_algebra, quotient_by_filter

# Products are given as upper-triangular rows read from the diagonal:
# row i lists x_i*x_i, x_i*x_{i+1}, ..., x_i*1.

A4_SPEC = {
    "elements": ["0", "a", "b", "1"],
    "order": [["0", "a"], ["0", "b"], ["a", "1"], ["b", "1"]],
    "prod": [
        ["0", "0", "0", "0"],
        ["a", "0", "a"],
        ["b", "b"],
        ["1"],
    ],
}

A6_SPEC = {
    "elements": ["0", "a", "b", "c", "d", "1"],
    "order": [["0", "a"], ["a", "b"], ["0", "c"], ["c", "d"], ["b", "d"], ["d", "1"]],
    "prod": [
        ["0", "0", "0", "0", "0", "0"],
        ["a", "a", "0", "a", "a"],
        ["a", "0", "a", "b"],
        ["c", "c", "c"],
        ["d", "d"],
        ["1"],
    ],
}

# The a-row differs from the printed table in its first two entries
# (a*a = a, a*b = 0); the printed pair violates integrality and associativity.
A8_SPEC = {
    "elements": ["0", "a", "b", "c", "d", "e", "f", "1"],
    "order": [["0", "a"], ["0", "b"], ["b", "d"], ["d", "f"], ["f", "1"], ["a", "d"],
              ["a", "c"], ["c", "e"], ["d", "e"], ["e", "1"]],
    "prod": [
        ["0"] * 8,
        ["a", "0", "a", "a", "a", "a", "a"],
        ["0", "0", "0", "0", "b", "b"],
        ["c", "a", "c", "a", "c"],
        ["a", "a", "d", "d"],
        ["c", "d", "e"],
        ["f", "f"],
        ["1"],
    ],
}


@lru_cache(maxsize=None)
def a4() -> FinResLat:
    return make_algebra("A4", A4_SPEC["elements"], A4_SPEC["order"], A4_SPEC["prod"])


@lru_cache(maxsize=None)
def a6() -> FinResLat:
    return make_algebra("A6", A6_SPEC["elements"], A6_SPEC["order"], A6_SPEC["prod"])


@lru_cache(maxsize=None)
def a8() -> FinResLat:
    return make_algebra("A8", A8_SPEC["elements"], A8_SPEC["order"], A8_SPEC["prod"])


ALGEBRAS = {"a4": a4, "a6": a6, "a8": a8}


def algebra(name: str) -> FinResLat:
    """Resolve ``a4``/``a6``/``a8``, ``L<k>`` or ``lukasiewicz_chain(k)``."""
    key = name.strip().lower()
    if key in ALGEBRAS:
        return ALGEBRAS[key]()
    for prefix in ("lukasiewicz_chain(", "l"):
        if key.startswith(prefix):
            body = key[len(prefix):].rstrip(")")
            if body.isdigit():
                return lukasiewicz_chain(int(body))
    raise KeyError(name)


# ---------------------------------------------------------------------------
# spaces and presheaves

from .algebra import goedel_chain, one_element, product_algebra  # noqa: E402
from .presheaf import (  # noqa: E402
    Presheaf,
    PresheafMorphism,
    constant_presheaf,
    filter_quotient_presheaf,
    one_point_presheaf,
    quotient_presheaf,
    sierpinski_fuzzy_presheaf,
    sierpinski_modified_presheaf,
    skyscraper_presheaf,
)
from .spectra import enumerate_filters, generated_filter, spectrum  # noqa: E402
from .topology import FinTopSpace  # noqa: E402


def space(name: str) -> FinTopSpace:
    """``sierpinski``, ``point``, ``discrete<n>``, ``indiscrete<n>``."""
    key = name.strip().lower()
    if key == "sierpinski":
        return FinTopSpace.sierpinski()
    if key == "point":
        return FinTopSpace.point()
    if key == "discrete2":
        return FinTopSpace.discrete(["p", "q"], "discrete2")
    for prefix, maker in (("discrete", FinTopSpace.discrete), ("indiscrete", FinTopSpace.indiscrete)):
        if key.startswith(prefix) and key[len(prefix):].isdigit():
            return maker(int(key[len(prefix):]), key)
    raise KeyError(name)


def _named_quotients(A: FinResLat, base: FinTopSpace, by_key: dict[str, str], name: str) -> Presheaf:
    lat = enumerate_filters(A)
    filters = {base.from_key(k): lat.by_name(f).mask for k, f in by_key.items()}
    return quotient_presheaf(A, base, filters, name)


def prsresexa4() -> Presheaf:
    """A4 over Spec_h(A4): ∅ ↦ A4/F4, {F2} ↦ A4/F2, {F3} ↦ A4/F3, B ↦ A4/F1."""
    base = spectrum(a4(), "spec", "hull").topology
    return _named_quotients(a4(), base, {"": "F4", "F2": "F2", "F3": "F3", "F2,F3": "F1"}, "prsresexa4")


def prsresexa6() -> Presheaf:
    """A6 over Max_d(A6): ∅ ↦ A6/F5, {F2} ↦ A6/F2, {F3} ↦ A6/F3, B ↦ A6/F1."""
    base = spectrum(a6(), "max", "dual").topology
    return _named_quotients(a6(), base, {"": "F5", "F2": "F2", "F3": "F3", "F2,F3": "F1"}, "prsresexa6")


def prsresexa8_space() -> FinTopSpace:
    """The published five-open space on {F2, F3, F4}."""
    return FinTopSpace.from_opens(["F2", "F3", "F4"],
                                  [[], ["F3"], ["F4"], ["F3", "F4"], ["F2", "F3", "F4"]], "Min_p(A8)")


def prsresexa8() -> Presheaf:
    """A8 over the published space: ∅ ↦ F5, {F3} ↦ F3, {F4} ↦ F4, {F3,F4} ↦ F1, B ↦ F1."""
    return _named_quotients(a8(), prsresexa8_space(),
                            {"": "F5", "F3": "F3", "F4": "F4", "F3,F4": "F1", "F2,F3,F4": "F1"},
                            "prsresexa8")


def _args(text: str) -> list[str]:
    inner = text[text.index("(") + 1: text.rindex(")")]
    return [a.strip() for a in inner.split(",")] if inner.strip() else []


def presheaf(name: str) -> Presheaf:
    """Resolve a presheaf fixture expression.

    ``prsresexa4|6|8``, ``sierpinski_fuzzy(k)``, ``sierpinski_modified(k)``,
    ``one_point(A)``, ``constant(A, space)``, ``skyscraper(space, b, A)``
    where ``A`` is an algebra name and ``space`` a space name.
    """
    key = name.strip()
    low = key.lower()
    simple = {"prsresexa4": prsresexa4, "prsresexa6": prsresexa6, "prsresexa8": prsresexa8}
    if low in simple:
        return simple[low]()
    head = low.split("(", 1)[0]
    args = _args(key) if "(" in key else []
    if head == "sierpinski_fuzzy":
        return sierpinski_fuzzy_presheaf(int(args[0]) if args else 10)
    if head == "sierpinski_modified":
        return sierpinski_modified_presheaf(int(args[0]) if args else 10)
    if head == "one_point":
        return one_point_presheaf(algebra(args[0]))
    if head == "constant":
        a, s = args
        try:
            return constant_presheaf(space(s), algebra(a))
        except KeyError:
            return constant_presheaf(space(a), algebra(s))
    if head == "skyscraper":
        s, b, a = args
        return skyscraper_presheaf(space(s), b, algebra(a))
    raise KeyError(name)


# presheaf fixtures that are valid presheaves; the modified Sierpiński one is not
PRESHEAF_FIXTURES = (
    "one_point(a4)",
    "skyscraper(sierpinski, x, a4)",
    "skyscraper(sierpinski, y, L2)",
    "skyscraper(discrete2, p, a4)",
    "constant(a4, discrete2)",
    "constant(L2, sierpinski)",
    "sierpinski_fuzzy(2)",
    "prsresexa4",
    "prsresexa6",
    "prsresexa8",
)


# ---------------------------------------------------------------------------
# random instances

SMALL_ALGEBRAS = ("1", "L1", "L2", "L3", "G3", "G4", "A4", "L1xL1")


def small_algebra(name: str) -> FinResLat:
    if name == "1":
        return one_element()
    if name == "G3":
        return goedel_chain(3)
    if name == "G4":
        return goedel_chain(4)
    if name == "L1xL1":
        L = lukasiewicz_chain(1)
        return product_algebra(L, L, name="L1xL1")
    return algebra(name)


def random_space(rng: random.Random, max_points: int = 3) -> FinTopSpace:
    """A random topology on at most ``max_points`` points (generated by random subsets)."""
    n = rng.randint(1, max_points)
    pts = [f"p{i}" for i in range(n)]
    fam = [rng.randrange(1, 1 << n) for _ in range(rng.randint(0, 3))]
    return FinTopSpace.from_subbasis(pts, fam, f"rand{n}")


def random_antitone_filters(rng: random.Random, A: FinResLat, base: FinTopSpace) -> dict[int, int]:
    """Random filter per open, then ``F_U`` := intersection over open subsets of ``U``."""
    lat = enumerate_filters(A)
    raw = {U: rng.choice(lat.filters).mask for U in base.opens}
    out = {}
    for U in base.opens:
        m = (1 << A.n) - 1
        for W in base.opens:
            if W & ~U == 0:
                m &= raw[W]
        out[U] = m
    return out


def random_presheaf(rng: random.Random, max_points: int = 3, max_elems: int = 4) -> Presheaf:
    """Seeded random presheaf: quotient, constant or skyscraper over a random space."""
    base = random_space(rng, max_points)
    names = [a for a in SMALL_ALGEBRAS if small_algebra(a).n <= max_elems]
    A = small_algebra(rng.choice(names))
    kind = rng.random()
    if kind < 0.7:
        return quotient_presheaf(A, base, random_antitone_filters(rng, A, base), f"Q({A.name})")
    if kind < 0.85:
        return constant_presheaf(base, A)
    return skyscraper_presheaf(base, rng.randrange(base.n), A)


def random_presheaves(seed: int, count: int, **kw) -> list[Presheaf]:
    rng = random.Random(seed)
    return [random_presheaf(rng, **kw) for _ in range(count)]


def coarsening(P: Presheaf, rng: random.Random) -> tuple[Presheaf, PresheafMorphism]:
    """A quotient presheaf with larger filters and the projection ``P -> G``.

    ``P`` must come from :func:`quotient_presheaf` (it carries ``filters``).
    """
    A = P.algebra
    lat = enumerate_filters(A)
    bump = {U: rng.choice(lat.filters).mask for U in P.opens}

    coarse = {}
    for U in P.opens:
        m = P.filters[U]
        for W in P.opens:
            if W & ~U == 0:
                m |= bump[W] | P.filters[W]
        coarse[U] = generated_filter(A, m).mask
    # re-impose antitonicity after closing each open separately
    changed = True
    while changed:
        changed = False
        for V in P.opens:
            for U in P.opens:
                if U & ~V == 0 and coarse[V] & ~coarse[U]:
                    coarse[U] = generated_filter(A, coarse[U] | coarse[V]).mask
                    changed = True
    G = quotient_presheaf(A, P.base, coarse, f"{P.name}'")
    comps = {}
    for U in P.opens:
        src, dst = P.value(U), G.value(U)
        mp = np.empty(src.n, dtype=np.int64)
        # element a/F ↦ a/G through any representative a
        _, pf = quotient_by_filter(A, P.filters[U])
        _, pg = quotient_by_filter(A, coarse[U])
        mp[pf.map] = pg.map
        comps[U] = RLMorphism(src, dst, mp)
    return G, PresheafMorphism(P, G, comps, "q")
