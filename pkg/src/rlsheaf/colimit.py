"""Direct systems of residuated lattices, direct limits, stalks and germs."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Mapping, Sequence

import numpy as np

from .algebra import BINARY_OPS, FinResLat, RLMorphism, check_morphism, find_isomorphism
from .errors import PreconditionError
from .presheaf import Presheaf
from .report import Report
from .topology import bits, minimal_open_neighborhood, neighborhood_poset


@dataclass
class DirectSystem:
    """Algebras indexed by a finite directed poset with transition morphisms.

    ``index`` lists the indices in a fixed order; ``le(i, j)`` holds when
    ``i ≤ j``; ``transitions[(i, j)]`` is ``h_ij`` for every ``i ≤ j``.
    """

    index: list[Hashable]
    le_pairs: set[tuple[Hashable, Hashable]]
    algebras: dict[Hashable, FinResLat]
    transitions: dict[tuple[Hashable, Hashable], RLMorphism]
    name: str = "D"

    def le(self, i, j) -> bool:
        return (i, j) in self.le_pairs

    def upper_bounds(self, i, j) -> list:
        return [k for k in self.index if self.le(i, k) and self.le(j, k)]

    def greatest(self):
        for g in self.index:
            if all(self.le(i, g) for i in self.index):
                return g
        return None

    def h(self, i, j) -> RLMorphism:
        return self.transitions[(i, j)]


def validate_direct_system(S: DirectSystem) -> Report:
    """Identity and composition laws, morphism validity and directedness."""
    rep = Report(f"direct system {S.name}")
    for i in S.index:
        if not S.le(i, i):
            rep.fail("poset", "index relation is not reflexive", i=str(i))
    for i in S.index:
        for j in S.index:
            if i != j and S.le(i, j) and S.le(j, i):
                rep.fail("poset", "index relation is not antisymmetric", i=str(i), j=str(j))
            for k in S.index:
                if S.le(i, j) and S.le(j, k) and not S.le(i, k):
                    rep.fail("poset", "index relation is not transitive", i=str(i), j=str(j), k=str(k))
    for i in S.index:
        for j in S.index:
            if not S.upper_bounds(i, j):
                rep.fail("directed", "no upper bound", i=str(i), j=str(j))
    if not rep.ok:
        return rep
    for (i, j), hij in S.transitions.items():
        m = check_morphism(hij)
        if not m.ok:
            rep.absorb(m, prefix=f"h[{i},{j}].")
    for i in S.index:
        if not np.array_equal(S.h(i, i).map, np.arange(S.algebras[i].n)):
            rep.fail("identity", "h_ii is not the identity", i=str(i))
    for i in S.index:
        for j in S.index:
            if not S.le(i, j):
                continue
            for k in S.index:
                if S.le(j, k):
                    lhs = S.h(i, k).map
                    rhs = S.h(j, k).map[S.h(i, j).map]
                    if not np.array_equal(lhs, rhs):
                        x = int(np.flatnonzero(lhs != rhs)[0])
                        rep.fail("compatibility", "h_ik != h_jk ∘ h_ij",
                                 i=str(i), j=str(j), k=str(k), x=S.algebras[i].label(x))
    return rep


def equivalent(S: DirectSystem, a: tuple, b: tuple) -> bool:
    """Definition of ≡: some common upper bound identifies the images."""
    (i, x), (j, y) = a, b
    return any(S.h(i, k)(x) == S.h(j, k)(y) for k in S.upper_bounds(i, j))


@dataclass
class DirectLimit:
    system: DirectSystem
    algebra: FinResLat
    injections: dict[Hashable, RLMorphism]
    representatives: list[tuple[Hashable, int]]


class _UnionFind:
    def __init__(self, n):
        self.p = list(range(n))

    def find(self, a):
        while self.p[a] != a:
            self.p[a] = self.p[self.p[a]]
            a = self.p[a]
        return a

    def union(self, a, b):
        a, b = self.find(a), self.find(b)
        if a != b:
            self.p[max(a, b)] = min(a, b)


def direct_limit(S: DirectSystem, name: str | None = None) -> DirectLimit:
    """Quotient of the disjoint union by ≡, with operations lifted to an upper bound.

    Classes are ordered by their image in the greatest index when one
    exists, otherwise by their least ``(index position, element)`` pair.
    """
    for i in S.index:
        for j in S.index:
            if not S.upper_bounds(i, j):
                raise PreconditionError("index poset is not directed", {"i": str(i), "j": str(j)})
    offset = {}
    total = 0
    for i in S.index:
        offset[i] = total
        total += S.algebras[i].n
    uf = _UnionFind(total)
    for k in S.index:
        for i in S.index:
            if i != k and S.le(i, k):
                hik = S.h(i, k).map
                for x in range(S.algebras[i].n):
                    uf.union(offset[i] + x, offset[k] + int(hik[x]))
    root_of = [uf.find(a) for a in range(total)]
    g = S.greatest()
    roots = sorted(set(root_of))
    if g is not None:
        # every class meets the greatest algebra exactly once
        key = {}
        for x in range(S.algebras[g].n):
            key[root_of[offset[g] + x]] = x
        roots.sort(key=lambda r: key[r])
    cls_of_root = {r: c for c, r in enumerate(roots)}
    cls = [cls_of_root[r] for r in root_of]
    reps: list[tuple[Hashable, int]] = [None] * len(roots)  # type: ignore[list-item]
    if g is not None:
        for x in range(S.algebras[g].n):
            reps[cls[offset[g] + x]] = (g, x)
    else:
        for i in S.index:
            for x in range(S.algebras[i].n):
                c = cls[offset[i] + x]
                if reps[c] is None:
                    reps[c] = (i, x)
    m = len(roots)
    tables = {}
    for op in BINARY_OPS:
        t = np.empty((m, m), dtype=np.int64)
        for c in range(m):
            i, x = reps[c]
            for d in range(m):
                j, y = reps[d]
                k = S.upper_bounds(i, j)[0]
                v = S.algebras[k].op(op)[S.h(i, k)(x), S.h(j, k)(y)]
                t[c, d] = cls[offset[k] + int(v)]
        tables[op] = t
    i0 = S.index[0]
    bot = cls[offset[i0] + S.algebras[i0].bot]
    top = cls[offset[i0] + S.algebras[i0].top]
    leq = tables["join"] == np.arange(m)[None, :]
    if g is not None:
        labels = list(S.algebras[g].elems)
    else:
        labels = [f"[{i}:{S.algebras[i].label(x)}]" for i, x in reps]
    alg = FinResLat(name or f"lim {S.name}", labels, leq, tables["join"], tables["meet"],
                    tables["prod"], tables["imp"], bot, top)
    inj = {i: RLMorphism(S.algebras[i], alg, [cls[offset[i] + x] for x in range(S.algebras[i].n)])
           for i in S.index}
    return DirectLimit(S, alg, inj, reps)


def limit_independence(S: DirectSystem, lim: DirectLimit) -> Report:
    """Recompute every operation through every upper bound and compare."""
    rep = Report(f"upper-bound independence {S.name}")
    alg = lim.algebra
    for op in BINARY_OPS:
        for c, (i, x) in enumerate(lim.representatives):
            for d, (j, y) in enumerate(lim.representatives):
                for k in S.upper_bounds(i, j):
                    v = S.algebras[k].op(op)[S.h(i, k)(x), S.h(j, k)(y)]
                    if lim.injections[k](int(v)) != alg.op(op)[c, d]:
                        rep.fail(op, "operation depends on the chosen upper bound",
                                 c=alg.label(c), d=alg.label(d), k=str(k))
                        return rep
    return rep


def check_colimit_universal(S: DirectSystem, algebra: FinResLat, cocone: Mapping[Hashable, RLMorphism],
                            tests: Sequence[tuple[FinResLat, Mapping[Hashable, RLMorphism]]] = ()) -> Report:
    """Directed-colimit characterisation of a candidate cocone.

    Checks joint surjectivity and eventual-equality separation, then for
    every supplied test cocone builds the factoring map and checks it is a
    morphism (uniqueness follows from joint surjectivity).
    """

    def compatible(alg, co, label):
        for (i, j), hij in S.transitions.items():
            if not np.array_equal(co[i].map, co[j].map[hij.map]):
                x = int(np.flatnonzero(co[i].map != co[j].map[hij.map])[0])
                raise PreconditionError(f"{label} is not compatible with the transitions",
                                        {"i": str(i), "j": str(j), "x": S.algebras[i].label(x)})

    compatible(algebra, cocone, "candidate cocone")
    rep = Report(f"colimit universality {S.name} -> {algebra.name}")
    hit = set()
    for i in S.index:
        hit.update(int(v) for v in cocone[i].map)
    miss = sorted(set(range(algebra.n)) - hit)
    if miss:
        rep.fail("surjective", "element not in the image of any injection", element=algebra.label(miss[0]))
    pts = [(i, x) for i in S.index for x in range(S.algebras[i].n)]
    by_image: dict[int, list] = {}
    for i, x in pts:
        by_image.setdefault(int(cocone[i](x)), []).append((i, x))
    bad = next(((c, g[0], b) for c, g in sorted(by_image.items())
                for b in g[1:] if not equivalent(S, g[0], b)), None)
    if bad is not None:
        c, a, b = bad
        rep.fail("separation", "identified elements are never equal downstream",
                 element=algebra.label(c), first=f"{a[0]}:{S.algebras[a[0]].label(a[1])}",
                 second=f"{b[0]}:{S.algebras[b[0]].label(b[1])}")
    factored = []
    for B, co in tests:
        compatible(B, co, "test cocone")
        u = np.full(algebra.n, -1, dtype=np.int64)
        clash = None
        for i, x in pts:
            c = int(cocone[i](x))
            v = int(co[i](x))
            if u[c] < 0:
                u[c] = v
            elif u[c] != v:
                clash = (c, i, x)
                break
        if clash is not None:
            rep.fail("factor-existence", "test cocone does not factor through the candidate",
                     target=B.name, element=algebra.label(clash[0]))
            continue
        if (u < 0).any():
            rep.fail("factor-uniqueness", "factoring map undetermined on an element",
                     target=B.name, element=algebra.label(int(np.flatnonzero(u < 0)[0])))
            continue
        m = check_morphism(RLMorphism(algebra, B, u))
        if not m.ok:
            rep.absorb(m, prefix="factor.")
        factored.append(B.name)
    rep.info["factored"] = factored
    return rep


# ---------------------------------------------------------------------------
# stalks and germs


def neighborhood_system(P: Presheaf, x: int) -> DirectSystem:
    """The system of values over the opens containing ``x``, by reverse inclusion."""
    nb = neighborhood_poset(P.base, 1 << x)
    le = {(U, V) for U in nb for V in nb if V & ~U == 0}
    return DirectSystem(nb, le, {U: P.value(U) for U in nb},
                        {(U, V): P.res(U, V) for U, V in le}, f"N({P.base.points[x]})")


@dataclass
class Stalk:
    presheaf: Presheaf
    point: int
    algebra: FinResLat
    germ_maps: dict[int, RLMorphism]
    minimal: int
    fast_iso: RLMorphism = field(repr=False, default=None)

    def germ_class(self, U: int, s: int) -> int:
        return int(self.germ_maps[U].map[s])


def stalk(P: Presheaf, x, verify: bool = True) -> Stalk:
    """Stalk at ``x`` as a direct limit over ``N({x})``.

    The minimal neighbourhood is the greatest index, so ``value(U_min)`` is
    a second route to the same algebra; with ``verify`` the injection from
    it is checked to be an RL isomorphism.
    """
    cache = P.__dict__.setdefault("_stalks", {})
    i = P.base.index(x) if isinstance(x, str) else int(x)
    if i in cache:
        return cache[i]
    S = neighborhood_system(P, i)
    lim = direct_limit(S, f"{P.name}_{P.base.points[i]}")
    Umin = minimal_open_neighborhood(P.base, i)
    iso = lim.injections[Umin]
    if verify:
        if not iso.is_bijective():
            raise AssertionError("minimal-neighbourhood value is not the stalk")
        m = check_morphism(iso)
        if not m.ok:
            raise AssertionError(f"minimal-neighbourhood map is not a morphism: {m.render()}")
    st = Stalk(P, i, lim.algebra, lim.injections, Umin, iso)
    cache[i] = st
    return st


def fast_stalk(P: Presheaf, x) -> FinResLat:
    i = P.base.index(x) if isinstance(x, str) else int(x)
    return P.value(minimal_open_neighborhood(P.base, i))


def stalk_routes_agree(P: Presheaf, x) -> Report:
    """Fast route and full colimit give isomorphic algebras (independent search)."""
    i = P.base.index(x) if isinstance(x, str) else int(x)
    rep = Report(f"stalk routes {P.name} at {P.base.points[i]}")
    S = neighborhood_system(P, i)
    full = direct_limit(S).algebra
    fast = fast_stalk(P, i)
    if find_isomorphism(fast, full) is None:
        rep.fail("isomorphism", "fast-path stalk is not isomorphic to the direct limit",
                 fast=fast.n, full=full.n)
    return rep


@dataclass(frozen=True)
class Germ:
    point: int
    cls: int
    open: int
    section: int


def germ(P: Presheaf, U: int, x, s: int) -> Germ:
    i = P.base.index(x) if isinstance(x, str) else int(x)
    if not U >> i & 1:
        raise PreconditionError("germ point not in the open",
                                {"x": P.base.points[i], "U": P.key(U)})
    st = stalk(P, i)
    return Germ(i, st.germ_class(U, s), U, s)


def germs_separate_sections(P: Presheaf, U: int, s: int, t: int) -> Report:
    """``s = t`` exactly when their germs agree at every point of ``U``."""
    alg = P.value(U)
    rep = Report(f"germ separation {P.key(U)}")
    differ = [P.base.points[i] for i in bits(U)
              if germ(P, U, i, s).cls != germ(P, U, i, t).cls]
    rep.info["differ_at"] = differ
    if s == t and differ:
        rep.fail("forward", "equal sections with different germs", s=alg.label(s), points=differ)
    if s != t and not differ:
        rep.fail("backward", "distinct sections with identical germs everywhere",
                 s=alg.label(s), t=alg.label(t))
    return rep
