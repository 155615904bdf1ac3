"""Presheaves of residuated lattices over finite spaces and the sheaf condition."""

from __future__ import annotations

import itertools
import json
from typing import Iterable, Mapping

import numpy as np

from .algebra import (
    FilterSubset,
    FinResLat,
    RLMorphism,
    check_morphism,
    check_tables,
    filter_witness,
    identity,
    lukasiewicz_chain,
    one_element,
    product_algebra,
    projection,
    quotient_by_filter,
    to_mask,
    validate_residuated_lattice,
)
from .errors import BudgetExceeded, FormatError, PreconditionError
from .report import Report
from .topology import FinTopSpace, bits, open_covers, parse_topology

DEFAULT_FAMILY_BUDGET = 2_000_000
DEFAULT_PRODUCT_BUDGET = 500_000
MAX_WITNESSES = 5


class Presheaf:
    """A contravariant functor from the opens of ``base`` to finite RLs.

    ``values`` maps open masks to algebras. ``restrictions`` maps pairs
    ``(V, U)`` with ``U ⊆ V`` to morphisms ``values[V] -> values[U]``; only a
    generating set needs to be supplied, the rest are composed on demand.
    """

    def __init__(self, base: FinTopSpace, values: Mapping[int, FinResLat],
                 restrictions: Mapping[tuple[int, int], RLMorphism], name: str = "F"):
        self.base = base
        self.values = dict(values)
        self.supplied = dict(restrictions)
        self.name = name
        self._cache: dict[tuple[int, int], RLMorphism] = {}

    def __repr__(self) -> str:
        return f"Presheaf({self.name} over {self.base.name or self.base.points})"

    @property
    def opens(self) -> tuple[int, ...]:
        return self.base.opens

    def value(self, U: int) -> FinResLat:
        try:
            return self.values[U]
        except KeyError:
            raise FormatError(f"{self.name}: no value for open {{{self.base.key(U)}}}") from None

    def key(self, U: int) -> str:
        return "{" + self.base.key(U) + "}"

    def res(self, V: int, U: int) -> RLMorphism:
        """Restriction ``values[V] -> values[U]`` (supplied or composed)."""
        if U & ~V:
            raise PreconditionError("restriction needs U ⊆ V",
                                    {"V": self.key(V), "U": self.key(U)})
        hit = self._cache.get((V, U))
        if hit is not None:
            return hit
        if (V, U) in self.supplied:
            out = self.supplied[(V, U)]
        elif V == U:
            out = identity(self.value(U))
        else:
            out = None
            for (a, W), r in sorted(self.supplied.items()):
                if a == V and W != V and U & ~W == 0:
                    out = r.then(self.res(W, U))
                    break
            if out is None:
                raise FormatError(f"{self.name}: no restriction path {self.key(V)} -> {self.key(U)}")
        self._cache[(V, U)] = out
        return out

    def restrict(self, V: int, U: int, s: int) -> int:
        return int(self.res(V, U).map[s])

    def inclusions(self) -> list[tuple[int, int]]:
        """Every pair ``(V, U)`` of opens with ``U ⊆ V``."""
        ops = self.opens
        return [(V, U) for V in ops for U in ops if U & ~V == 0]

    def to_json(self) -> dict:
        algs: dict[str, dict] = {}
        names: dict[int, str] = {}
        for U in self.opens:
            names[U] = f"v{len(names)}"
            algs[names[U]] = self.value(U).to_json()
        restr = {}
        for V in self.opens:
            for U in self.opens:
                if U != V and U & ~V == 0:
                    r = self.res(V, U)
                    restr[f"{self.base.key(V)}->{self.base.key(U)}"] = [r.dst.label(v) for v in r.map]
        return {
            "name": self.name,
            "space": self.base.to_json(),
            "algebras": algs,
            "values": {self.base.key(U): names[U] for U in self.opens},
            "restrictions": restr,
        }


def parse_presheaf(data: dict, algebra_resolver=None) -> Presheaf:
    """Load the presheaf JSON format.

    ``space`` is an inline topology; ``values`` map open keys to algebra
    references, which are looked up in the optional ``algebras`` table first
    and then handed to ``algebra_resolver`` (fixture names).
    """
    try:
        space = parse_topology(data["space"])
        vals = data["values"]
        restr = data.get("restrictions", {})
    except (KeyError, TypeError) as exc:
        raise FormatError(f"presheaf: missing field {exc}") from None
    table = data.get("algebras", {})
    loaded: dict[str, FinResLat] = {}

    def resolve(ref):
        if isinstance(ref, dict):
            rep = validate_residuated_lattice(ref)
            if not rep.ok:
                raise FormatError(f"inline algebra invalid: {rep.violations[0].message}")
            return rep.value
        if ref in loaded:
            return loaded[ref]
        if ref in table:
            loaded[ref] = resolve(table[ref])
            return loaded[ref]
        if algebra_resolver is None:
            raise FormatError(f"unknown algebra reference {ref!r}")
        try:
            loaded[ref] = algebra_resolver(ref)
        except KeyError:
            raise FormatError(f"unknown algebra reference {ref!r}") from None
        return loaded[ref]

    values = {}
    for key, ref in vals.items():
        U = space.from_key(key)
        if not space.is_open(U):
            raise FormatError(f"value given for non-open set {{{key}}}")
        values[U] = resolve(ref)
    restrictions = {}
    for key, labels in restr.items():
        if "->" not in key:
            raise FormatError(f"restriction key {key!r} must look like 'V->U'")
        left, right = key.split("->", 1)
        V, U = space.from_key(left), space.from_key(right)
        if V not in values or U not in values:
            raise FormatError(f"restriction {key!r} between opens without values")
        src, dst = values[V], values[U]
        if len(labels) != src.n:
            raise FormatError(f"restriction {key!r}: expected {src.n} images, got {len(labels)}")
        try:
            restrictions[(V, U)] = RLMorphism(src, dst, [dst.index(str(l)) for l in labels])
        except (KeyError, ValueError):
            raise FormatError(f"restriction {key!r}: unknown label") from None
    return Presheaf(space, values, restrictions, str(data.get("name", "F")))


def load_presheaf(path: str, algebra_resolver=None) -> Presheaf:
    with open(path, encoding="utf-8") as fh:
        return parse_presheaf(json.load(fh), algebra_resolver)


# ---------------------------------------------------------------------------
# validation


def validate_presheaf(P: Presheaf) -> Report:
    """Functor laws and morphism validity for every restriction."""
    rep = Report(f"presheaf {P.name}")
    missing = [P.key(U) for U in P.opens if U not in P.values]
    if missing:
        raise FormatError(f"{P.name}: no value for opens {missing}")
    for U in P.opens:
        sub = check_tables(P.value(U))
        if not sub.ok:
            rep.absorb(sub, prefix=f"value{P.key(U)}.")
    for (V, U), r in sorted(P.supplied.items()):
        if r.src is not P.value(V) and not r.src.same_tables(P.value(V)):
            rep.fail("shape", "restriction source differs from value", V=P.key(V), U=P.key(U))
        if r.dst is not P.value(U) and not r.dst.same_tables(P.value(U)):
            rep.fail("shape", "restriction target differs from value", V=P.key(V), U=P.key(U))
    if not rep.ok:
        return rep
    for V, U in P.inclusions():
        try:
            r = P.res(V, U)
        except FormatError as exc:
            raise FormatError(str(exc)) from None
        m = check_morphism(r)
        if not m.ok:
            v = m.violations[0]
            rep.fail("restriction." + v.check,
                     f"restriction {P.key(V)} -> {P.key(U)} does not preserve {v.check}",
                     V=P.key(V), U=P.key(U), **v.witness)
    for U in P.opens:
        r = P.res(U, U)
        if not np.array_equal(r.map, np.arange(P.value(U).n)):
            s = int(np.flatnonzero(r.map != np.arange(P.value(U).n))[0])
            rep.fail("identity", "restriction to the same open is not the identity",
                     U=P.key(U), section=P.value(U).label(s))
    ops = P.opens
    for U in ops:
        for V in ops:
            if V & ~U:
                continue
            for W in ops:
                if W & ~V:
                    continue
                direct = P.res(U, W).map
                composed = P.res(V, W).map[P.res(U, V).map]
                if not np.array_equal(direct, composed):
                    s = int(np.flatnonzero(direct != composed)[0])
                    rep.fail("composition", "restriction U->W differs from U->V->W",
                             U=P.key(U), V=P.key(V), W=P.key(W),
                             section=P.value(U).label(s))
    return rep


# ---------------------------------------------------------------------------
# sheaf conditions


def _cover_keys(P: Presheaf, cover) -> list[str]:
    return [P.key(U) for U in cover]


def _restriction_tuples(P: Presheaf, O: int, cover) -> list[tuple[int, ...]]:
    maps = [P.res(O, U).map for U in cover]
    return [tuple(int(m[s]) for m in maps) for s in range(P.value(O).n)]


def _check_cover(P: Presheaf, O: int, cover) -> None:
    u = 0
    for U in cover:
        if U & ~O or not P.base.is_open(U):
            raise PreconditionError("cover member is not an open subset of O",
                                    {"O": P.key(O), "member": P.key(U)})
        u |= U
    if u != O:
        raise PreconditionError("family does not cover O",
                                {"O": P.key(O), "cover": _cover_keys(P, cover)})


def check_separation(P: Presheaf, O: int, cover, mode: str = "strict") -> Report:
    """Separation on one cover, by the two-section definition and by the
    unit-section criterion (locally 1 implies 1); the verdicts must agree."""
    cover = tuple(cover)
    _check_cover(P, O, cover)
    rep = Report(f"separation {P.key(O)} by {_cover_keys(P, cover)}")
    alg = P.value(O)
    tuples = _restriction_tuples(P, O, cover)
    seen: dict[tuple, int] = {}
    for s, t in enumerate(tuples):
        if t in seen:
            rep.fail("separation", "distinct sections with equal restrictions",
                     O=P.key(O), cover=_cover_keys(P, cover),
                     s=alg.label(seen[t]), t=alg.label(s))
            break
        seen[t] = s
    # unit criterion: the elements restricting to 1 on every member
    tops = tuple(P.value(U).top for U in cover)
    locally_one = [s for s, t in enumerate(tuples) if t == tops]
    unit_ok = locally_one == [alg.top]
    rep.info["unit_criterion"] = unit_ok
    if unit_ok != rep.ok:
        # only possible when some restriction is not a homomorphism
        rep.fail("unit-criterion", "separation and unit-section verdicts disagree",
                 O=P.key(O), cover=_cover_keys(P, cover), separated=rep.ok, unit=unit_ok)
    if not unit_ok:
        rep.info["locally_one"] = [alg.label(s) for s in locally_one]
    return rep


def compatible_families(P: Presheaf, cover, mode: str = "strict",
                        budget: int = DEFAULT_FAMILY_BUDGET):
    """Yield every compatible family over ``cover`` as a tuple of section indices.

    In ``paper`` mode pairs with empty intersection impose no constraint.
    """
    cover = tuple(cover)
    m = len(cover)
    pair_maps = {}
    for i in range(m):
        for j in range(i):
            W = cover[i] & cover[j]
            if mode == "paper" and W == 0:
                continue
            pair_maps[(i, j)] = (P.res(cover[i], W).map, P.res(cover[j], W).map)
    sizes = [P.value(U).n for U in cover]
    count = [0]
    chosen = [0] * m

    def rec(i):
        if i == m:
            count[0] += 1
            if count[0] > budget:
                raise BudgetExceeded(f"more than {budget} compatible families")
            yield tuple(chosen)
            return
        ok = np.ones(sizes[i], dtype=bool)
        for j in range(i):
            pm = pair_maps.get((i, j))
            if pm is not None:
                ok &= pm[0] == pm[1][chosen[j]]
        for s in np.flatnonzero(ok):
            chosen[i] = int(s)
            yield from rec(i + 1)

    yield from rec(0)


def check_gluing(P: Presheaf, O: int, cover, mode: str = "strict",
                 budget: int = DEFAULT_FAMILY_BUDGET) -> Report:
    """Every compatible family over ``cover`` has a glue in ``values[O]``."""
    cover = tuple(cover)
    _check_cover(P, O, cover)
    rep = Report(f"gluing {P.key(O)} by {_cover_keys(P, cover)}")
    images = set(_restriction_tuples(P, O, cover))
    n_fam = 0
    for fam in compatible_families(P, cover, mode, budget):
        n_fam += 1
        if fam not in images:
            if len(rep.violations) < MAX_WITNESSES:
                rep.fail("gluing", "compatible family without a glue",
                         O=P.key(O), cover=_cover_keys(P, cover),
                         family={P.key(U): P.value(U).label(s) for U, s in zip(cover, fam)})
    rep.info["families"] = n_fam
    return rep


def check_equalizer(P: Presheaf, O: int, cover, budget: int = DEFAULT_PRODUCT_BUDGET,
                    algebra_limit: int = 512) -> Report:
    """Is ``F(O) -> ∏F(U) ⇉ ∏F(U∩V)`` an equalizer?

    Scans the whole product ``∏F(U)`` (guarded by ``budget``) and compares
    the images of ``g`` and ``h`` directly, independent of the
    separation/gluing code. When the product has at most
    ``algebra_limit`` elements it is also built as an algebra and ``f`` is
    checked to be a morphism into it.
    """
    cover = tuple(cover)
    _check_cover(P, O, cover)
    rep = Report(f"equalizer {P.key(O)} by {_cover_keys(P, cover)}")
    sizes = [P.value(U).n for U in cover]
    total = 1
    for s in sizes:
        total *= s
        if total > budget:
            raise BudgetExceeded(f"product over cover of {P.key(O)} exceeds {budget} tuples")
    pairs = [(a, b) for a in range(len(cover)) for b in range(len(cover))]
    gmaps = [P.res(cover[a], cover[a] & cover[b]).map for a, b in pairs]
    hmaps = [P.res(cover[b], cover[a] & cover[b]).map for a, b in pairs]
    equal = set()
    for t in itertools.product(*(range(s) for s in sizes)):
        g = tuple(int(gm[t[a]]) for gm, (a, _) in zip(gmaps, pairs))
        h = tuple(int(hm[t[b]]) for hm, (_, b) in zip(hmaps, pairs))
        if g == h:
            equal.add(t)
    fimg = _restriction_tuples(P, O, cover)
    alg = P.value(O)
    if len(set(fimg)) != len(fimg):
        seen: dict[tuple, int] = {}
        for s, t in enumerate(fimg):
            if t in seen:
                rep.fail("injective", "f is not injective", s=alg.label(seen[t]), t=alg.label(s))
                break
            seen[t] = s
    missing = equal - set(fimg)
    if missing:
        t = min(missing)
        rep.fail("image", "an element equalized by g and h is not in the image of f",
                 tuple={P.key(U): P.value(U).label(s) for U, s in zip(cover, t)})
    outside = set(fimg) - equal
    if outside:
        raise AssertionError("restriction tuple not equalized: functor laws broken")
    rep.info["product_size"] = total
    rep.info["equalized"] = len(equal)
    if 0 < total <= algebra_limit and cover:
        prod = product_algebra(*(P.value(U) for U in cover))
        from .algebra import product_index

        f = RLMorphism(alg, prod, [product_index([P.value(U) for U in cover], t) for t in fimg])
        m = check_morphism(f)
        if not m.ok:
            rep.absorb(m, prefix="f.")
    return rep


def _quantify(P: Presheaf, mode: str, cover_budget: int | None):
    kw = {} if cover_budget is None else {"budget": cover_budget}
    for O in P.opens:
        try:
            covers = list(open_covers(P.base, O, mode, **kw))
        except BudgetExceeded as exc:
            raise BudgetExceeded(f"{exc} (open {P.key(O)})") from None
        for cover in covers:
            yield O, cover


def is_sheaf(P: Presheaf, mode: str = "strict", cover_budget: int | None = None,
             family_budget: int = DEFAULT_FAMILY_BUDGET) -> Report:
    """Separation and gluing over every open and every cover of it."""
    rep = Report(f"sheaf check {P.name} ({mode})")
    n_cov = 0
    sep_fail = glue_fail = 0
    for O, cover in _quantify(P, mode, cover_budget):
        n_cov += 1
        s = check_separation(P, O, cover, mode)
        if not s.ok:
            sep_fail += 1
            if sep_fail <= MAX_WITNESSES:
                rep.absorb(s)
        g = check_gluing(P, O, cover, mode, family_budget)
        if not g.ok:
            glue_fail += 1
            if glue_fail <= MAX_WITNESSES:
                rep.absorb(g)
    rep.info["covers"] = n_cov
    rep.info["separation_failures"] = sep_fail
    rep.info["gluing_failures"] = glue_fail
    rep.value = rep.ok
    return rep


def equalizer_agreement(P: Presheaf, budget: int = DEFAULT_PRODUCT_BUDGET) -> Report:
    """Strict separation ∧ gluing versus the equalizer verdict, per (O, cover)."""
    rep = Report(f"equalizer agreement {P.name}")
    n = 0
    for O, cover in _quantify(P, "strict", None):
        n += 1
        sg = check_separation(P, O, cover).ok and check_gluing(P, O, cover).ok
        eq = check_equalizer(P, O, cover, budget).ok
        if sg != eq:
            rep.fail("agreement", "separation∧gluing and equalizer verdicts differ",
                     O=P.key(O), cover=_cover_keys(P, cover), sheaf_condition=sg, equalizer=eq)
    rep.info["pairs"] = n
    return rep


# ---------------------------------------------------------------------------
# morphisms


class PresheafMorphism:
    """A natural transformation given by one RL morphism per open."""

    def __init__(self, src: Presheaf, dst: Presheaf, components: Mapping[int, RLMorphism],
                 name: str = "phi"):
        if src.base != dst.base:
            raise PreconditionError("presheaf morphism between different bases")
        self.src = src
        self.dst = dst
        self.components = dict(components)
        self.name = name

    def __getitem__(self, U: int) -> RLMorphism:
        try:
            return self.components[U]
        except KeyError:
            raise FormatError(f"{self.name}: no component at {self.src.key(U)}") from None

    def then(self, other: PresheafMorphism) -> PresheafMorphism:
        """``other ∘ self``."""
        return PresheafMorphism(self.src, other.dst,
                                {U: self[U].then(other[U]) for U in self.src.opens},
                                f"{other.name}∘{self.name}")

    def same_as(self, other: PresheafMorphism) -> bool:
        return all(np.array_equal(self[U].map, other[U].map) for U in self.src.opens)

    def first_difference(self, other: PresheafMorphism):
        for U in self.src.opens:
            d = np.flatnonzero(self[U].map != other[U].map)
            if d.size:
                return U, int(d[0])
        return None

    def is_isomorphism(self) -> bool:
        return all(self[U].is_bijective() for U in self.src.opens)

    def inverse(self) -> PresheafMorphism:
        return PresheafMorphism(self.dst, self.src, {U: self[U].inverse() for U in self.src.opens},
                                f"{self.name}^-1")


def identity_morphism(P: Presheaf) -> PresheafMorphism:
    return PresheafMorphism(P, P, {U: identity(P.value(U)) for U in P.opens}, "id")


def validate_presheaf_morphism(phi: PresheafMorphism) -> Report:
    """Each component is an RL morphism and every naturality square commutes."""
    rep = Report(f"presheaf morphism {phi.name}")
    S, T = phi.src, phi.dst
    for U in S.opens:
        c = phi[U]
        if c.src.n != S.value(U).n or c.dst.n != T.value(U).n:
            rep.fail("shape", "component has the wrong domain or codomain", U=S.key(U))
            continue
        m = check_morphism(c)
        if not m.ok:
            v = m.violations[0]
            rep.fail("component." + v.check, f"component at {S.key(U)} is not a morphism",
                     U=S.key(U), **v.witness)
    if not rep.ok:
        return rep
    for V, U in S.inclusions():
        left = T.res(V, U).map[phi[V].map]
        right = phi[U].map[S.res(V, U).map]
        if not np.array_equal(left, right):
            s = int(np.flatnonzero(left != right)[0])
            rep.fail("naturality", "naturality square does not commute",
                     V=S.key(V), U=S.key(U), section=S.value(V).label(s),
                     via_target=T.value(U).label(left[s]), via_source=T.value(U).label(right[s]))
            if len(rep.violations) >= MAX_WITNESSES:
                break
    return rep


# ---------------------------------------------------------------------------
# constructors


def _all_restrictions(base: FinTopSpace, values: Mapping[int, FinResLat], fn) -> dict:
    out = {}
    for V in base.opens:
        for U in base.opens:
            if U & ~V == 0:
                out[(V, U)] = RLMorphism(values[V], values[U], fn(V, U))
    return out


def one_point_presheaf(A: FinResLat) -> Presheaf:
    """``A`` over a one-point space, with the one-element algebra on ``∅``."""
    base = FinTopSpace.point("*")
    one = one_element()
    values = {0: one, 1: A}
    restr = {(1, 1): identity(A), (0, 0): identity(one),
             (1, 0): RLMorphism(A, one, np.zeros(A.n, dtype=np.int64))}
    return Presheaf(base, values, restr, f"P^{A.name}")


def skyscraper_presheaf(base: FinTopSpace, b, A: FinResLat) -> Presheaf:
    """``A`` on opens containing ``b`` and the one-element algebra elsewhere."""
    i = base.index(b) if isinstance(b, str) else int(b)
    one = one_element()
    values = {U: (A if U >> i & 1 else one) for U in base.opens}

    def fn(V, U):
        if U >> i & 1:
            return np.arange(A.n)
        return np.zeros(values[V].n, dtype=np.int64)

    return Presheaf(base, values, _all_restrictions(base, values, fn),
                    f"S^{base.points[i]},{A.name}")


def constant_presheaf(base: FinTopSpace, A: FinResLat) -> Presheaf:
    """``A`` on every open (including ``∅``) with identity restrictions."""
    values = {U: A for U in base.opens}
    return Presheaf(base, values, _all_restrictions(base, values, lambda V, U: np.arange(A.n)),
                    f"C^{A.name}")


def quotient_presheaf(A: FinResLat, base: FinTopSpace, filters: Mapping[int, object],
                      name: str | None = None) -> Presheaf:
    """``U ↦ A / F_U`` with restrictions ``a/F_V ↦ a/F_U``.

    ``filters`` assigns a filter (mask, labels or FilterSubset) to every
    open; it must be antitone (``U ⊆ V`` implies ``F_V ⊆ F_U``).
    """
    masks = {}
    for U in base.opens:
        if U not in filters:
            raise FormatError(f"no filter given for open {{{base.key(U)}}}")
        mk = to_mask(A, filters[U])
        bad = filter_witness(A, mk)
        if bad is not None:
            raise PreconditionError(f"filter at {{{base.key(U)}}} is not a filter", bad)
        masks[U] = mk
    quotients = {}
    projections = {}
    for U in base.opens:
        q, p = quotient_by_filter(A, masks[U], f"{A.name}/F{{{base.key(U)}}}")
        quotients[U], projections[U] = q, p
    for V in base.opens:
        for U in base.opens:
            if U & ~V == 0 and masks[V] & ~masks[U]:
                raise PreconditionError("filter family is not antitone",
                                        {"V": base.key(V), "U": base.key(U)})

    def fn(V, U):
        pv, pu = projections[V].map, projections[U].map
        out = np.empty(quotients[V].n, dtype=np.int64)
        out[pv] = pu
        return out

    P = Presheaf(base, quotients, _all_restrictions(base, quotients, fn), name or f"{A.name}/F")
    P.filters = masks
    P.algebra = A
    return P


def filter_quotient_presheaf(A: FinResLat, base: FinTopSpace, point_filters: Mapping,
                             name: str | None = None) -> Presheaf:
    """``F_U = ⋂_{b∈U} F_b`` with ``F_∅ = A``; see :func:`quotient_presheaf`."""
    fmask = {}
    for b, f in point_filters.items():
        i = base.index(b) if isinstance(b, str) else int(b)
        fmask[i] = to_mask(A, f)
    if set(fmask) != set(range(base.n)):
        raise FormatError("one filter per base point required")
    full = (1 << A.n) - 1
    filters = {}
    for U in base.opens:
        m = full
        for i in bits(U):
            m &= fmask[i]
        filters[U] = m
    return quotient_presheaf(A, base, filters, name)


def sierpinski_fuzzy_presheaf(k: int = 10) -> Presheaf:
    """Fuzzy truth assignments on the Sierpiński space at chain resolution ``k``.

    ``{x,y}`` carries ``Ł_k²`` (α, β), ``{x}`` carries ``Ł_k`` (α) and the
    restriction drops β; ``∅`` carries the one-element algebra.
    """
    base = FinTopSpace.sierpinski()
    L = lukasiewicz_chain(k)
    L2 = product_algebra(L, L, name=f"L{k}^2")
    one = one_element()
    X, XY = 0b01, 0b11
    values = {0: one, X: L, XY: L2}
    alpha = projection(L2, [L, L], 0)
    restr = {
        (XY, X): alpha,
        (XY, 0): RLMorphism(L2, one, np.zeros(L2.n, dtype=np.int64)),
        (X, 0): RLMorphism(L, one, np.zeros(L.n, dtype=np.int64)),
    }
    return Presheaf(base, values, restr, f"Sierpinski(L{k})")


def sierpinski_modified_presheaf(k: int = 10) -> Presheaf:
    """The variant whose ``{x,y} -> {x}`` restriction is ``(a, b) ↦ (a, 0)``.

    ``{x}`` carries ``Ł_k²`` as well (the β = 0 assignments are not closed
    under →), so the restriction is a well-typed map that fails to preserve
    →. Not a presheaf of residuated lattices; kept for diagnostics.
    """
    base = FinTopSpace.sierpinski()
    L = lukasiewicz_chain(k)
    L2 = product_algebra(L, L, name=f"L{k}^2")
    one = one_element()
    X, XY = 0b01, 0b11
    values = {0: one, X: L2, XY: L2}
    kill_beta = [(i // (k + 1)) * (k + 1) for i in range(L2.n)]
    restr = {
        (XY, X): RLMorphism(L2, L2, kill_beta),
        (XY, 0): RLMorphism(L2, one, np.zeros(L2.n, dtype=np.int64)),
        (X, 0): RLMorphism(L2, one, np.zeros(L2.n, dtype=np.int64)),
    }
    return Presheaf(base, values, restr, f"SierpinskiModified(L{k})")


def enumerate_presheaf_morphisms(S: Presheaf, T: Presheaf, fixed: Mapping[int, Mapping[int, int]] | None = None,
                                 budget: int = 20_000):
    """Yield every natural transformation ``S -> T`` extending ``fixed``.

    Components are searched open by open (largest open first, elements in
    index order); naturality with already chosen components prunes early.
    Raises :class:`BudgetExceeded` after ``budget`` candidate components.
    """
    from .algebra import enumerate_morphisms

    fixed = fixed or {}
    opens = sorted(S.opens, key=lambda U: (-bin(U).count("1"), U))
    spent = [0]
    cands = {}
    for U in opens:
        lst = []
        for f in enumerate_morphisms(S.value(U), T.value(U), dict(fixed.get(U, {})), budget):
            spent[0] += 1
            if spent[0] > budget:
                raise BudgetExceeded(f"presheaf morphism search exceeded {budget} components")
            lst.append(f)
        cands[U] = lst
    chosen: dict[int, RLMorphism] = {}

    def natural(U, f):
        for V, g in chosen.items():
            if U & ~V == 0:
                big, small, fb, fs = V, U, g, f
            elif V & ~U == 0:
                big, small, fb, fs = U, V, f, g
            else:
                continue
            if not np.array_equal(T.res(big, small).map[fb.map], fs.map[S.res(big, small).map]):
                return False
        return True

    def rec(k):
        if k == len(opens):
            yield PresheafMorphism(S, T, dict(chosen), "psi")
            return
        U = opens[k]
        for f in cands[U]:
            spent[0] += 1
            if spent[0] > 10 * budget:
                raise BudgetExceeded(f"presheaf morphism search exceeded {budget} steps")
            if natural(U, f):
                chosen[U] = f
                yield from rec(k + 1)
                del chosen[U]

    yield from rec(0)
