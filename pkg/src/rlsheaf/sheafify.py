"""The stalk space Et(F), the section sheaf Ps(E), sheafification and induced maps."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import RLMorphism
from .colimit import Stalk, stalk
from .errors import BudgetExceeded
from .etale import EtaleSpace, SectionAlgebra, section_algebra, section_tuples
from .presheaf import (
    Presheaf,
    PresheafMorphism,
    enumerate_presheaf_morphisms,
    identity_morphism,
    validate_presheaf_morphism,
)
from .report import Report
from .topology import FinTopSpace, bits

DEFAULT_STALK_LIMIT = 100_000


@dataclass
class EtaleOfPresheaf:
    """Et(F): total points are germs ``(x, class)``, ordered by point then class."""

    presheaf: Presheaf
    etale: EtaleSpace
    stalks: dict[int, Stalk]
    offset: dict[int, int]

    def germ_point(self, U: int, s: int, x: int) -> int:
        return self.offset[x] + self.stalks[x].germ_class(U, s)

    def germ_section(self, U: int, s: int) -> tuple[int, ...]:
        """The germ map ``s_U : x ↦ [s]_x`` as a tuple over the points of ``U``."""
        return tuple(self.germ_point(U, s, x) for x in bits(U))

    def basis(self) -> list[int]:
        """Images ``Im(s_U)`` for every open ``U`` and ``s ∈ F(U)``, as masks."""
        P = self.presheaf
        out = set()
        for U in P.opens:
            for s in range(P.value(U).n):
                out.add(sum(1 << t for t in self.germ_section(U, s)))
        return sorted(out)


def etale_of_presheaf(P: Presheaf, stalk_limit: int = DEFAULT_STALK_LIMIT) -> EtaleOfPresheaf:
    """The germ space of ``P`` with the topology generated by germ-map images."""
    cache = P.__dict__.setdefault("_etale", None)
    if cache is not None:
        return cache
    base = P.base
    stalks = {x: stalk(P, x) for x in range(base.n)}
    total = sum(st.algebra.n for st in stalks.values())
    if total > stalk_limit:
        raise BudgetExceeded(f"stalk space of {P.name} has {total} points (limit {stalk_limit})")
    offset = {}
    labels, proj, local = [], [], []
    for x in range(base.n):
        offset[x] = len(labels)
        alg = stalks[x].algebra
        for c in range(alg.n):
            labels.append(f"{alg.label(c)}@{base.points[x]}")
            proj.append(x)
            local.append(c)
    shell = EtaleOfPresheaf(P, None, stalks, offset)  # type: ignore[arg-type]
    total_space = FinTopSpace.from_subbasis(labels, shell.basis(), f"Et({P.name})")
    E = EtaleSpace(base, total_space, proj, local, {x: stalks[x].algebra for x in range(base.n)},
                   f"Et({P.name})")
    shell.etale = E
    P.__dict__["_etale"] = shell
    return shell


@dataclass
class SectionsPresheaf:
    presheaf: Presheaf
    algebras: dict[int, SectionAlgebra]


def sections_presheaf(E: EtaleSpace, name: str | None = None) -> SectionsPresheaf:
    """Ps(E): ``U ↦ Γ(U, E)`` with restriction of sections."""
    base = E.base
    algs = {U: section_algebra(E, U) for U in base.opens}
    values = {U: a.algebra for U, a in algs.items()}
    restr = {}
    for V in base.opens:
        for U in base.opens:
            if U & ~V == 0:
                keep = [k for k, p in enumerate(bits(V)) if U >> p & 1]
                sv, su = algs[V], algs[U]
                mp = [su.index[tuple(sec[k] for k in keep)] for sec in sv.sections]
                restr[(V, U)] = RLMorphism(values[V], values[U], mp)
    P = Presheaf(base, values, restr, name or f"Ps({E.name})")
    return SectionsPresheaf(P, algs)


@dataclass
class Sheafification:
    source: Presheaf
    etale: EtaleOfPresheaf
    sections: SectionsPresheaf
    iota: PresheafMorphism

    @property
    def plus(self) -> Presheaf:
        return self.sections.presheaf


def sheafification(P: Presheaf) -> Sheafification:
    """``F⁺ = Ps(Et(F))`` with ``ι_U(s) = s_U`` (the germ-map section)."""
    cache = P.__dict__.get("_plus")
    if cache is not None:
        return cache
    et = etale_of_presheaf(P)
    ps = sections_presheaf(et.etale, f"{P.name}+")
    comps = {}
    for U in P.opens:
        idx = ps.algebras[U].index
        mp = []
        for s in range(P.value(U).n):
            key = et.germ_section(U, s)
            if key not in idx:
                raise AssertionError(f"germ map of {P.value(U).label(s)} over {P.key(U)} is not a section")
            mp.append(idx[key])
        comps[U] = RLMorphism(P.value(U), ps.presheaf.value(U), mp)
    out = Sheafification(P, et, ps, PresheafMorphism(P, ps.presheaf, comps, f"iota_{P.name}"))
    P.__dict__["_plus"] = out
    return out


def local_germ_functions(sh: Sheafification, U: int, budget: int = 1_000_000) -> set[tuple[int, ...]]:
    """Functions on ``U`` that agree near each point with some germ map.

    Near ``x`` means on the minimal neighbourhood ``U_x``; every germ map on
    a larger neighbourhood restricts to one there.
    """
    P, et = sh.source, sh.etale
    pts = bits(U)
    pos = {p: k for k, p in enumerate(pts)}
    local_options = []
    for x in pts:
        Ux = P.base.minimal[x]
        opts = []
        for s in range(P.value(Ux).n):
            opts.append({p: et.germ_point(Ux, s, p) for p in bits(Ux)})
        local_options.append(opts)
    out: set[tuple[int, ...]] = set()
    assign: list[int | None] = [None] * len(pts)
    count = [0]

    def rec(k):
        count[0] += 1
        if count[0] > budget:
            raise BudgetExceeded(f"local germ enumeration over {P.key(U)} exceeded {budget}")
        if k == len(pts):
            out.add(tuple(assign))  # type: ignore[arg-type]
            return
        for opt in local_options[k]:
            saved = list(assign)
            ok = True
            for p, v in opt.items():
                j = pos[p]
                if assign[j] is None:
                    assign[j] = v
                elif assign[j] != v:
                    ok = False
                    break
            if ok:
                rec(k + 1)
            assign[:] = saved

    rec(0)
    return out


def check_plus_sections(sh: Sheafification) -> Report:
    """Every F⁺ section is locally a germ map, and every such function is a section."""
    rep = Report(f"F+ section characterisation {sh.source.name}")
    for U in sh.source.opens:
        secs = set(sh.sections.algebras[U].sections)
        loc = local_germ_functions(sh, U)
        extra = secs - loc
        if extra:
            rep.fail("locally-germ", "section is not locally a germ map",
                     U=sh.source.key(U), section=sorted(extra)[0])
        missing = loc - secs
        if missing:
            rep.fail("is-section", "locally-germ function is not a section",
                     U=sh.source.key(U), function=sorted(missing)[0])
    return rep


# ---------------------------------------------------------------------------
# morphisms


@dataclass
class EtaleMorphism:
    source: EtaleOfPresheaf
    target: EtaleOfPresheaf
    map: tuple[int, ...]
    report: Report


def etale_of_morphism(phi: PresheafMorphism) -> EtaleMorphism:
    """``Et(φ)[s]_x = [φ_U(s)]_x``, checked to be independent of the representative."""
    F, G = phi.src, phi.dst
    ef, eg = etale_of_presheaf(F), etale_of_presheaf(G)
    rep = Report(f"Et({phi.name})")
    h = [-1] * ef.etale.total.n
    for U in F.opens:
        comp = phi[U]
        for s in range(F.value(U).n):
            for x in bits(U):
                t = ef.germ_point(U, s, x)
                v = eg.germ_point(U, int(comp.map[s]), x)
                if h[t] < 0:
                    h[t] = v
                elif h[t] != v:
                    rep.fail("well-defined", "germ images depend on the representative",
                             germ=ef.etale.point_label(t), open=F.key(U),
                             section=F.value(U).label(s),
                             images=[eg.etale.point_label(h[t]), eg.etale.point_label(v)])
    if any(v < 0 for v in h):
        raise AssertionError("germ not represented by any section")
    return EtaleMorphism(ef, eg, tuple(h), rep)


def ps_of_etale_morphism(h: Sequence[int], E: EtaleSpace, F: EtaleSpace,
                         PE: SectionsPresheaf | None = None,
                         PF: SectionsPresheaf | None = None) -> PresheafMorphism:
    """Ps(h): ``σ ↦ h ∘ σ`` on every open."""
    PE = PE or sections_presheaf(E)
    PF = PF or sections_presheaf(F)
    comps = {}
    for U in E.base.opens:
        src, dst = PE.algebras[U], PF.algebras[U]
        mp = [dst.index[tuple(h[t] for t in sec)] for sec in src.sections]
        comps[U] = RLMorphism(src.algebra, dst.algebra, mp)
    return PresheafMorphism(PE.presheaf, PF.presheaf, comps, "Ps(h)")


@dataclass
class PlusMorphism:
    morphism: PresheafMorphism
    report: Report


def induced_plus_morphism(phi: PresheafMorphism, uniqueness_budget: int = 20_000) -> PlusMorphism:
    """``φ⁺_U(σ) = Et(φ) ∘ σ``; checks ``φ⁺ ∘ ι_F = ι_G ∘ φ`` and searches for
    other morphisms with the same property within budget."""
    shF, shG = sheafification(phi.src), sheafification(phi.dst)
    et = etale_of_morphism(phi)
    rep = Report(f"{phi.name}+")
    rep.absorb(et.report)
    plus = ps_of_etale_morphism(et.map, shF.etale.etale, shG.etale.etale, shF.sections, shG.sections)
    plus.name = f"{phi.name}+"
    val = validate_presheaf_morphism(plus)
    rep.absorb(val, prefix="plus.")
    left = shF.iota.then(plus)
    right = phi.then(shG.iota)
    diff = left.first_difference(right)
    if diff is not None:
        U, s = diff
        rep.fail("square", "φ⁺∘ι_F differs from ι_G∘φ", U=phi.src.key(U),
                 section=phi.src.value(U).label(s))
    rep.info["uniqueness"] = factorization_uniqueness(shF.iota, right, plus, uniqueness_budget)
    if rep.info["uniqueness"] == "violated":
        rep.fail("uniqueness", "a second morphism makes the square commute")
    return PlusMorphism(plus, rep)


def factorization_uniqueness(iota: PresheafMorphism, target: PresheafMorphism, known: PresheafMorphism,
                budget: int) -> str:
    """Search all ``ψ`` with ``ψ ∘ ι = target``; return checked/violated/not-checked."""
    fixed = {}
    for U in iota.src.opens:
        fixed[U] = {int(iota[U].map[s]): int(target[U].map[s]) for s in range(iota.src.value(U).n)}
    try:
        found = 0
        for psi in enumerate_presheaf_morphisms(iota.dst, target.dst, fixed, budget):
            found += 1
            if not psi.same_as(known) or found > 1:
                return "violated"
        return "checked" if found == 1 else "violated"
    except BudgetExceeded:
        return "not-checked"


def plus_identity(P: Presheaf) -> PlusMorphism:
    return induced_plus_morphism(identity_morphism(P))
