"""Instance checks of the functor, reflection and equivalence statements.

Every check quantifies only over the finite instances it is handed (and
the budgets it is given); reports say so in ``info["scope"]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import BudgetExceeded, PreconditionError
from .etale import EtaleSpace, validate_etale_morphism, validate_etale_space
from .presheaf import (
    Presheaf,
    PresheafMorphism,
    identity_morphism,
    is_sheaf,
    validate_presheaf_morphism,
)
from .report import Report
from .sheafify import (
    etale_of_morphism,
    etale_of_presheaf,
    factorization_uniqueness,
    induced_plus_morphism,
    ps_of_etale_morphism,
    sections_presheaf,
    sheafification,
)
from .topology import bits, is_continuous, is_open_map

SCOPE = "instance check over the supplied finite fixtures and budgets"


class TheoremReport(Report):
    """A report tagged with the statement it instantiates."""

    def __init__(self, theorem: str, instance: str):
        super().__init__(f"{theorem}: {instance}")
        self.theorem = theorem
        self.instance = instance
        self.info["scope"] = SCOPE
        self.budget_flags: dict[str, str] = {}

    def flag(self, what: str, status: str) -> None:
        self.budget_flags[what] = status
        self.info.setdefault("budget", {})[what] = status

    @property
    def verdict(self) -> str:
        if not self.ok:
            return "failed"
        if any(v == "not-checked" for v in self.budget_flags.values()):
            return "not-checked"
        return "passed"


# ---------------------------------------------------------------------------
# functor laws


def check_functor_laws(functor: str, objects: Sequence, chains: Sequence[tuple] = ()) -> TheoremReport:
    """Identity and composition preservation for ``Et`` or ``Ps``.

    For ``Et``: ``objects`` are presheaves, ``chains`` are pairs ``(φ, ψ)``
    of presheaf morphisms with ``φ: F→G`` and ``ψ: G→H``. For ``Ps``:
    ``objects`` are étalé spaces, ``chains`` are pairs
    ``((h, E, F), (k, F, G))`` of étalé maps given as total-point tuples.
    """
    rep = TheoremReport(f"{functor} is a functor", f"{len(objects)} objects, {len(chains)} chains")
    if functor == "Et":
        for P in objects:
            e = etale_of_morphism(identity_morphism(P))
            rep.absorb(e.report, prefix=f"Et(id_{P.name}).")
            if e.map != tuple(range(e.source.etale.total.n)):
                rep.fail("identity", "Et(id) is not the identity", presheaf=P.name)
        for phi, psi in chains:
            a = etale_of_morphism(phi)
            b = etale_of_morphism(psi)
            c = etale_of_morphism(phi.then(psi))
            for part in (a, b, c):
                rep.absorb(part.report)
            composed = tuple(b.map[t] for t in a.map)
            if composed != c.map:
                t = next(i for i, (u, v) in enumerate(zip(composed, c.map)) if u != v)
                rep.fail("composition", "Et(ψ∘φ) differs from Et(ψ)∘Et(φ)",
                         germ=a.source.etale.point_label(t))
            for part in (a, b, c):
                v = validate_etale_morphism(part.map, part.source.etale, part.target.etale)
                rep.absorb(v, prefix="Et-morphism.")
    elif functor == "Ps":
        for E in objects:
            P = sections_presheaf(E)
            ident = ps_of_etale_morphism(tuple(range(E.total.n)), E, E, P, P)
            if not ident.same_as(identity_morphism(P.presheaf)):
                rep.fail("identity", "Ps(id) is not the identity", space=E.name)
        for (h, E, F), (k, F2, G) in chains:
            if F2 is not F:
                raise PreconditionError("chain is not composable")
            PE, PF, PG = sections_presheaf(E), sections_presheaf(F), sections_presheaf(G)
            ph = ps_of_etale_morphism(h, E, F, PE, PF)
            pk = ps_of_etale_morphism(k, F, G, PF, PG)
            hk = tuple(k[t] for t in h)
            phk = ps_of_etale_morphism(hk, E, G, PE, PG)
            for m in (ph, pk, phk):
                rep.absorb(validate_presheaf_morphism(m), prefix="Ps-morphism.")
            if not ph.then(pk).same_as(phk):
                U, s = ph.then(pk).first_difference(phk)
                rep.fail("composition", "Ps(k∘h) differs from Ps(k)∘Ps(h)", U=PE.presheaf.key(U))
    else:
        raise ValueError("functor must be 'Et' or 'Ps'")
    return rep


# ---------------------------------------------------------------------------
# reflection


def check_reflection(P: Presheaf, G: Presheaf, phi: PresheafMorphism,
                     budget: int = 20_000) -> TheoremReport:
    """``φ̂ = ι_G⁻¹ ∘ φ⁺`` satisfies ``φ̂ ∘ ι_P = φ`` and is the only such map."""
    rep = TheoremReport("sheaves are reflective in presheaves", f"{P.name} -> {G.name}")
    if phi.src is not P or phi.dst is not G:
        raise PreconditionError("φ must go from P to G")
    sheaf = is_sheaf(G)
    if not sheaf.ok:
        raise PreconditionError("target is not a sheaf", {"first": sheaf.violations[0].message})
    v = validate_presheaf_morphism(phi)
    if not v.ok:
        raise PreconditionError("φ is not a presheaf morphism", v.violations[0].witness)
    shP, shG = sheafification(P), sheafification(G)
    if not shG.iota.is_isomorphism():
        rep.fail("iota_G", "ι_G is not an isomorphism for a sheaf G")
        return rep
    plus = induced_plus_morphism(phi, budget)
    rep.absorb(plus.report, prefix="plus.")
    hat = plus.morphism.then(shG.iota.inverse())
    hat.name = "phi_hat"
    rep.absorb(validate_presheaf_morphism(hat), prefix="hat.")
    tri = shP.iota.then(hat)
    diff = tri.first_difference(phi)
    if diff is not None:
        U, s = diff
        rep.fail("triangle", "φ̂∘ι_P differs from φ", U=P.key(U), section=P.value(U).label(s))
    status = factorization_uniqueness(shP.iota, phi, hat, budget)
    rep.flag("uniqueness", status)
    if status == "violated":
        rep.fail("uniqueness", "another morphism F⁺ -> G factors φ")
    rep.value = hat
    return rep


def triangle_commutes(P: Presheaf, candidate: PresheafMorphism, phi: PresheafMorphism) -> bool:
    """Does ``candidate ∘ ι_P`` equal ``φ``?"""
    return sheafification(P).iota.then(candidate).same_as(phi)


# ---------------------------------------------------------------------------
# equivalence


@dataclass
class Counit:
    space: EtaleSpace
    map: tuple[int, ...]
    report: Report = field(repr=False)


def counit(T: EtaleSpace) -> Counit:
    """``ε_T : Et(Ps(T)) -> T``, germ of a section ``σ`` at ``x`` ↦ ``σ(x)``."""
    ps = sections_presheaf(T)
    P = ps.presheaf
    et = etale_of_presheaf(P)
    rep = Report(f"counit {T.name}")
    eps = [-1] * et.etale.total.n
    for U in P.opens:
        secs = ps.algebras[U].sections
        for i, sec in enumerate(secs):
            for k, x in enumerate(bits(U)):
                g = et.germ_point(U, i, x)
                if eps[g] < 0:
                    eps[g] = sec[k]
                elif eps[g] != sec[k]:
                    rep.fail("well-defined", "germ class holds sections with different values",
                             germ=et.etale.point_label(g))
    return Counit(et.etale, tuple(eps), rep)


def check_equivalence(T: EtaleSpace, morphisms: Sequence[tuple] = (),
                      sheaves: Sequence[Presheaf] = ()) -> TheoremReport:
    """ε_T is an isomorphism of étalé spaces; naturality squares for the
    supplied ``(h, T, S)`` commute; ι_F is an isomorphism for each sheaf F."""
    rep = TheoremReport("Ps and Et are an equivalence", T.name)
    rep.absorb(validate_etale_space(T), prefix="T.")
    eps = counit(T)
    rep.absorb(eps.report)
    src = eps.space
    if sorted(eps.map) != list(range(T.total.n)):
        rep.fail("bijective", "ε_T is not a bijection")
    else:
        from .topology import ContinuousMap

        f = ContinuousMap(src.total, T.total, eps.map)
        if not is_continuous(f):
            rep.fail("continuous", "ε_T is not continuous")
        if not is_open_map(f):
            rep.fail("open", "ε_T is not open")
        m = validate_etale_morphism(eps.map, src, T)
        rep.absorb(m, prefix="eps.")
        for b in range(T.base.n):
            if src.stalk(b).n != T.stalk(b).n:
                rep.fail("stalk", "stalk sizes differ", point=T.base.points[b])
    for h, A, B in morphisms:
        if A is not T:
            continue
        ea, eb = eps, counit(B)
        pa, pb = sections_presheaf(A), sections_presheaf(B)
        ph = ps_of_etale_morphism(h, A, B, pa, pb)
        eph = etale_of_morphism(ph)
        rep.absorb(eph.report)
        lhs = tuple(eb.map[eph.map[g]] for g in range(ea.space.total.n))
        rhs = tuple(h[ea.map[g]] for g in range(ea.space.total.n))
        if lhs != rhs:
            g = next(i for i, (u, v) in enumerate(zip(lhs, rhs)) if u != v)
            rep.fail("naturality", "ε_S∘Et(Ps(h)) differs from h∘ε_T",
                     germ=ea.space.point_label(g), target=B.name)
    for F in sheaves:
        sh = sheafification(F)
        if not sh.iota.is_isomorphism():
            U = next(U for U in F.opens if not sh.iota[U].is_bijective())
            rep.fail("iota", "ι_F is not an isomorphism for a sheaf", sheaf=F.name, U=F.key(U))
    return rep


def iota_dichotomy(P: Presheaf) -> Report:
    """ι_P is an isomorphism exactly when P is a sheaf (strict mode)."""
    rep = Report(f"ι dichotomy {P.name}")
    sheaf = is_sheaf(P).ok
    iso = sheafification(P).iota.is_isomorphism()
    rep.info["sheaf"] = sheaf
    rep.info["iota_iso"] = iso
    if sheaf != iso:
        rep.fail("dichotomy", "sheaf verdict and ι isomorphism verdict differ", sheaf=sheaf, iso=iso)
    return rep


# ---------------------------------------------------------------------------
# subcategory


def check_subcategory(spaces: Sequence[EtaleSpace], morphisms: Sequence[tuple] = (),
                      chains: Sequence[tuple] = ()) -> TheoremReport:
    """Identities and composites of RL-étalé morphisms are RL-étalé morphisms.

    ``morphisms`` are ``(h, E, F)``; every one is validated and its verdict
    recorded; ``chains`` are index pairs into ``morphisms`` to compose.
    """
    rep = TheoremReport("RL-étalé spaces form a subcategory", f"{len(spaces)} spaces")
    for E in spaces:
        m = validate_etale_morphism(tuple(range(E.total.n)), E, E)
        rep.absorb(m, prefix=f"id[{E.name}].")
    verdicts = []
    for h, E, F in morphisms:
        verdicts.append(validate_etale_morphism(h, E, F).ok)
    rep.info["morphism_verdicts"] = verdicts
    for i, j in chains:
        h, E, F = morphisms[i]
        k, F2, G = morphisms[j]
        if F2 is not F or not (verdicts[i] and verdicts[j]):
            continue
        comp = tuple(k[t] for t in h)
        m = validate_etale_morphism(comp, E, G)
        rep.absorb(m, prefix=f"comp[{i},{j}].")
    return rep


# ---------------------------------------------------------------------------
# dashboard


def dashboard(reports: Sequence[TheoremReport]) -> dict[str, dict[str, int]]:
    """Aggregate theorem id -> counts of passed / failed / not-checked instances."""
    out: dict[str, dict[str, int]] = {}
    for r in reports:
        row = out.setdefault(r.theorem, {"passed": 0, "failed": 0, "not-checked": 0})
        row[r.verdict] += 1
    return out
