"""Étalé spaces over finite bases, with optional residuated-lattice stalks."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .algebra import BINARY_OPS, FinResLat, RLMorphism, check_morphism, check_tables, one_element
from .errors import BudgetExceeded, FormatError, PreconditionError
from .report import Report
from .topology import ContinuousMap, FinTopSpace, bits, map_properties

DEFAULT_SECTION_BUDGET = 1_000_000
# Γ(U) is materialised with n x n operation tables, so its size is capped separately
SECTION_ALGEBRA_LIMIT = 2048


class EtaleSpace:
    """A total space over ``base`` with projection ``proj``.

    ``local[t]`` is the position of total point ``t`` inside its fiber; when
    ``stalks`` is given, ``stalks[b]`` is an algebra whose element ``k`` is
    the fiber point with ``local == k``.
    """

    def __init__(self, base: FinTopSpace, total: FinTopSpace, proj: Sequence[int],
                 local: Sequence[int], stalks: Mapping[int, FinResLat] | None = None,
                 name: str = "E"):
        self.base = base
        self.total = total
        self.proj = tuple(int(p) for p in proj)
        self.local = tuple(int(k) for k in local)
        self.stalks = dict(stalks) if stalks is not None else None
        self.name = name
        if len(self.proj) != total.n or len(self.local) != total.n:
            raise FormatError("projection and local positions must cover every total point")
        fib: dict[int, list[int]] = {b: [] for b in range(base.n)}
        for t, b in enumerate(self.proj):
            if not 0 <= b < base.n:
                raise FormatError(f"total point {total.points[t]} projects outside the base")
            fib[b].append(t)
        self._fibers = {}
        for b, ts in fib.items():
            order = sorted(ts, key=lambda t: self.local[t])
            if [self.local[t] for t in order] != list(range(len(order))):
                raise FormatError(f"fiber over {base.points[b]} has non-contiguous local positions")
            if self.stalks is not None and self.stalks[b].n != len(order):
                raise FormatError(f"stalk over {base.points[b]} has {self.stalks[b].n} elements, "
                                  f"fiber has {len(order)}")
            self._fibers[b] = tuple(order)

    def __repr__(self) -> str:
        return f"EtaleSpace({self.name}, base={list(self.base.points)}, |T|={self.total.n})"

    def fiber(self, b: int) -> tuple[int, ...]:
        return self._fibers[b]

    def fiber_mask(self, b: int) -> int:
        return sum(1 << t for t in self._fibers[b])

    def stalk(self, b: int) -> FinResLat:
        if self.stalks is None:
            raise PreconditionError("plain étalé space has no stalk algebras")
        return self.stalks[b]

    def projection_map(self) -> ContinuousMap:
        return ContinuousMap(self.total, self.base, self.proj)

    def point_label(self, t: int) -> str:
        return self.total.points[t]

    def op_point(self, op: str, s: int, t: int) -> int:
        """Fiberwise operation on two total points over the same base point."""
        b = self.proj[s]
        alg = self.stalk(b)
        return self._fibers[b][int(alg.op(op)[self.local[s], self.local[t]])]

    def const_point(self, which: str, b: int) -> int:
        alg = self.stalk(b)
        return self._fibers[b][getattr(alg, which)]


@dataclass(frozen=True)
class Section:
    """A continuous right inverse of the projection over ``domain``.

    ``values`` lists total points in increasing order of the domain's base
    points.
    """

    domain: int
    values: tuple[int, ...]
    space: EtaleSpace = field(compare=False, hash=False, repr=False)

    def at(self, b: int) -> int:
        return self.values[bits(self.domain).index(b)]

    def image(self) -> int:
        return sum(1 << t for t in self.values)

    def restrict(self, U: int) -> Section:
        pts = bits(self.domain)
        return Section(U, tuple(v for p, v in zip(pts, self.values) if U >> p & 1), self.space)

    def label(self) -> str:
        return "[" + ",".join(self.space.point_label(t) for t in self.values) + "]"


def identity_etale(base: FinTopSpace, alg: FinResLat | None = None) -> EtaleSpace:
    """``base`` over itself, with a constant one-element (or given) stalk."""
    alg = alg or one_element()
    if alg.n != 1:
        raise PreconditionError("identity étalé space needs a one-element stalk")
    return EtaleSpace(base, base, range(base.n), [0] * base.n, {b: alg for b in range(base.n)},
                      f"id({base.name})")


# ---------------------------------------------------------------------------
# sections


def _section_constraints(E: EtaleSpace, X: int):
    pts = bits(X)
    pos = {b: k for k, b in enumerate(pts)}
    # c in U_b ∩ X forces σ(c) in U_{σ(b)}
    deps = [[pos[c] for c in bits(E.base.minimal[b] & X) if c != b] for b in pts]
    return pts, deps


def section_tuples(E: EtaleSpace, X: int, budget: int = DEFAULT_SECTION_BUDGET,
                   fixed: Mapping[int, int] | None = None) -> list[tuple[int, ...]]:
    """All sections over the base subset ``X`` as tuples of total points.

    Backtracking in base-point order with fiber candidates in local order,
    so the output is lexicographic. ``fixed`` pins values at base points.
    """
    pts, deps = _section_constraints(E, X)
    m = len(pts)
    Tmin = E.total.minimal
    # reverse dependencies: for assigned q, constraints involving p with p < q
    out: list[tuple[int, ...]] = []
    chosen = [0] * m
    nodes = [0]
    fixed = dict(fixed or {})

    def ok(k: int, t: int) -> bool:
        for c in deps[k]:
            if c < k and not Tmin[t] >> chosen[c] & 1:
                return False
        for j in range(k):
            if k in deps[j] and not Tmin[chosen[j]] >> t & 1:
                return False
        return True

    def rec(k: int):
        if k == m:
            out.append(tuple(chosen))
            if len(out) > budget:
                raise BudgetExceeded(f"more than {budget} sections over {E.base.labels(X)}")
            return
        cands = E.fiber(pts[k])
        if pts[k] in fixed:
            cands = [fixed[pts[k]]]
        for t in cands:
            nodes[0] += 1
            if nodes[0] > 20 * budget:
                raise BudgetExceeded(f"section search over {E.base.labels(X)} exceeded budget")
            if ok(k, t):
                chosen[k] = t
                rec(k + 1)

    rec(0)
    return out


def sections(E: EtaleSpace, X: int, budget: int = DEFAULT_SECTION_BUDGET) -> list[Section]:
    return [Section(X, v, E) for v in section_tuples(E, X, budget)]


def is_section(E: EtaleSpace, X: int, values: Sequence[int]) -> bool:
    """Direct check: projection identity plus ``σ(U_b ∩ X) ⊆ U_{σ(b)}``."""
    pts = bits(X)
    if len(values) != len(pts):
        return False
    val = dict(zip(pts, values))
    for b in pts:
        if E.proj[val[b]] != b:
            return False
    for b in pts:
        for c in bits(E.base.minimal[b] & X):
            if not E.total.minimal[val[b]] >> val[c] & 1:
                return False
    return True


def pointwise(E: EtaleSpace, op: str, s: Sequence[int], t: Sequence[int]) -> tuple[int, ...]:
    return tuple(E.op_point(op, a, b) for a, b in zip(s, t))


def constant_section(E: EtaleSpace, which: str, X: int) -> tuple[int, ...]:
    return tuple(E.const_point(which, b) for b in bits(X))


@dataclass
class SectionAlgebra:
    algebra: FinResLat
    sections: list[tuple[int, ...]]
    index: dict[tuple[int, ...], int]


def section_algebra(E: EtaleSpace, U: int, budget: int = DEFAULT_SECTION_BUDGET) -> SectionAlgebra:
    """Γ(U, E) with pointwise operations.

    Raises :class:`PreconditionError` when a pointwise result is not a
    section (the étalé space is not one of residuated lattices).
    """
    cache = E.__dict__.setdefault("_sec_alg", {})
    if U in cache:
        return cache[U]
    if not E.base.is_open(U):
        raise PreconditionError("section algebra needs an open set", {"U": E.base.labels(U)})
    secs = section_tuples(E, U, budget)
    n = len(secs)
    if n > SECTION_ALGEBRA_LIMIT:
        raise BudgetExceeded(f"Γ over {E.base.labels(U)} has {n} sections "
                             f"(limit {SECTION_ALGEBRA_LIMIT} for operation tables)")
    idx = {s: i for i, s in enumerate(secs)}
    pts = bits(U)
    # per-point local coordinates, shape (n, |U|)
    loc = np.array([[E.local[t] for t in s] for s in secs], dtype=np.int64).reshape(n, len(pts))
    fibers = [np.array(E.fiber(b), dtype=np.int64) for b in pts]
    # mixed-radix code of a section's local coordinates; sections are found by binary search
    sizes = [E.stalk(b).n for b in pts]
    packed = float(np.prod(sizes, dtype=float)) < 2.0 ** 62
    if packed:
        stride = np.cumprod([1] + sizes).astype(np.int64)[:-1]
        codes = loc @ stride
        order = np.argsort(codes)
        sorted_codes = codes[order]
    tables = {}
    for op in BINARY_OPS:
        outs = []
        for k, b in enumerate(pts):
            o = E.stalk(b).op(op)
            outs.append(o[loc[:, k][:, None], loc[:, k][None, :]])
        if packed:
            rc = sum((outs[k] * stride[k] for k in range(len(pts))), np.zeros((n, n), dtype=np.int64))
            pos = np.minimum(np.searchsorted(sorted_codes, rc), n - 1)
            hit = sorted_codes[pos] == rc
            tab = order[pos]
            bad = np.argwhere(~hit)
        else:
            tab = np.empty((n, n), dtype=np.int64)
            bad = []
            for i in range(n):
                for j in range(n):
                    r = idx.get(tuple(int(fibers[k][outs[k][i, j]]) for k in range(len(pts))))
                    if r is None:
                        bad.append((i, j))
                        break
                    tab[i, j] = r
                if bad:
                    break
        if len(bad):
            i, j = (int(v) for v in bad[0])
            key = tuple(int(fibers[k][outs[k][i, j]]) for k in range(len(pts)))
            raise PreconditionError(
                f"pointwise {op} of two sections over {E.base.labels(U)} is not a section",
                {"op": op, "s": _lab(E, secs[i]), "t": _lab(E, secs[j]), "result": _lab(E, key)})
        tables[op] = tab
    leq = np.ones((n, n), dtype=bool)
    for k, b in enumerate(pts):
        leq &= E.stalk(b).leq[loc[:, k][:, None], loc[:, k][None, :]]
    try:
        bot = idx[constant_section(E, "bot", U)]
        top = idx[constant_section(E, "top", U)]
    except KeyError:
        raise PreconditionError("constant 0 or 1 is not a section", {"U": E.base.labels(U)}) from None
    alg = FinResLat(f"Γ({{{E.base.key(U)}}},{E.name})", [_lab(E, s) for s in secs], leq,
                    tables["join"], tables["meet"], tables["prod"], tables["imp"], bot, top)
    out = SectionAlgebra(alg, secs, idx)
    cache[U] = out
    return out


def _lab(E: EtaleSpace, s) -> str:
    return "[" + ",".join(E.point_label(t) for t in s) + "]"


def equalizer(s: Section, t: Section) -> int:
    """Base points of the common domain where ``s`` and ``t`` agree (asserted open)."""
    E = s.space
    common = s.domain & t.domain
    eq = sum(1 << b for b in bits(common) if s.at(b) == t.at(b))
    if E.base.is_open(s.domain) and E.base.is_open(t.domain) and not E.base.is_open(eq):
        raise AssertionError("equalizer of sections over opens is not open")
    return eq


# ---------------------------------------------------------------------------
# validation


def _t2_violation(E: EtaleSpace, op: str):
    """First point of T^(2) where the fiberwise operation is discontinuous.

    In the subspace of T × T the minimal neighbourhood of ``(s, t)`` is
    ``(U_s × U_t) ∩ T^(2)``; continuity asks its image to lie in
    ``U_{s op t}``.
    """
    Tmin = E.total.minimal
    for b in range(E.base.n):
        for s in E.fiber(b):
            for t in E.fiber(b):
                target = Tmin[E.op_point(op, s, t)]
                for s2 in bits(Tmin[s]):
                    for t2 in bits(Tmin[t]):
                        if E.proj[s2] != E.proj[t2]:
                            continue
                        if not target >> E.op_point(op, s2, t2) & 1:
                            return s, t, s2, t2
    return None


def _const_violation(E: EtaleSpace, which: str):
    sec = [E.const_point(which, b) for b in range(E.base.n)]
    for b in range(E.base.n):
        for c in bits(E.base.minimal[b]):
            if not E.total.minimal[sec[b]] >> sec[c] & 1:
                return b, c
    return None


def validate_etale_space(E: EtaleSpace, budget: int = DEFAULT_SECTION_BUDGET) -> Report:
    """Four layers: local homeomorphism, stalk algebras, pointwise closure of
    every Γ(U) and continuity of the operations on T^(2); the last two
    verdicts must agree whenever the first holds."""
    rep = Report(f"étalé space {E.name}")
    props = map_properties(E.projection_map())
    rep.info["projection"] = props
    if not props["local_homeomorphism"]:
        for t in range(E.total.n):
            U = E.total.minimal[t]
            seen = {}
            for s in bits(U):
                if E.proj[s] in seen:
                    rep.fail("local_homeomorphism", "projection identifies two points of a minimal open",
                             point=E.point_label(t), a=E.point_label(seen[E.proj[s]]), b=E.point_label(s))
                    break
                seen[E.proj[s]] = s
            if not rep.ok:
                break
        if rep.ok:
            rep.fail("local_homeomorphism", "projection is not a local homeomorphism", **props)
    if E.stalks is None:
        return rep
    for b in range(E.base.n):
        sub = check_tables(E.stalk(b))
        if not sub.ok:
            rep.absorb(sub, prefix=f"stalk[{E.base.points[b]}].")
    if not rep.ok:
        return rep
    closure_ok = True
    for U in E.base.opens:
        try:
            section_algebra(E, U, budget)
        except PreconditionError as exc:
            closure_ok = False
            rep.fail("pointwise_closure", str(exc), **exc.witness)
            break
    cont_ok = True
    for op in BINARY_OPS:
        bad = _t2_violation(E, op)
        if bad is not None:
            cont_ok = False
            s, t, s2, t2 = bad
            rep.fail("continuity", f"{op} is not continuous on T^(2)", op=op,
                     at=(E.point_label(s), E.point_label(t)),
                     near=(E.point_label(s2), E.point_label(t2)),
                     result=E.point_label(E.op_point(op, s2, t2)))
            break
    for which in ("bot", "top"):
        bad = _const_violation(E, which)
        if bad is not None:
            cont_ok = False
            rep.fail("continuity", f"constant {which} section is not continuous",
                     at=E.base.points[bad[0]], near=E.base.points[bad[1]])
    rep.info["pointwise_closure"] = closure_ok
    rep.info["t2_continuity"] = cont_ok
    if closure_ok != cont_ok:
        rep.fail("agreement", "pointwise-closure and T^(2)-continuity verdicts differ",
                 closure=closure_ok, continuity=cont_ok)
    return rep


def validate_etale_morphism(h: Sequence[int], E: EtaleSpace, F: EtaleSpace) -> Report:
    """Fiber preservation, the continuity/openness/local-homeomorphism
    agreement for maps over the base, and stalkwise RL morphisms."""
    rep = Report(f"étalé morphism {E.name} -> {F.name}")
    if E.base != F.base:
        raise PreconditionError("étalé spaces over different bases")
    h = tuple(int(v) for v in h)
    if len(h) != E.total.n:
        raise FormatError("étalé morphism must map every total point")
    for t, v in enumerate(h):
        if F.proj[v] != E.proj[t]:
            rep.fail("fiber", "map does not commute with the projections",
                     point=E.point_label(t), image=F.point_label(v))
            return rep
    props = map_properties(ContinuousMap(E.total, F.total, h))
    rep.info.update(props)
    if not props["continuous"]:
        for t in range(E.total.n):
            for s in bits(E.total.minimal[t]):
                if not F.total.minimal[h[t]] >> h[s] & 1:
                    rep.fail("continuity", "map is not continuous",
                             point=E.point_label(t), near=E.point_label(s))
                    break
            if rep.violations and rep.violations[-1].check == "continuity":
                break
    if len({props["continuous"], props["open"], props["local_homeomorphism"]}) != 1:
        rep.fail("agreement", "continuity, openness and local homeomorphism disagree", **props)
    if E.stalks is not None and F.stalks is not None:
        for b in range(E.base.n):
            mp = [F.local[h[t]] for t in E.fiber(b)]
            m = check_morphism(RLMorphism(E.stalk(b), F.stalk(b), mp))
            if not m.ok:
                v = m.violations[0]
                rep.fail("stalk." + v.check, f"stalk map over {E.base.points[b]} is not an RL morphism",
                         point=E.base.points[b], **v.witness)
    return rep


def stalk_discreteness(E: EtaleSpace) -> Report:
    """Fibers are discrete and section images form a basis of the total space."""
    rep = Report(f"stalk discreteness {E.name}")
    for b in range(E.base.n):
        sub = E.total.subspace(E.fiber_mask(b))
        if not sub.is_discrete():
            rep.fail("discrete", "fiber subspace is not discrete", point=E.base.points[b])
    # every minimal open U_t is the image of a section over π(U_t)
    for t in range(E.total.n):
        Ut = E.total.minimal[t]
        V = 0
        for s in bits(Ut):
            V |= 1 << E.proj[s]
        pts = bits(V)
        vals = {}
        good = E.base.is_open(V)
        for s in bits(Ut):
            if E.proj[s] in vals:
                good = False
            vals[E.proj[s]] = s
        if good:
            good = is_section(E, V, [vals[p] for p in pts])
        if not good:
            rep.fail("basis", "minimal open of a total point is not a section image",
                     point=E.point_label(t))
        elif not any(v == t for v in vals.values()):
            rep.fail("through", "no section passes through the point", point=E.point_label(t))
    return rep
