"""Finite residuated lattices: construction, validation, morphisms, quotients.

Elements are addressed by index ``0..n-1`` everywhere; labels exist only
for input and output. Tables are read-only ``int64`` numpy arrays and the
order is a boolean matrix with ``leq[i, j]`` meaning ``i <= j``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import _kernels as K
from .errors import FormatError, PreconditionError
from .report import Report

BINARY_OPS = ("join", "meet", "prod", "imp")
ALL_OPS = BINARY_OPS + ("bot", "top")


def _frozen(arr, dtype) -> np.ndarray:
    out = np.array(arr, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


class FinResLat:
    """A finite (integral, commutative) residuated lattice given by tables.

    The constructor does not validate; use :func:`validate_residuated_lattice`
    or :func:`make_algebra` for checked construction.
    """

    __slots__ = ("name", "elems", "leq", "join", "meet", "prod", "imp", "bot", "top", "_index")

    def __init__(self, name, elems, leq, join, meet, prod, imp, bot, top):
        self.name = str(name)
        self.elems = tuple(str(e) for e in elems)
        n = len(self.elems)
        self.leq = _frozen(leq, bool)
        self.join = _frozen(join, np.int64)
        self.meet = _frozen(meet, np.int64)
        self.prod = _frozen(prod, np.int64)
        self.imp = _frozen(imp, np.int64)
        for tab in (self.leq, self.join, self.meet, self.prod, self.imp):
            if tab.shape != (n, n):
                raise FormatError(f"{self.name}: table shape {tab.shape} != ({n}, {n})")
        self.bot = int(bot)
        self.top = int(top)
        self._index = {e: i for i, e in enumerate(self.elems)}
        if len(self._index) != n:
            raise FormatError(f"{self.name}: duplicate element labels")

    def __repr__(self) -> str:
        return f"FinResLat({self.name!r}, n={self.n})"

    @property
    def n(self) -> int:
        return len(self.elems)

    def __len__(self) -> int:
        return len(self.elems)

    def index(self, label) -> int:
        try:
            return self._index[str(label)]
        except KeyError:
            raise FormatError(f"{self.name}: unknown element label {label!r}") from None

    def label(self, i: int) -> str:
        return self.elems[i]

    def op(self, name: str):
        return getattr(self, name)

    def neg(self, x: int) -> int:
        return int(self.imp[x, self.bot])

    def same_tables(self, other: FinResLat) -> bool:
        return (
            self.n == other.n
            and self.bot == other.bot
            and self.top == other.top
            and all(np.array_equal(self.op(o), other.op(o)) for o in ("leq",) + BINARY_OPS)
        )

    def renamed(self, name: str) -> FinResLat:
        return FinResLat(name, self.elems, self.leq, self.join, self.meet,
                         self.prod, self.imp, self.bot, self.top)

    def relabeled(self, labels: Sequence[str], name: str | None = None) -> FinResLat:
        return FinResLat(name or self.name, labels, self.leq, self.join, self.meet,
                         self.prod, self.imp, self.bot, self.top)

    def upset_masks(self) -> list[int]:
        return [sum(1 << j for j in range(self.n) if self.leq[i, j]) for i in range(self.n)]

    def hasse_edges(self) -> list[tuple[int, int]]:
        """Cover pairs (lower, upper)."""
        n, leq = self.n, self.leq
        edges = []
        for i in range(n):
            for j in range(n):
                if i != j and leq[i, j] and not any(
                    k != i and k != j and leq[i, k] and leq[k, j] for k in range(n)
                ):
                    edges.append((i, j))
        return edges

    def to_json(self) -> dict:
        lab = self.elems
        return {
            "name": self.name,
            "elements": list(lab),
            "order": [[lab[i], lab[j]] for i, j in self.hasse_edges()],
            "prod": [[lab[v] for v in row] for row in self.prod],
            "imp": [[lab[v] for v in row] for row in self.imp],
            "bottom": lab[self.bot],
            "top": lab[self.top],
        }


# ---------------------------------------------------------------------------
# raw input and validation


@dataclass
class RawAlgebra:
    """Unvalidated algebra description, already resolved to indices.

    ``imp``, ``bot`` and ``top`` may be ``None``; they are then derived.
    """

    name: str
    elems: tuple[str, ...]
    leq: np.ndarray
    prod: np.ndarray
    imp: np.ndarray | None = None
    bot: int | None = None
    top: int | None = None


def order_closure(n: int, pairs: Iterable[tuple[int, int]]) -> np.ndarray:
    """Reflexive-transitive closure of a relation on ``range(n)``."""
    leq = np.eye(n, dtype=bool)
    for a, b in pairs:
        leq[a, b] = True
    for k in range(n):
        leq |= leq[:, k][:, None] & leq[k, :][None, :]
    return leq


def _as_table(name: str, rows, n: int, index, what: str) -> np.ndarray:
    if len(rows) != n or any(len(r) != n for r in rows):
        raise FormatError(f"{name}: {what} table must be {n}x{n}")
    return np.array([[index(v) for v in row] for row in rows], dtype=np.int64)


def parse_algebra(data: dict) -> RawAlgebra:
    """Resolve an algebra JSON object (labels) into a :class:`RawAlgebra`.

    Accepted keys: ``name``, ``elements``, ``order`` (Hasse or full pairs),
    ``prod`` (square matrix, or lower- or upper-triangular rows which are
    expanded by commutativity), optional ``imp``, ``bottom``, ``top``.
    """
    try:
        elems = tuple(str(e) for e in data["elements"])
        order = data.get("order", [])
        prod_rows = data["prod"]
    except (KeyError, TypeError) as exc:
        raise FormatError(f"algebra: missing field {exc}") from None
    name = str(data.get("name", "algebra"))
    n = len(elems)
    if n == 0:
        raise FormatError(f"{name}: empty element list")
    pos = {e: i for i, e in enumerate(elems)}
    if len(pos) != n:
        raise FormatError(f"{name}: duplicate element labels")

    def index(label) -> int:
        try:
            return pos[str(label)]
        except KeyError:
            raise FormatError(f"{name}: unknown element label {label!r}") from None

    pairs = []
    for pair in order:
        if len(pair) != 2:
            raise FormatError(f"{name}: order entries must be pairs, got {pair!r}")
        pairs.append((index(pair[0]), index(pair[1])))
    leq = order_closure(n, pairs)
    if n > 1 and len(prod_rows) == n and any(len(r) != n for r in prod_rows):
        prod_rows = expand_triangular(prod_rows)
    prod = _as_table(name, prod_rows, n, index, "prod")
    imp = _as_table(name, data["imp"], n, index, "imp") if data.get("imp") is not None else None
    bot = index(data["bottom"]) if data.get("bottom") is not None else None
    top = index(data["top"]) if data.get("top") is not None else None
    return RawAlgebra(name, elems, leq, prod, imp, bot, top)


def expand_triangular(rows: Sequence[Sequence]) -> list[list]:
    """Fill a triangular Cayley table by commutativity.

    Row ``i`` holds either ``x_i * x_0 .. x_i * x_i`` (lower, ``i + 1``
    entries) or ``x_i * x_i .. x_i * x_{n-1}`` (upper, ``n - i`` entries).
    """
    n = len(rows)
    if all(len(r) == i + 1 for i, r in enumerate(rows)):
        offset = [0] * n
    elif all(len(r) == n - i for i, r in enumerate(rows)):
        offset = list(range(n))
    else:
        raise FormatError("prod table is neither square nor triangular")
    full = [[None] * n for _ in range(n)]
    for i, row in enumerate(rows):
        for j, v in enumerate(row):
            full[i][j + offset[i]] = v
            full[j + offset[i]][i] = v
    return full


def _lattice_ops(raw: RawAlgebra, rep: Report):
    """Derive join/meet/bot/top from the order; record failures in ``rep``."""
    n, leq = len(raw.elems), raw.leq
    join = np.full((n, n), -1, dtype=np.int64)
    meet = np.full((n, n), -1, dtype=np.int64)
    for x in range(n):
        for y in range(x, n):
            ub = [z for z in range(n) if leq[x, z] and leq[y, z]]
            least = [z for z in ub if all(leq[z, w] for w in ub)]
            lb = [z for z in range(n) if leq[z, x] and leq[z, y]]
            great = [z for z in lb if all(leq[w, z] for w in lb)]
            if not least:
                rep.fail("lattice.join", "no least upper bound", x=raw.elems[x], y=raw.elems[y])
                return None
            if not great:
                rep.fail("lattice.meet", "no greatest lower bound", x=raw.elems[x], y=raw.elems[y])
                return None
            join[x, y] = join[y, x] = least[0]
            meet[x, y] = meet[y, x] = great[0]
    bots = [z for z in range(n) if leq[z].all()]
    tops = [z for z in range(n) if leq[:, z].all()]
    if not bots or not tops:
        rep.fail("lattice.bounds", "order has no least or no greatest element")
        return None
    bot, top = bots[0], tops[0]
    if raw.bot is not None and raw.bot != bot:
        rep.fail("lattice.bounds", "declared bottom is not the least element",
                 declared=raw.elems[raw.bot], least=raw.elems[bot])
    if raw.top is not None and raw.top != top:
        rep.fail("lattice.bounds", "declared top is not the greatest element",
                 declared=raw.elems[raw.top], greatest=raw.elems[top])
    return join, meet, bot, top


_ORDER_MSG = {1: "not reflexive", 2: "not antisymmetric", 3: "not transitive"}
_LATTICE_MSG = {
    1: "join is not an upper bound",
    2: "join is not the least upper bound",
    3: "meet is not a lower bound",
    4: "meet is not the greatest lower bound",
    5: "bottom is not below every element",
    6: "top is not above every element",
}
_MONOID_MSG = {1: "prod is not commutative", 2: "prod is not associative", 3: "top is not a unit for prod"}


def check_tables(alg: FinResLat, rep: Report | None = None) -> Report:
    """Run every axiom check on fully tabulated data (no derivation)."""
    rep = rep or Report(f"residuated lattice {alg.name}")
    lab = alg.elems
    n = alg.n
    for tab_name in ("join", "meet", "prod", "imp"):
        tab = alg.op(tab_name)
        if n and (tab.min() < 0 or tab.max() >= n):
            raise FormatError(f"{alg.name}: {tab_name} table has entries outside 0..{n - 1}")
    code, i, j, k = K.order_violation(alg.leq)
    if code:
        rep.fail("order", _ORDER_MSG[code], x=lab[i], y=lab[j], z=lab[k])
        return rep
    code, x, y, z = K.lattice_violation(alg.leq, alg.join, alg.meet, alg.bot, alg.top)
    if code:
        w = {"x": lab[x]}
        if y >= 0:
            w["y"] = lab[y]
        if z >= 0:
            w["z"] = lab[z]
        rep.fail("lattice", _LATTICE_MSG[code], **w)
    code, x, y, z = K.monoid_violation(alg.prod, alg.top)
    if code:
        w = {"x": lab[x], "y": lab[y]}
        if z >= 0:
            w["z"] = lab[z]
        rep.fail("monoid", _MONOID_MSG[code], **w)
    code, x, y, z = K.adjunction_violation(alg.leq, alg.prod, alg.imp)
    if code:
        rep.fail(
            "adjunction",
            "prod(x,z) <= y and z <= imp(x,y) disagree",
            x=lab[x], y=lab[y], z=lab[z],
            prod_xz=lab[alg.prod[x, z]], imp_xy=lab[alg.imp[x, y]],
        )
    return rep


def validate_residuated_lattice(candidate: RawAlgebra | dict | FinResLat) -> Report:
    """Check every residuated-lattice axiom, with a witness per violated axiom.

    ``candidate`` may be a parsed JSON dict, a :class:`RawAlgebra` or an
    existing :class:`FinResLat` (re-checked). On success ``report.value``
    holds the canonical :class:`FinResLat`.
    """
    if isinstance(candidate, FinResLat):
        rep = check_tables(candidate)
        if rep.ok:
            rep.value = candidate
        return rep
    raw = parse_algebra(candidate) if isinstance(candidate, dict) else candidate
    rep = Report(f"residuated lattice {raw.name}")
    n = len(raw.elems)
    if raw.prod.shape != (n, n) or raw.prod.min() < 0 or raw.prod.max() >= n:
        raise FormatError(f"{raw.name}: prod table malformed")
    code, i, j, k = K.order_violation(raw.leq)
    if code:
        rep.fail("order", _ORDER_MSG[code], x=raw.elems[i], y=raw.elems[j], z=raw.elems[k])
        return rep
    ops = _lattice_ops(raw, rep)
    if ops is None:
        return rep
    join, meet, bot, top = ops
    imp = raw.imp
    if imp is None:
        imp, bx, by = K.residuum(raw.leq, raw.prod, join, bot)
        if bx >= 0:
            rep.fail("adjunction", "prod has no residuum",
                     x=raw.elems[bx], y=raw.elems[by])
            imp = np.where(imp < 0, top, imp)
    alg = FinResLat(raw.name, raw.elems, raw.leq, join, meet, raw.prod, imp, bot, top)
    check_tables(alg, rep)
    if rep.ok:
        rep.value = alg
    return rep


def make_algebra(name, elems, order, prod, imp=None) -> FinResLat:
    """Build and validate an algebra from labels; raises on any violation."""
    data = {"name": name, "elements": list(elems), "order": order, "prod": prod}
    if imp is not None:
        data["imp"] = imp
    rep = validate_residuated_lattice(data)
    if not rep.ok:
        raise PreconditionError(rep.render(), rep.violations[0].witness)
    return rep.value


def from_index_tables(name, elems, leq, prod, imp=None) -> FinResLat:
    """Validated algebra from index-level order and product tables."""
    raw = RawAlgebra(name, tuple(elems), np.asarray(leq, dtype=bool),
                     np.asarray(prod, dtype=np.int64),
                     None if imp is None else np.asarray(imp, dtype=np.int64))
    rep = validate_residuated_lattice(raw)
    if not rep.ok:
        raise PreconditionError(rep.render(), rep.violations[0].witness)
    return rep.value


def residuum_from_product(leq, join, prod, bot: int) -> np.ndarray:
    """``imp(x, y)`` as the join of ``{z : prod(x, z) <= y}``.

    Raises :class:`PreconditionError` naming ``(x, y)`` when that join does
    not itself satisfy ``prod(x, join) <= y``, i.e. the product is not
    residuated.
    """
    leq = np.asarray(leq, dtype=bool)
    imp, bx, by = K.residuum(leq, np.asarray(prod, dtype=np.int64),
                             np.asarray(join, dtype=np.int64), int(bot))
    if bx >= 0:
        raise PreconditionError(f"product is not residuated at (x={bx}, y={by})", {"x": bx, "y": by})
    return np.asarray(imp)


# ---------------------------------------------------------------------------
# morphisms


class RLMorphism:
    """A map between finite residuated lattices, stored as an index array."""

    __slots__ = ("src", "dst", "map")

    def __init__(self, src: FinResLat, dst: FinResLat, mapping):
        self.src = src
        self.dst = dst
        arr = np.asarray(mapping, dtype=np.int64)
        if arr.shape != (src.n,):
            raise FormatError(f"morphism {src.name}->{dst.name}: map has length {arr.size}, expected {src.n}")
        if src.n and (arr.min() < 0 or arr.max() >= dst.n):
            raise FormatError(f"morphism {src.name}->{dst.name}: image index out of range")
        arr.setflags(write=False)
        self.map = arr

    def __call__(self, x: int) -> int:
        return int(self.map[x])

    def __repr__(self) -> str:
        return f"RLMorphism({self.src.name} -> {self.dst.name})"

    def __eq__(self, other) -> bool:
        return isinstance(other, RLMorphism) and np.array_equal(self.map, other.map)

    def __hash__(self):
        return hash(self.map.tobytes())

    def then(self, other: RLMorphism) -> RLMorphism:
        """``other ∘ self``."""
        return RLMorphism(self.src, other.dst, other.map[self.map])

    def coker(self) -> int:
        return sum(1 << i for i in range(self.src.n) if self.map[i] == self.dst.top)

    def is_injective(self) -> bool:
        return len(set(self.map.tolist())) == self.src.n

    def is_surjective(self) -> bool:
        return len(set(self.map.tolist())) == self.dst.n

    def is_bijective(self) -> bool:
        return self.src.n == self.dst.n and self.is_injective()

    def inverse(self) -> RLMorphism:
        inv = np.empty(self.dst.n, dtype=np.int64)
        inv[self.map] = np.arange(self.src.n)
        return RLMorphism(self.dst, self.src, inv)


def identity(alg: FinResLat) -> RLMorphism:
    return RLMorphism(alg, alg, np.arange(alg.n))


def first_violation(f: RLMorphism) -> tuple[str, tuple[int, ...]] | None:
    """First operation (in join, meet, prod, imp, bot, top order) that ``f`` breaks."""
    src, dst = f.src, f.dst
    for name in BINARY_OPS:
        x, y = K.hom_violation(src.op(name), dst.op(name), f.map)
        if x >= 0:
            return name, (int(x), int(y))
    if f.map[src.bot] != dst.bot:
        return "bot", ()
    if f.map[src.top] != dst.top:
        return "top", ()
    return None


def check_morphism(f: RLMorphism) -> Report:
    """Certify that ``f`` preserves all six operations.

    ``report.info`` carries ``coker`` (labels) and ``injective``.
    """
    rep = Report(f"morphism {f.src.name} -> {f.dst.name}")
    bad = first_violation(f)
    if bad is not None:
        name, pair = bad
        if pair:
            x, y = pair
            rep.fail(name, f"f({name}(x,y)) != {name}(f(x),f(y))",
                     x=f.src.label(x), y=f.src.label(y),
                     lhs=f.dst.label(f.map[f.src.op(name)[x, y]]),
                     rhs=f.dst.label(f.dst.op(name)[f.map[x], f.map[y]]))
        else:
            const = getattr(f.src, name)
            rep.fail(name, f"constant {name} not preserved",
                     image=f.dst.label(f.map[const]), expected=f.dst.label(getattr(f.dst, name)))
    rep.info["coker"] = mask_labels(f.src, f.coker())
    rep.info["injective"] = f.is_injective()
    return rep


def morphism_from_labels(src: FinResLat, dst: FinResLat, pairs: dict) -> RLMorphism:
    arr = [dst.index(pairs[e]) if e in pairs else None for e in src.elems]
    if any(a is None for a in arr):
        missing = [e for e, a in zip(src.elems, arr) if a is None]
        raise FormatError(f"morphism {src.name}->{dst.name}: no image for {missing}")
    return RLMorphism(src, dst, arr)


def enumerate_morphisms(src: FinResLat, dst: FinResLat, fixed: dict[int, int] | None = None,
                        budget: int = 100_000):
    """Yield every RL morphism ``src -> dst`` extending ``fixed``.

    Backtracking with propagation through all binary operations; raises
    :class:`~rlsheaf.errors.BudgetExceeded` after ``budget`` search nodes.
    """
    from .errors import BudgetExceeded

    n = src.n
    start = {src.bot: dst.bot, src.top: dst.top}
    for k, v in (fixed or {}).items():
        if start.get(k, v) != v:
            return
        start[k] = v
    ops = [(src.op(o), dst.op(o)) for o in BINARY_OPS]
    nodes = [0]

    def propagate(assign: dict[int, int]) -> dict[int, int] | None:
        assign = dict(assign)
        changed = True
        while changed:
            changed = False
            keys = list(assign)
            for a in keys:
                for b in keys:
                    for s_op, d_op in ops:
                        c = int(s_op[a, b])
                        v = int(d_op[assign[a], assign[b]])
                        old = assign.get(c)
                        if old is None:
                            assign[c] = v
                            changed = True
                        elif old != v:
                            return None
        return assign

    def search(assign):
        nodes[0] += 1
        if nodes[0] > budget:
            raise BudgetExceeded(f"morphism search {src.name}->{dst.name} exceeded {budget} nodes")
        assign = propagate(assign)
        if assign is None:
            return
        free = [i for i in range(n) if i not in assign]
        if not free:
            yield RLMorphism(src, dst, [assign[i] for i in range(n)])
            return
        x = free[0]
        for v in range(dst.n):
            trial = dict(assign)
            trial[x] = v
            yield from search(trial)

    yield from search(start)


# ---------------------------------------------------------------------------
# isomorphism


def _signature(alg: FinResLat, i: int) -> tuple:
    below = int(alg.leq[:, i].sum())
    above = int(alg.leq[i, :].sum())
    idem = bool(alg.prod[i, i] == i)
    powers = []
    x = i
    for _ in range(4):
        x = int(alg.prod[x, i])
        powers.append(int(alg.leq[:, x].sum()))
    neg = int(alg.leq[:, alg.imp[i, alg.bot]].sum())
    return (below, above, idem, tuple(powers), neg)


def find_isomorphism(a: FinResLat, b: FinResLat, budget: int = 200_000) -> RLMorphism | None:
    """Search for an isomorphism ``a -> b``; ``None`` if none exists.

    Elements are pre-partitioned by order/product invariants and every
    partial assignment is closed under the binary operations before
    branching, so algebras generated by few elements resolve quickly.
    """
    if a.n != b.n:
        return None
    sig_a = [_signature(a, i) for i in range(a.n)]
    sig_b = [_signature(b, i) for i in range(b.n)]
    if sorted(sig_a) != sorted(sig_b):
        return None
    cands = {i: [j for j in range(b.n) if sig_b[j] == sig_a[i]] for i in range(a.n)}
    ops = [(a.op(o), b.op(o)) for o in BINARY_OPS]
    nodes = [0]

    def close(assign: dict[int, int], used: set[int]):
        assign = dict(assign)
        used = set(used)
        frontier = list(assign)
        while frontier:
            new = []
            keys = list(assign)
            for x in frontier:
                for y in keys:
                    for s_op, d_op in ops:
                        for c, v in ((int(s_op[x, y]), int(d_op[assign[x], assign[y]])),
                                     (int(s_op[y, x]), int(d_op[assign[y], assign[x]]))):
                            old = assign.get(c)
                            if old is None:
                                if v in used or v not in cands[c]:
                                    return None
                                assign[c] = v
                                used.add(v)
                                new.append(c)
                                keys.append(c)
                            elif old != v:
                                return None
            frontier = new
        return assign, used

    def search(assign, used):
        nodes[0] += 1
        if nodes[0] > budget:
            return None
        res = close(assign, used)
        if res is None:
            return None
        assign, used = res
        if len(assign) == a.n:
            f = RLMorphism(a, b, [assign[i] for i in range(a.n)])
            # order must be reflected as well; ops are preserved by construction
            if np.array_equal(a.leq, b.leq[np.ix_(f.map, f.map)]):
                return f
            return None
        free = min((i for i in range(a.n) if i not in assign), key=lambda i: len(cands[i]))
        for v in cands[free]:
            if v in used:
                continue
            out = search({**assign, free: v}, used | {v})
            if out is not None:
                return out
        return None

    if a.n == 0:
        return RLMorphism(a, b, [])
    return search({a.bot: b.bot, a.top: b.top}, {b.bot, b.top})


def is_isomorphic(a: FinResLat, b: FinResLat) -> bool:
    return find_isomorphism(a, b) is not None


# ---------------------------------------------------------------------------
# filters and quotients


@dataclass(frozen=True)
class FilterSubset:
    parent: FinResLat
    mask: int

    @property
    def members(self) -> list[int]:
        return mask_members(self.mask)

    def __contains__(self, x: int) -> bool:
        return bool(self.mask >> x & 1)

    def __len__(self) -> int:
        return bin(self.mask).count("1")

    def labels(self) -> list[str]:
        return mask_labels(self.parent, self.mask)

    def is_proper(self) -> bool:
        return self.mask != full_mask(self.parent.n)


def full_mask(n: int) -> int:
    return (1 << n) - 1


def mask_members(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def mask_labels(alg: FinResLat, mask: int) -> list[str]:
    return [alg.label(i) for i in mask_members(mask)]


def to_mask(alg: FinResLat, members) -> int:
    if isinstance(members, FilterSubset):
        return members.mask
    if isinstance(members, int):
        return members
    m = 0
    for x in members:
        m |= 1 << (alg.index(x) if isinstance(x, str) else int(x))
    return m


def filter_witness(alg: FinResLat, mask: int) -> dict | None:
    """A closure failure of ``mask`` as a filter, or ``None`` if it is one."""
    if not mask >> alg.top & 1:
        return {"reason": "top missing", "top": alg.label(alg.top)}
    members = mask_members(mask)
    for x in members:
        for y in range(alg.n):
            if alg.leq[x, y] and not mask >> y & 1:
                return {"reason": "not upward closed", "x": alg.label(x), "y": alg.label(y)}
    for x in members:
        for y in members:
            p = int(alg.prod[x, y])
            if not mask >> p & 1:
                return {"reason": "not closed under prod", "x": alg.label(x),
                        "y": alg.label(y), "prod": alg.label(p)}
    return None


def is_filter(alg: FinResLat, members) -> bool:
    return filter_witness(alg, to_mask(alg, members)) is None


def filter_congruence(alg: FinResLat, mask: int) -> list[int]:
    """Class index of every element under ``x ~ y iff x->y, y->x in F``.

    Classes are numbered by their least member.
    """
    n = alg.n
    cls = [-1] * n
    count = 0
    for x in range(n):
        if cls[x] >= 0:
            continue
        for y in range(x, n):
            if cls[y] < 0 and mask >> int(alg.imp[x, y]) & 1 and mask >> int(alg.imp[y, x]) & 1:
                cls[y] = count
        count += 1
    return cls


def quotient_by_filter(alg: FinResLat, filt, name: str | None = None) -> tuple[FinResLat, RLMorphism]:
    """Quotient ``alg / F`` under the filter congruence, with its projection."""
    mask = to_mask(alg, filt)
    bad = filter_witness(alg, mask)
    if bad is not None:
        raise PreconditionError(f"{alg.name}: subset is not a filter ({bad['reason']})", bad)
    cls = filter_congruence(alg, mask)
    m = max(cls) + 1
    reps = [cls.index(c) for c in range(m)]
    labels = ["{" + ",".join(alg.label(x) for x in range(alg.n) if cls[x] == c) + "}" for c in range(m)]
    leq = np.array([[bool(mask >> int(alg.imp[reps[c], reps[d]]) & 1) for d in range(m)]
                    for c in range(m)])

    def lift(tab):
        return [[cls[tab[reps[c], reps[d]]] for d in range(m)] for c in range(m)]

    q = FinResLat(
        name or f"{alg.name}/{{{','.join(mask_labels(alg, mask))}}}",
        labels, leq, lift(alg.join), lift(alg.meet), lift(alg.prod), lift(alg.imp),
        cls[alg.bot], cls[alg.top],
    )
    return q, RLMorphism(alg, q, cls)


# ---------------------------------------------------------------------------
# standard algebras and products


def one_element(name: str = "1") -> FinResLat:
    """The terminal (degenerate) residuated lattice."""
    z = [[0]]
    return FinResLat(name, ["1"], [[True]], z, z, z, z, 0, 0)


def lukasiewicz_chain(k: int) -> FinResLat:
    """The Łukasiewicz chain ``{0, 1/k, ..., 1}`` with exact rational labels."""
    if k < 1:
        raise PreconditionError("Łukasiewicz chain needs k >= 1")
    idx = np.arange(k + 1)
    X, Y = np.meshgrid(idx, idx, indexing="ij")
    labels = [str(Fraction(i, k)) for i in idx]
    return FinResLat(
        f"L{k}", labels, X <= Y, np.maximum(X, Y), np.minimum(X, Y),
        np.maximum(0, X + Y - k), np.minimum(k, k - X + Y), 0, k,
    )


def goedel_chain(n: int) -> FinResLat:
    """n-element chain with ``prod = meet`` (a Heyting chain)."""
    idx = np.arange(n)
    X, Y = np.meshgrid(idx, idx, indexing="ij")
    imp = np.where(X <= Y, n - 1, Y)
    return FinResLat(f"G{n}", [str(i) for i in idx], X <= Y, np.maximum(X, Y),
                     np.minimum(X, Y), np.minimum(X, Y), imp, 0, n - 1)


def product_algebra(*algs: FinResLat, name: str | None = None) -> FinResLat:
    """Componentwise product; element ``(i1, ..., ik)`` has mixed-radix index.

    The empty product is the one-element algebra.
    """
    if not algs:
        return one_element(name or "1")
    sizes = [a.n for a in algs]
    tuples = list(itertools.product(*(range(s) for s in sizes)))
    total = len(tuples)
    coords = np.array(tuples, dtype=np.int64).reshape(total, len(algs))
    radix = np.ones(len(algs), dtype=np.int64)
    for i in range(len(algs) - 2, -1, -1):
        radix[i] = radix[i + 1] * sizes[i + 1]

    def table(op):
        out = np.zeros((total, total), dtype=np.int64)
        for c, a in enumerate(algs):
            t = a.op(op)[coords[:, c][:, None], coords[:, c][None, :]]
            out += t * radix[c]
        return out

    leq = np.ones((total, total), dtype=bool)
    for c, a in enumerate(algs):
        leq &= a.leq[coords[:, c][:, None], coords[:, c][None, :]]
    labels = ["(" + ",".join(a.label(i) for a, i in zip(algs, t)) + ")" for t in tuples]
    bot = int(sum(a.bot * r for a, r in zip(algs, radix)))
    top = int(sum(a.top * r for a, r in zip(algs, radix)))
    return FinResLat(name or " x ".join(a.name for a in algs), labels, leq,
                     table("join"), table("meet"), table("prod"), table("imp"), bot, top)


def product_coords(algs: Sequence[FinResLat], index: int) -> tuple[int, ...]:
    out = []
    for a in reversed(algs):
        out.append(index % a.n)
        index //= a.n
    return tuple(reversed(out))


def product_index(algs: Sequence[FinResLat], coords: Sequence[int]) -> int:
    idx = 0
    for a, c in zip(algs, coords):
        idx = idx * a.n + int(c)
    return idx


def projection(prod: FinResLat, algs: Sequence[FinResLat], i: int) -> RLMorphism:
    return RLMorphism(prod, algs[i], [product_coords(algs, x)[i] for x in range(prod.n)])
