"""Finite topological spaces, continuous maps, local homeomorphisms, covers.

A finite topology is determined by the minimal open neighbourhood ``U_x``
of each point, so that is what :class:`FinTopSpace` stores (as integer
bitmasks). Explicit open families are enumerated on demand, which keeps
spaces with astronomically many opens (étalé totals) usable.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence

from .errors import BudgetExceeded, FormatError, PreconditionError
from .report import Report

DEFAULT_OPEN_BUDGET = 1 << 16
DEFAULT_COVER_BUDGET = 1 << 12


def bits(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def popcount(mask: int) -> int:
    return bin(mask).count("1")


class FinTopSpace:
    """Finite topological space given by minimal neighbourhoods.

    ``minimal[i]`` is the bitmask of the smallest open set containing point
    ``i``. Construct through :meth:`from_opens`, :meth:`from_subbasis` or the
    named helpers rather than directly.
    """

    def __init__(self, points: Sequence[str], minimal: Sequence[int], name: str = ""):
        self.points = tuple(str(p) for p in points)
        self.minimal = tuple(int(m) for m in minimal)
        self.name = name
        self._index = {p: i for i, p in enumerate(self.points)}
        if len(self._index) != len(self.points):
            raise FormatError("duplicate point labels")
        if len(self.minimal) != len(self.points):
            raise FormatError("one minimal neighbourhood per point required")
        for i, m in enumerate(self.minimal):
            if not m >> i & 1:
                raise FormatError(f"minimal neighbourhood of {self.points[i]} must contain it")
            for j in bits(m):
                if self.minimal[j] & ~m:
                    raise FormatError("minimal neighbourhoods are not nested")

    def __repr__(self) -> str:
        return f"FinTopSpace({self.name or '?'}, points={list(self.points)})"

    def __eq__(self, other) -> bool:
        return isinstance(other, FinTopSpace) and self.points == other.points and self.minimal == other.minimal

    def __hash__(self):
        return hash((self.points, self.minimal))

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    def index(self, label) -> int:
        try:
            return self._index[str(label)]
        except KeyError:
            raise FormatError(f"unknown point label {label!r}") from None

    def mask(self, labels: Iterable) -> int:
        m = 0
        for p in labels:
            m |= 1 << (self.index(p) if isinstance(p, str) else int(p))
        return m

    def labels(self, mask: int) -> list[str]:
        return [self.points[i] for i in bits(mask)]

    def key(self, mask: int) -> str:
        """Canonical open key: sorted point labels joined by commas."""
        return ",".join(sorted(self.labels(mask)))

    def from_key(self, key: str) -> int:
        key = key.strip()
        if key in ("", "{}", "∅"):
            return 0
        return self.mask(p.strip() for p in key.strip("{}").split(","))

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_subbasis(cls, points: Sequence[str], family: Iterable[int], name: str = "") -> FinTopSpace:
        """Topology generated by ``family`` (masks) as a subbasis."""
        points = list(points)
        full = (1 << len(points)) - 1
        family = list(family)
        minimal = []
        for i in range(len(points)):
            m = full
            for s in family:
                if s >> i & 1:
                    m &= s
            minimal.append(m)
        return cls(points, minimal, name)

    @classmethod
    def from_opens(cls, points: Sequence[str], opens: Iterable[Iterable[str]], name: str = "",
                   strict: bool = True) -> FinTopSpace:
        """Build from an explicit open family given by labels.

        With ``strict`` the family must already be a topology; a
        :class:`PreconditionError` carrying the witness is raised otherwise.
        """
        rep = validate_topology(points, opens)
        if strict and not rep.ok:
            raise PreconditionError(rep.render(), rep.violations[0].witness)
        pos = {p: i for i, p in enumerate(points)}
        masks = [sum(1 << pos[p] for p in o) for o in opens]
        return cls.from_subbasis(points, masks, name)

    @classmethod
    def discrete(cls, n_or_points, name: str = "discrete") -> FinTopSpace:
        pts = _points(n_or_points)
        return cls(pts, [1 << i for i in range(len(pts))], name)

    @classmethod
    def indiscrete(cls, n_or_points, name: str = "indiscrete") -> FinTopSpace:
        pts = _points(n_or_points)
        full = (1 << len(pts)) - 1
        return cls(pts, [full] * len(pts), name)

    @classmethod
    def sierpinski(cls) -> FinTopSpace:
        """Points ``x, y`` with opens ``∅, {x}, {x, y}``."""
        return cls(["x", "y"], [0b01, 0b11], "sierpinski")

    @classmethod
    def point(cls, label: str = "*") -> FinTopSpace:
        return cls([label], [1], "point")

    # -- opens ----------------------------------------------------------------

    def is_open(self, mask: int) -> bool:
        return all(self.minimal[i] & ~mask == 0 for i in bits(mask))

    def interior(self, mask: int) -> int:
        return sum(1 << i for i in bits(mask) if self.minimal[i] & ~mask == 0)

    def closure(self, mask: int) -> int:
        return sum(1 << i for i in range(self.n) if self.minimal[i] & mask)

    def opens_list(self, budget: int = DEFAULT_OPEN_BUDGET) -> list[int]:
        """Every open set, sorted by size then mask value.

        Raises :class:`BudgetExceeded` when more than ``budget`` exist.
        """
        found = {0}
        frontier = [0]
        while frontier:
            nxt = []
            for o in frontier:
                for m in set(self.minimal):
                    u = o | m
                    if u not in found:
                        found.add(u)
                        nxt.append(u)
                        if len(found) > budget:
                            raise BudgetExceeded(f"more than {budget} open sets")
            frontier = nxt
        return sorted(found, key=lambda m: (popcount(m), m))

    @cached_property
    def opens(self) -> tuple[int, ...]:
        return tuple(self.opens_list())

    def open_sets(self) -> list[frozenset[str]]:
        return [frozenset(self.labels(o)) for o in self.opens]

    def subspace(self, mask: int) -> FinTopSpace:
        idx = bits(mask)
        pos = {j: k for k, j in enumerate(idx)}
        minimal = [sum(1 << pos[j] for j in bits(self.minimal[i] & mask)) for i in idx]
        return FinTopSpace([self.points[i] for i in idx], minimal, f"{self.name}|sub")

    def specialization_edges(self) -> list[tuple[int, int]]:
        """Cover pairs ``(i, j)`` of strict inclusion ``U_i ⊊ U_j``."""
        m = self.minimal

        def lt(a, b):
            return m[a] != m[b] and m[a] & ~m[b] == 0

        return [(i, j) for i in range(self.n) for j in range(self.n)
                if lt(i, j) and not any(lt(i, k) and lt(k, j) for k in range(self.n))]

    def is_discrete(self) -> bool:
        return all(m == 1 << i for i, m in enumerate(self.minimal))

    def to_json(self) -> dict:
        return {"points": list(self.points), "opens": [self.labels(o) for o in self.opens]}


def _points(n_or_points) -> list[str]:
    if isinstance(n_or_points, int):
        return [f"p{i}" for i in range(n_or_points)]
    return [str(p) for p in n_or_points]


def parse_topology(data: dict) -> FinTopSpace:
    try:
        points = [str(p) for p in data["points"]]
        opens = [[str(p) for p in o] for o in data["opens"]]
    except (KeyError, TypeError) as exc:
        raise FormatError(f"topology: missing field {exc}") from None
    return FinTopSpace.from_opens(points, opens, str(data.get("name", "")))


def validate_topology(points: Sequence[str], opens: Iterable[Iterable[str]]) -> Report:
    """Check the open-set axioms of an explicit family; witnesses on failure."""
    points = [str(p) for p in points]
    pos = {p: i for i, p in enumerate(points)}
    rep = Report("topology")
    fam = set()
    for o in opens:
        m = 0
        for p in o:
            if str(p) not in pos:
                raise FormatError(f"topology: unknown point label {p!r}")
            m |= 1 << pos[str(p)]
        fam.add(m)
    full = (1 << len(points)) - 1

    def lab(m):
        return [points[i] for i in bits(m)]

    if 0 not in fam:
        rep.fail("empty", "the empty set is not open")
    if full not in fam:
        rep.fail("full", "the whole space is not open")
    ordered = sorted(fam)
    for a, b in itertools.combinations(ordered, 2):
        if a | b not in fam:
            rep.fail("union", "union of two opens is not open", a=lab(a), b=lab(b), union=lab(a | b))
            break
    for a, b in itertools.combinations(ordered, 2):
        if a & b not in fam:
            rep.fail("intersection", "intersection of two opens is not open",
                     a=lab(a), b=lab(b), intersection=lab(a & b))
            break
    rep.info["opens"] = len(fam)
    return rep


# ---------------------------------------------------------------------------
# maps


@dataclass(frozen=True)
class ContinuousMap:
    """A map between finite spaces; continuity is checked, not assumed."""

    src: FinTopSpace
    dst: FinTopSpace
    map: tuple[int, ...]

    def __post_init__(self):
        if len(self.map) != self.src.n or any(not 0 <= v < self.dst.n for v in self.map):
            raise FormatError("map must send every source point to a target point")

    def image(self, mask: int) -> int:
        out = 0
        for i in bits(mask):
            out |= 1 << self.map[i]
        return out

    def preimage(self, mask: int) -> int:
        return sum(1 << i for i in range(self.src.n) if mask >> self.map[i] & 1)

    def then(self, other: ContinuousMap) -> ContinuousMap:
        return ContinuousMap(self.src, other.dst, tuple(other.map[v] for v in self.map))


def is_continuous(f: ContinuousMap) -> bool:
    # finite spaces: continuous iff f(U_x) ⊆ U_{f(x)} for every x
    return all(f.image(f.src.minimal[i]) & ~f.dst.minimal[f.map[i]] == 0 for i in range(f.src.n))


def is_open_map(f: ContinuousMap) -> bool:
    return all(f.dst.is_open(f.image(f.src.minimal[i])) for i in range(f.src.n))


def is_locally_injective(f: ContinuousMap) -> bool:
    return all(_injective_on(f, f.src.minimal[i]) for i in range(f.src.n))


def _injective_on(f: ContinuousMap, mask: int) -> bool:
    seen = set()
    for i in bits(mask):
        if f.map[i] in seen:
            return False
        seen.add(f.map[i])
    return True


def is_homeomorphism_onto_open(f: ContinuousMap, mask: int) -> bool:
    """Is ``f`` restricted to the open ``mask`` a homeomorphism onto an open set?

    Compares the subspace topologies of ``mask`` and ``f(mask)`` point by
    point: ``f`` must be injective and carry each minimal neighbourhood in
    the subspace exactly onto the minimal neighbourhood of the image.
    """
    if not f.src.is_open(mask) or not _injective_on(f, mask):
        return False
    img = f.image(mask)
    if not f.dst.is_open(img):
        return False
    for i in bits(mask):
        if f.image(f.src.minimal[i] & mask) != f.dst.minimal[f.map[i]] & img:
            return False
    return True


def is_local_homeomorphism_by_definition(f: ContinuousMap) -> bool:
    """Every point has an open neighbourhood mapped homeomorphically onto an open set.

    In a finite space any such neighbourhood contains the minimal one and
    restricts to it, so testing ``U_x`` is exhaustive.
    """
    return all(is_homeomorphism_onto_open(f, f.src.minimal[i]) for i in range(f.src.n))


def map_properties(f: ContinuousMap) -> dict[str, bool]:
    """Continuity, openness, local injectivity and the local-homeomorphism verdict.

    The verdict is computed twice (characterisation and definition); a
    disagreement raises ``AssertionError`` since it would be a library bug.
    """
    cont = is_continuous(f)
    opn = is_open_map(f)
    inj = is_locally_injective(f)
    by_char = cont and opn and inj
    by_def = is_local_homeomorphism_by_definition(f)
    if by_char != by_def:
        raise AssertionError(f"local homeomorphism verdicts disagree: {by_char} vs {by_def}")
    return {"continuous": cont, "open": opn, "locally_injective": inj, "local_homeomorphism": by_def}


def minimal_open_neighborhood(space: FinTopSpace, x) -> int:
    i = space.index(x) if isinstance(x, str) else int(x)
    return space.minimal[i]


def neighborhood_poset(space: FinTopSpace, X: int = 0) -> list[int]:
    """Opens containing ``X``, ordered for reverse inclusion (largest first).

    The family is directed: the intersection of any two members is a member,
    which is asserted.
    """
    nb = [o for o in space.opens if o & X == X]
    members = set(nb)
    for a in nb:
        for b in nb:
            if a & b not in members:
                raise AssertionError("neighbourhood family not directed")
    return sorted(nb, key=lambda m: (-popcount(m), m))


# ---------------------------------------------------------------------------
# covers


def open_covers(space: FinTopSpace, O: int, mode: str = "strict",
                budget: int = DEFAULT_COVER_BUDGET) -> Iterator[tuple[int, ...]]:
    """Yield every open cover of the open set ``O`` as a sorted tuple of masks.

    ``strict``: all families of opens with union ``O`` (the empty family
    covers ``∅``). ``paper``: non-empty families of non-empty opens, and
    nothing for ``O = ∅``. Families are sets, so there is no multiplicity.
    """
    if mode not in ("strict", "paper"):
        raise ValueError(f"unknown cover mode {mode!r}")
    if not space.is_open(O):
        raise PreconditionError("cover target is not open", {"O": space.labels(O)})
    subs = [o for o in space.opens if o & ~O == 0]
    if mode == "paper":
        subs = [o for o in subs if o]
        if O == 0:
            return
    if len(subs) > 62 or (1 << len(subs)) > budget:
        raise BudgetExceeded(
            f"{1 << len(subs) if len(subs) <= 62 else 'too many'} candidate families for open "
            f"{{{space.key(O)}}} exceed budget {budget}")
    for r in range(len(subs) + 1):
        for fam in itertools.combinations(subs, r):
            u = 0
            for o in fam:
                u |= o
            if u == O and (mode == "strict" or fam):
                yield fam
