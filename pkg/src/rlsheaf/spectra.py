"""Filters, prime/maximal/minimal-prime classification and spectral topologies."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .algebra import FilterSubset, FinResLat, filter_witness, full_mask, mask_labels, mask_members, to_mask
from .errors import BudgetExceeded, PreconditionError
from .report import Report
from .topology import FinTopSpace

DEFAULT_ENUM_LIMIT = 20
KINDS = ("hull", "dual", "patch")


def filter_order_key(alg: FinResLat, mask: int) -> tuple:
    """Sort key naming filters F1, F2, ...: ``{1}`` first, ``A`` last, the rest
    lexicographically by their sorted member indices."""
    if mask == 1 << alg.top:
        return (0, ())
    if mask == full_mask(alg.n):
        return (2, ())
    return (1, tuple(mask_members(mask)))


@dataclass
class FilterLattice:
    """All filters of an algebra in naming order; meet is intersection and
    join is the filter generated by the union."""

    parent: FinResLat
    filters: list[FilterSubset]
    _pos: dict[int, int] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._pos = {f.mask: i for i, f in enumerate(self.filters)}

    def __len__(self) -> int:
        return len(self.filters)

    def __iter__(self):
        return iter(self.filters)

    def name(self, f: FilterSubset | int) -> str:
        mask = f.mask if isinstance(f, FilterSubset) else f
        return f"F{self._pos[mask] + 1}"

    def by_name(self, name: str) -> FilterSubset:
        return self.filters[int(name.lstrip("F")) - 1]

    def position(self, f: FilterSubset | int) -> int:
        return self._pos[f.mask if isinstance(f, FilterSubset) else f]

    def meet(self, a: FilterSubset, b: FilterSubset) -> FilterSubset:
        return self.filters[self._pos[a.mask & b.mask]]

    def join(self, a: FilterSubset, b: FilterSubset) -> FilterSubset:
        return generated_filter(self.parent, a.mask | b.mask)

    def covers(self) -> list[tuple[int, int]]:
        """Hasse edges of inclusion, as positions into ``filters``."""
        fs = [f.mask for f in self.filters]
        out = []
        for i, a in enumerate(fs):
            for j, b in enumerate(fs):
                if a != b and a & ~b == 0 and not any(
                    c not in (a, b) and a & ~c == 0 and c & ~b == 0 for c in fs
                ):
                    out.append((i, j))
        return out

    def table(self) -> list[tuple[str, list[str]]]:
        return [(self.name(f), f.labels()) for f in self.filters]


def enumerate_filters(alg: FinResLat, limit: int = DEFAULT_ENUM_LIMIT) -> FilterLattice:
    """Every filter of ``alg``, named F1.. in deterministic order.

    Scans all ``2^n`` subsets with the bitset kernel; refuses ``n > limit``.
    """
    if alg.n > limit:
        raise BudgetExceeded(f"filter enumeration over {alg.n} elements exceeds limit {limit}")
    up = np.array(alg.upset_masks(), dtype=np.int64)
    masks = [int(m) for m in K.filter_masks(up, alg.prod, alg.top)]
    masks.sort(key=lambda m: filter_order_key(alg, m))
    return FilterLattice(alg, [FilterSubset(alg, m) for m in masks])


def generated_filter(alg: FinResLat, X) -> FilterSubset:
    """Least filter containing ``X``: close ``X ∪ {1}`` under prod and upward."""
    mask = to_mask(alg, X) | 1 << alg.top
    up = alg.upset_masks()
    while True:
        new = mask
        members = mask_members(mask)
        for x in members:
            new |= up[x]
            for y in members:
                new |= 1 << int(alg.prod[x, y])
        if new == mask:
            return FilterSubset(alg, mask)
        mask = new


def is_prime(alg: FinResLat, mask: int) -> bool:
    if mask == full_mask(alg.n):
        return False
    for x in range(alg.n):
        if mask >> x & 1:
            continue
        for y in range(x, alg.n):
            if not mask >> y & 1 and mask >> int(alg.join[x, y]) & 1:
                return False
    return True


@dataclass
class Classification:
    lattice: FilterLattice
    prime: list[FilterSubset]
    maximal: list[FilterSubset]
    minimal_prime: list[FilterSubset]

    def names(self, which: str) -> list[str]:
        return [self.lattice.name(f) for f in getattr(self, which)]


def classify_filters(alg: FinResLat, lattice: FilterLattice | None = None) -> Classification:
    """Prime, maximal and minimal-prime filters (each in naming order)."""
    lat = lattice or enumerate_filters(alg)
    full = full_mask(alg.n)
    proper = [f for f in lat if f.mask != full]
    prime = [f for f in proper if is_prime(alg, f.mask)]
    maximal = [f for f in proper if not any(g.mask != f.mask and f.mask & ~g.mask == 0 for g in proper)]
    minimal = [f for f in prime if not any(g.mask != f.mask and g.mask & ~f.mask == 0 for g in prime)]
    prime_masks = {f.mask for f in prime}
    if not all(f.mask in prime_masks for f in maximal):
        raise AssertionError(f"{alg.name}: a maximal filter is not prime")
    return Classification(lat, prime, maximal, minimal)


@dataclass
class SpectrumSpace:
    parent: FinResLat
    carrier: list[FilterSubset]
    kind: str
    topology: FinTopSpace
    names: list[str]

    def open_families(self) -> list[list[str]]:
        return [self.topology.labels(o) for o in self.topology.opens]


def hull(alg: FinResLat, carrier: list[FilterSubset], x: int) -> int:
    """``h(x)``: carrier positions of members containing ``x``."""
    return sum(1 << i for i, P in enumerate(carrier) if P.mask >> x & 1)


def spectrum_topology(alg: FinResLat, carrier: list[FilterSubset], kind: str = "hull",
                      lattice: FilterLattice | None = None, closed_basis: bool = False) -> SpectrumSpace:
    """Hull-kernel (``hull``), dual (``dual``) or patch topology on ``carrier``.

    ``hull`` uses ``{h(x)}`` as open subbasis; with ``closed_basis`` the
    ``h(x)`` are taken as closed sets instead (a diagnostic variant that
    coincides with ``dual``). ``dual`` uses ``{d(x)}`` and ``patch`` both.
    """
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}")
    lat = lattice or enumerate_filters(alg)
    for P in carrier:
        if not is_prime(alg, P.mask):
            raise PreconditionError("carrier member is not a prime filter",
                                    {"filter": lat.name(P), "members": P.labels()})
    m = len(carrier)
    full = (1 << m) - 1
    hs = [hull(alg, carrier, x) for x in range(alg.n)]
    ds = [full & ~h for h in hs]
    if kind == "hull":
        family = ds if closed_basis else hs
    elif kind == "dual":
        family = ds
    else:
        family = hs + ds
    names = [lat.name(P) for P in carrier]
    top = FinTopSpace.from_subbasis(names, family, f"{kind}({alg.name})")
    return SpectrumSpace(alg, list(carrier), kind, top, names)


def carrier_of(cls: Classification, which: str) -> list[FilterSubset]:
    return {"spec": cls.prime, "max": cls.maximal, "min": cls.minimal_prime}[which]


def spectrum(alg: FinResLat, carrier: str = "spec", kind: str = "hull", **kw) -> SpectrumSpace:
    cls = classify_filters(alg)
    return spectrum_topology(alg, carrier_of(cls, carrier), kind, lattice=cls.lattice, **kw)


def filter_report(alg: FinResLat) -> Report:
    lat = enumerate_filters(alg)
    cls = classify_filters(alg, lat)
    rep = Report(f"filters of {alg.name}")
    rep.info["filters"] = {lat.name(f): f.labels() for f in lat}
    rep.info["prime"] = cls.names("prime")
    rep.info["maximal"] = cls.names("maximal")
    rep.info["minimal_prime"] = cls.names("minimal_prime")
    for f in lat:
        bad = filter_witness(alg, f.mask)
        if bad is not None:
            rep.fail("filter", "enumerated subset is not a filter", filter=lat.name(f), **bad)
    return rep


def min_patch_discrepancy(alg: FinResLat, table_opens: list[list[str]]) -> Report:
    """Compare a published ``Min_p`` open family against the computed candidates.

    Computes the patch topology on both the minimal-prime carrier and the
    full prime spectrum, plus the hull and dual topologies on the spectrum,
    and reports which (if any) reproduce ``table_opens``.
    """
    cls = classify_filters(alg)
    lat = cls.lattice
    target = sorted(sorted(o) for o in table_opens)
    rep = Report(f"Min_p({alg.name}) discrepancy check")
    candidates = {
        "patch on Min": spectrum_topology(alg, cls.minimal_prime, "patch", lat),
        "patch on Spec": spectrum_topology(alg, cls.prime, "patch", lat),
        "hull on Spec": spectrum_topology(alg, cls.prime, "hull", lat),
        "dual on Spec": spectrum_topology(alg, cls.prime, "dual", lat),
        "hull(closed basis) on Spec": spectrum_topology(alg, cls.prime, "hull", lat, closed_basis=True),
    }
    matches = []
    for label, sp in candidates.items():
        fam = sorted(sorted(o) for o in sp.open_families())
        rep.info[label] = fam
        if fam == target:
            matches.append(label)
    rep.info["Min"] = cls.names("minimal_prime")
    rep.info["Spec"] = cls.names("prime")
    rep.info["published"] = target
    rep.info["matches"] = matches
    if "patch on Min" not in matches:
        rep.fail("paper-discrepancy", "published Min_p family is not the patch topology on Min",
                 published=target, computed=candidates["patch on Min"].open_families(),
                 reproduced_by=matches)
    return rep
