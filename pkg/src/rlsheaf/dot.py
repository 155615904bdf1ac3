"""Deterministic Graphviz DOT text for orders, filter lattices, spaces and étalé spaces.

Nodes are emitted in index order and edges sorted, so the same object always
renders to the same bytes. Edges point upward (from smaller to larger).
"""

from __future__ import annotations

from .algebra import FinResLat
from .etale import EtaleSpace
from .spectra import FilterLattice
from .topology import FinTopSpace, bits

_FIBER_COLOURS = ("lightblue", "lightpink", "palegreen", "khaki", "plum", "lightsalmon",
                  "lightcyan", "wheat")


def _q(s: str) -> str:
    return '"' + str(s).replace("\\", "\\\\").replace('"', '\\"') + '"'


def _graph(name: str, nodes: list[str], edges: list[tuple[int, int]],
           attrs: list[str] | None = None, node_attrs: list[str] | None = None) -> str:
    lines = [f"digraph {_q(name)} {{", "  rankdir=BT;", "  node [shape=circle];"]
    lines += [f"  {a};" for a in attrs or []]
    for i, label in enumerate(nodes):
        extra = f", {node_attrs[i]}" if node_attrs and node_attrs[i] else ""
        lines.append(f"  n{i} [label={_q(label)}{extra}];")
    for a, b in sorted(set(edges)):
        lines.append(f"  n{a} -> n{b};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def hasse_dot(alg: FinResLat) -> str:
    return _graph(alg.name, list(alg.elems), alg.hasse_edges())


def filter_lattice_dot(lat: FilterLattice) -> str:
    nodes = [f"{lat.name(f)} = {{{','.join(f.labels())}}}" for f in lat.filters]
    return _graph(f"filters of {lat.parent.name}", nodes, lat.covers(), ["node [shape=box]"])


def specialization_dot(space: FinTopSpace) -> str:
    """Specialization order: ``x -> y`` when ``U_x`` is strictly inside ``U_y``."""
    return _graph(space.name, list(space.points), space.specialization_edges())


def etale_dot(E: EtaleSpace) -> str:
    """Total space over the base: fibers as coloured clusters, projection edges dashed."""
    lines = [f"digraph {_q(E.name)} {{", "  rankdir=BT;", "  node [shape=ellipse, style=filled];"]
    for b in range(E.base.n):
        colour = _FIBER_COLOURS[b % len(_FIBER_COLOURS)]
        lines.append(f"  subgraph cluster_{b} {{")
        lines.append(f"    label={_q('stalk at ' + E.base.points[b])};")
        for t in bits(E.fiber_mask(b)):
            lines.append(f"    t{t} [label={_q(E.total.points[t])}, fillcolor={colour}];")
        lines.append("  }")
    for b in range(E.base.n):
        lines.append(f"  b{b} [label={_q(E.base.points[b])}, shape=box, fillcolor=white];")
    for t in range(E.total.n):
        lines.append(f"  t{t} -> b{E.proj[t]} [style=dashed, arrowhead=none];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_dot(obj, path: str | None = None) -> str:
    """Render ``obj`` (algebra, filter lattice, space or étalé space); write if ``path``."""
    if isinstance(obj, FinResLat):
        text = hasse_dot(obj)
    elif isinstance(obj, FilterLattice):
        text = filter_lattice_dot(obj)
    elif isinstance(obj, EtaleSpace):
        text = etale_dot(obj)
    elif isinstance(obj, FinTopSpace):
        text = specialization_dot(obj)
    else:
        raise TypeError(f"cannot render {type(obj).__name__} as DOT")
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text
