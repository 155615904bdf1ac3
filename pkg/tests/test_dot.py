import re

from rlsheaf import fixtures as fx
from rlsheaf.dot import export_dot, filter_lattice_dot, hasse_dot, specialization_dot
from rlsheaf.sheafify import etale_of_presheaf
from rlsheaf.spectra import enumerate_filters
from rlsheaf.topology import FinTopSpace

import pytest


def counts(text):
    nodes = len(re.findall(r"^\s+[nt]\d+ \[label=", text, re.M)) + len(re.findall(r"^\s+b\d+ \[label=", text, re.M))
    edges = len(re.findall(r"->", text))
    return nodes, edges


def test_hasse_of_a6():
    text = hasse_dot(fx.algebra("a6"))
    assert counts(text) == (6, 6)
    assert text == hasse_dot(fx.algebra("a6"))


def test_chain_has_linear_hasse_diagram():
    assert counts(hasse_dot(fx.algebra("L3"))) == (4, 3)


def test_filter_lattice_of_a8():
    text = filter_lattice_dot(enumerate_filters(fx.algebra("a8")))
    nodes, _ = counts(text)
    assert nodes == 5 and '"F1 = {1}"' in text


def test_specialization_of_sierpinski():
    text = specialization_dot(FinTopSpace.sierpinski())
    assert counts(text) == (2, 1)


def test_etale_space_drawing():
    E = etale_of_presheaf(fx.presheaf("sierpinski_fuzzy(1)")).etale
    text = export_dot(E)
    assert text.count("subgraph cluster_") == 2
    assert text.count("style=dashed") == E.total.n


def test_write_and_reject(tmp_path):
    path = tmp_path / "a4.dot"
    text = export_dot(fx.algebra("a4"), str(path))
    assert path.read_text() == text
    with pytest.raises(TypeError):
        export_dot(42)


def test_quotes_are_escaped():
    A = fx.algebra("L1")
    A.name = 'say "hi"'
    assert 'digraph "say \\"hi\\""' in hasse_dot(A)
