import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from cpodpo.graph import (DisconnectedError, DuplicateEdgeError, GraphError, GraphParseError, LoopError,
                          Parameters, ParameterError, PeriodicGraph, SpanError, dense_graph, graph_from_dict,
                          parameters_from_dict, parse_graph, random_parameters, serialize_graph, support)

from conftest import DATA, graph

DIAMOND = [(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)]


def test_hexagonal_file(hexagonal):
    assert hexagonal.m == 2
    assert len(hexagonal.edges) == 3


def test_hexagonal_support_columns(hexagonal):
    assert support(hexagonal) == set(DIAMOND)


def test_dimer_support_matches_hexagonal():
    assert support(graph("dimer")) == set(DIAMOND)


def test_square_lattice():
    g = graph("square")
    assert g.m == 1
    assert support(g) == {(1, 0), (-1, 0), (0, 1), (0, -1)}


def test_loop_rejected():
    with pytest.raises(LoopError):
        parse_graph((DATA / "loop.json").read_text())


def test_duplicate_orbit_rejected():
    # (v, u, (1, 0)) is the same orbit as (u, v, (-1, 0))
    with pytest.raises(DuplicateEdgeError):
        PeriodicGraph(2, ("u", "v"), ((0, 1, (-1, 0)), (1, 0, (1, 0)), (0, 1, (0, 1))))


def test_canonical_orientation():
    g = PeriodicGraph(1, ("u", "v"), ((1, 0, (1,)), (0, 0, (-2,))))
    assert (0, 1, (-1,)) in g.edges
    assert (0, 0, (2,)) in g.edges


def test_disconnected_quotient():
    with pytest.raises(DisconnectedError):
        PeriodicGraph(1, ("u", "v"), ((0, 0, (1,)),))


def test_span_deficit():
    with pytest.raises(SpanError):
        PeriodicGraph(1, ("u",), ((0, 0, (2,)),))
    with pytest.raises(SpanError):
        PeriodicGraph(2, ("u",), ((0, 0, (1, 0)),))


def test_parse_errors():
    with pytest.raises(GraphParseError):
        parse_graph("{not json")
    with pytest.raises(GraphParseError):
        graph_from_dict({"dimension": 1, "vertices": ["u"]})
    with pytest.raises(GraphParseError):
        graph_from_dict({"dimension": 1, "vertices": ["u"], "edges": [{"from": "u", "to": "x", "offset": [1]}]})
    with pytest.raises(GraphParseError):
        graph_from_dict({"dimension": 1, "vertices": ["u"], "edges": [{"from": "u", "to": "u", "offset": [1, 0]}]})


def test_dense_dimer_orbit_count():
    g = dense_graph(2, 2, DIAMOND)
    assert len(g.edges) == 9
    assert support(g) == set(DIAMOND)


def test_dense_square_lattice():
    g = dense_graph(2, 1, [(1, 0), (-1, 0), (0, 1), (0, -1)])
    assert len(g.edges) == 2


def test_dense_graph_needs_symmetry():
    with pytest.raises(GraphError):
        dense_graph(2, 2, [(0, 0), (1, 0), (0, 1), (0, -1)])


def test_random_parameters_deterministic(hexagonal):
    assert random_parameters(hexagonal, 7) == random_parameters(hexagonal, 7)
    assert random_parameters(hexagonal, 7) != random_parameters(hexagonal, 8)


def test_random_complex_shape():
    g = graph("dimer")
    c = random_parameters(g, 1, "complex")
    assert len(c.weights) == 9 and len(c.potentials) == 2
    assert all(x != 0 for x in c.weights + c.potentials)
    assert not c.is_real


def test_parameters_roundtrip(hexagonal):
    c = random_parameters(hexagonal, 3)
    assert parameters_from_dict(hexagonal, json.loads(json.dumps(c.to_json(hexagonal)))) == c


def test_parameter_errors(hexagonal):
    with pytest.raises(ParameterError):
        parameters_from_dict(hexagonal, {"weights": {}, "potentials": {"u": "0", "v": "0"}})
    good = random_parameters(hexagonal, 1).to_json(hexagonal)
    good["weights"]["u|v|5,5"] = "1"
    with pytest.raises(ParameterError):
        parameters_from_dict(hexagonal, good)
    with pytest.raises(ParameterError):
        Parameters((Fraction(1),), (Fraction(0), Fraction(0))).check(hexagonal)


offsets = st.tuples(st.integers(-2, 2), st.integers(-2, 2))


@st.composite
def graphs(draw):
    m = draw(st.integers(1, 3))
    raw = draw(st.lists(st.tuples(st.integers(0, m - 1), st.integers(0, m - 1), offsets), min_size=1, max_size=8))
    # always include a spanning skeleton so most draws are valid
    base = [(0, 0, (1, 0)), (0, 0, (0, 1))] + [(0, k, (0, 0)) for k in range(1, m)]
    edges, seen = [], set()
    from cpodpo.graph import canonical_orbit
    for u, v, a in base + raw:
        if u == v and a == (0, 0):
            continue
        key = canonical_orbit(u, v, a)
        if key not in seen:
            seen.add(key)
            edges.append((u, v, a))
    return PeriodicGraph(2, tuple(f"v{i}" for i in range(m)), tuple(edges))


@given(graphs())
def test_support_symmetric(g):
    A = support(g)
    assert A == {tuple(-x for x in a) for a in A}


@given(graphs())
def test_serialize_roundtrip(g):
    assert parse_graph(serialize_graph(g)) == g


@given(st.sets(offsets, min_size=1, max_size=6), st.integers(1, 3))
def test_dense_graph_support_roundtrip(S, m):
    A = set(S) | {tuple(-x for x in a) for a in S} | {(1, 0), (-1, 0), (0, 1), (0, -1)}
    g = dense_graph(2, m, A)
    expected = A if m > 1 else A - {(0, 0)}
    assert support(g) == expected
