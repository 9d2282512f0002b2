import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ckl.lattices import TAIT_LATTICES, honeycomb_lattice, square_lattice, triangular_lattice
from ckl.periodic_graph import (
    Edge,
    GraphError,
    NotBipartiteError,
    PeriodicGraph,
    Vertex,
    cut_open,
    graph_to_dict,
    is_connected,
    link_face_degrees,
    load_graph,
    quotient,
    save_graph,
    supercell,
    trace_faces,
    validate_bipartite,
)
from ckl.spanning_tree import temperley_lift

HONEYCOMB_FILE = {
    "name": "honeycomb",
    "vertices": [{"id": "v0", "pos": [0.0, 0.0]}, {"id": "v1", "pos": [0.5, 0.5]}],
    "edges": [
        {"u": "v0", "v": "v1", "shift": [0, 0]},
        {"u": "v1", "v": "v0", "shift": [1, 0]},
        {"u": "v1", "v": "v0", "shift": [0, 1]},
    ],
}


def test_load_honeycomb_file():
    G = load_graph(json.dumps(HONEYCOMB_FILE))
    assert G.num_vertices == 2 and G.num_edges == 3
    assert [f.degree for f in trace_faces(G)] == [6]


def test_positions_are_normalized_and_geometry_kept():
    # the same honeycomb with v1 written one cell up and right
    data = json.loads(json.dumps(HONEYCOMB_FILE))
    data["vertices"][1]["pos"] = [1.5, 1.5]
    for e, s in zip(data["edges"], ([-1, -1], [2, 1], [1, 2])):
        e["shift"] = s
    G = load_graph(json.dumps(data))
    assert G.vertices[G.index["v1"]].pos == (0.5, 0.5)
    assert graph_to_dict(G) == graph_to_dict(load_graph(json.dumps(HONEYCOMB_FILE)))


@pytest.mark.parametrize(
    "mutate, message",
    [
        (lambda d: d["edges"].append({"u": "v0", "v": "x9"}), "unknown endpoint"),
        (lambda d: d["edges"][0].update(weight=0), "nonpositive weight"),
        (lambda d: d["edges"][0].update(weight=-1.5), "nonpositive weight"),
        (lambda d: d["vertices"].append({"id": "v0", "pos": [0.2, 0.2]}), "duplicate vertex id"),
        (lambda d: d["edges"][0].update(shift=[1]), "malformed shift"),
        (lambda d: d["edges"][0].update(shift=[0.5, 0]), "malformed shift"),
        (lambda d: d.pop("edges"), "missing key"),
    ],
)
def test_load_errors(mutate, message):
    data = json.loads(json.dumps(HONEYCOMB_FILE))
    mutate(data)
    with pytest.raises(GraphError, match=message):
        load_graph(json.dumps(data))


def test_load_rejects_disconnected_and_bad_json():
    data = json.loads(json.dumps(HONEYCOMB_FILE))
    data["edges"] = data["edges"][:1]
    with pytest.raises(GraphError, match="not connected"):
        load_graph(json.dumps(data))
    with pytest.raises(GraphError):
        load_graph("{not json")


@pytest.mark.parametrize("name", sorted(TAIT_LATTICES))
def test_round_trip(name):
    G = TAIT_LATTICES[name]()
    H = load_graph(save_graph(G))
    assert graph_to_dict(H) == graph_to_dict(G)


@pytest.mark.parametrize(
    "G, n, nv, ne",
    [(square_lattice(), 2, 4, 8), (honeycomb_lattice(), 1, 2, 3), (triangular_lattice(), 3, 9, 27)],
)
def test_quotient_counts(G, n, nv, ne):
    Q = quotient(G, n)
    assert (Q.num_vertices, len(Q.edges)) == (nv, ne)


def test_honeycomb_quotient_is_multigraph():
    Q = quotient(honeycomb_lattice(), 1)
    assert sorted((a, b) for a, b, _ in Q.edges) == [(0, 1)] * 3


@given(st.sampled_from(sorted(TAIT_LATTICES)), st.integers(1, 4))
def test_quotient_scaling_and_euler(name, n):
    G = TAIT_LATTICES[name]()
    Q = quotient(G, n)
    assert Q.num_vertices == n * n * G.num_vertices
    assert len(Q.edges) == n * n * G.num_edges
    F = len(trace_faces(Q))
    assert Q.num_vertices - len(Q.edges) + F == 0
    assert is_connected(Q)


def test_small_face_counts():
    assert [f.degree for f in trace_faces(quotient(square_lattice(), 1))] == [4]
    assert [f.degree for f in trace_faces(quotient(honeycomb_lattice(), 1))] == [6]
    lift = temperley_lift(square_lattice())
    assert sorted(f.degree for f in trace_faces(quotient(lift, 1))) == [4, 4, 4, 4]


def test_faces_are_closed_walks():
    for name, build in TAIT_LATTICES.items():
        for f in trace_faces(build()):
            assert f.translation == (0, 0), name


def test_coincident_directions_rejected():
    G = PeriodicGraph("bad", [Vertex("a", (0.0, 0.0)), Vertex("b", (0.25, 0.0))],
                      [Edge("a", "b", (0, 0)), Edge("a", "b", (1, 0)), Edge("a", "b", (2, 0))])
    with pytest.raises(GraphError, match="coincident"):
        trace_faces(G)


def test_graph_validation():
    with pytest.raises(GraphError, match="loop"):
        PeriodicGraph("x", [Vertex("a", (0.0, 0.0))], [Edge("a", "a", (0, 0))])
    with pytest.raises(GraphError, match="basis"):
        PeriodicGraph("x", [Vertex("a", (0.0, 0.0))], [Edge("a", "a", (1, 0))], ((0.0, 1.0), (1.0, 0.0)))


def test_validate_bipartite_examples():
    colors = validate_bipartite(HONEYCOMB_GRAPH())
    assert colors == {"v0": "white", "v1": "black"}
    with pytest.raises(NotBipartiteError) as info:
        validate_bipartite(supercell(triangular_lattice(), 2))
    assert len(info.value.cycle) % 2 == 1


def HONEYCOMB_GRAPH():
    return load_graph(json.dumps(HONEYCOMB_FILE))


def test_validate_bipartite_idempotent_with_colors():
    G = HONEYCOMB_GRAPH()
    colored = G.with_colors(validate_bipartite(G))
    assert validate_bipartite(colored) == validate_bipartite(G)
    wrong = G.with_colors({"v0": "white", "v1": "white"})
    with pytest.raises(NotBipartiteError):
        validate_bipartite(wrong)


@pytest.mark.parametrize("name", sorted(TAIT_LATTICES))
def test_lift_is_bipartite(name):
    lift = temperley_lift(TAIT_LATTICES[name]())
    colors = validate_bipartite(lift)
    assert list(colors.values()).count("white") * 2 == lift.num_vertices


@pytest.mark.parametrize("name", sorted(TAIT_LATTICES))
def test_bipartite_iff_even_faces(name):
    # one-vertex lattices are never bipartite in a single cell, so the
    # criterion is read on the doubled fundamental domain
    for G in (TAIT_LATTICES[name](), temperley_lift(TAIT_LATTICES[name]())):
        even = all(f.degree % 2 == 0 for f in trace_faces(quotient(G, 2)))
        try:
            validate_bipartite(supercell(G, 2))
            ok = True
        except NotBipartiteError:
            ok = False
        assert ok == even


def test_cut_open_patch():
    H = cut_open(square_lattice(), 3)
    assert H.num_vertices == 9
    assert len(H.edges) == 12  # 3x3 grid graph
    H2 = cut_open(honeycomb_lattice(), 2, origin=(0.1, 0.1))
    assert H2.num_vertices == 8


def test_supercell_preserves_faces():
    G = TAIT_LATTICES["kagome"]()
    S = supercell(G, 2)
    assert sorted(f.degree for f in trace_faces(S)) == sorted(f.degree for f in trace_faces(quotient(G, 2)))
    assert np.allclose(np.array(S.basis), 2 * np.array(G.basis))


def test_link_face_degrees():
    assert link_face_degrees(triangular_lattice()) == [6, 3, 3]
    assert link_face_degrees(square_lattice()) == [4, 4]
    assert link_face_degrees(TAIT_LATTICES["nine"]()) == [9, 3, 3, 3, 3, 3]
