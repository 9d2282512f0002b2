import dataclasses
import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ckl.catalog import EXAMPLE_NAMES, load_example
from ckl.isoradial import check_isoradial
from ckl.kasteleyn import (
    KasteleynError,
    LaurentPoly2,
    assign_kasteleyn_signs,
    char_poly,
    enumerate_matchings,
    face_alternating_product,
    gauge_transform,
    kasteleyn_eval,
    partition_function_torus,
    planar_kasteleyn_det,
)
from ckl.lattices import honeycomb_lattice, square_lattice, triangular_lattice
from ckl.mahler import mahler_jensen
from ckl.periodic_graph import (
    Edge,
    FiniteGraph,
    NotBipartiteError,
    PeriodicGraph,
    Vertex,
    quotient,
    supercell,
    trace_faces,
)
from ckl.spanning_tree import temperley_lift

LIFTS = {name: load_example(name).dimer_graph for name in EXAMPLE_NAMES}
# windows of the cover that cut through different cells; some origins leave
# a patch with no matching at all, so several are used
ORIGINS = [(0.0, 0.0), (0.1, 0.1), (0.37, 0.61), (0.5, 0.25)]


def face_sign_ok(A, face):
    prod = 1
    for m in face.edges:
        prod *= A.sign[m]
    return prod == (-1) ** (face.degree // 2 + 1)


def test_honeycomb_signs_against_brute_force():
    H = honeycomb_lattice()
    (face,) = trace_faces(H)
    valid = [s for s in itertools.product((1, -1), repeat=3)
             if math.prod(s[m] for m in face.edges) == (-1) ** (face.degree // 2 + 1)]
    # each edge bounds the single hexagon twice, so every sign vector passes;
    # check that every one of them really is Kasteleyn on planar patches
    assert len(valid) == 8
    A = assign_kasteleyn_signs(H)
    assert A.sign in valid
    assert abs(kasteleyn_eval(H, A, 1, 1)) in (1.0, 3.0)
    for signs in valid:
        B = dataclasses.replace(A, sign=signs)
        for origin in ((0.1, 0.1), (0.4, 0.2)):
            det, patch = planar_kasteleyn_det(H, B, 3, origin)
            assert det == pytest.approx(float(enumerate_matchings(patch)), abs=1e-9)


@pytest.mark.parametrize("name", EXAMPLE_NAMES)
def test_sign_condition_on_all_faces(name):
    G = LIFTS[name]
    A = assign_kasteleyn_signs(G)
    assert all(face_sign_ok(A, f) for f in trace_faces(G))


def test_square_lift_faces_have_negative_products():
    G = LIFTS["weave"]
    A = assign_kasteleyn_signs(G)
    faces = trace_faces(quotient(G, 1))
    assert [f.degree for f in faces] == [4, 4, 4, 4]
    assert all(math.prod(A.sign[m] for m in f.edges) == -1 for f in faces)


def test_non_bipartite_rejected():
    with pytest.raises(NotBipartiteError):
        assign_kasteleyn_signs(supercell(triangular_lattice(), 2))


def test_unbalanced_rejected():
    G = PeriodicGraph("unbalanced", [Vertex("w", (0.0, 0.0), "white"), Vertex("b1", (0.5, 0.0), "black"),
                                      Vertex("b2", (0.0, 0.5), "black")],
                      [Edge("w", "b1"), Edge("w", "b2"), Edge("b1", "w", (1, 0)), Edge("b2", "w", (0, 1))])
    with pytest.raises(KasteleynError, match="unbalanced"):
        assign_kasteleyn_signs(G)


def test_honeycomb_char_poly_is_z_plus_w_minus_one_up_to_symmetry():
    H = honeycomb_lattice()
    P = char_poly(H, assign_kasteleyn_signs(H))
    assert len(P.terms) == 3
    assert sorted(abs(c) for c in P.terms.values()) == [1.0, 1.0, 1.0]
    assert mahler_jensen(P).value == pytest.approx(0.3230659472194505, abs=1e-12)


def test_single_edge_constant_polynomial():
    G = PeriodicGraph("edge", [Vertex("w", (0.0, 0.0)), Vertex("b", (0.5, 0.5))], [Edge("w", "b", (0, 0), 5.0)])
    P = char_poly(G, assign_kasteleyn_signs(G))
    assert P.terms in ({(0, 0): 5.0}, {(0, 0): -5.0})


@pytest.mark.parametrize("name", EXAMPLE_NAMES)
def test_char_poly_matches_direct_determinant(name):
    G = LIFTS[name]
    A = assign_kasteleyn_signs(G)
    P = char_poly(G, A)
    rng = np.random.default_rng(7)
    th = rng.uniform(0, 2 * np.pi, size=(2, 50))
    z, w = np.exp(1j * th[0]), np.exp(1j * th[1])
    direct = kasteleyn_eval(G, A, z, w)
    assert np.allclose(P(z, w), direct, rtol=1e-9, atol=1e-9 * np.abs(direct).max())


def test_weave_critical_polynomial_has_a_torus_node():
    E = check_isoradial(LIFTS["weave"])
    G = E.weighted_graph()
    A = assign_kasteleyn_signs(G)
    # with this sign and monomial convention the node sits at (-1, -1)
    assert abs(kasteleyn_eval(G, A, -1, -1)) < 1e-12
    assert abs(kasteleyn_eval(G, A, 1, 1)) == pytest.approx(16.0)


def test_enumerate_small_cases():
    assert enumerate_matchings(FiniteGraph(2, ((0, 1, 7),))) == 7
    cycle = FiniteGraph(4, ((0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1)))
    assert enumerate_matchings(cycle) == 2
    assert enumerate_matchings(FiniteGraph(3, ((0, 1, 1), (1, 2, 1)))) == 0
    frac = FiniteGraph(2, ((0, 1, Fraction(1, 3)), (0, 1, Fraction(1, 6))))
    assert enumerate_matchings(frac) == Fraction(1, 2)


def test_enumerate_size_limit():
    H = quotient(LIFTS["kite"], 2)
    with pytest.raises(MemoryError, match="size limit exceeded"):
        enumerate_matchings(H, max_states=50)


@given(st.lists(st.integers(0, 7), min_size=1, max_size=12), st.integers(4, 8))
def test_enumerate_matches_brute_force(edge_codes, n):
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    edges = tuple((*pairs[c * 3 % len(pairs)], c + 1) for c in edge_codes)
    H = FiniteGraph(n, edges)
    brute = 0
    for subset in itertools.combinations(range(len(edges)), n // 2):
        ends = [v for k in subset for v in edges[k][:2]]
        if len(set(ends)) == n and n % 2 == 0:
            brute += math.prod(edges[k][2] for k in subset)
    assert enumerate_matchings(H) == brute


def test_torus_partition_honeycomb_and_double_edge():
    H = honeycomb_lattice()
    assert partition_function_torus(H, assign_kasteleyn_signs(H)).value == pytest.approx(3.0)
    G = PeriodicGraph("double", [Vertex("w", (0.0, 0.0)), Vertex("b", (0.5, 0.0))],
                      [Edge("w", "b", (0, 0), 2.0), Edge("b", "w", (1, 0), 5.0)])
    assert partition_function_torus(G, assign_kasteleyn_signs(G)).value == pytest.approx(7.0)


@pytest.mark.parametrize("name", EXAMPLE_NAMES)
def test_four_term_formula_matches_enumeration(name):
    G = LIFTS[name]
    Z = partition_function_torus(G, assign_kasteleyn_signs(G))
    assert Z.value == pytest.approx(float(enumerate_matchings(quotient(G, 1))), rel=1e-9)
    assert sorted(Z.pattern) == [-1, 1, 1, 1]


@settings(max_examples=30)
@given(st.sampled_from(EXAMPLE_NAMES), st.lists(st.floats(0.25, 4.0), min_size=48, max_size=48))
def test_torus_pattern_is_weight_independent(name, ws):
    # the minus-sign slot is fitted at unit weights, then must hold for any weights
    G = LIFTS[name]
    A = assign_kasteleyn_signs(G)
    pattern = partition_function_torus(G, A).pattern
    Gw = G.with_weights(ws[: G.num_edges])
    vals = [complex(kasteleyn_eval(Gw, A, z, w)) for z, w in ((1, 1), (1, -1), (-1, 1), (-1, -1))]
    Z = 0.5 * abs(sum(e * v for e, v in zip(pattern, vals)))
    assert Z == pytest.approx(float(enumerate_matchings(quotient(Gw, 1))), rel=1e-9)


def test_four_term_formula_on_doubled_honeycomb():
    H2 = supercell(honeycomb_lattice(), 2)
    Z = partition_function_torus(H2, assign_kasteleyn_signs(H2))
    assert Z.value == pytest.approx(float(enumerate_matchings(quotient(honeycomb_lattice(), 2))))


@pytest.mark.parametrize("name", EXAMPLE_NAMES)
@pytest.mark.parametrize("n", [1, 2])
def test_planar_determinant_counts_matchings(name, n):
    G = LIFTS[name]
    A = assign_kasteleyn_signs(G)
    nontrivial = 0
    for origin in ORIGINS:
        det, patch = planar_kasteleyn_det(G, A, n, origin)
        count = float(enumerate_matchings(patch))
        assert det == pytest.approx(count, rel=1e-9, abs=1e-9)
        nontrivial += count > 1
    assert nontrivial > 0


def test_gauge_identity():
    G = LIFTS["nine"]
    H, shift = gauge_transform(G, {})
    assert shift == 0.0 and np.array_equal(H.weights, G.weights)
    with pytest.raises(ValueError):
        gauge_transform(G, {G.vertices[0].id: 0.0})


@pytest.mark.parametrize("name, face_factor, expected", [("triaxial", 1 / math.sqrt(3), -math.log(3)),
                                                       ("weave", 1 / math.sqrt(2), -math.log(2))])
def test_gauge_to_uniform(name, face_factor, expected):
    E = check_isoradial(LIFTS[name])
    crit = E.weighted_graph()
    if name == "triaxial":
        # the blue (sqrt 3) edges are exactly those at the two face vertices
        F = {v.id: face_factor for v in crit.vertices if v.id.startswith("f:")}
    else:
        F = {v.id: face_factor for v in crit.vertices if v.color == "black"}
    U, shift = gauge_transform(crit, F)
    assert np.allclose(U.weights, 1.0)
    assert shift == pytest.approx(expected, abs=1e-15)
    M_crit = mahler_jensen(char_poly(crit, assign_kasteleyn_signs(crit))).value
    M_unif = mahler_jensen(char_poly(U, assign_kasteleyn_signs(U))).value
    assert M_unif - M_crit == pytest.approx(shift, abs=1e-6)


@given(st.lists(st.floats(0.2, 5.0), min_size=24, max_size=24), st.sampled_from(["nine", "kite", "weave"]))
def test_gauge_preserves_alternating_products(factors, name):
    G = LIFTS[name]
    F = {v.id: f for v, f in zip(G.vertices, factors)}
    H, shift = gauge_transform(G, F)
    assert shift == pytest.approx(sum(math.log(F.get(v.id, 1.0)) for v in G.vertices))
    for fa, fb in zip(trace_faces(G), trace_faces(H)):
        assert face_alternating_product(H, fb) == pytest.approx(face_alternating_product(G, fa), rel=1e-12)


def test_alternating_product_values():
    G = LIFTS["weave"]
    face = next(f for f in trace_faces(G) if len(set(f.edges)) == 4)
    assert face_alternating_product(G, face) == 1.0
    start_white = G.colors[face.vertices[0]] == "white"
    w = list(G.weights)
    for m, val in zip(face.edges, (2.0, 1.0, 3.0, 1.0)):
        w[m] = val
    X = face_alternating_product(G.with_weights(w), face)
    assert X == pytest.approx(6.0 if start_white else 1 / 6.0)


def test_alternating_product_odd_face():
    T = triangular_lattice()
    with pytest.raises(ValueError):
        face_alternating_product(T, trace_faces(T)[0])


def test_laurent_serialization_and_monomials():
    P = LaurentPoly2.from_terms({(0, 0): 1.0, (1, 0): -2.0 + 1j, (-1, 2): 0.5})
    Q = LaurentPoly2.from_dict(P.to_dict())
    assert Q.terms == P.terms
    R = P.times_monomial(2, -1)
    assert set(R.terms) == {(2, -1), (3, -1), (1, 1)}
    z, w = 0.3 + 0.8j, -0.6 + 0.1j
    assert R(z, w) == pytest.approx(P(z, w) * z**2 / w)
    assert P.conjugate()(z, w) == pytest.approx(np.conj(P(np.conj(z), np.conj(w))))
    assert P.swapped()(w, z) == pytest.approx(P(z, w))
