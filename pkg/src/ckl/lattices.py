"""Constructions of periodic lattices from a few seeds.

The catalog lattices are built here once and frozen into ``ckl/data`` by
``tools/build_lattices.py``; the package reads the JSON files at run time.
"""

from __future__ import annotations

import math

import numpy as np

from .periodic_graph import Edge, GraphError, PeriodicGraph, Vertex, rotation_system, trace_faces

SQRT3 = math.sqrt(3.0)
HEX_BASIS = ((1.0, 0.0), (0.5, SQRT3 / 2.0))


class GraphBuilder:
    """Collects vertices by unwrapped position and edges between them."""

    def __init__(self, name, basis):
        self.name = name
        self.basis = basis
        self._pos: dict[str, np.ndarray] = {}
        self._color: dict[str, str | None] = {}
        self._edges: list[Edge] = []

    def add_vertex(self, vid, unwrapped, color=None):
        p = np.asarray(unwrapped, dtype=float)
        canon = p - np.floor(p + 1e-12)
        canon[np.abs(canon - 1.0) < 1e-12] = 0.0
        if vid in self._pos:
            if not np.allclose(self._pos[vid], canon, atol=1e-9):
                raise GraphError(f"vertex {vid!r} placed twice at different positions")
            return
        self._pos[vid] = canon
        self._color[vid] = color

    def cell(self, vid, unwrapped):
        off = np.asarray(unwrapped, dtype=float) - self._pos[vid]
        r = np.rint(off)
        if np.abs(off - r).max() > 1e-7:
            raise GraphError(f"point {unwrapped} is not a translate of vertex {vid!r}")
        return r.astype(int)

    def add_edge(self, a, pa, b, pb, weight=1.0):
        s = self.cell(b, pb) - self.cell(a, pa)
        self._edges.append(Edge(a, b, (int(s[0]), int(s[1])), float(weight)))

    def build(self) -> PeriodicGraph:
        verts = [Vertex(v, (float(p[0]), float(p[1])), self._color[v]) for v, p in self._pos.items()]
        return PeriodicGraph(self.name, verts, self._edges, self.basis)


def _ends(G: PeriodicGraph):
    """Per vertex, the incident edge ends as (edge index, unwrapped far endpoint)."""
    pos = {v.id: np.array(v.pos) for v in G.vertices}
    ends = {v.id: [] for v in G.vertices}
    for m, e in enumerate(G.edges):
        s = np.array(e.shift, dtype=float)
        ends[e.u].append((m, pos[e.v] + s))
        ends[e.v].append((m, pos[e.u] - s))
    return pos, ends


def square_lattice() -> PeriodicGraph:
    return PeriodicGraph("square", [Vertex("v0", (0.0, 0.0))], [Edge("v0", "v0", (1, 0)), Edge("v0", "v0", (0, 1))])


def triangular_lattice() -> PeriodicGraph:
    edges = [Edge("v0", "v0", (1, 0)), Edge("v0", "v0", (0, 1)), Edge("v0", "v0", (-1, 1))]
    return PeriodicGraph("triangular", [Vertex("v0", (0.0, 0.0))], edges, HEX_BASIS)


def honeycomb_lattice() -> PeriodicGraph:
    # bond vectors at 90, 210, 330 degrees from a; b = a + (1/3, 1/3)
    verts = [Vertex("a", (0.0, 0.0)), Vertex("b", (1.0 / 3.0, 1.0 / 3.0))]
    edges = [Edge("a", "b", (0, 0)), Edge("a", "b", (-1, 0)), Edge("a", "b", (0, -1))]
    return PeriodicGraph("honeycomb", verts, edges, HEX_BASIS)


def truncate(G: PeriodicGraph, t: float, name: str) -> PeriodicGraph:
    """Replace every vertex by a small polygon through its edge directions."""
    pos, _ = _ends(G)
    rot = rotation_system(G)
    B = GraphBuilder(name, G.basis)

    def end_id(vid, m, which):
        return f"{vid}.{m}{which}"

    # "u" marks the tail end of edge m, "v" the head end
    for m, e in enumerate(G.edges):
        s = np.array(e.shift, dtype=float)
        pu, pv = pos[e.u], pos[e.v] + s
        qa = pu + t * (pv - pu)
        qb = pv + t * (pu - pv)
        B.add_vertex(end_id(e.u, m, "u"), qa)
        B.add_vertex(end_id(e.v, m, "v"), qb)
        B.add_edge(end_id(e.u, m, "u"), qa, end_id(e.v, m, "v"), qb)
    for k, v in enumerate(G.vertices):
        # ccw cycle around v, through the dart order
        pts = []
        for d in rot[k]:
            m, fwd = d // 2, d % 2 == 0
            e = G.edges[m]
            s = np.array(e.shift, dtype=float)
            if fwd:
                q = pos[e.u] + t * (pos[e.v] + s - pos[e.u])
                pts.append((end_id(e.u, m, "u"), q))
            else:
                q = pos[e.v] + t * (pos[e.u] - s - pos[e.v])
                pts.append((end_id(e.v, m, "v"), q))
        if len(pts) < 3:
            raise GraphError("truncation needs vertex degree >= 3")
        for (a, pa), (b, pb) in zip(pts, pts[1:] + pts[:1]):
            B.add_edge(a, pa, b, pb)
    return B.build()


def line_graph(G: PeriodicGraph, name: str) -> PeriodicGraph:
    """Vertices at edge midpoints; two joined when their edges share an endpoint."""
    pos, ends = _ends(G)
    B = GraphBuilder(name, G.basis)
    for v in G.vertices:
        mids = [(f"e{m}", (pos[v.id] + far) / 2.0) for m, far in ends[v.id]]
        for mid_id, p in mids:
            B.add_vertex(mid_id, p)
        for i in range(len(mids)):
            for j in range(i + 1, len(mids)):
                B.add_edge(mids[i][0], mids[i][1], mids[j][0], mids[j][1])
    return B.build()


def stellate_face(G: PeriodicGraph, face_index: int, name: str) -> PeriodicGraph:
    """Add a vertex at the centroid of one face, joined to all its corners."""
    faces = trace_faces(G)
    f = faces[face_index]
    pos = {v.id: np.array(v.pos) for v in G.vertices}
    corners = [pos[vid] + np.array(off, dtype=float) for vid, off in zip(f.vertices, f.offsets)]
    center = np.mean(corners, axis=0)
    B = GraphBuilder(name, G.basis)
    for v in G.vertices:
        B.add_vertex(v.id, pos[v.id])
    for e in G.edges:
        B.add_edge(e.u, pos[e.u], e.v, pos[e.v] + np.array(e.shift, dtype=float))
    B.add_vertex("c", center)
    for vid, p in zip(f.vertices, corners):
        B.add_edge("c", center, vid, p)
    return B.build()


def four_eight_eight() -> PeriodicGraph:
    return truncate(square_lattice(), 1.0 / (2.0 + math.sqrt(2.0)), "four-eight-eight")


def three_twelve_twelve() -> PeriodicGraph:
    # honeycomb bond length is 1/sqrt(3) in this basis; the ratio t is scale free
    return truncate(honeycomb_lattice(), 1.0 / (2.0 + SQRT3), "three-twelve-twelve")


def kagome_lattice() -> PeriodicGraph:
    return line_graph(honeycomb_lattice(), "kagome")


def kite_lattice() -> PeriodicGraph:
    return line_graph(four_eight_eight(), "kite")


def nine_lattice() -> PeriodicGraph:
    return stellate_face(triangular_lattice(), 0, "nine")


TAIT_LATTICES = {
    "square": square_lattice,
    "triangular": triangular_lattice,
    "honeycomb": honeycomb_lattice,
    "kagome": kagome_lattice,
    "three-twelve-twelve": three_twelve_twelve,
    "nine": nine_lattice,
    "four-eight-eight": four_eight_eight,
    "kite": kite_lattice,
}
