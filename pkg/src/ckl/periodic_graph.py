"""Z^2-periodic embedded graphs, torus quotients and face tracing.

A periodic graph is stored by one fundamental domain.  Vertex positions are
fractional coordinates in [0, 1)^2; an edge ``(u, v, shift)`` joins ``u`` in
cell (0, 0) to the copy of ``v`` in cell ``shift``.  The optional ``basis``
(rows are the two lattice vectors) maps fractional coordinates to the
Euclidean plane.  Only metric computations use it; combinatorics only needs
the cyclic order of edges at each vertex, which any orientation-preserving
basis keeps.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

__all__ = [
    "GraphError",
    "NotBipartiteError",
    "Vertex",
    "Edge",
    "PeriodicGraph",
    "FiniteGraph",
    "TorusGraph",
    "Face",
    "load_graph",
    "save_graph",
    "graph_from_dict",
    "graph_to_dict",
    "quotient",
    "supercell",
    "cut_open",
    "trace_faces",
    "validate_bipartite",
    "is_connected",
    "link_face_degrees",
    "rotation_system",
]

IDENTITY_BASIS = ((1.0, 0.0), (0.0, 1.0))


class GraphError(ValueError):
    """Malformed or inconsistent graph data."""


class NotBipartiteError(GraphError):
    def __init__(self, message, cycle):
        super().__init__(message)
        self.cycle = cycle


@dataclass(frozen=True)
class Vertex:
    id: str
    pos: tuple[float, float]
    color: str | None = None


@dataclass(frozen=True)
class Edge:
    u: str
    v: str
    shift: tuple[int, int] = (0, 0)
    weight: float = 1.0


@dataclass(frozen=True)
class PeriodicGraph:
    name: str
    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...]
    basis: tuple[tuple[float, float], tuple[float, float]] = IDENTITY_BASIS

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))
        b = tuple(tuple(float(x) for x in row) for row in self.basis)
        object.__setattr__(self, "basis", b)
        seen = set()
        for v in self.vertices:
            if v.id in seen:
                raise GraphError(f"duplicate vertex id {v.id!r}")
            seen.add(v.id)
            if v.color not in (None, "black", "white"):
                raise GraphError(f"bad color {v.color!r} on vertex {v.id!r}")
        for e in self.edges:
            for end in (e.u, e.v):
                if end not in seen:
                    raise GraphError(f"unknown endpoint {end!r}")
            if not (e.weight > 0.0) or not math.isfinite(e.weight):
                raise GraphError(f"nonpositive weight {e.weight!r} on edge {e.u}-{e.v}")
            if e.u == e.v and tuple(e.shift) == (0, 0):
                raise GraphError(f"loop edge at {e.u!r}")
        if np.linalg.det(np.array(b)) <= 0.0:
            raise GraphError("basis must be positively oriented")

    # -- lookups ---------------------------------------------------------
    @property
    def index(self) -> dict[str, int]:
        return {v.id: i for i, v in enumerate(self.vertices)}

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def positions(self) -> np.ndarray:
        return np.array([v.pos for v in self.vertices], dtype=float)

    @property
    def weights(self) -> np.ndarray:
        return np.array([e.weight for e in self.edges], dtype=float)

    @property
    def shifts(self) -> np.ndarray:
        return np.array([e.shift for e in self.edges], dtype=int).reshape(-1, 2)

    @property
    def colors(self) -> dict[str, str | None]:
        return {v.id: v.color for v in self.vertices}

    def to_cartesian(self, frac) -> np.ndarray:
        return np.asarray(frac, dtype=float) @ np.array(self.basis)

    def with_weights(self, weights: Sequence[float], name: str | None = None) -> "PeriodicGraph":
        if len(weights) != len(self.edges):
            raise GraphError("weight vector length does not match edge count")
        edges = tuple(Edge(e.u, e.v, e.shift, float(w)) for e, w in zip(self.edges, weights))
        return PeriodicGraph(name or self.name, self.vertices, edges, self.basis)

    def with_colors(self, colors: dict[str, str]) -> "PeriodicGraph":
        verts = tuple(Vertex(v.id, v.pos, colors[v.id]) for v in self.vertices)
        return PeriodicGraph(self.name, verts, self.edges, self.basis)

    def uniform(self) -> "PeriodicGraph":
        return self.with_weights([1.0] * len(self.edges))


# -- serialization -----------------------------------------------------------


def _parse_shift(raw) -> tuple[int, int]:
    if not isinstance(raw, (list, tuple)) or len(raw) != 2:
        raise GraphError(f"malformed shift {raw!r}")
    out = []
    for x in raw:
        if isinstance(x, bool) or not isinstance(x, (int, float)) or int(x) != x:
            raise GraphError(f"malformed shift {raw!r}")
        out.append(int(x))
    return (out[0], out[1])


def graph_from_dict(data: dict) -> PeriodicGraph:
    try:
        raw_vertices = data["vertices"]
        raw_edges = data["edges"]
    except (KeyError, TypeError) as exc:
        raise GraphError(f"missing key {exc}") from None
    offsets = {}
    vertices = []
    for rv in raw_vertices:
        x, y = (float(c) for c in rv["pos"])
        fx, fy = math.floor(x), math.floor(y)
        vid = str(rv["id"])
        if vid in offsets:
            raise GraphError(f"duplicate vertex id {vid!r}")
        offsets[vid] = (fx, fy)
        vertices.append(Vertex(vid, (x - fx, y - fy), rv.get("color")))
    edges = []
    for re_ in raw_edges:
        u, v = str(re_["u"]), str(re_["v"])
        for end in (u, v):
            if end not in offsets:
                raise GraphError(f"unknown endpoint {end!r}")
        a, b = _parse_shift(re_.get("shift", [0, 0]))
        # keep the geometric edge vector after wrapping positions into [0,1)
        a += offsets[v][0] - offsets[u][0]
        b += offsets[v][1] - offsets[u][1]
        w = re_.get("weight", 1.0)
        if isinstance(w, bool) or not isinstance(w, (int, float)):
            raise GraphError(f"nonpositive weight {w!r}")
        edges.append(Edge(u, v, (a, b), float(w)))
    basis = data.get("basis", IDENTITY_BASIS)
    return PeriodicGraph(str(data.get("name", "graph")), vertices, edges, basis)


def graph_to_dict(G: PeriodicGraph) -> dict:
    out = {
        "name": G.name,
        "vertices": [{"id": v.id, "pos": list(v.pos), "color": v.color} for v in G.vertices],
        "edges": [
            {"u": e.u, "v": e.v, "shift": list(e.shift), "weight": e.weight} for e in G.edges
        ],
    }
    if G.basis != IDENTITY_BASIS:
        out["basis"] = [list(r) for r in G.basis]
    return out


def load_graph(text: str) -> PeriodicGraph:
    """Parse the JSON graph format and validate it."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphError(f"not valid JSON: {exc}") from None
    G = graph_from_dict(data)
    if G.num_vertices and not is_connected(quotient(G, 3)):
        raise GraphError(f"periodic graph {G.name!r} is not connected")
    return G


def save_graph(G: PeriodicGraph) -> str:
    return json.dumps(graph_to_dict(G), indent=1)


# -- finite graphs -------------------------------------------------------------


@dataclass(frozen=True)
class FiniteGraph:
    """Finite multigraph on vertices 0..num_vertices-1."""

    num_vertices: int
    edges: tuple[tuple[int, int, float], ...]
    labels: tuple = ()
    positions: np.ndarray | None = field(default=None, compare=False)
    colors: tuple = ()

    def adjacency(self) -> list[list[tuple[int, float]]]:
        adj = [[] for _ in range(self.num_vertices)]
        for a, b, w in self.edges:
            adj[a].append((b, w))
            if a != b:
                adj[b].append((a, w))
        return adj


@dataclass(frozen=True)
class TorusGraph(FiniteGraph):
    """Quotient of a periodic graph by n Z^2.

    Vertex ``k`` is ``labels[k] = (cell, base_id)``; edge ``m`` of the torus
    comes from base edge ``base_edge[m]``.
    """

    n: int = 1
    graph: PeriodicGraph | None = field(default=None, compare=False)
    base_edge: tuple[int, ...] = ()


def _cell_index(n, i, j):
    return (i % n) * n + (j % n)


def quotient(G: PeriodicGraph, n: int) -> TorusGraph:
    if int(n) != n or n < 1:
        raise ValueError("n must be a positive integer")
    nv = G.num_vertices
    idx = G.index
    labels = []
    for i in range(n):
        for j in range(n):
            for v in G.vertices:
                labels.append(((i, j), v.id))
    edges, base = [], []
    for i in range(n):
        for j in range(n):
            c = _cell_index(n, i, j)
            for m, e in enumerate(G.edges):
                a = c * nv + idx[e.u]
                b = _cell_index(n, i + e.shift[0], j + e.shift[1]) * nv + idx[e.v]
                edges.append((a, b, e.weight))
                base.append(m)
    colors = tuple(v.color for v in G.vertices) * (n * n)
    pos = np.array([(np.array(G.vertices[k % nv].pos) + lab[0]) / n for k, lab in enumerate(labels)]).reshape(-1, 2)
    return TorusGraph(len(labels), tuple(edges), tuple(labels), pos, colors, n, G, tuple(base))


def supercell(G: PeriodicGraph, n: int) -> PeriodicGraph:
    """The same periodic graph with an n x n block as fundamental domain."""
    if n == 1:
        return G
    verts = []
    for i in range(n):
        for j in range(n):
            for v in G.vertices:
                pos = ((v.pos[0] + i) / n, (v.pos[1] + j) / n)
                verts.append(Vertex(f"{v.id}@{i},{j}", pos, v.color))
    edges = []
    for i in range(n):
        for j in range(n):
            for e in G.edges:
                ti, tj = i + e.shift[0], j + e.shift[1]
                edges.append(
                    Edge(f"{e.u}@{i},{j}", f"{e.v}@{ti % n},{tj % n}", (ti // n, tj // n), e.weight)
                )
    basis = tuple(tuple(n * x for x in row) for row in G.basis)
    return PeriodicGraph(f"{G.name}x{n}", verts, edges, basis)


def cut_open(G: PeriodicGraph, n: int, origin=(0.0, 0.0)) -> TorusGraph:
    """Planar patch of the cover: vertex copies inside the window
    ``origin + [0, n)^2`` (fractional coordinates) and the edges among them.

    With the default origin this is the n x n torus quotient minus every
    wrapping edge.  Labels are ``(cell, base_id)`` with unwrapped cells.
    """
    ox, oy = float(origin[0]), float(origin[1])
    lo_i, lo_j = math.floor(ox) - 1, math.floor(oy) - 1
    labels, pos, colors = [], [], []
    where = {}
    for i in range(lo_i, lo_i + n + 3):
        for j in range(lo_j, lo_j + n + 3):
            for v in G.vertices:
                x, y = v.pos[0] + i, v.pos[1] + j
                if ox <= x < ox + n and oy <= y < oy + n:
                    where[((i, j), v.id)] = len(labels)
                    labels.append(((i, j), v.id))
                    pos.append((x, y))
                    colors.append(v.color)
    edges, base = [], []
    for (cell, vid), a in where.items():
        for m, e in enumerate(G.edges):
            if e.u != vid:
                continue
            b = where.get(((cell[0] + e.shift[0], cell[1] + e.shift[1]), e.v))
            if b is not None:
                edges.append((a, b, e.weight))
                base.append(m)
    return TorusGraph(
        len(labels), tuple(edges), tuple(labels), np.array(pos, dtype=float).reshape(-1, 2),
        tuple(colors), n, G, tuple(base),
    )


def is_connected(H: FiniteGraph) -> bool:
    if H.num_vertices == 0:
        return True
    adj = H.adjacency()
    seen = [False] * H.num_vertices
    seen[0] = True
    stack = [0]
    while stack:
        a = stack.pop()
        for b, _ in adj[a]:
            if not seen[b]:
                seen[b] = True
                stack.append(b)
    return all(seen)


# -- faces -----------------------------------------------------------------------


@dataclass(frozen=True)
class Face:
    """A face as a closed walk of darts.

    Dart ``2m`` runs along edge ``m`` from ``u`` to ``v``; dart ``2m+1`` runs
    backwards.  ``vertices[k]`` is the tail of ``darts[k]`` and sits in cell
    ``offsets[k]`` relative to the start of the walk.
    """

    darts: tuple[int, ...]
    vertices: tuple[str, ...]
    offsets: tuple[tuple[int, int], ...]
    translation: tuple[int, int]

    @property
    def degree(self) -> int:
        return len(self.darts)

    @property
    def edges(self) -> tuple[int, ...]:
        return tuple(d // 2 for d in self.darts)


def _dart_geometry(G: PeriodicGraph):
    idx = G.index
    tails, heads, shifts = [], [], []
    for e in G.edges:
        tails += [idx[e.u], idx[e.v]]
        heads += [idx[e.v], idx[e.u]]
        s = tuple(e.shift)
        shifts += [s, (-s[0], -s[1])]
    return np.array(tails, dtype=int), np.array(heads, dtype=int), np.array(shifts, dtype=int).reshape(-1, 2)


def rotation_system(G: PeriodicGraph) -> list[list[int]]:
    """Darts leaving each vertex, sorted counterclockwise by direction."""
    tails, heads, shifts = _dart_geometry(G)
    pos = G.positions
    vec = G.to_cartesian(pos[heads] + shifts - pos[tails]) if len(tails) else np.zeros((0, 2))
    ang = np.arctan2(vec[:, 1], vec[:, 0]) if len(tails) else np.zeros(0)
    rot = [[] for _ in range(G.num_vertices)]
    for d in np.argsort(ang, kind="stable"):
        rot[tails[d]].append(int(d))
    for v, darts in enumerate(rot):
        if len(darts) < 2:
            continue
        a = ang[darts]
        gaps = np.diff(np.append(a, a[0] + 2 * math.pi))
        if gaps.min() < 1e-12:
            raise GraphError(f"coincident edge directions at vertex {G.vertices[v].id!r}")
    return rot


def trace_faces(G: PeriodicGraph | TorusGraph) -> list[Face]:
    """Faces of the cellular embedding on the torus.

    Each face is traced with the face on the left of every dart.
    """
    if isinstance(G, TorusGraph):
        if G.graph is None:
            raise GraphError("torus graph lacks its periodic parent")
        G = supercell(G.graph, G.n)
    rot = rotation_system(G)
    tails, heads, shifts = _dart_geometry(G)
    pos_in_rot = {}
    for darts in rot:
        for k, d in enumerate(darts):
            pos_in_rot[d] = k

    def successor(d):
        # predecessor of the reverse dart in counterclockwise order
        r = d ^ 1
        v = heads[d]
        k = pos_in_rot[r]
        return rot[v][k - 1]

    used = np.zeros(len(tails), dtype=bool)
    ids = [v.id for v in G.vertices]
    faces = []
    for start in range(len(tails)):
        if used[start]:
            continue
        darts, verts, offs = [], [], []
        cur = (0, 0)
        d = start
        while not used[d]:
            used[d] = True
            darts.append(d)
            verts.append(ids[tails[d]])
            offs.append(cur)
            cur = (cur[0] + int(shifts[d][0]), cur[1] + int(shifts[d][1]))
            d = successor(d)
        if d != start:
            raise GraphError("face tracing did not close; embedding is inconsistent")
        faces.append(Face(tuple(darts), tuple(verts), tuple(offs), cur))
    return faces


# -- bipartiteness -----------------------------------------------------------------


def validate_bipartite(G: PeriodicGraph) -> dict[str, str]:
    """A periodic black/white coloring, or NotBipartiteError with an odd cycle."""
    ids = [v.id for v in G.vertices]
    adj = {v: [] for v in ids}
    for e in G.edges:
        adj[e.u].append(e.v)
        adj[e.v].append(e.u)
    given = G.colors
    if all(c is not None for c in given.values()) and ids:
        for e in G.edges:
            if given[e.u] == given[e.v]:
                raise NotBipartiteError(f"edge {e.u}-{e.v} joins two {given[e.u]} vertices", [e.u, e.v])
        return dict(given)

    color: dict[str, int] = {}
    parent: dict[str, str | None] = {}
    for root in ids:
        if root in color:
            continue
        color[root] = 0
        parent[root] = None
        queue = deque([root])
        while queue:
            a = queue.popleft()
            for b in adj[a]:
                if b not in color:
                    color[b] = 1 - color[a]
                    parent[b] = a
                    queue.append(b)
                elif color[b] == color[a]:
                    raise NotBipartiteError(f"odd cycle through {a}-{b}", _odd_cycle(parent, a, b))
    return {v: ("white" if color[v] == 0 else "black") for v in ids}


def _odd_cycle(parent, a, b):
    def path(x):
        out = [x]
        while parent[x] is not None:
            x = parent[x]
            out.append(x)
        return out

    pa, pb = path(a), path(b)
    common = set(pa) & set(pb)
    lca = next(x for x in pa if x in common)
    left = pa[: pa.index(lca) + 1]
    right = pb[: pb.index(lca)]
    return left + right[::-1]


def link_face_degrees(G: PeriodicGraph) -> list[int]:
    """Vertex degrees plus face degrees of a Tait graph.

    These are the face degrees of the associated link diagram on the torus:
    shaded regions correspond to vertices, unshaded ones to faces.
    """
    deg = {v.id: 0 for v in G.vertices}
    for e in G.edges:
        deg[e.u] += 1
        deg[e.v] += 1
    return sorted(list(deg.values()) + [f.degree for f in trace_faces(G)], reverse=True)
