"""Isoradial embeddings: validation, rhombus half-angles, critical weights.

For an isoradial periodic bipartite graph with critical weights
nu(e) = 2 sin(theta_e), the Mahler measure of the characteristic polynomial
has the closed form

    M = sum_e  Lambda(theta_e) / pi + (theta_e / pi) * log(2 sin theta_e)

over the edges of a fundamental domain, with Lambda the Lobachevsky function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .periodic_graph import GraphError, PeriodicGraph, trace_faces, validate_bipartite
from .special_functions import lobachevsky

__all__ = [
    "IsoradialError",
    "IsoradialEmbedding",
    "check_isoradial",
    "critical_weights",
    "isoradial_mahler",
    "dual_polyhedron_volume",
    "angle_sums",
    "uniform_gauge_shift",
]


class IsoradialError(GraphError):
    pass


@dataclass(frozen=True)
class IsoradialEmbedding:
    graph: PeriodicGraph | None
    radius: float
    theta: tuple[float, ...]
    circumcenters: tuple[tuple[float, float], ...] = ()

    def weighted_graph(self) -> PeriodicGraph:
        if self.graph is None:
            raise IsoradialError("embedding carries no graph")
        return self.graph.with_weights(critical_weights(self), name=f"{self.graph.name}-critical")

    def to_dict(self) -> dict:
        out = {"radius": self.radius, "edges": []}
        for m, (t, w) in enumerate(zip(self.theta, critical_weights(self))):
            row = {"edge": m, "theta": t, "weight": w}
            if self.graph is not None:
                e = self.graph.edges[m]
                row.update(u=e.u, v=e.v)
            out["edges"].append(row)
        return out


def _circumcenter(a, b, c):
    d = 2.0 * (a[0] * (b[1] - c[1]) + b[0] * (c[1] - a[1]) + c[0] * (a[1] - b[1]))
    if abs(d) < 1e-14:
        return None
    a2, b2, c2 = a @ a, b @ b, c @ c
    ux = (a2 * (b[1] - c[1]) + b2 * (c[1] - a[1]) + c2 * (a[1] - b[1])) / d
    uy = (a2 * (c[0] - b[0]) + b2 * (a[0] - c[0]) + c2 * (b[0] - a[0])) / d
    return np.array([ux, uy])


def _in_closure(point, poly, tol):
    """Point inside or on a counterclockwise polygon (convex or not)."""
    n = len(poly)
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        ab, ap = b - a, point - a
        t = np.clip(ap @ ab / (ab @ ab), 0.0, 1.0)
        if np.linalg.norm(a + t * ab - point) <= tol:
            return True
    inside = False
    x, y = point
    for i in range(n):
        (x1, y1), (x2, y2) = poly[i], poly[(i + 1) % n]
        if (y1 > y) != (y2 > y):
            xc = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if xc > x:
                inside = not inside
    return inside


def check_isoradial(G: PeriodicGraph, r: float | None = None, tol: float = 1e-7) -> IsoradialEmbedding:
    """Validate that every face is cyclic with one common radius and extract theta_e.

    ``tol`` is absolute at unit radius and scales with the radius.
    """
    faces = trace_faces(G)
    pos = G.positions
    idx = G.index
    centers, corners_of, radius = [], [], r
    for fi, f in enumerate(faces):
        pts = G.to_cartesian(np.array([pos[idx[v]] + np.array(o) for v, o in zip(f.vertices, f.offsets)]))
        corners_of.append(pts)
        c = None
        for k in range(2, len(pts)):
            c = _circumcenter(pts[0], pts[1], pts[k])
            if c is not None:
                break
        if c is None:
            raise IsoradialError(f"face {fi} is degenerate (collinear corners)")
        dist = np.linalg.norm(pts - c, axis=1)
        R = float(dist.mean())
        if radius is None:
            radius = R
        if np.abs(dist - R).max() > tol * max(R, 1.0):
            raise IsoradialError(f"non-cyclic face {fi}: corner distances spread {np.ptp(dist):.3g}")
        if abs(R - radius) > tol * max(radius, 1.0):
            raise IsoradialError(f"mismatched radius on face {fi}: {R:.9g} vs {radius:.9g}")
        if not _in_closure(c, pts, tol * max(R, 1.0)):
            raise IsoradialError(f"circumcenter outside closure of face {fi}")
        centers.append(c)

    where = {}
    for fi, f in enumerate(faces):
        for i, d in enumerate(f.darts):
            where[d] = (fi, i)
    thetas = []
    for m, e in enumerate(G.edges):
        pu = G.to_cartesian(pos[idx[e.u]])
        pv = G.to_cartesian(pos[idx[e.v]] + np.array(e.shift, dtype=float))
        halves = []
        for d, tail, head in ((2 * m, pu, pv), (2 * m + 1, pv, pu)):
            fi, i = where[d]
            o = centers[fi] - corners_of[fi][i] + tail
            ev, ov = head - tail, o - tail
            cosang = ev @ ov / (np.linalg.norm(ev) * np.linalg.norm(ov))
            halves.append(math.acos(max(-1.0, min(1.0, cosang))))
        if abs(halves[0] - halves[1]) > 1e-6:
            raise IsoradialError(f"rhombus of edge {m} is not symmetric")
        t = 0.5 * (halves[0] + halves[1])
        if not (0.0 < t < math.pi / 2.0):
            raise IsoradialError(f"half-angle {t} of edge {m} outside (0, pi/2)")
        thetas.append(t)
    return IsoradialEmbedding(G, float(radius), tuple(thetas), tuple((float(c[0]), float(c[1])) for c in centers))


def critical_weights(E: IsoradialEmbedding) -> tuple[float, ...]:
    return tuple(2.0 * math.sin(t) for t in E.theta)


def isoradial_mahler(E: IsoradialEmbedding) -> float:
    total = 0.0
    for t in E.theta:
        total += lobachevsky(t) / math.pi + (t / math.pi) * math.log(2.0 * math.sin(t))
    return total


def dual_polyhedron_volume(E: IsoradialEmbedding) -> float:
    return float(sum(lobachevsky(t) for t in E.theta))


def angle_sums(E: IsoradialEmbedding) -> tuple[dict[str, float], list[float]]:
    """Rhombus angles summed around every vertex and every face circumcenter."""
    G = E.graph
    at_vertex = {v.id: 0.0 for v in G.vertices}
    for e, t in zip(G.edges, E.theta):
        at_vertex[e.u] += 2.0 * t
        at_vertex[e.v] += 2.0 * t
    at_face = [sum(math.pi - 2.0 * E.theta[d // 2] for d in f.darts) for f in trace_faces(G)]
    return at_vertex, at_face


def uniform_gauge_shift(G: PeriodicGraph, tol: float = 1e-9) -> float:
    """Shift s with log Z(G) = log Z(uniform G) + s per fundamental domain.

    Solves log w(e) = a(white end) + b(black end) in least squares; the
    graph is gauge equivalent to uniform weights iff the residual vanishes,
    and then s = sum a + sum b (independent of the one-parameter freedom
    because the graph is balanced).
    """
    colors = validate_bipartite(G)
    idx = G.index
    A = np.zeros((G.num_edges, G.num_vertices))
    for m, e in enumerate(G.edges):
        A[m, idx[e.u]] = 1.0
        A[m, idx[e.v]] = 1.0
    rhs = np.log(G.weights)
    x, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    if np.abs(A @ x - rhs).max() > tol:
        raise IsoradialError("weights are not gauge equivalent to uniform weights")
    whites = sum(1 for c in colors.values() if c == "white")
    if 2 * whites != G.num_vertices:
        raise IsoradialError("graph is not balanced")
    return float(x.sum())
