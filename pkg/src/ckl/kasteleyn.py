"""Kasteleyn signs, the magnetically altered matrix K(z, w) and its determinant.

Rows of K are white vertices and columns black vertices.  An edge whose black
end sits in cell (a, b) relative to its white end carries the monomial
z^a w^b; this differs from the dual-path construction only by a monomial
factor and a gauge, neither of which moves a Mahler measure.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, NamedTuple

import numpy as np

from .kernels import batched_det
from .periodic_graph import (
    Face,
    FiniteGraph,
    GraphError,
    PeriodicGraph,
    TorusGraph,
    cut_open,
    quotient,
    trace_faces,
    validate_bipartite,
)

__all__ = [
    "KasteleynError",
    "KasteleynAssignment",
    "LaurentPoly2",
    "assign_kasteleyn_signs",
    "kasteleyn_matrix",
    "kasteleyn_eval",
    "char_poly",
    "partition_function_torus",
    "TorusPartition",
    "enumerate_matchings",
    "gauge_transform",
    "face_alternating_product",
    "planar_kasteleyn_det",
]


class KasteleynError(GraphError):
    pass


@dataclass(frozen=True)
class KasteleynAssignment:
    graph: PeriodicGraph
    sign: tuple[int, ...]
    zexp: tuple[int, ...]
    wexp: tuple[int, ...]
    whites: tuple[str, ...]
    blacks: tuple[str, ...]
    # per edge: (row, column) in K
    cells: tuple[tuple[int, int], ...]

    @property
    def size(self) -> int:
        return len(self.whites)


def _face_constraint(face: Face):
    """Edges appearing an odd number of times, and the required sign parity."""
    counts: dict[int, int] = {}
    for m in face.edges:
        counts[m] = counts.get(m, 0) + 1
    odd = [m for m, c in counts.items() if c % 2]
    k = face.degree // 2
    return odd, (k + 1) % 2


def assign_kasteleyn_signs(G: PeriodicGraph) -> KasteleynAssignment:
    """Signs with product (-1)^(k+1) around every face of degree 2k.

    Signs are propagated leaf-first along a spanning tree of the dual graph of
    the one-cell torus quotient, then every face is re-checked.
    """
    colors = validate_bipartite(G)
    whites = tuple(v.id for v in G.vertices if colors[v.id] == "white")
    blacks = tuple(v.id for v in G.vertices if colors[v.id] == "black")
    if len(whites) != len(blacks):
        raise KasteleynError(f"unbalanced colors: {len(whites)} white vs {len(blacks)} black")
    faces = trace_faces(G)
    for f in faces:
        if f.degree % 2:
            raise KasteleynError(f"odd face of degree {f.degree}")

    face_of_dart = {}
    for fi, f in enumerate(faces):
        for d in f.darts:
            face_of_dart[d] = fi
    nf = len(faces)
    dual_adj = [[] for _ in range(nf)]
    for m in range(G.num_edges):
        a, b = face_of_dart[2 * m], face_of_dart[2 * m + 1]
        if a != b:
            dual_adj[a].append((b, m))
            dual_adj[b].append((a, m))

    bits = [0] * G.num_edges
    parent_edge = [-1] * nf
    order = []
    seen = [False] * nf
    for root in range(nf):
        if seen[root]:
            continue
        seen[root] = True
        queue = deque([root])
        while queue:
            f = queue.popleft()
            order.append(f)
            for g, m in dual_adj[f]:
                if not seen[g]:
                    seen[g] = True
                    parent_edge[g] = m
                    queue.append(g)
    constraints = [_face_constraint(f) for f in faces]
    for f in reversed(order):
        m = parent_edge[f]
        if m < 0:
            continue
        odd, want = constraints[f]
        have = sum(bits[e] for e in odd if e != m) % 2
        bits[m] = (want - have) % 2
    for fi, (odd, want) in enumerate(constraints):
        if sum(bits[e] for e in odd) % 2 != want:
            raise KasteleynError(f"sign system infeasible at face {fi} (degree {faces[fi].degree})")

    wi = {v: i for i, v in enumerate(whites)}
    bi = {v: i for i, v in enumerate(blacks)}
    zexp, wexp, cells = [], [], []
    for e in G.edges:
        if colors[e.u] == "white":
            a, b = e.shift
            cells.append((wi[e.u], bi[e.v]))
        else:
            a, b = -e.shift[0], -e.shift[1]
            cells.append((wi[e.v], bi[e.u]))
        zexp.append(a)
        wexp.append(b)
    sign = tuple(-1 if x else 1 for x in bits)
    return KasteleynAssignment(G, sign, tuple(zexp), tuple(wexp), whites, blacks, tuple(cells))


def kasteleyn_matrix(G: PeriodicGraph, A: KasteleynAssignment, z, w) -> np.ndarray:
    """K(z, w), broadcasting over array-valued z and w."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    shape = np.broadcast(z, w).shape
    K = np.zeros(shape + (A.size, A.size), dtype=complex)
    for m, e in enumerate(G.edges):
        r, c = A.cells[m]
        K[..., r, c] += A.sign[m] * e.weight * z ** A.zexp[m] * w ** A.wexp[m]
    return K


def kasteleyn_eval(G: PeriodicGraph, A: KasteleynAssignment, z, w):
    """det K(z, w); scalar in, scalar out, arrays broadcast."""
    out = batched_det(kasteleyn_matrix(G, A, z, w))
    if np.ndim(out) == 0:
        return complex(out)
    return out


# -- Laurent polynomials ------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class LaurentPoly2:
    """sum_{i,j} coeffs[i - i0, j - j0] z^i w^j."""

    coeffs: np.ndarray
    i0: int = 0
    j0: int = 0

    def __call__(self, z, w):
        z = np.asarray(z, dtype=complex)
        w = np.asarray(w, dtype=complex)
        di, dj = self.coeffs.shape
        # Horner in w for each power of z
        out = np.zeros(np.broadcast(z, w).shape, dtype=complex)
        for i in range(di - 1, -1, -1):
            row = np.zeros_like(out)
            for j in range(dj - 1, -1, -1):
                row = row * w + self.coeffs[i, j]
            out = out * z + row
        out = out * z**self.i0 * w**self.j0
        return complex(out) if out.ndim == 0 else out

    @property
    def terms(self) -> dict[tuple[int, int], complex]:
        out = {}
        for (i, j), c in np.ndenumerate(self.coeffs):
            if c != 0:
                out[(i + self.i0, j + self.j0)] = complex(c)
        return out

    @classmethod
    def from_terms(cls, terms: Mapping[tuple[int, int], complex]) -> "LaurentPoly2":
        if not terms:
            return cls(np.zeros((1, 1), dtype=complex))
        i0 = min(i for i, _ in terms)
        j0 = min(j for _, j in terms)
        i1 = max(i for i, _ in terms)
        j1 = max(j for _, j in terms)
        C = np.zeros((i1 - i0 + 1, j1 - j0 + 1), dtype=complex)
        for (i, j), c in terms.items():
            C[i - i0, j - j0] += c
        return cls(C, i0, j0).trimmed()

    def trimmed(self, tol: float = 0.0) -> "LaurentPoly2":
        C = np.array(self.coeffs, dtype=complex)
        if tol > 0.0:
            C[np.abs(C) <= tol] = 0.0
        nz = np.argwhere(C != 0)
        if len(nz) == 0:
            return LaurentPoly2(np.zeros((1, 1), dtype=complex))
        (a, b), (c, d) = nz.min(axis=0), nz.max(axis=0)
        return LaurentPoly2(C[a : c + 1, b : d + 1], self.i0 + int(a), self.j0 + int(b))

    def times_monomial(self, a: int, b: int) -> "LaurentPoly2":
        return LaurentPoly2(self.coeffs, self.i0 + a, self.j0 + b)

    def scaled(self, s: complex) -> "LaurentPoly2":
        return LaurentPoly2(self.coeffs * s, self.i0, self.j0)

    def conjugate(self) -> "LaurentPoly2":
        """The polynomial with conjugated coefficients."""
        return LaurentPoly2(np.conj(self.coeffs), self.i0, self.j0)

    def swapped(self) -> "LaurentPoly2":
        return LaurentPoly2(self.coeffs.T.copy(), self.j0, self.i0)

    def w_coefficients(self, z) -> np.ndarray:
        """Coefficients of w^(j0 + k), k = 0..deg, at each given z; shape z.shape + (deg+1,)."""
        z = np.asarray(z, dtype=complex)
        di = self.coeffs.shape[0]
        powers = z[..., None] ** (np.arange(di) + self.i0)
        return powers @ self.coeffs

    def to_dict(self) -> dict:
        return {
            "coeffs": [
                {"i": i, "j": j, "re": c.real, "im": c.imag} for (i, j), c in sorted(self.terms.items())
            ]
        }

    @classmethod
    def from_dict(cls, data: dict) -> "LaurentPoly2":
        return cls.from_terms({(int(t["i"]), int(t["j"])): complex(t["re"], t.get("im", 0.0)) for t in data["coeffs"]})

    def __repr__(self):
        return f"LaurentPoly2({self.terms})"


def char_poly(G: PeriodicGraph, A: KasteleynAssignment, rng_seed: int = 0) -> LaurentPoly2:
    """Coefficients of det K(z, w) by evaluation on roots of unity and an inverse DFT."""
    n = A.size
    zlo, zhi = [0] * n, [0] * n
    wlo, whi = [0] * n, [0] * n
    first = [True] * n
    for m in range(G.num_edges):
        r = A.cells[m][0]
        a, b = A.zexp[m], A.wexp[m]
        if first[r]:
            zlo[r] = zhi[r] = a
            wlo[r] = whi[r] = b
            first[r] = False
        else:
            zlo[r], zhi[r] = min(zlo[r], a), max(zhi[r], a)
            wlo[r], whi[r] = min(wlo[r], b), max(whi[r], b)
    i0, j0 = sum(zlo), sum(wlo)
    dz, dw = sum(zhi) - i0 + 1, sum(whi) - j0 + 1
    zs = np.exp(2j * np.pi * np.arange(dz) / dz)
    ws = np.exp(2j * np.pi * np.arange(dw) / dw)
    Z, W = np.meshgrid(zs, ws, indexing="ij")
    vals = kasteleyn_eval(G, A, Z, W) * Z ** (-i0) * W ** (-j0)
    C = np.fft.fft2(vals) / (dz * dw)
    # fft uses exp(-2 pi i jk/N), so this recovers the coefficients directly
    scale = np.abs(C).max() if C.size else 1.0
    C[np.abs(C) < 1e-11 * max(scale, 1.0)] = 0.0
    if np.abs(C.imag).max() < 1e-11 * max(scale, 1.0):
        C = C.real.astype(complex)
    P = LaurentPoly2(C, i0, j0).trimmed()

    rng = np.random.default_rng(rng_seed)
    th = rng.uniform(0, 2 * np.pi, size=(2, 20))
    zt, wt = np.exp(1j * th[0]), np.exp(1j * th[1])
    direct = kasteleyn_eval(G, A, zt, wt)
    rec = P(zt, wt)
    denom = np.maximum(np.abs(direct), 1e-300)
    resid = np.abs(direct - rec) / np.maximum(denom, scale * 1e-6)
    if resid.max() > 1e-9:
        raise ArithmeticError(f"characteristic polynomial residual {resid.max():.3g} exceeds 1e-9")
    return P


# -- matchings ------------------------------------------------------------------------


def enumerate_matchings(H: FiniteGraph, weights=None, max_states: int = 2_000_000):
    """Weighted count of perfect matchings by a frontier dynamic program.

    Vertices are swept in order of position (if known); the state is the set
    of not-yet-swept vertices already matched.  Exact for int/Fraction weights.
    """
    nv = H.num_vertices
    if weights is None:
        weights = [w for _, _, w in H.edges]
    if nv % 2:
        return 0
    if H.positions is not None and len(H.positions) == nv:
        p = np.asarray(H.positions, dtype=float)
        order = sorted(range(nv), key=lambda k: (round(p[k][0], 9), round(p[k][1], 9), k))
    else:
        order = list(range(nv))
    rank = {v: r for r, v in enumerate(order)}
    nbr: list[dict[int, object]] = [dict() for _ in range(nv)]
    for (a, b, _), wt in zip(H.edges, weights):
        if a == b:
            continue
        ra, rb = rank[a], rank[b]
        lo, hi = (ra, rb) if ra < rb else (rb, ra)
        nbr[lo][hi] = nbr[lo].get(hi, 0) + wt

    states: dict[frozenset, object] = {frozenset(): 1}
    for r in range(nv):
        new: dict[frozenset, object] = {}
        for S, W in states.items():
            if r in S:
                key = S - {r}
                new[key] = new.get(key, 0) + W
                continue
            for j, wt in nbr[r].items():
                if j in S:
                    continue
                key = S | {j}
                new[key] = new.get(key, 0) + W * wt
        states = new
        if len(states) > max_states:
            raise MemoryError(f"size limit exceeded: more than {max_states} partial states")
        if not states:
            return 0
    return states.get(frozenset(), 0)


class TorusPartition(NamedTuple):
    value: float
    pattern: tuple[int, int, int, int]
    values: tuple[complex, complex, complex, complex]


_TORUS_POINTS = ((1, 1), (1, -1), (-1, 1), (-1, -1))


@lru_cache(maxsize=64)
def _torus_pattern(G: PeriodicGraph, A: KasteleynAssignment):
    vals = tuple(complex(kasteleyn_eval(G, A, z, w)) for z, w in _TORUS_POINTS)
    oracle = float(enumerate_matchings(quotient(G, 1)))
    for minus in range(4):
        eps = tuple(-1 if k == minus else 1 for k in range(4))
        z = 0.5 * abs(sum(e * v for e, v in zip(eps, vals)))
        if abs(z - oracle) <= 1e-9 * max(1.0, oracle):
            return vals, oracle, (z, eps)
    return vals, oracle, None


def partition_function_torus(G: PeriodicGraph, A: KasteleynAssignment) -> TorusPartition:
    """Z of the one-cell torus quotient from the four values P(+-1, +-1).

    The placement of the single minus sign is chosen against the matching
    oracle; the first fit in the order P(1,1), P(1,-1), P(-1,1), P(-1,-1) wins.
    """
    vals, oracle, best = _torus_pattern(G, A)
    if best is None:
        raise KasteleynError(f"no sign pattern reproduces the matching count {oracle}")
    return TorusPartition(best[0], best[1], vals)


def planar_kasteleyn_det(G: PeriodicGraph, A: KasteleynAssignment, n: int, origin=(0.0, 0.0)) -> tuple[float, TorusGraph]:
    """|det K| of a cut-open n x n patch, using the periodic signs.

    Returns the determinant and the patch (for an independent matching count).
    """
    H = cut_open(G, n, origin)
    white_set = set(A.whites)
    whites = [k for k, (_, vid) in enumerate(H.labels) if vid in white_set]
    blacks = [k for k, (_, vid) in enumerate(H.labels) if vid not in white_set]
    rows = {k: i for i, k in enumerate(whites)}
    cols = {k: i for i, k in enumerate(blacks)}
    if len(rows) != len(cols):
        return 0.0, H
    K = np.zeros((len(rows), len(cols)))
    for (a, b, wt), m in zip(H.edges, H.base_edge):
        r, c = (a, b) if a in rows else (b, a)
        K[rows[r], cols[c]] += A.sign[m] * wt
    return abs(float(np.linalg.det(K))) if len(rows) else 1.0, H


# -- gauge ----------------------------------------------------------------------------


def gauge_transform(G: PeriodicGraph, F: Mapping[str, float]) -> tuple[PeriodicGraph, float]:
    """Rescale nu(uv) -> F(u) F(v) nu(uv); returns the graph and the log Z shift.

    Vertices missing from ``F`` keep factor 1.
    """
    for v, x in F.items():
        if not (x > 0.0):
            raise ValueError(f"gauge factor at {v!r} must be positive")
    f = {v.id: float(F.get(v.id, 1.0)) for v in G.vertices}
    weights = [e.weight * f[e.u] * f[e.v] for e in G.edges]
    shift = sum(math.log(x) for x in f.values())
    return G.with_weights(weights), shift


def face_alternating_product(G: PeriodicGraph, face: Face) -> float:
    """prod nu(white -> black) / prod nu(black -> white) along the face."""
    if face.degree % 2:
        raise ValueError(f"face of odd degree {face.degree} has no alternating product")
    colors = validate_bipartite(G)
    num, den = 1.0, 1.0
    for d, tail in zip(face.darts, face.vertices):
        wt = G.edges[d // 2].weight
        if colors[tail] == "white":
            num *= wt
        else:
            den *= wt
    return num / den
