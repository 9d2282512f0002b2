"""Spanning trees of periodic graphs: exact counts, spectral counts, entropy.

Also home of the Temperley lift, which turns a Tait graph into the bipartite
dimer graph whose matchings correspond to its spanning trees.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .kernels import batched_det
from .lattices import GraphBuilder
from .periodic_graph import FiniteGraph, GraphError, PeriodicGraph, is_connected, quotient, trace_faces

__all__ = [
    "laplacian_block",
    "count_spanning_trees",
    "spectral_tree_count",
    "SpectralCount",
    "TreeEntropy",
    "tree_entropy_fd",
    "temperley_lift",
    "dimer_tree_identity_check",
    "DEFAULT_SCHEDULE",
]

DEFAULT_SCHEDULE = (16, 32, 64, 128)


def laplacian_block(T: PeriodicGraph, z, w) -> np.ndarray:
    """Fourier block L(z, w); broadcasts over array-valued z and w.

    Returns an array of shape ``broadcast(z, w).shape + (N_v, N_v)``.
    """
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    shape = np.broadcast(z, w).shape
    nv = T.num_vertices
    idx = T.index
    L = np.zeros(shape + (nv, nv), dtype=complex)
    for e in T.edges:
        a, b = idx[e.u], idx[e.v]
        (s, t) = e.shift
        L[..., a, a] += e.weight
        L[..., b, b] += e.weight
        L[..., a, b] -= e.weight * z**s * w**t
        L[..., b, a] -= e.weight * z ** (-s) * w ** (-t)
    return L


# -- exact counts ----------------------------------------------------------------


def _bareiss_det(M):
    """Fraction-free determinant of a square list-of-lists of ints."""
    n = len(M)
    if n == 0:
        return 1
    A = [row[:] for row in M]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k] != 0:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = A[k][k]
        rowk = A[k]
        for i in range(k + 1, n):
            rowi = A[i]
            aik = rowi[k]
            for j in range(k + 1, n):
                rowi[j] = (akk * rowi[j] - aik * rowk[j]) // prev
            rowi[k] = 0
        prev = akk
    return sign * A[n - 1][n - 1]


def count_spanning_trees(H: FiniteGraph):
    """Weighted spanning-tree count by the matrix-tree theorem, exactly.

    Integer weights give an ``int``; other weights are read as exact binary
    fractions and give a ``Fraction``.  A disconnected graph gives 0 and a
    ``RuntimeWarning``.
    """
    n = H.num_vertices
    if n == 0:
        return 0
    if not is_connected(H):
        warnings.warn("graph is disconnected; it has no spanning tree", RuntimeWarning, stacklevel=2)
        return 0
    integral = all(float(w).is_integer() for _, _, w in H.edges)
    conv = (lambda x: int(x)) if integral else Fraction
    L = [[0] * n for _ in range(n)]
    for a, b, w in H.edges:
        if a == b:
            continue
        x = conv(w)
        L[a][a] += x
        L[b][b] += x
        L[a][b] -= x
        L[b][a] -= x
    reduced = [row[1:] for row in L[1:]]
    if integral:
        return _bareiss_det(reduced)
    # clear denominators, then use the integer elimination
    den = 1
    for row in reduced:
        for x in row:
            den = den * x.denominator // math.gcd(den, x.denominator)
    scaled = [[int(x * den) for x in row] for row in reduced]
    return Fraction(_bareiss_det(scaled), den ** (n - 1))


# -- spectral counts ---------------------------------------------------------------


@dataclass(frozen=True)
class SpectralCount:
    log_count: float
    n: int
    exact: int | Fraction | None = None

    @property
    def log_exact(self) -> float | None:
        if self.exact is None:
            return None
        if isinstance(self.exact, Fraction):
            return math.log(self.exact.numerator) - math.log(self.exact.denominator)
        return math.log(self.exact)


def _log_blocks(T: PeriodicGraph, n: int) -> np.ndarray:
    """log det L(w^j, w^k) on the n x n roots-of-unity grid, (0,0) entry NaN."""
    k = np.arange(n)
    zz = np.exp(2j * np.pi * k / n)
    Z, W = np.meshgrid(zz, zz, indexing="ij")
    dets = batched_det(laplacian_block(T, Z, W)).real
    dets[0, 0] = np.nan
    scale = np.abs(np.nanmax(dets)) if n > 1 else 1.0
    bad = dets <= 1e-12 * scale
    bad[0, 0] = False
    if bad.any():
        raise GraphError("singular Laplacian block: the periodic graph is disconnected")
    return np.log(dets)


def spectral_tree_count(T: PeriodicGraph, n: int, check: bool = False) -> SpectralCount:
    """log N_ST of the n x n torus quotient through its Fourier blocks.

    With ``check=True`` the exact matrix-tree count is attached.
    """
    nv = T.num_vertices
    L11 = laplacian_block(T, 1.0, 1.0).real
    L11 = 0.5 * (L11 + L11.T)
    eig = np.sort(np.linalg.eigvalsh(L11))
    if nv > 1 and eig[1] <= 1e-10 * max(1.0, eig[-1]):
        raise GraphError("L(1,1) has a repeated zero eigenvalue: the quotient is disconnected")
    logs = _log_blocks(T, n)
    total = -math.log(n * n * nv) + float(np.nansum(logs)) + float(np.sum(np.log(eig[1:])))
    exact = count_spanning_trees(quotient(T, n)) if check else None
    return SpectralCount(total, n, exact)


@dataclass(frozen=True)
class TreeEntropy:
    per_fd: float
    per_vertex: float
    n_v: int
    method: str
    schedule: tuple[int, ...] = ()
    error_estimate: float = 0.0
    samples: tuple[float, ...] = field(default=(), repr=False)

    def to_dict(self) -> dict:
        return {
            "per_fd": self.per_fd,
            "per_vertex": self.per_vertex,
            "n_v": self.n_v,
            "method": self.method,
            "schedule": list(self.schedule),
            "error_estimate": self.error_estimate,
        }


def _fit(ns, fs, model):
    ns = np.asarray(ns, dtype=float)
    cols = [np.ones_like(ns)]
    if "log" in model:
        cols.append(np.log(ns) / ns**2)
    cols.append(1.0 / ns**2)
    if "n4" in model:
        cols.append(1.0 / ns**4)
    A = np.stack(cols, axis=1)
    coef, *_ = np.linalg.lstsq(A, np.asarray(fs), rcond=None)
    return coef[0]


def tree_entropy_fd(T: PeriodicGraph, n_schedule=DEFAULT_SCHEDULE) -> TreeEntropy:
    """Spanning-tree entropy per fundamental domain by extrapolation in n.

    Fits (1/n^2) log N_ST(T_n) = z + (c1 log n + c2)/n^2 + c3/n^4 over the
    schedule.  The error estimate is the spread between this fit and the
    lower-order one on the largest three sizes.
    """
    ns = tuple(sorted(int(n) for n in n_schedule))
    if len(ns) < 3:
        raise ValueError("extrapolation needs a schedule of at least three sizes")
    fs = [spectral_tree_count(T, n).log_count / n**2 for n in ns]
    if len(ns) >= 4:
        z = _fit(ns, fs, "log+n4")
        z_low = _fit(ns[-3:], fs[-3:], "log")
    else:
        z = _fit(ns, fs, "log")
        z_low = fs[-1]
    err = abs(z - z_low)
    if not math.isfinite(z) or err > 1e-3:
        raise ArithmeticError(f"extrapolation did not settle (spread {err:.3g}); lengthen the schedule")
    nv = T.num_vertices
    return TreeEntropy(float(z), float(z) / nv, nv, "spectral", ns, float(max(err, 1e-15)), tuple(float(f) for f in fs))


# -- Temperley lift ---------------------------------------------------------------------


def temperley_lift(T: PeriodicGraph, name: str | None = None) -> PeriodicGraph:
    """Bipartite dimer graph of T: whites at edge midpoints, blacks at vertices and faces.

    Each white joins the two endpoints of its edge (with that edge's weight)
    and the two faces on either side (weight 1).
    """
    faces = trace_faces(T)
    for f in faces:
        if f.translation != (0, 0):
            raise GraphError("face wraps around the torus; embedding is not cellular")
    pos = {v.id: np.array(v.pos) for v in T.vertices}
    B = GraphBuilder(name or f"{T.name}-lift", T.basis)
    for v in T.vertices:
        B.add_vertex(f"v:{v.id}", pos[v.id], "black")
    for m, e in enumerate(T.edges):
        s = np.array(e.shift, dtype=float)
        mid = (pos[e.u] + pos[e.v] + s) / 2.0
        B.add_vertex(f"e:{m}", mid, "white")
        B.add_edge(f"e:{m}", mid, f"v:{e.u}", pos[e.u], e.weight)
        B.add_edge(f"e:{m}", mid, f"v:{e.v}", pos[e.v] + s, e.weight)
    for k, f in enumerate(faces):
        corners = [pos[vid] + np.array(off, dtype=float) for vid, off in zip(f.vertices, f.offsets)]
        center = np.mean(corners, axis=0)
        B.add_vertex(f"f:{k}", center, "black")
        for i, d in enumerate(f.darts):
            nxt = corners[(i + 1) % len(corners)] if i + 1 < len(corners) else corners[0] + np.array(f.translation)
            mid = (corners[i] + nxt) / 2.0
            B.add_edge(f"e:{d // 2}", mid, f"f:{k}", center, 1.0)
    return B.build()


def dimer_tree_identity_check(T: PeriodicGraph, n_schedule=DEFAULT_SCHEDULE, steps: int = 256) -> dict:
    """Compare M(P) of the uniform Temperley lift with the tree entropy of T."""
    from .kasteleyn import assign_kasteleyn_signs, char_poly
    from .mahler import mahler_jensen

    lift = temperley_lift(T.uniform())
    P = char_poly(lift, assign_kasteleyn_signs(lift))
    m = mahler_jensen(P, steps)
    ent = tree_entropy_fd(T.uniform(), n_schedule)
    return {
        "lattice": T.name,
        "mahler": m.value,
        "mahler_error": m.error_estimate,
        "tree_entropy_fd": ent.per_fd,
        "tree_error": ent.error_estimate,
        "difference": m.value - ent.per_fd,
    }
