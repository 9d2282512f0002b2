"""Mahler measures and Ronkin functions of two-variable Laurent polynomials.

Two independent routes:

* ``mahler_quadrature`` only needs an evaluator (z, w) -> P(z, w); it averages
  log|P| on a half-cell shifted grid of the torus and extrapolates in the
  grid size.
* ``mahler_jensen`` needs coefficients.  For each z = e^{i theta} Jensen's
  formula gives the inner integral over w exactly from the roots in w; the
  remaining integral in theta is done adaptively, split at the angles where
  a root crosses the unit circle (the only places the integrand has kinks).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate, optimize

from .kasteleyn import LaurentPoly2

__all__ = [
    "MahlerResult",
    "mahler_quadrature",
    "mahler_jensen",
    "jensen_integrand",
    "ronkin",
]


@dataclass(frozen=True)
class MahlerResult:
    value: float
    method: str
    grid: int
    error_estimate: float
    evaluations: int = 0

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "method": self.method,
            "grid": self.grid,
            "error_estimate": self.error_estimate,
        }


# -- quadrature ----------------------------------------------------------------------


def _grid_mean(P: Callable, N: int, offsets, X: float = 0.0, Y: float = 0.0) -> float:
    oz, ow = offsets
    thz = 2.0 * np.pi * (np.arange(N) + oz) / N
    thw = 2.0 * np.pi * (np.arange(N) + ow) / N
    z = np.exp(X + 1j * thz)
    total = 0.0
    # row blocks keep memory flat for large N
    step = max(1, 262144 // N)
    for a in range(0, N, step):
        Z, W = np.meshgrid(z, np.exp(Y + 1j * thw[a : a + step]), indexing="ij")
        vals = np.abs(np.asarray(P(Z, W)))
        if not np.all(np.isfinite(vals)):
            raise FloatingPointError("P overflows on a grid point")
        # a zero curve through the grid shows up as values at rounding level
        if np.any(vals <= 1e-11 * vals.max()):
            raise FloatingPointError("P vanishes on a grid point")
        total += float(np.sum(np.log(vals)))
    return total / (N * N)


# equal half-cell offsets first; unequal ones dodge zero curves like zw = 1
_OFFSETS = ((0.5, 0.5), (0.5, 1.0 / 3.0), (1.0 / 3.0, 1.0 / 7.0))


def _shifted_means(P, N, X=0.0, Y=0.0, levels=3):
    for offsets in _OFFSETS:
        try:
            return [_grid_mean(P, N * 2**k, offsets, X, Y) for k in range(levels)], offsets
        except FloatingPointError:
            continue
    raise FloatingPointError("P vanishes on the shifted grid even after reshifting")


def _extrapolate(means, N):
    """Richardson step assuming an h^2 leading error, plus a spread estimate.

    A zero curve crossing the grid breaks the h^2 model, and the two
    extrapolants can then agree by accident; the raw change between the two
    finer grids keeps the estimate honest in that case.
    """
    m = np.asarray(means)
    r1 = (4.0 * m[1] - m[0]) / 3.0
    r2 = (4.0 * m[2] - m[1]) / 3.0
    err = max(abs(r2 - r1), abs(m[2] - m[1]), 1e-15)
    return r2, err


def mahler_quadrature(P: Callable, N: int = 256) -> MahlerResult:
    """Mean of log|P| on shifted N x N, 2N x 2N and 4N x 4N torus grids.

    Richardson-extrapolated in h^2; the error estimate is the larger of the
    change between the two extrapolants and the change between the two finer
    grid means, so it is conservative when P is smooth on the torus.
    """
    means, _ = _shifted_means(P, N)
    value, err = _extrapolate(means, N)
    evals = sum((N * 2**k) ** 2 for k in range(3))
    return MahlerResult(value, "quadrature", N, err, evals)


def ronkin(P: Callable, X: float, Y: float, N: int = 256) -> float:
    """Ronkin function F(X, Y): mean of log|P(e^X z, e^Y w)| over the torus.

    A LaurentPoly2 is rescaled and handed to ``mahler_jensen``; any other
    callable goes through the grid quadrature with N points per side.
    """
    if isinstance(P, LaurentPoly2):
        return mahler_jensen(LaurentPoly2.from_terms(
            {(i, j): c * math.exp(i * X + j * Y) for (i, j), c in P.terms.items()}
        )).value
    means, _ = _shifted_means(P, N, X, Y)
    return _extrapolate(means, N)[0]


# -- Jensen -----------------------------------------------------------------------------


def _roots_batch(coeffs: np.ndarray) -> np.ndarray:
    """Roots of polynomials sum_k coeffs[..., k] w^k of one common degree.

    Companion eigenvalues, then one Newton step each.
    """
    d = coeffs.shape[-1] - 1
    lead = coeffs[..., -1]
    monic = coeffs[..., :-1] / lead[..., None]
    comp = np.zeros(coeffs.shape[:-1] + (d, d), dtype=complex)
    comp[..., 0, :] = -monic[..., ::-1]
    if d > 1:
        idx = np.arange(d - 1)
        comp[..., idx + 1, idx] = 1.0
    r = np.linalg.eigvals(comp)
    # Newton polish
    p = np.zeros_like(r)
    dp = np.zeros_like(r)
    for k in range(d, -1, -1):
        dp = dp * r + p
        p = p * r + coeffs[..., k][..., None]
    ok = dp != 0
    r = np.where(ok, r - np.where(ok, p / np.where(ok, dp, 1.0), 0.0), r)
    return r


_ON_CIRCLE = 1e-7


def _jensen_row(c: np.ndarray) -> tuple[float, float, int]:
    """(inner integral, distance of the nearest root to the circle in log
    scale, number of roots strictly inside the circle).

    Roots treated as on the circle are left out of the distance.
    """
    scale = np.abs(c).max()
    if scale == 0.0:
        # z is a root of every coefficient; only happens on a null set of theta
        return -math.inf, 0.0, -1
    nz = np.nonzero(np.abs(c) > 1e-14 * scale)[0]
    lo, hi = nz[0], nz[-1]
    core = c[lo : hi + 1]
    if hi == lo:
        return math.log(abs(core[0])), math.inf, int(lo)
    r = _roots_batch(core[None, :])[0]
    lr = np.log(np.abs(r))
    # repeated roots come out of the eigensolver with ~sqrt(eps) scatter;
    # anything that close to the circle counts as on it
    on = np.abs(lr) < _ON_CIRCLE
    lr[on] = 0.0
    # pick the better conditioned end coefficient
    if abs(core[-1]) >= abs(core[0]):
        val = math.log(abs(core[-1])) + float(np.sum(np.maximum(lr, 0.0)))
    else:
        val = math.log(abs(core[0])) + float(np.sum(np.maximum(-lr, 0.0)))
    off = np.abs(lr[~on])
    gap = float(off.min()) if off.size else math.inf
    return val, gap, int(lo) + int(np.sum(lr < 0.0))


def jensen_integrand(P: LaurentPoly2, theta) -> np.ndarray:
    """Inner Jensen integral (1/2pi) int log|P(e^{i theta}, e^{i phi})| d phi."""
    th = np.atleast_1d(np.asarray(theta, dtype=float))
    C = P.w_coefficients(np.exp(1j * th))
    return np.array([_jensen_row(c)[0] for c in C])


def _rows(P, ts):
    C = P.w_coefficients(np.exp(1j * np.asarray(ts, dtype=float)))
    out = [_jensen_row(c) for c in C]
    return np.array([o[1] for o in out]), np.array([o[2] for o in out])


def _bisect_count(P, a, b, ca):
    """Crossing between a and b, located where the inside-count changes."""
    while b - a > 1e-13:
        m = 0.5 * (a + b)
        if _rows(P, [m])[1][0] == ca:
            a = m
        else:
            b = m
    return 0.5 * (a + b)


def _scan(P, ts, out, depth):
    gaps, counts = _rows(P, ts)
    h = ts[1] - ts[0]
    fine = depth >= 4 or h < 1e-6
    n = len(ts)
    for i in range(n - 1):
        # a root crossed the circle inside this cell
        if counts[i] != counts[i + 1]:
            if fine:
                out.append(_bisect_count(P, ts[i], ts[i + 1], counts[i]))
            else:
                _scan(P, np.linspace(ts[i], ts[i + 1], 9), out, depth + 1)
    for k in range(1, n - 1):
        # a close approach with no net change may hide an in-and-out pair
        g0, g1, g2 = gaps[k - 1], gaps[k], gaps[k + 1]
        if not (g1 <= g0 and g1 <= g2 and g1 < 8.0 * h):
            continue
        if counts[k - 1] != counts[k] or counts[k] != counts[k + 1]:
            continue
        if fine:
            res = optimize.minimize_scalar(
                lambda t: _rows(P, [t])[0][0], bounds=(ts[k - 1], ts[k + 1]), method="bounded",
                options={"xatol": 1e-13},
            )
            if res.fun < 1e-5:
                out.append(float(res.x))
        else:
            _scan(P, np.linspace(ts[k - 1], ts[k + 1], 17), out, depth + 1)


def _breakpoints(P: LaurentPoly2, M: int) -> list[float]:
    """Angles in [0, 2 pi) where a w-root of P(e^{i theta}, .) meets the circle.

    Cells of an M-point scan are refined when the number of roots inside the
    circle changes across them, or when the nearest root comes close without
    a net change.  Extra points are harmless (they only split the integral);
    missed ones cost accuracy, so the tests are generous.
    """
    out: list[float] = []
    _scan(P, np.linspace(0.0, 2.0 * np.pi, M + 1), out, 0)
    merged = []
    for p in sorted(x % (2.0 * np.pi) for x in out):
        if not merged or p - merged[-1] > 1e-9:
            merged.append(p)
    return merged


def mahler_jensen(P: LaurentPoly2, M: int = 256, tol: float = 1e-11) -> MahlerResult:
    """Mahler measure through Jensen's formula in w.

    ``M`` is the resolution of the scan that locates kinks of the theta
    integrand; the integral between kinks is adaptive Gauss-Kronrod.
    """
    if not np.any(P.coeffs):
        raise ValueError("Mahler measure of the zero polynomial is undefined")
    if P.coeffs.shape[1] == 1:
        # no w dependence: swap roles
        P = P.swapped()
    if P.coeffs.shape[1] == 1:
        return MahlerResult(math.log(abs(P.coeffs[0, 0])), "jensen", M, 1e-16, 0)
    cuts = _breakpoints(P, M)
    edges = [0.0] + [c for c in cuts if 1e-12 < c < 2.0 * np.pi - 1e-12] + [2.0 * np.pi]
    count = [0]

    def f(t):
        count[0] += 1
        v = _jensen_row(P.w_coefficients(np.exp(1j * np.array([t])))[0])[0]
        if v == -math.inf:
            v = _jensen_row(P.w_coefficients(np.exp(1j * np.array([t + 1e-9])))[0])[0]
        return v

    total, err = 0.0, 0.0
    for a, b in zip(edges, edges[1:]):
        val, e = integrate.quad(f, a, b, epsabs=tol, epsrel=tol, limit=400)
        total += val
        err += e
    value = total / (2.0 * np.pi)
    return MahlerResult(value, "jensen", M, max(err / (2.0 * np.pi), 1e-15), count[0])
