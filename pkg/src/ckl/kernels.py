"""Hot numeric kernels.

Each kernel has a pure-numpy implementation (``*_numpy``) and a numba one
(``*_numba``).  The public names dispatch to numba unless it is missing or
disabled through ``CKL_DISABLE_NUMBA``.
"""

import math

import numpy as np
from scipy.special import zeta

from ._accel import HAVE_NUMBA, njit

__all__ = [
    "CLAUSEN_COEFFS",
    "clausen2",
    "clausen2_numpy",
    "batched_det",
    "batched_det_numpy",
    "HAVE_NUMBA",
]

# Cl2(phi) = phi - phi*log|phi| + phi * sum_k c_k phi^(2k),  |phi| <= pi,
# with c_k = zeta(2k) / (k (2k+1) (2 pi)^(2k)).  Terms shrink like 4^-k.
_K = np.arange(1, 31, dtype=np.float64)
CLAUSEN_COEFFS = zeta(2.0 * _K) / (_K * (2.0 * _K + 1.0) * (2.0 * np.pi) ** (2.0 * _K))


def _reduce_angle(phi):
    """Map into [-pi, pi)."""
    return phi - 2.0 * np.pi * np.floor((phi + np.pi) / (2.0 * np.pi))


def clausen2_numpy(phi):
    phi = _reduce_angle(np.asarray(phi, dtype=np.float64))
    a = np.abs(phi)
    x2 = phi * phi
    # Horner on the even power series
    acc = np.zeros_like(phi)
    for c in CLAUSEN_COEFFS[::-1]:
        acc = acc * x2 + c
    acc = acc * x2
    with np.errstate(divide="ignore", invalid="ignore"):
        logterm = np.where(a > 0.0, phi * np.log(np.where(a > 0.0, a, 1.0)), 0.0)
    return phi - logterm + phi * acc


@njit(cache=True)
def _clausen2_scalar(phi, coeffs):
    twopi = 2.0 * math.pi
    phi = phi - twopi * math.floor((phi + math.pi) / twopi)
    if phi == 0.0:
        return 0.0
    x2 = phi * phi
    acc = 0.0
    for i in range(coeffs.shape[0] - 1, -1, -1):
        acc = acc * x2 + coeffs[i]
    acc *= x2
    return phi - phi * math.log(abs(phi)) + phi * acc


@njit(cache=True)
def _clausen2_loop(flat, coeffs):
    out = np.empty_like(flat)
    for i in range(flat.shape[0]):
        out[i] = _clausen2_scalar(flat[i], coeffs)
    return out


def clausen2_numba(phi):
    arr = np.asarray(phi, dtype=np.float64)
    out = _clausen2_loop(np.ascontiguousarray(arr.ravel()), CLAUSEN_COEFFS)
    return out.reshape(arr.shape)


def batched_det_numpy(mats):
    """Determinants of a stack of square matrices, shape (..., n, n)."""
    return np.linalg.det(mats)


@njit(cache=True)
def _lu_det_batch(mats):
    batch = mats.shape[0]
    n = mats.shape[1]
    out = np.empty(batch, dtype=np.complex128)
    a = np.empty((n, n), dtype=np.complex128)
    for b in range(batch):
        for i in range(n):
            for j in range(n):
                a[i, j] = mats[b, i, j]
        det = 1.0 + 0.0j
        for k in range(n):
            piv = k
            best = abs(a[k, k])
            for i in range(k + 1, n):
                v = abs(a[i, k])
                if v > best:
                    best = v
                    piv = i
            if best == 0.0:
                det = 0.0 + 0.0j
                break
            if piv != k:
                for j in range(n):
                    tmp = a[k, j]
                    a[k, j] = a[piv, j]
                    a[piv, j] = tmp
                det = -det
            pk = a[k, k]
            det *= pk
            for i in range(k + 1, n):
                f = a[i, k] / pk
                if f != 0.0:
                    for j in range(k + 1, n):
                        a[i, j] -= f * a[k, j]
        out[b] = det
    return out


def batched_det_numba(mats):
    mats = np.asarray(mats)
    shape = mats.shape
    n = shape[-1]
    if n == 0:
        return np.ones(shape[:-2], dtype=np.complex128)
    flat = np.ascontiguousarray(mats.reshape(-1, n, n), dtype=np.complex128)
    out = _lu_det_batch(flat).reshape(shape[:-2])
    if not np.iscomplexobj(mats):
        return out.real
    return out


if HAVE_NUMBA:
    clausen2 = clausen2_numba
    batched_det = batched_det_numba
else:
    clausen2 = clausen2_numpy
    batched_det = batched_det_numpy
