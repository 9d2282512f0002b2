"""Lobachevsky function, dilogarithms and ideal hyperbolic volumes.

Conventions
-----------
``lobachevsky(t) = -int_0^t log|2 sin s| ds``, which is positive on
(0, pi/2), odd and pi-periodic.  It equals ``Cl2(2t) / 2``.
"""

import cmath
import math
from typing import NamedTuple

import numpy as np

from .kernels import clausen2

__all__ = [
    "lobachevsky",
    "dilog",
    "bloch_wigner",
    "ti2",
    "bipyramid_volume",
    "VolumeConstant",
    "V_TET",
    "V_OCT",
    "CATALAN",
    "VOLUME_CONSTANTS",
]


def lobachevsky(theta):
    """Lobachevsky function; accepts scalars or arrays."""
    arr = np.asarray(theta, dtype=np.float64)
    out = 0.5 * clausen2(2.0 * arr)
    if out.ndim == 0:
        return float(out)
    return out


# Bernoulli numbers B_0..B_40 as floats (odd ones past B_1 vanish).
def _bernoulli(nmax):
    from fractions import Fraction
    from math import comb

    b = [Fraction(0)] * (nmax + 1)
    b[0] = Fraction(1)
    for m in range(1, nmax + 1):
        b[m] = -sum(comb(m + 1, k) * b[k] for k in range(m)) / (m + 1)
    return b


_B = _bernoulli(40)
# Li2(z) = sum_n B_n u^(n+1) / (n+1)!  with u = -log(1 - z)
_LI2_COEFFS = [float(_B[n] / math.factorial(n + 1)) for n in range(41)]
_PI2_6 = math.pi**2 / 6.0


def _li2_core(z: complex) -> complex:
    # valid for |z| <= 1 and Re z <= 1/2, where |u| stays below ~1.1
    u = -cmath.log(1.0 - z)
    u2 = u * u
    # u + B_1 u^2 / 2 + sum over even n
    acc = 0.0j
    for n in range(40, 1, -2):
        acc = acc * u2 + _LI2_COEFFS[n]
    return u + _LI2_COEFFS[1] * u2 + acc * u2 * u


def _li2_unit_disk(z: complex) -> complex:
    if z.real > 0.5:
        if z == 1.0:
            return complex(_PI2_6)
        return -_li2_core(1.0 - z) + _PI2_6 - cmath.log(z) * cmath.log(1.0 - z)
    return _li2_core(z)


def dilog(z) -> complex:
    """Principal dilogarithm Li2(z) = -int_0^z log(1-u) du/u.

    On the cut (1, inf) the limit from below (Im z -> 0-) is returned.
    """
    z = complex(z)
    if z.imag == 0.0:
        x = z.real
        if x > 1.0:
            lx = math.log(x)
            val = math.pi**2 / 3.0 - 0.5 * lx * lx - _li2_unit_disk(complex(1.0 / x)).real
            return complex(val, -math.pi * lx)
        return complex(_li2_unit_disk(complex(x, 0.0)).real, 0.0)
    if abs(z) > 1.0:
        lm = cmath.log(-z)
        return -_li2_unit_disk(1.0 / z) - _PI2_6 - 0.5 * lm * lm
    return _li2_unit_disk(z)


def _arg(z: complex) -> float:
    """Principal argument in (-pi, pi]."""
    if z.imag == 0.0:
        return math.pi if z.real < 0.0 else 0.0
    return math.atan2(z.imag, z.real)


def bloch_wigner(z) -> float:
    """Bloch-Wigner dilogarithm D(z) = Im Li2(z) + arg(1 - z) log|z|."""
    z = complex(z)
    if z == 0.0 or z == 1.0:
        return 0.0
    if z.imag == 0.0:
        return 0.0
    return dilog(z).imag + _arg(1.0 - z) * math.log(abs(z))


def ti2(x: float) -> float:
    """Inverse tangent integral int_0^x arctan(t)/t dt."""
    x = float(x)
    if x == 0.0:
        return 0.0
    return dilog(complex(0.0, x)).imag


def bipyramid_volume(n: int) -> float:
    """Volume of the regular ideal bipyramid over an n-gon: 2n * Lambda(pi/n)."""
    if int(n) != n or n < 2:
        raise ValueError(f"bipyramid needs an integer n >= 2, got {n!r}")
    n = int(n)
    if n == 2:
        return 0.0
    return 2.0 * n * lobachevsky(math.pi / n)


class VolumeConstant(NamedTuple):
    name: str
    value: float


V_TET = 3.0 * lobachevsky(math.pi / 3.0)
V_OCT = 8.0 * lobachevsky(math.pi / 4.0)
CATALAN = V_OCT / 4.0

VOLUME_CONSTANTS = {
    c.name: c
    for c in (
        VolumeConstant("v_tet", V_TET),
        VolumeConstant("v_oct", V_OCT),
        VolumeConstant("catalan", CATALAN),
    )
}
