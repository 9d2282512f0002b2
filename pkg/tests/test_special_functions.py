import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ckl.special_functions import (
    CATALAN,
    V_OCT,
    V_TET,
    VOLUME_CONSTANTS,
    bipyramid_volume,
    bloch_wigner,
    dilog,
    lobachevsky,
    ti2,
)

# frozen oracle values, 20 digits from mpmath (clsin, polylog, quad)
LOBACHEVSKY_ORACLE = [
    (math.pi / 3, 0.33831386880321787501),
    (math.pi / 4, 0.45798279708860950753),
    (math.pi / 6, 0.50747080320482681251),
    (1.0, 0.36357302543163962371),
    (2.5, -0.49641006627347835935),
    (-0.3, -0.45475039820840901211),
    (7.0, 0.479288736540074599),
]
DILOG_ORACLE = [
    (0.5, 0.5822405264650125059 + 0j),
    (-1.0, -0.82246703342411321824 + 0j),
    (1j, -0.20561675835602830456 + 0.91596559417721901505j),
    (0.3 + 0.4j, 0.26659686674274041589 + 0.46136289181910899428j),
    (2 + 1j, 1.1866885370000578311 + 2.4077407693457720017j),
    (-3 - 0.5j, -1.948171791653847674 - 0.23050460321078513629j),
    (0.9 - 0.9j, 0.61151020731241485336 - 1.3006011903521028352j),
    (3.0, 2.3201804233130983964 - 3.4513922952232026614j),
]
BLOCH_WIGNER_ORACLE = [
    (1j, 0.91596559417721901505),
    (cmath.exp(1j * math.pi / 3), 1.014941606409653625),
    (0.3 + 0.4j, 0.82120755720773763499),
    (2 + 1j, 0.51166639855382349597),
]
BIPYRAMID_ORACLE = {
    3: 2.02988321281930725,
    4: 3.6638623767088760602,
    5: 4.9867734569920738933,
    6: 6.0896496384579217501,
    8: 7.8549772084016268537,
    9: 8.5836691497496618536,
    12: 10.372549572646712996,
}
# values printed with the worked examples, 4 decimals
PUBLISHED_BIPYRAMIDS = {3: 2.0298, 4: 3.6638, 8: 7.8549, 9: 8.5836, 12: 10.3725}

angles = st.floats(-50.0, 50.0, allow_nan=False)
points = st.complex_numbers(min_magnitude=0.05, max_magnitude=20.0, allow_nan=False, allow_infinity=False)


@pytest.mark.parametrize("theta, expected", LOBACHEVSKY_ORACLE)
def test_lobachevsky_oracle(theta, expected):
    assert lobachevsky(theta) == pytest.approx(expected, abs=1e-13)


def test_lobachevsky_special_points():
    assert lobachevsky(0.0) == 0.0
    assert abs(lobachevsky(math.pi / 2)) < 1e-15
    assert lobachevsky(math.pi / 3) == pytest.approx(V_TET / 3, abs=1e-15)
    assert lobachevsky(math.pi / 6) == pytest.approx(1.5 * lobachevsky(math.pi / 3), abs=1e-12)


def test_lobachevsky_vectorized_matches_scalar():
    th = np.linspace(-4, 4, 101)
    vec = lobachevsky(th)
    assert vec.shape == th.shape
    assert np.allclose(vec, [lobachevsky(float(t)) for t in th], atol=1e-15, rtol=0)


def test_lobachevsky_against_quadrature():
    from scipy.integrate import quad

    for t in (0.2, 0.7, 1.3):
        integral, _ = quad(lambda s: -math.log(abs(2 * math.sin(s))), 0, t, epsabs=1e-14)
        assert lobachevsky(t) == pytest.approx(integral, abs=1e-12)


@given(angles)
def test_lobachevsky_odd_and_periodic(t):
    assert lobachevsky(-t) == pytest.approx(-lobachevsky(t), abs=1e-12)
    assert lobachevsky(t + math.pi) == pytest.approx(lobachevsky(t), abs=1e-12)
    assert abs(lobachevsky(t)) <= lobachevsky(math.pi / 6) + 1e-15


@given(st.floats(-3.0, 3.0))
def test_lobachevsky_duplication(t):
    # Lambda(2t) = 2 Lambda(t) + 2 Lambda(t + pi/2)
    assert lobachevsky(2 * t) == pytest.approx(2 * lobachevsky(t) + 2 * lobachevsky(t + math.pi / 2), abs=1e-12)


@pytest.mark.parametrize("z, expected", DILOG_ORACLE)
def test_dilog_oracle(z, expected):
    assert abs(dilog(z) - expected) < 1e-12


def test_dilog_special_values():
    assert dilog(0) == 0
    assert dilog(1).real == pytest.approx(math.pi**2 / 6, abs=1e-14)
    assert dilog(1j).imag == pytest.approx(CATALAN, abs=1e-14)


def test_dilog_series_inside_disk():
    for z in (0.2 + 0.1j, -0.4 + 0.3j, 0.1j):
        series = sum(z**k / k**2 for k in range(1, 200))
        assert abs(dilog(z) - series) < 1e-14


@pytest.mark.parametrize("z, expected", BLOCH_WIGNER_ORACLE)
def test_bloch_wigner_oracle(z, expected):
    assert bloch_wigner(z) == pytest.approx(expected, abs=1e-12)


def test_bloch_wigner_real_axis_and_endpoints():
    for x in (-5.0, -1.0, 0.0, 0.5, 1.0, 3.0):
        assert abs(bloch_wigner(x)) < 1e-15


@given(points)
def test_bloch_wigner_functional_equations(z):
    if abs(z - 1) < 0.05:
        return
    D = bloch_wigner(z)
    assert bloch_wigner(z.conjugate()) == pytest.approx(-D, abs=1e-10)
    assert bloch_wigner(1 / z) == pytest.approx(-D, abs=1e-10)
    assert bloch_wigner(1 - z) == pytest.approx(-D, abs=1e-10)
    assert bloch_wigner(1 - 1 / z) == pytest.approx(D, abs=1e-10)


def test_bloch_wigner_five_term():
    x, y = 0.3 + 0.7j, -0.6 + 1.1j
    terms = [x, y, (1 - x) / (1 - x * y), 1 - x * y, (1 - y) / (1 - x * y)]
    assert abs(sum(bloch_wigner(t) for t in terms)) < 1e-12


def test_ti2_values():
    assert ti2(0.0) == 0.0
    assert ti2(1.0) == pytest.approx(sum((-1) ** k / (2 * k + 1) ** 2 for k in range(200000)), abs=1e-10)
    assert ti2(3 + 2 * math.sqrt(2)) == pytest.approx(2.9399343390718703759, abs=1e-13)


@pytest.mark.parametrize("x", [0.1 * k for k in range(1, 101)])
def test_ti2_is_imaginary_part_of_dilog(x):
    assert ti2(x) == pytest.approx(dilog(1j * x).imag, abs=1e-10)
    assert ti2(-x) == pytest.approx(-ti2(x), abs=1e-15)


def test_ti2_chain_value():
    value = 8 * CATALAN + 4 * math.pi * math.log(math.sqrt(2) - 1) + 8 * ti2(3 + 2 * math.sqrt(2))
    assert value == pytest.approx(19.7715323218, abs=1e-9)


def test_volume_constants():
    assert V_TET == pytest.approx(3 * lobachevsky(math.pi / 3), abs=1e-15)
    assert V_OCT == pytest.approx(8 * lobachevsky(math.pi / 4), abs=1e-15)
    assert CATALAN == pytest.approx(V_OCT / 4, abs=1e-15)
    assert CATALAN == pytest.approx(0.915965594177219015, abs=1e-15)
    assert set(VOLUME_CONSTANTS) == {"v_tet", "v_oct", "catalan"}


@pytest.mark.parametrize("n, expected", sorted(BIPYRAMID_ORACLE.items()))
def test_bipyramid_oracle(n, expected):
    assert bipyramid_volume(n) == pytest.approx(expected, abs=1e-13)


@pytest.mark.parametrize("n, published", sorted(PUBLISHED_BIPYRAMIDS.items()))
def test_bipyramid_published_values(n, published):
    assert bipyramid_volume(n) == pytest.approx(published, abs=5e-4)


def test_bipyramid_identities_and_monotonicity():
    assert bipyramid_volume(2) == pytest.approx(0.0, abs=1e-15)
    assert bipyramid_volume(3) == pytest.approx(2 * V_TET, abs=1e-9)
    assert bipyramid_volume(4) == pytest.approx(V_OCT, abs=1e-9)
    assert bipyramid_volume(6) == pytest.approx(6 * V_TET, abs=1e-9)
    vols = [bipyramid_volume(n) for n in range(2, 40)]
    assert all(b > a for a, b in zip(vols, vols[1:]))


@pytest.mark.parametrize("bad", [1, 0, -3, 2.5])
def test_bipyramid_rejects_bad_n(bad):
    with pytest.raises(ValueError):
        bipyramid_volume(bad)
