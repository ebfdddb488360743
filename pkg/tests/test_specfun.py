from pathlib import Path

import numpy as np
import pytest
import scipy.special as ss
from hypothesis import given, settings
from hypothesis import strategies as st

from bottlemode import specfun as sf
from bottlemode.oracle import compare, load_table

DATA = Path(__file__).parent / "data"

ORDERS = [0, 1, 2, 5, 10, 50, 76, 150, 257, 300]
ARGS = [0.5, 1.0, 5.0, 20.0, 57.0, 76.0, 120.0, 270.0]


def _product(a: sf.ScaledPair, b: sf.ScaledPair):
    """a b' - a' b as an ordinary float (exponents are combined exactly)."""
    m = a.mantissa * b.derivative_mantissa - a.derivative_mantissa * b.mantissa
    return np.ldexp(m, a.exponent + b.exponent)


def test_oracle_table_eight_digits():
    results = compare(load_table(DATA / "oracle_table.txt"), rtol=5e-9)
    assert len(results) == 200
    bad = [(r.record, r.relative_error) for r in results if not r.ok]
    assert not bad


@pytest.mark.parametrize("order", ORDERS)
def test_cylindrical_wronskian_lattice(order):
    x = np.array(ARGS)
    j, y = sf.cyl_bessel_jy_scaled(order, x)
    w = _product(j, y)
    np.testing.assert_allclose(w, 2.0 / (np.pi * x), rtol=1e-8)


@pytest.mark.parametrize("order", ORDERS)
def test_spherical_wronskian_lattice(order):
    x = np.array(ARGS)
    w = _product(sf.sph_bessel_scaled(order, x), sf.sph_bessel_y_scaled(order, x))
    np.testing.assert_allclose(w, 1.0 / x**2, rtol=1e-8)


def test_scaled_reaches_beyond_double_range():
    p = sf.cyl_bessel_j_scaled(257, 1.0)
    log10 = np.log10(abs(float(p.mantissa))) + float(p.exponent) * np.log10(2.0)
    assert -590 < log10 < -580
    assert sf.cyl_bessel_j(257, 1.0).value == 0.0


def test_three_term_recurrence():
    x = np.linspace(0.3, 300.0, 97)
    for m in (1, 40, 76, 200):
        jm1 = sf.cyl_bessel_j(m - 1, x).value
        jp1 = sf.cyl_bessel_j(m + 1, x).value
        j = sf.cyl_bessel_j(m, x).value
        scale = np.abs(jm1) + np.abs(jp1) + np.abs(2 * m / x * j)
        assert np.all(np.abs(jm1 + jp1 - 2 * m / x * j) <= 1e-12 * scale + 1e-300)


def test_hankel_is_j_plus_iy():
    x = np.array([3.0, 57.5, 100.0])
    h = sf.cyl_hankel(1, 76, x)
    assert np.allclose(h.value.real, sf.cyl_bessel_j(76, x).value)
    assert np.allclose(h.value.imag, sf.cyl_bessel_y(76, x).value)
    h2 = sf.cyl_hankel(2, 76, x)
    assert np.allclose(h2.value, np.conj(h.value))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 300), st.floats(0.1, 400.0))
def test_cylindrical_matches_scipy(order, x):
    ref = ss.jv(order, x)
    got = sf.cyl_bessel_j(order, x).value
    if abs(ref) > 1e-280:
        assert got == pytest.approx(ref, rel=1e-10)
    ref_y = ss.yv(order, x)
    if np.isfinite(ref_y) and abs(ref_y) < 1e280:
        assert sf.cyl_bessel_y(order, x).value == pytest.approx(ref_y, rel=1e-10)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 300), st.floats(0.5, 400.0))
def test_spherical_matches_scipy(order, x):
    ref = ss.spherical_jn(order, x)
    if abs(ref) > 1e-280:
        assert sf.sph_bessel(order, x).value == pytest.approx(ref, rel=1e-10)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 300), st.lists(st.floats(0.1, 350.0), min_size=2, max_size=12))
def test_elementwise_independence(order, xs):
    """Each element is computed the same way whether alone or in an array."""
    arr = sf.cyl_bessel_jy_scaled(order, np.array(xs))
    for i, x in enumerate(xs):
        one = sf.cyl_bessel_jy_scaled(order, np.array([x]))
        for a, b in zip(arr, one):
            assert a.mantissa[i] == b.mantissa[0]
            assert a.exponent[i] == b.exponent[0]


def test_hermite_orthonormality_to_q120():
    nodes, weights = np.polynomial.legendre.leggauss(60)
    edges = np.linspace(-26.0, 26.0, 105)
    half = 0.5 * np.diff(edges)[:, None]
    x = ((0.5 * (edges[1:] + edges[:-1]))[:, None] + half * nodes).ravel()
    w = (half * weights).ravel()
    H = np.array([sf.hermite_gauss(q, x).value for q in range(121)])
    gram = (H * w) @ H.T
    assert np.max(np.abs(gram - np.eye(121))) < 1e-8


@pytest.mark.parametrize("q", [0, 1, 5, 80, 300])
def test_hermite_ode(q):
    x = np.linspace(-np.sqrt(2 * q + 1) - 3, np.sqrt(2 * q + 1) + 3, 801)
    h = sf.hermite_gauss(q, x)
    resid = h.second_derivative - (x * x - (2 * q + 1)) * h.value
    assert np.max(np.abs(resid)) < 1e-9 * np.max(np.abs(h.second_derivative))


def test_hermite_parity_and_low_orders():
    x = np.linspace(-4, 4, 41)
    h0 = np.pi**-0.25 * np.exp(-x * x / 2)
    np.testing.assert_allclose(sf.hermite_gauss(0, x).value, h0, rtol=1e-14)
    np.testing.assert_allclose(sf.hermite_gauss(1, x).value, np.sqrt(2) * x * h0, atol=1e-15)
    h7 = sf.hermite_gauss(7, x).value
    np.testing.assert_allclose(h7, -h7[::-1], atol=1e-15)


def test_capability_and_domain_errors():
    with pytest.raises(sf.CapabilityError):
        sf.cyl_bessel_j(sf.MAX_ORDER + 1, 1.0)
    with pytest.raises(sf.CapabilityError):
        sf.cyl_bessel_j(-1, 1.0)
    with pytest.raises(sf.DomainError):
        sf.cyl_bessel_y(3, 0.0)
    with pytest.raises(sf.DomainError):
        sf.cyl_bessel_j(3, np.nan)
    with pytest.raises(sf.CapabilityError):
        sf.hermite_gauss(sf.MAX_HERMITE + 1, 0.0)
    with pytest.raises(sf.CapabilityError):
        sf.cyl_bessel_j(5, 1e-200)
    p = sf.cyl_bessel_j_scaled(5, sf.MIN_ARGUMENT)
    # leading series term (x/2)^5 / 5!, compared in log2 because it is ~1e-504
    log2_value = np.log2(abs(float(p.mantissa))) + float(p.exponent)
    assert log2_value == pytest.approx(5 * np.log2(0.5e-100) - np.log2(120), abs=1e-9)


def test_j_at_zero():
    assert sf.cyl_bessel_j(0, 0.0).value == 1.0
    assert sf.cyl_bessel_j(5, 0.0).value == 0.0
    assert sf.sph_bessel(0, 0.0).value == 1.0


# reference values from tools/bigfloat_oracle.py (30 digits, truncated)
def test_design_point_interior_argument():
    p = sf.cyl_bessel_j(76, 83.55)
    assert p.value == pytest.approx(3.15455225494217763858e-2, rel=1e-10)
    assert p.derivative == pytest.approx(-5.60579368926194734757e-2, rel=1e-10)


def test_design_point_evanescent_hankel():
    h = sf.cyl_hankel(1, 76, 57.52)
    assert h.value.real == pytest.approx(3.36084102533048781456e-6, rel=1e-8)
    assert h.value.imag == pytest.approx(-1.90809245507980042753e3, rel=1e-8)
    assert h.derivative.real == pytest.approx(2.93962581415588828806e-6, rel=1e-8)
    assert h.derivative.imag == pytest.approx(1.62421270989556381498e3, rel=1e-8)


def test_sphere_design_point():
    p = sf.sph_bessel(257, 389.0)
    assert p.value == pytest.approx(-2.80801989978486096615e-3, rel=1e-8)
    assert p.derivative == pytest.approx(7.33480981073071684778e-4, rel=1e-8)


def test_spherical_closed_forms():
    assert sf.sph_bessel(0, 1.0).value == pytest.approx(np.sin(1.0), rel=1e-12)
    assert sf.sph_bessel(1, 0.0).value == 0.0
    h = sf.sph_hankel1(0, 2.0)
    assert h.value == pytest.approx(-1j * np.exp(2j) / 2.0, rel=1e-12)


@pytest.mark.parametrize("m", [0, 10, 76, 257])
def test_wronskian_plain_values(m):
    x = np.array([1.0, 50.0, 83.55, 270.0])
    j, y = sf.cyl_bessel_jy_scaled(m, x)
    np.testing.assert_allclose(_product(j, y), 2 / (np.pi * x), rtol=1e-8)


def test_hermite_h80_h78_quadrature():
    from scipy.integrate import quad
    f = lambda x: float(sf.hermite_gauss(80, x).value) ** 2
    g = lambda x: float(sf.hermite_gauss(80, x).value * sf.hermite_gauss(78, x).value)
    norm = quad(f, -16, 16, limit=400, epsabs=1e-12)[0]
    cross = quad(g, -16, 16, limit=400, epsabs=1e-12)[0]
    assert norm == pytest.approx(1.0, abs=1e-8)
    assert abs(cross) < 1e-8
    assert float(sf.hermite_gauss(0, 0.0).value) == pytest.approx(np.pi**-0.25, rel=1e-15)
    assert float(sf.hermite_gauss(1, 0.0).value) == 0.0
