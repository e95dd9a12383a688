import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from scatlab.errors import DomainError
from scatlab.specfun import (
    gamma_reciprocal,
    riccati_arrays,
    riccati_bessel,
    sphere_monomial_integral,
    sphere_volume,
)


def _mp_riccati(nu, x):
    s = mp.sqrt(mp.pi * x / 2)
    j = s * mp.besselj(nu, x)
    y = s * mp.bessely(nu, x)
    dj = mp.diff(lambda z: mp.sqrt(mp.pi * z / 2) * mp.besselj(nu, z), x)
    dy = mp.diff(lambda z: mp.sqrt(mp.pi * z / 2) * mp.bessely(nu, z), x)
    return [float(v) for v in (j, y, dj, dy)]


@pytest.mark.parametrize("nu", [-0.5, 0.0, 0.5, 1.0, 1.5, 2.5, 3.0, 7.5])
@pytest.mark.parametrize("x", [0.3, 1.0, 4.7, 25.0])
def test_riccati_matches_mpmath(nu, x):
    pair = riccati_bessel(nu, x)
    ref = _mp_riccati(nu, x)
    got = [pair.j, pair.y, pair.dj, pair.dy]
    for g, r in zip(got, ref):
        assert g == pytest.approx(r, rel=1e-10, abs=1e-12)


def test_order_minus_half_is_cos_sin():
    j, y, dj, dy = riccati_arrays(-0.5, np.array([0.7, 2.0]))
    np.testing.assert_allclose(j, np.cos([0.7, 2.0]))
    np.testing.assert_allclose(y, np.sin([0.7, 2.0]))


@given(nu=st.floats(-0.5, 12.0), x=st.floats(0.05, 60.0))
def test_riccati_wronskian_is_one(nu, x):
    pair = riccati_bessel(nu, x)
    if max(abs(pair.y), abs(pair.dy)) > 1e12:
        return
    assert pair.wronskian == pytest.approx(1.0, rel=1e-8)


def test_riccati_domain():
    with pytest.raises(DomainError):
        riccati_bessel(0.5, 0.0)
    with pytest.raises(DomainError):
        riccati_bessel(-1.0, 1.0)


@pytest.mark.parametrize("x", [0.0, -1.0, -2.0, -7.0])
def test_gamma_reciprocal_poles_exact(x):
    assert gamma_reciprocal(x) == 0.0


@given(st.floats(-8.5, 12.0).filter(lambda v: abs(v - round(v)) > 1e-6 or v > 0))
def test_gamma_reciprocal_matches_mpmath(x):
    assert gamma_reciprocal(x) == pytest.approx(float(mp.rgamma(x)), rel=1e-12, abs=1e-300)


@pytest.mark.parametrize(
    "n, value",
    [(1, 2.0), (2, 2 * math.pi), (3, 4 * math.pi), (4, 2 * math.pi**2), (5, 8 * math.pi**2 / 3)],
)
def test_sphere_volume(n, value):
    assert sphere_volume(n) == pytest.approx(value, rel=1e-14)


def test_sphere_monomial_known_values():
    assert sphere_monomial_integral((0, 0, 0)) == pytest.approx(4 * math.pi)
    assert sphere_monomial_integral((2, 0, 0)) == pytest.approx(4 * math.pi / 3)
    assert sphere_monomial_integral((2, 2, 0)) == pytest.approx(4 * math.pi / 15)
    assert sphere_monomial_integral((1, 2, 0)) == 0.0


@given(
    alpha=st.lists(st.integers(0, 3), min_size=2, max_size=5).map(lambda a: tuple(2 * x for x in a)),
)
def test_sphere_monomial_monte_carlo(alpha):
    n = len(alpha)
    rng = np.random.default_rng(1234)
    pts = rng.standard_normal((200_000, n))
    pts /= np.linalg.norm(pts, axis=1)[:, None]
    vals = np.prod(pts ** np.array(alpha), axis=1) * sphere_volume(n)
    est = vals.mean()
    err = vals.std() / math.sqrt(vals.size)
    assert abs(est - sphere_monomial_integral(alpha)) < 5 * err + 1e-12


@given(alpha=st.lists(st.integers(0, 4), min_size=2, max_size=4))
def test_sphere_monomial_recursion(alpha):
    # sum_j omega_j^2 = 1 on the sphere
    alpha = tuple(alpha)
    total = sum(sphere_monomial_integral(alpha[:j] + (alpha[j] + 2,) + alpha[j + 1 :]) for j in range(len(alpha)))
    assert total == pytest.approx(sphere_monomial_integral(alpha), rel=1e-12, abs=1e-15)
