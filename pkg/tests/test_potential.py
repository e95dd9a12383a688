import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from scatlab import potential as P
from scatlab.errors import ConfigurationError, DomainError, UnsupportedProfileError


def test_square_well_values_and_sides():
    pot = P.square_well(3, 4.0, 1.0)
    assert pot.evaluate(0.5) == -4.0
    assert pot.evaluate(1.0, side="left") == -4.0
    assert pot.evaluate(1.0, side="right") == 0.0
    assert pot.evaluate(1.5) == 0.0
    assert pot.breakpoints == (1.0,)
    assert pot.support_radius == 1.0
    assert not pot.is_smooth


def test_gaussian_and_pt_values():
    g = P.gaussian(2, -2.0, 0.5)
    assert g.evaluate(0.5) == pytest.approx(-2.0 * math.exp(-1.0))
    pt = P.poschl_teller(1.0)
    assert pt.evaluate(0.3) == pytest.approx(-2.0 / math.cosh(0.3) ** 2, rel=1e-14)


def test_negative_radius_rejected():
    with pytest.raises(DomainError):
        P.gaussian(3, 1.0, 1.0).evaluate(-0.1)


def test_validation():
    with pytest.raises(ConfigurationError):
        P.poschl_teller(1.0, n=3)
    with pytest.raises(ConfigurationError, match="11"):
        P.gaussian(2, -1.0, 1.0, rho=10.0)
    with pytest.raises(ConfigurationError):
        P.square_well(3, -1.0, 1.0)
    with pytest.raises(ConfigurationError):
        P.gaussian(3, 1.0, 0.0)
    with pytest.raises(ConfigurationError):
        P.tabulated(3, [0.1, 0.2, 0.3], [1.0, 1.0, 1.0])


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_gaussian_moments_closed_form(n):
    A, w = -1.7, 0.8
    pot = P.gaussian(n, A, w)
    assert P.moment_power(pot, 1) == pytest.approx(A * (math.pi * w * w) ** (n / 2), rel=1e-10)
    assert P.moment_power(pot, 2) == pytest.approx(A * A * (math.pi * w * w / 2) ** (n / 2), rel=1e-10)
    # |grad V|^2 = (4 r^2 / w^4) V^2
    grad = A * A * 4 / w**4 * n * (w * w / 4) * (math.pi * w * w / 2) ** (n / 2)
    assert P.moment_grad_sq(pot) == pytest.approx(grad, rel=1e-10)


def test_square_well_moment_is_ball_volume():
    pot = P.square_well(3, 4.0, 1.5)
    assert P.moment_power(pot, 1) == pytest.approx(-4.0 * 4 / 3 * math.pi * 1.5**3, rel=1e-12)
    with pytest.raises(UnsupportedProfileError):
        P.moment_grad_sq(pot)


def test_poschl_teller_moments():
    pot = P.poschl_teller(1.0)
    assert P.moment_power(pot, 1) == pytest.approx(-4.0, rel=1e-12)
    assert P.moment_power(pot, 2) == pytest.approx(16.0 / 3.0, rel=1e-12)
    assert P.moment_grad_sq(pot) == pytest.approx(64.0 / 15.0, rel=1e-10)


@given(c=st.floats(-3.0, 3.0).filter(lambda x: abs(x) > 1e-3), p=st.integers(1, 3))
def test_moment_scaling(c, p):
    pot = P.gaussian(3, -1.0, 0.9)
    assert P.moment_power(pot.scaled(c), p) == pytest.approx(c**p * P.moment_power(pot, p), rel=1e-9)


@given(q=st.integers(1, 4), r=st.floats(0.05, 3.0))
def test_gaussian_derivative_finite_difference(q, r):
    pot = P.gaussian(3, -1.3, 0.9)
    h = 1e-4
    fd = (pot.derivative(r + h, q - 1) - pot.derivative(r - h, q - 1)) / (2 * h)
    assert pot.derivative(r, q) == pytest.approx(fd, rel=1e-5, abs=1e-7)


@given(q=st.integers(1, 4), r=st.floats(0.05, 3.0))
def test_pt_derivative_finite_difference(q, r):
    pot = P.poschl_teller(1.0)
    h = 1e-4
    fd = (pot.derivative(r + h, q - 1) - pot.derivative(r - h, q - 1)) / (2 * h)
    assert pot.derivative(r, q) == pytest.approx(fd, rel=1e-5, abs=1e-7)


@pytest.mark.parametrize("pot", [P.gaussian(3, -2.0, 1.0), P.poschl_teller(1.0)])
def test_taylor_series_reproduces_values(pot):
    c, rad = pot.taylor()
    r = np.linspace(0.0, min(0.4, 0.25 * rad), 7)
    np.testing.assert_allclose(np.polyval(c[::-1], r), pot.evaluate(r), rtol=1e-10, atol=1e-12)


def test_tabulated_tracks_gaussian():
    r = np.linspace(0.0, 6.0, 601)
    g = P.gaussian(3, -2.0, 1.0)
    tab = P.tabulated(3, r, g.evaluate(r))
    x = np.linspace(0.0, 5.0, 37)
    np.testing.assert_allclose(tab.evaluate(x), g.evaluate(x), atol=1e-7)
    assert P.moment_power(tab, 1) == pytest.approx(P.moment_power(g, 1), rel=1e-6)


def test_support_radius_cutoff():
    g = P.gaussian(3, -2.0, 1.0)
    assert abs(g.evaluate(g.support_radius)) == pytest.approx(P.SUPPORT_CUTOFF, rel=1e-9)


def test_zero_potential():
    z = P.zero(4)
    assert z.is_zero and z.support_radius == 0.0
    assert P.moment_power(z, 2) == 0.0
    assert z.check_decay() == 0.0


def test_in_dimension_keeps_profile():
    g = P.gaussian(3, -2.0, 1.0).in_dimension(5)
    assert g.dimension == 5 and g.evaluate(0.7) == pytest.approx(-2.0 * math.exp(-0.49))
