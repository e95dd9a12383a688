"""
Special functions used by the radial matching and by the coefficient formulas.

Riccati-Bessel pairs are the free radial solutions

    J^(x) = sqrt(pi x / 2) J_nu(x),    Y^(x) = sqrt(pi x / 2) Y_nu(x),

normalised so that the Wronskian J^ Y^' - J^' Y^ equals one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import special

from .errors import DomainError, RangeError

__all__ = [
    "RiccatiPair",
    "riccati_bessel",
    "riccati_arrays",
    "gamma_reciprocal",
    "sphere_volume",
    "sphere_monomial_integral",
]


@dataclass(frozen=True)
class RiccatiPair:
    """Values and first derivatives of the Riccati-Bessel pair at one point."""

    nu: float
    x: float
    j: float
    y: float
    dj: float
    dy: float

    @property
    def wronskian(self) -> float:
        return self.j * self.dy - self.dj * self.y


def _half_integer_index(nu: float) -> int | None:
    twice = 2.0 * nu
    if twice == round(twice) and int(round(twice)) % 2 != 0:
        return int(round(nu - 0.5))
    return None


def riccati_arrays(nu: float, x) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """
    Vectorised Riccati-Bessel values ``(J^, Y^, J^', Y^')`` for a fixed order.

    Non-finite entries are returned as-is (no exception) so that callers
    sweeping deep into the evanescent regime can decide what to do.
    """
    x = np.asarray(x, dtype=float)
    if abs(nu) < 1e-15:
        # scipy's yv returns 0 at subnormal orders; the pair is smooth in nu
        nu = 0.0
    ell = _half_integer_index(nu)
    with np.errstate(over="ignore", invalid="ignore"):
        if ell == -1:
            return np.cos(x), np.sin(x), -np.sin(x), np.cos(x)
        if ell is not None:
            jl = special.spherical_jn(ell, x)
            yl = special.spherical_yn(ell, x)
            djl = special.spherical_jn(ell, x, derivative=True)
            dyl = special.spherical_yn(ell, x, derivative=True)
            return x * jl, x * yl, jl + x * djl, yl + x * dyl
        s = np.sqrt(0.5 * np.pi * x)
        ds = s / (2.0 * x)
        jn = special.jv(nu, x)
        yn = special.yv(nu, x)
        return s * jn, s * yn, ds * jn + s * special.jvp(nu, x), ds * yn + s * special.yvp(nu, x)


def riccati_bessel(nu: float, x: float) -> RiccatiPair:
    """
    Riccati-Bessel pair of order ``nu`` at ``x``.

    Parameters
    ----------
    nu : float
        Order, at least -1/2.
    x : float
        Positive argument.

    Raises
    ------
    DomainError
        If ``x <= 0`` or ``nu < -1/2``.
    RangeError
        If any value overflows.
    """
    if not x > 0.0:
        raise DomainError(f"Riccati-Bessel argument must be positive, got {x!r}")
    if nu < -0.5:
        raise DomainError(f"order must be >= -1/2, got {nu!r}")
    vals = [float(v) for v in riccati_arrays(nu, x)]
    if not all(math.isfinite(v) for v in vals):
        raise RangeError(f"Riccati-Bessel pair overflows at nu={nu}, x={x}")
    return RiccatiPair(nu, float(x), *vals)


def gamma_reciprocal(x: float) -> float:
    """1/Gamma(x); exactly zero at the poles 0, -1, -2, ..."""
    if x <= 0.0 and x == math.floor(x):
        return 0.0
    return float(special.rgamma(x))


def sphere_volume(n: int) -> float:
    """Surface measure of the unit sphere S^{n-1} in R^n."""
    if n < 1:
        raise DomainError(f"dimension must be >= 1, got {n}")
    return 2.0 * math.pi ** (0.5 * n) / math.gamma(0.5 * n)


def sphere_monomial_integral(alpha: Sequence[int]) -> float:
    """
    Integral of the monomial omega^alpha over S^{n-1}, n = len(alpha).

    Zero as soon as one exponent is odd; otherwise
    2 prod Gamma((a_j + 1)/2) / Gamma((n + |a|)/2).
    """
    alpha = tuple(int(a) for a in alpha)
    if any(a < 0 for a in alpha):
        raise DomainError("multi-index entries must be non-negative")
    if any(a % 2 for a in alpha):
        return 0.0
    n = len(alpha)
    log_num = sum(math.lgamma(0.5 * (a + 1)) for a in alpha)
    return 2.0 * math.exp(log_num - math.lgamma(0.5 * (n + sum(alpha))))
