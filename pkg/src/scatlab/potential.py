"""
Radial potential models.

A :class:`Potential` bundles a radial profile V(r) with the space dimension
it lives in.  Besides pointwise evaluation it exposes radial derivatives,
Taylor data at the origin (needed for the regular start of the radial
integrator) and the volume integrals that feed the heat coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.polynomial import polynomial as P
from scipy import integrate
from scipy.interpolate import CubicSpline

from .errors import ConfigurationError, DomainError, IntegrationError, UnsupportedProfileError
from .specfun import sphere_volume

__all__ = [
    "Potential",
    "zero",
    "square_well",
    "gaussian",
    "poschl_teller",
    "tabulated",
    "evaluate",
    "moment_power",
    "moment_grad_sq",
    "decay_floor",
    "SUPPORT_CUTOFF",
]

SUPPORT_CUTOFF = 1e-12
DEFAULT_RHO = 30.0
_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)


def decay_floor(n: int) -> float:
    """Lower bound the decay exponent rho must exceed in dimension ``n``."""
    if n == 1:
        return 2.5
    if n == 2:
        return 11.0
    if n == 3:
        return 5.0
    if n == 4:
        return 12.0
    return 0.5 * (3 * n + 4)


def _hermite_poly(q: int) -> np.ndarray:
    # physicists' Hermite polynomial coefficients, lowest order first
    h0, h1 = np.array([1.0]), np.array([0.0, 2.0])
    if q == 0:
        return h0
    for m in range(1, q):
        h0, h1 = h1, P.polysub(P.polymulx(2.0 * h1), 2.0 * m * h0)
    return h1


def _tanh_derivative_polys(qmax: int) -> list[np.ndarray]:
    """Polynomials Q_q(T) with d^q/dx^q sech^2(x) = Q_q(tanh x)."""
    polys = [np.array([1.0, 0.0, -1.0])]
    one_minus_t2 = np.array([1.0, 0.0, -1.0])
    for _ in range(qmax):
        polys.append(P.polymul(P.polyder(polys[-1]), one_minus_t2))
    return polys


@dataclass(frozen=True, eq=False)
class Potential:
    """
    Radially symmetric potential on R^n.

    Use the module-level constructors (:func:`square_well`, :func:`gaussian`,
    :func:`poschl_teller`, :func:`tabulated`, :func:`zero`) rather than
    instantiating directly.
    """

    dimension: int
    kind: str
    params: dict = field(default_factory=dict)
    rho: float = DEFAULT_RHO
    scale: float = 1.0
    _spline: CubicSpline | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.dimension < 1:
            raise ConfigurationError("dimension must be >= 1")
        if self.kind == "poschl_teller" and self.dimension != 1:
            raise ConfigurationError("poschl_teller is only defined for dimension 1")
        if self.rho <= decay_floor(self.dimension):
            raise ConfigurationError(
                f"decay exponent rho={self.rho} must exceed {decay_floor(self.dimension)} "
                f"in dimension {self.dimension}"
            )

    # ------------------------------------------------------------------ basics
    @property
    def is_zero(self) -> bool:
        if self.scale == 0.0 or self.kind == "zero":
            return True
        if self.kind == "square_well":
            return self.params["V0"] == 0.0
        if self.kind == "gaussian":
            return self.params["A"] == 0.0
        if self.kind == "poschl_teller":
            s = self.params["s"]
            return s * (s + 1.0) == 0.0
        return not np.any(self.params["values"])

    @property
    def is_smooth(self) -> bool:
        """True when V is at least C^2 as a function on R^n."""
        return self.kind in ("zero", "gaussian", "poschl_teller", "tabulated")

    @property
    def breakpoints(self) -> tuple[float, ...]:
        """Radii where V itself jumps; radial grids are aligned to them."""
        if self.is_zero:
            return ()
        if self.kind == "square_well":
            return (float(self.params["a"]),)
        if self.kind == "tabulated":
            r = self.params["r"]
            return (float(r[-1]),) if self.params["values"][-1] != 0.0 else ()
        return ()

    @property
    def knots(self) -> tuple[float, ...]:
        """Radii where some derivative of V may jump (quadrature split points)."""
        if self.kind == "tabulated":
            return tuple(float(x) for x in self.params["r"][1:])
        return self.breakpoints

    @property
    def support_radius(self) -> float:
        """Smallest R with |V(r)| below the support cutoff for all r > R."""
        if self.is_zero:
            return 0.0
        if self.kind == "square_well":
            return float(self.params["a"])
        if self.kind == "gaussian":
            amp = abs(self.scale * self.params["A"])
            w = self.params["w"]
            return w * math.sqrt(max(math.log(amp / SUPPORT_CUTOFF), 0.0)) if amp > SUPPORT_CUTOFF else 0.0
        if self.kind == "poschl_teller":
            s = self.params["s"]
            amp = abs(self.scale * s * (s + 1.0))
            return 0.5 * math.log(4.0 * amp / SUPPORT_CUTOFF) if amp > SUPPORT_CUTOFF else 0.0
        r = self.params["r"]
        vals = np.abs(self.scale * self.params["values"])
        big = np.nonzero(vals >= SUPPORT_CUTOFF)[0]
        if big.size == 0:
            return 0.0
        return float(r[min(big[-1] + 1, r.size - 1)])

    def min_value(self) -> float:
        """Lower bound on min V, used as the bottom of eigenvalue searches."""
        if self.is_zero:
            return 0.0
        if self.kind == "square_well":
            return min(-self.scale * self.params["V0"], 0.0)
        if self.kind == "gaussian":
            return min(self.scale * self.params["A"], 0.0)
        if self.kind == "poschl_teller":
            s = self.params["s"]
            return min(-self.scale * s * (s + 1.0), 0.0)
        r = self.params["r"]
        fine = np.linspace(0.0, r[-1], 20 * r.size)
        return min(float(np.min(self(fine))), 0.0)

    def scaled(self, c: float) -> "Potential":
        """The potential c V."""
        return Potential(self.dimension, self.kind, self.params, self.rho, self.scale * c, self._spline)

    def in_dimension(self, n: int) -> "Potential":
        """Same radial profile regarded as a potential on R^n."""
        return Potential(n, self.kind, self.params, self.rho, self.scale, self._spline)

    # -------------------------------------------------------------- evaluation
    def __call__(self, r):
        return self.evaluate(r)

    def evaluate(self, r, side: str = "right"):
        """
        V(r) for r >= 0 (scalar or array).

        ``side`` selects the one-sided limit at a jump: ``"right"`` (the value
        used for r strictly beyond the jump) or ``"left"``.
        """
        arr = np.asarray(r, dtype=float)
        if np.any(arr < 0.0):
            raise DomainError("radius must be non-negative")
        out = self._raw(arr, side) * self.scale
        return float(out) if out.ndim == 0 else out

    def _raw(self, r: np.ndarray, side: str) -> np.ndarray:
        kind = self.kind
        if kind == "zero" or self.is_zero:
            return np.zeros_like(r)
        if kind == "square_well":
            a, v0 = self.params["a"], self.params["V0"]
            inside = r <= a if side == "left" else r < a
            return np.where(inside, -v0, 0.0)
        if kind == "gaussian":
            return self.params["A"] * np.exp(-((r / self.params["w"]) ** 2))
        if kind == "poschl_teller":
            s = self.params["s"]
            e = np.exp(-2.0 * r)
            return -s * (s + 1.0) * 4.0 * e / (1.0 + e) ** 2
        rend = self.params["r"][-1]
        inside = r <= rend if side == "left" else r < rend
        return np.where(inside, self._spline(np.minimum(r, rend)), 0.0)

    def derivative(self, r, q: int):
        """q-th radial derivative V^{(q)}(r); requires a smooth profile for q >= 1."""
        arr = np.asarray(r, dtype=float)
        if q == 0:
            return self.evaluate(arr)
        if not self.is_smooth:
            raise UnsupportedProfileError(f"profile {self.kind!r} is not differentiable")
        if self.is_zero:
            out = np.zeros_like(arr)
        elif self.kind == "gaussian":
            w, amp = self.params["w"], self.params["A"]
            z = arr / w
            out = amp * (-1.0 / w) ** q * P.polyval(z, _hermite_poly(q)) * np.exp(-z * z)
        elif self.kind == "poschl_teller":
            s = self.params["s"]
            out = -s * (s + 1.0) * P.polyval(np.tanh(arr), _tanh_derivative_polys(q)[q])
        else:
            rend = self.params["r"][-1]
            out = np.where(arr < rend, self._spline(np.minimum(arr, rend), q), 0.0)
        out = out * self.scale
        return float(out) if out.ndim == 0 else out

    def taylor(self, order: int = 24) -> tuple[np.ndarray, float]:
        """
        Taylor coefficients of V about r = 0 and the radius where they are valid.

        Returns ``(coeffs, radius)`` with V(r) = sum coeffs[i] r^i for r < radius.
        """
        c = np.zeros(order + 1)
        if self.is_zero:
            return c, math.inf
        if self.kind == "square_well":
            c[0] = -self.params["V0"] * self.scale
            return c, float(self.params["a"])
        if self.kind == "gaussian":
            w, amp = self.params["w"], self.params["A"] * self.scale
            for i in range(0, order // 2 + 1):
                c[2 * i] = amp * (-1.0) ** i / (math.factorial(i) * w ** (2 * i))
            return c, math.inf
        if self.kind == "poschl_teller":
            s = self.params["s"]
            polys = _tanh_derivative_polys(order)
            for q in range(order + 1):
                c[q] = -s * (s + 1.0) * self.scale * polys[q][0] / math.factorial(q)
            # series for sech^2 converges for |x| < pi/2
            return c, 0.5 * math.pi
        coef = self._spline.c[:, 0][::-1] * self.scale
        c[: min(4, order + 1)] = coef[: min(4, order + 1)]
        return c, float(self.params["r"][1])

    # --------------------------------------------------------------- integrals
    def radial_integral(self, f: Callable[[np.ndarray], np.ndarray], epsrel: float = 1e-12) -> float:
        """Integral of ``f(r)`` over (0, inf), split at the profile's knots."""
        if self.kind == "tabulated":
            r = self.params["r"]
            a, b = r[:-1], r[1:]
            mid, half = 0.5 * (a + b), 0.5 * (b - a)
            nodes = mid[:, None] + half[:, None] * _GL_X[None, :]
            vals = np.asarray(f(nodes.ravel())).reshape(nodes.shape)
            return float(np.sum((vals * _GL_W[None, :]).sum(axis=1) * half))
        edges = [0.0, *self.knots]
        total = 0.0
        for lo, hi in zip(edges[:-1], edges[1:]):
            total += self._quad(f, lo, hi, epsrel)
        if self.kind != "square_well":
            rs = max(self.support_radius, edges[-1])
            total += self._quad(f, edges[-1], rs, epsrel) if rs > edges[-1] else 0.0
            total += self._quad(f, rs, math.inf, epsrel)
        return total

    @staticmethod
    def _quad(f, lo, hi, epsrel) -> float:
        val, err, *info = integrate.quad(
            lambda x: float(f(np.asarray(x))), lo, hi, epsabs=1e-300, epsrel=epsrel, limit=400, full_output=1
        )
        if len(info) > 1 and err > 1e-8 * max(abs(val), 1e-300) and err > 1e-14:
            raise IntegrationError(f"radial quadrature failed on [{lo}, {hi}]: {info[1]}")
        return float(val)

    def check_decay(self, samples: int = 400) -> float:
        """sup |V(r)| (1 + r)^rho over a sample grid; raises if not finite."""
        rmax = 10.0 * max(self.support_radius, 1.0)
        r = np.linspace(0.0, rmax, samples)
        with np.errstate(over="ignore", invalid="ignore"):
            bound = np.abs(self(r)) * (1.0 + r) ** self.rho
        sup = float(np.max(np.where(np.abs(self(r)) == 0.0, 0.0, bound)))
        if not math.isfinite(sup):
            raise ConfigurationError(f"|V|(1+r)^rho is unbounded for rho={self.rho}")
        return sup


# ------------------------------------------------------------------ factories
def zero(n: int, rho: float = DEFAULT_RHO) -> Potential:
    return Potential(n, "zero", {}, rho)


def square_well(n: int, V0: float, a: float, rho: float = DEFAULT_RHO) -> Potential:
    """V = -V0 on the ball of radius a, zero outside."""
    if V0 < 0.0 or a <= 0.0:
        raise ConfigurationError("square_well needs V0 >= 0 and a > 0")
    return Potential(n, "square_well", {"V0": float(V0), "a": float(a)}, rho)


def gaussian(n: int, A: float, w: float, rho: float = DEFAULT_RHO) -> Potential:
    """V = A exp(-r^2 / w^2)."""
    if w <= 0.0:
        raise ConfigurationError("gaussian width must be positive")
    return Potential(n, "gaussian", {"A": float(A), "w": float(w)}, rho)


def poschl_teller(s: float, rho: float = DEFAULT_RHO, n: int = 1) -> Potential:
    """V = -s(s+1) sech^2(x) on the line."""
    return Potential(n, "poschl_teller", {"s": float(s)}, rho)


def tabulated(n: int, r, values, rho: float = DEFAULT_RHO) -> Potential:
    """
    Cubic-spline interpolant of sampled values, zero beyond the last node.

    The spline is clamped (V'(0) = 0) at the origin so that V is smooth as
    a function on R^n, and natural at the outer end.
    """
    r = np.array(r, dtype=float)
    values = np.array(values, dtype=float)
    if r.ndim != 1 or r.size < 3 or values.shape != r.shape:
        raise ConfigurationError("tabulated potential needs matching 1-d arrays of length >= 3")
    if r[0] != 0.0 or np.any(np.diff(r) <= 0.0):
        raise ConfigurationError("tabulated grid must start at 0 and increase strictly")
    r.setflags(write=False)
    values.setflags(write=False)
    spline = CubicSpline(r, values, bc_type=((1, 0.0), (2, 0.0)))
    return Potential(n, "tabulated", {"r": r, "values": values}, rho, 1.0, spline)


# ---------------------------------------------------------- module functions
def evaluate(pot: Potential, r):
    """V(r); see :meth:`Potential.evaluate`."""
    return pot.evaluate(r)


def moment_power(pot: Potential, p: int) -> float:
    """Integral of V(x)^p over R^n."""
    if p < 1:
        raise DomainError("power must be a positive integer")
    if pot.is_zero:
        return 0.0
    n = pot.dimension
    val = pot.radial_integral(lambda r: pot.evaluate(r) ** p * r ** (n - 1), epsrel=1e-12)
    return sphere_volume(n) * val


def moment_grad_sq(pot: Potential) -> float:
    """Integral of |grad V|^2 over R^n."""
    if not pot.is_smooth:
        raise UnsupportedProfileError(f"profile {pot.kind!r} has no square-integrable gradient")
    if pot.is_zero:
        return 0.0
    n = pot.dimension
    val = pot.radial_integral(lambda r: pot.derivative(r, 1) ** 2 * r ** (n - 1), epsrel=1e-12)
    return sphere_volume(n) * val
