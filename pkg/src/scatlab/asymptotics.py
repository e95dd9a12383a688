"""
Heat-trace coefficients and high-energy polynomials.

The small-t expansion

    Tr(e^{-tH} - e^{-tH0}) ~ sum_j a_j(n, V) t^{j - n/2}

is computed two ways: from closed forms in the moments of V, and from a
general generator that expands products of iterated commutators
V^{(k)} = [H0, V^{(k-1)}] symbolically into normal-ordered differential
operators and integrates the resulting coefficient functions.

Symbolic layer
--------------
An *expression* is a linear combination of monomials in Cartesian
derivatives of V.  A monomial is a sorted tuple of multi-indices, the
tuple (a, b) standing for (d^a V)(d^b V).  A ``DiffOp`` maps a multi-index
r to the expression multiplying d^r, with coefficients placed to the left.
All coefficients are exact ``Fraction`` values.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DomainError, UnsupportedProfileError
from .potential import Potential, moment_grad_sq, moment_power
from .specfun import gamma_reciprocal, sphere_volume

__all__ = [
    "DiffOp",
    "AsymptoticData",
    "c_coefficient",
    "commutator_expand",
    "heat_coefficient_general",
    "heat_coefficient_closed",
    "build_asymptotics",
    "eval_poly",
    "MAX_GENERAL_ORDER",
]

MAX_GENERAL_ORDER = 3

MultiIndex = tuple[int, ...]
Monomial = tuple[MultiIndex, ...]
Expr = dict[Monomial, Fraction]


# ------------------------------------------------------------ combinatorics
def c_coefficient(k: Sequence[int]) -> Fraction:
    """
    C_l(k) = (|k| + l)! / (k_1! ... k_l! (k_1 + 1)(k_1 + k_2 + 2) ... (|k| + l))
    as an exact rational.  The empty multi-index gives 1.
    """
    k = tuple(int(x) for x in k)
    if any(x < 0 for x in k):
        raise DomainError("multi-index entries must be non-negative")
    ell = len(k)
    den = 1
    partial = 0
    for i, ki in enumerate(k, start=1):
        den *= math.factorial(ki)
        partial += ki
        den *= partial + i
    return Fraction(math.factorial(sum(k) + ell), den)


# ------------------------------------------------------------- expressions
def _unit(n: int, j: int) -> MultiIndex:
    return tuple(1 if i == j else 0 for i in range(n))


def _add_idx(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    return tuple(x + y for x, y in zip(a, b))


def _expr_add(acc: Expr, other: Mapping[Monomial, Fraction], scale: Fraction = Fraction(1)) -> None:
    for mono, c in other.items():
        v = acc.get(mono, Fraction(0)) + scale * c
        if v:
            acc[mono] = v
        else:
            acc.pop(mono, None)


def _expr_mul(a: Expr, b: Expr) -> Expr:
    out: Expr = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            _expr_add(out, {tuple(sorted(ma + mb)): ca * cb})
    return out


def _expr_diff(e: Expr, j: int, n: int) -> Expr:
    """Partial derivative d/dx_j by the product rule."""
    ej = _unit(n, j)
    out: Expr = {}
    for mono, c in e.items():
        for i in range(len(mono)):
            new = mono[:i] + (_add_idx(mono[i], ej),) + mono[i + 1 :]
            _expr_add(out, {tuple(sorted(new)): c})
    return out


def _expr_diff_multi(e: Expr, beta: MultiIndex) -> Expr:
    n = len(beta)
    for j, b in enumerate(beta):
        for _ in range(b):
            e = _expr_diff(e, j, n)
            if not e:
                return {}
    return e


def _sub_indices(r: MultiIndex) -> Iterable[MultiIndex]:
    return itertools.product(*(range(x + 1) for x in r))


def _multi_binom(r: MultiIndex, b: MultiIndex) -> int:
    out = 1
    for x, y in zip(r, b):
        out *= math.comb(x, y)
    return out


@dataclass(frozen=True, eq=False)
class DiffOp:
    """Normal-ordered differential operator sum_r g_r(x) d^r."""

    n: int
    terms: Mapping[MultiIndex, Expr]

    @staticmethod
    def multiplication(n: int, expr: Expr) -> "DiffOp":
        return DiffOp(n, {(0,) * n: dict(expr)})

    @staticmethod
    def potential(n: int) -> "DiffOp":
        return DiffOp.multiplication(n, {(((0,) * n),): Fraction(1)})

    @staticmethod
    def laplacian_free(n: int) -> "DiffOp":
        """H0 = -Laplacian."""
        return DiffOp(n, {tuple(2 * x for x in _unit(n, j)): {(): Fraction(-1)} for j in range(n)})

    @property
    def order(self) -> int:
        return max((sum(r) for r in self.terms), default=0)

    def coefficient(self, r: Sequence[int]) -> Expr:
        return dict(self.terms.get(tuple(r), {}))

    def __add__(self, other: "DiffOp") -> "DiffOp":
        out: dict[MultiIndex, Expr] = {r: dict(e) for r, e in self.terms.items()}
        for r, e in other.terms.items():
            acc = out.setdefault(r, {})
            _expr_add(acc, e)
            if not acc:
                del out[r]
        return DiffOp(self.n, out)

    def scale(self, c: Fraction) -> "DiffOp":
        return DiffOp(self.n, {r: {m: c * v for m, v in e.items()} for r, e in self.terms.items()} if c else {})

    def __sub__(self, other: "DiffOp") -> "DiffOp":
        return self + other.scale(Fraction(-1))

    def __matmul__(self, other: "DiffOp") -> "DiffOp":
        """Composition by the Leibniz rule: g d^r (h d^s) = sum C(r,b) g (d^b h) d^{r-b+s}."""
        out: dict[MultiIndex, Expr] = {}
        for r, g in self.terms.items():
            for s, h in other.terms.items():
                for b in _sub_indices(r):
                    dh = _expr_diff_multi(h, b)
                    if not dh:
                        continue
                    coef = Fraction(_multi_binom(r, b))
                    idx = _add_idx(tuple(x - y for x, y in zip(r, b)), s)
                    acc = out.setdefault(idx, {})
                    _expr_add(acc, _expr_mul(g, dh), coef)
                    if not acc:
                        del out[idx]
        return DiffOp(self.n, out)

    def commutator_with_free(self) -> "DiffOp":
        h0 = DiffOp.laplacian_free(self.n)
        return (h0 @ self) - (self @ h0)

    def apply_symbol(self, x: np.ndarray, xi: np.ndarray, derivs) -> complex:
        """
        Value of e^{-i<x,xi>} (this operator)(e^{i<x,xi>}) at x, i.e. the
        symbol sum_r g_r(x) (i xi)^r.  ``derivs(alpha, x)`` returns d^alpha V.
        """
        total = 0j
        for r, e in self.terms.items():
            sym = complex(np.prod((1j * xi) ** np.asarray(r)))
            total += sym * _expr_value(e, x, derivs)
        return total


def _expr_value(e: Expr, x: np.ndarray, derivs) -> float:
    val = 0.0
    for mono, c in e.items():
        term = float(c)
        for alpha in mono:
            term *= derivs(alpha, x)
        val += term
    return val


@lru_cache(maxsize=None)
def _iterated_commutator(n: int, k: int) -> DiffOp:
    op = DiffOp.potential(n)
    for _ in range(k):
        op = op.commutator_with_free()
    return op


@lru_cache(maxsize=None)
def _product(n: int, k: tuple[int, ...]) -> DiffOp:
    if not k:
        return DiffOp.multiplication(n, {(): Fraction(1)})
    op = _iterated_commutator(n, k[0])
    for ki in k[1:]:
        op = op @ _iterated_commutator(n, ki)
    return op


def commutator_expand(pot: Potential | None, k: Sequence[int], n: int | None = None) -> DiffOp:
    """
    Normal-ordered expansion of V^{(k_1)} ... V^{(k_m)} with
    V^{(q)} = [H0, V^{(q-1)}], H0 = -Laplacian.
    """
    if pot is None and n is None:
        raise DomainError("either a potential or a dimension is required")
    n = pot.dimension if n is None else n
    k = tuple(int(x) for x in k)
    if any(x < 0 for x in k):
        raise DomainError("commutator orders must be non-negative")
    if pot is not None and sum(k) > 0 and not pot.is_smooth:
        raise UnsupportedProfileError(f"profile {pot.kind!r} cannot be differentiated {sum(k)} times")
    return _product(n, k)


# ---------------------------------------------------- radial reduction
# A Cartesian derivative of a radial f is a sum of terms c x^beta r^{-s} f^{(q)}(r).
RadialTerm = tuple[MultiIndex, int, int]


@lru_cache(maxsize=None)
def _cartesian_to_radial(alpha: MultiIndex) -> tuple[tuple[RadialTerm, Fraction], ...]:
    n = len(alpha)
    terms: dict[RadialTerm, Fraction] = {((0,) * n, 0, 0): Fraction(1)}
    for j, a in enumerate(alpha):
        ej = _unit(n, j)
        for _ in range(a):
            nxt: dict[RadialTerm, Fraction] = {}

            def put(key, c):
                v = nxt.get(key, Fraction(0)) + c
                if v:
                    nxt[key] = v
                else:
                    nxt.pop(key, None)

            for (beta, s, q), c in terms.items():
                if beta[j]:
                    put((tuple(b - e for b, e in zip(beta, ej)), s, q), c * beta[j])
                up = _add_idx(beta, ej)
                if s:
                    put((up, s + 2, q), -c * s)
                put((up, s + 1, q + 1), c)
            terms = nxt
    return tuple(sorted(terms.items()))


def _sphere_ratio(beta: MultiIndex) -> Fraction:
    """Integral of omega^beta over S^{n-1} divided by Vol(S^{n-1}), exactly."""
    if any(b % 2 for b in beta):
        return Fraction(0)
    num = 1
    for b in beta:
        for t in range(b - 1, 0, -2):
            num *= t
    den = 1
    n = len(beta)
    for t in range(sum(beta) // 2):
        den *= n + 2 * t
    return Fraction(num, den)


def _radial_reduce(e: Expr, n: int, extra_v: int = 0) -> dict[tuple[int, tuple[int, ...]], Fraction]:
    """
    Spherical average of an expression times V^extra_v, as a combination of
    radial integrands r^p prod V^{(q_i)}(r); key (p, sorted q tuple).
    """
    out: dict[tuple[int, tuple[int, ...]], Fraction] = {}
    for mono, c in e.items():
        factors = [_cartesian_to_radial(a) for a in mono]
        for combo in itertools.product(*factors):
            beta = (0,) * n
            s = 0
            qs = [0] * extra_v
            coef = c
            for (b, si, q), ci in combo:
                beta = _add_idx(beta, b)
                s += si
                qs.append(q)
                coef *= ci
            ratio = _sphere_ratio(beta)
            if not ratio:
                continue
            key = (sum(beta) - s, tuple(sorted(qs)))
            v = out.get(key, Fraction(0)) + coef * ratio
            if v:
                out[key] = v
            else:
                out.pop(key, None)
    return out


def _integrate_radial(pot: Potential, reduced: Mapping[tuple[int, tuple[int, ...]], Fraction]) -> float:
    """Vol(S^{n-1}) * sum_c c * int_0^inf r^{n-1+p} prod V^{(q)} dr."""
    if not reduced:
        return 0.0
    n = pot.dimension
    qmax = max(max(qs, default=0) for _, qs in reduced)
    if qmax > 0 and not pot.is_smooth:
        raise UnsupportedProfileError(f"profile {pot.kind!r} is not smooth enough")
    items = sorted(reduced.items())

    def integrand(r):
        r = np.asarray(r, dtype=float)
        d = [pot.derivative(r, q) for q in range(qmax + 1)]
        total = np.zeros_like(r)
        with np.errstate(divide="ignore", invalid="ignore"):
            for (p, qs), c in items:
                term = float(c) * r ** (n - 1 + p)
                for q in qs:
                    term = term * d[q]
                total = total + np.where(np.isfinite(term), term, 0.0)
        return total

    return sphere_volume(n) * pot.radial_integral(integrand, epsrel=1e-13)


def _double_factorial_ratio(r: MultiIndex) -> Fraction:
    """prod Gamma((r_i + 1)/2) / pi^{n/2} for even r_i."""
    out = Fraction(1)
    for x in r:
        for t in range(x - 1, 0, -2):
            out *= Fraction(t, 2)
    return out


def _generator_terms(n: int, j: int):
    """
    Index set {(m, k, r)}: m <= j - 1, k in {0..2(j-1)}^m,
    m + |k| + 1 - |r|/2 = j, r even componentwise, |r| <= |k|.
    """
    mmax, kmax = j - 1, 2 * (j - 1)
    for m in range(0, mmax + 1):
        for k in itertools.product(range(kmax + 1), repeat=m):
            ksum = sum(k)
            rsum2 = 2 * (m + ksum + 1 - j)
            if rsum2 < 0 or rsum2 > ksum or rsum2 % 2:
                continue
            half = rsum2 // 2
            for r in itertools.product(range(0, rsum2 + 1, 2), repeat=n):
                if sum(r) == rsum2:
                    yield m, k, r, half


@lru_cache(maxsize=None)
def _general_reduced(n: int, j: int) -> tuple[tuple[tuple[int, tuple[int, ...]], Fraction], ...]:
    """
    Exact radial integrand for a_j / (pi^{n/2} / (2 pi)^n), summed over the
    generator's index set.
    """
    acc: dict[tuple[int, tuple[int, ...]], Fraction] = {}
    for m, k, r, half in _generator_terms(n, j):
        ksum = sum(k)
        pref = (
            Fraction((-1) ** half)  # (-i)^{|r|}, |r| even
            * c_coefficient(k)
            * (-1) ** (m + ksum + 1)
            * _double_factorial_ratio(r)
            / ((m + 1) * math.factorial(m + ksum))
        )
        g = _product(n, k).coefficient(r)
        if not g:
            continue
        for key, c in _radial_reduce(g, n, extra_v=1).items():
            v = acc.get(key, Fraction(0)) + pref * c
            if v:
                acc[key] = v
            else:
                acc.pop(key, None)
    return tuple(sorted(acc.items()))


def heat_coefficient_general(pot: Potential, n: int | None = None, j: int = 1) -> float:
    """a_j(n, V) from the general commutator generator (j <= 3)."""
    n = pot.dimension if n is None else n
    if n != pot.dimension:
        raise DomainError("dimension mismatch")
    if j < 1:
        raise DomainError("order must be >= 1")
    if j > MAX_GENERAL_ORDER:
        raise UnsupportedProfileError(f"general generator supports j <= {MAX_GENERAL_ORDER}")
    if pot.is_zero:
        return 0.0
    reduced = dict(_general_reduced(n, j))
    return math.pi ** (0.5 * n) / (2.0 * math.pi) ** n * _integrate_radial(pot, reduced)


def heat_coefficient_closed(pot: Potential, n: int | None = None, j: int = 1) -> float:
    """
    Closed forms, with K_n = Gamma(n/2) Vol(S^{n-1}) / (2 pi)^n = (4 pi)^{-n/2} * 2:

        a_1 = -K_n/2  int V
        a_2 = +K_n/4  int V^2
        a_3 = -K_n/12 int (V^3 + |grad V|^2 / 2)
    """
    n = pot.dimension if n is None else n
    if n != pot.dimension:
        raise DomainError("dimension mismatch")
    if j not in (1, 2, 3):
        raise DomainError("closed forms exist for j = 1, 2, 3")
    if pot.is_zero:
        return 0.0
    kn = math.gamma(0.5 * n) * sphere_volume(n) / (2.0 * math.pi) ** n
    if j == 1:
        return -kn / 2.0 * moment_power(pot, 1)
    if j == 2:
        return kn / 4.0 * moment_power(pot, 2)
    return -kn / 12.0 * (moment_power(pot, 3) + 0.5 * moment_grad_sq(pot))


# ------------------------------------------------------ high-energy data
@dataclass(frozen=True)
class AsymptoticData:
    """
    Heat coefficients and the high-energy polynomials

        p_n(lambda) = sum_{j <= (n-1)/2} c_j lambda^{n/2 - j - 1}
        P_n(lambda) = 2 pi i beta_n + sum_{j <= (n-1)/2} C_j lambda^{n/2 - j}

    ``a[j-1]`` holds a_j.  ``c`` and ``C`` are indexed the same way and have
    length floor((n-1)/2).  ``c_next`` is the first omitted coefficient of
    p_n, used for tail estimates (``None`` when the profile is too rough
    for the needed coefficient).
    """

    n: int
    a: tuple[float, ...]
    beta: float
    c: tuple[complex, ...]
    C: tuple[complex, ...]
    c_next: complex | None = 0j

    def p(self, lam) -> complex:
        return eval_poly(self, "p", lam)

    def P(self, lam) -> complex:
        return eval_poly(self, "P", lam)


def _c_from_a(n: int, j: int, aj: float) -> complex:
    return 2j * math.pi * aj * gamma_reciprocal(0.5 * n - j)


def _C_from_a(n: int, j: int, aj: float) -> complex:
    return 2j * math.pi * aj * gamma_reciprocal(0.5 * n - j + 1)


def build_asymptotics(pot: Potential, n: int | None = None, max_j: int | None = None) -> AsymptoticData:
    """
    Fill a_j (closed forms), beta_n, c_j, C_j for dimension n.

    ``max_j`` defaults to 3 for smooth profiles and 2 otherwise.
    """
    n = pot.dimension if n is None else n
    if n != pot.dimension:
        raise DomainError("dimension mismatch")
    if not 1 <= n <= 5:
        raise DomainError("dimension must be in 1..5")
    if max_j is None:
        max_j = 3 if pot.is_smooth else 2
    jpoly = (n - 1) // 2
    max_j = min(max(max_j, jpoly, n // 2, 1), 3)
    a = tuple(heat_coefficient_closed(pot, n, j) for j in range(1, max_j + 1))
    beta = a[n // 2 - 1] if n % 2 == 0 else 0.0
    c = tuple(_c_from_a(n, j, a[j - 1]) for j in range(1, jpoly + 1))
    C = tuple(_C_from_a(n, j, a[j - 1]) for j in range(1, jpoly + 1))
    c_next = _c_from_a(n, jpoly + 1, a[jpoly]) if jpoly + 1 <= len(a) else None
    return AsymptoticData(n, a, float(beta), c, C, c_next)


def eval_poly(data: AsymptoticData, which: str, lam):
    """Evaluate p_n or P_n at lambda > 0 (array input allowed)."""
    lam_arr = np.asarray(lam, dtype=float)
    if np.any(lam_arr <= 0.0):
        raise DomainError("lambda must be positive")
    n = data.n
    if which == "p":
        out = np.zeros(lam_arr.shape, dtype=complex)
        for j, cj in enumerate(data.c, start=1):
            out = out + cj * lam_arr ** (0.5 * n - j - 1)
    elif which == "P":
        out = np.full(lam_arr.shape, 2j * math.pi * data.beta, dtype=complex)
        for j, Cj in enumerate(data.C, start=1):
            out = out + Cj * lam_arr ** (0.5 * n - j)
    else:
        raise DomainError("which must be 'p' or 'P'")
    return complex(out) if out.ndim == 0 else out
