"""
Partial-wave solver for the reduced radial equation

    -u'' + [(nu^2 - 1/4)/r^2 + V(r)] u = lambda u,    nu = l + (n - 2)/2.

Phase shifts are obtained by Numerov integration of the regular solution
and matching to Riccati-Bessel functions outside the support of V.  The
energy derivative of the solution is integrated alongside, so that
d(delta)/d(lambda) is available without numerical differentiation.  Each
quantity is computed on two nested grids and Richardson-extrapolated, and
the phase of a numerically propagated free solution on the same grid is
subtracted to cancel the dispersion of the discrete wave number.

In one dimension the even and odd parity channels play the role of the
partial waves, with nu = -1/2 and nu = +1/2 respectively.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np
from scipy import optimize, special

from . import _kernels
from .errors import (
    BranchError,
    ConfigurationError,
    ConsistencyError,
    DomainError,
    InconclusiveResonanceError,
)
from .potential import Potential
from .specfun import riccati_arrays

__all__ = [
    "SolverSettings",
    "PartialWave",
    "PhaseShiftTable",
    "BoundStateCatalog",
    "ResonanceReport",
    "degeneracy",
    "partial_waves",
    "momentum_grid",
    "solve_radial",
    "phase_shift",
    "phase_shift_table",
    "jost_1d",
    "count_bound_states",
    "eigenvalues",
    "bound_state_catalog",
    "zero_energy_ratio",
    "detect_resonance",
]


@dataclass(frozen=True)
class SolverSettings:
    """Numerical settings shared by the radial, scattering and Levinson stages."""

    k_min: float = 1e-3
    k_max: float = 40.0
    points_per_decade: int = 400
    step: float = 0.01
    kh_max: float = 0.05
    r_max_factor: float = 1.25
    l_max: int | None = None
    l_tail_tol: float = 1e-8
    branch_tail_tol: float = 0.5
    resonance_tol: float = 1e-6
    eigen_tol: float = 1e-12
    tail_fit: bool = True

    def __post_init__(self):
        if not self.k_min > 0.0:
            raise ConfigurationError("k_min must be positive")
        if self.k_max / self.k_min < 10.0:
            raise ConfigurationError("k_max / k_min must be at least 10")
        if self.points_per_decade < 4:
            raise ConfigurationError("points_per_decade must be at least 4")
        for name in ("step", "kh_max", "l_tail_tol", "branch_tail_tol", "resonance_tol", "eigen_tol"):
            if not getattr(self, name) > 0.0:
                raise ConfigurationError(f"{name} must be positive")
        if self.r_max_factor < 1.0:
            raise ConfigurationError("r_max_factor must be >= 1")
        if self.l_max is not None and self.l_max < 0:
            raise ConfigurationError("l_max must be non-negative")


def degeneracy(n: int, ell: int) -> int:
    """Dimension of the space of degree-``ell`` spherical harmonics on S^{n-1}."""
    if n < 2:
        raise DomainError("degeneracy is defined for n >= 2")
    if ell < 0:
        raise DomainError("angular momentum must be non-negative")
    if ell == 0:
        return 1
    return (2 * ell + n - 2) * math.factorial(ell + n - 3) // (math.factorial(ell) * math.factorial(n - 2))


@dataclass(frozen=True)
class PartialWave:
    """
    One angular channel.  For ``dimension == 1``, ``ell`` 0/1 labels the
    even/odd parity channel.
    """

    dimension: int
    ell: int

    def __post_init__(self):
        if self.dimension < 1 or self.ell < 0:
            raise DomainError("invalid partial wave")
        if self.dimension == 1 and self.ell > 1:
            raise DomainError("dimension 1 has only the parity channels 0 and 1")

    @property
    def nu(self) -> float:
        if self.dimension == 1:
            return -0.5 if self.ell == 0 else 0.5
        return self.ell + 0.5 * (self.dimension - 2)

    @property
    def degeneracy(self) -> int:
        return 1 if self.dimension == 1 else degeneracy(self.dimension, self.ell)


def partial_waves(n: int, lmax: int) -> list[PartialWave]:
    if n == 1:
        return [PartialWave(1, 0), PartialWave(1, 1)]
    return [PartialWave(n, ell) for ell in range(lmax + 1)]


def momentum_grid(settings: SolverSettings) -> np.ndarray:
    """Geometric grid in k = sqrt(lambda) from k_min to k_max."""
    decades = math.log10(settings.k_max / settings.k_min)
    npts = int(round(settings.points_per_decade * decades)) + 1
    return settings.k_min * 10.0 ** (np.arange(npts) * (decades / (npts - 1)))


# --------------------------------------------------------------------- grids
class _RadialGrid:
    """Breakpoint-aligned nested grids r_j = j h_L with h_L = H / 2^L."""

    def __init__(self, pot: Potential, settings: SolverSettings, r_match: float | None = None):
        self.pot = pot
        self.settings = settings
        bps = pot.breakpoints
        step = settings.step
        if bps:
            a = bps[0]
            base = a / math.ceil(a / step)
            for b in bps[1:]:
                if abs(b / base - round(b / base)) > 1e-9:
                    raise ConfigurationError("breakpoints are not commensurate with the grid")
        else:
            base = step
        self.base = base
        rs = pot.support_radius
        if r_match is None:
            r_match = settings.r_max_factor * rs
        r_match = max(r_match, rs + 2.0 * base, 4.0 * base)
        self.jm_base = int(math.ceil(r_match / base - 1e-9))
        self.r_match = self.jm_base * base
        if self.r_match <= rs:
            raise ConfigurationError("matching radius lies inside the support of V")
        self.taylor, self.taylor_radius = pot.taylor()
        self.vmin = pot.min_value()
        self.abs_moment = pot.radial_integral(lambda r: np.abs(pot.evaluate(r)), epsrel=1e-8)
        self._cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}
        self._free: dict[int, np.ndarray] = {}

    def h(self, level: int) -> float:
        return self.base / 2**level

    def jm(self, level: int) -> int:
        return self.jm_base * 2**level

    def arrays(self, level: int) -> tuple[np.ndarray, np.ndarray]:
        if level not in self._cache:
            r = np.arange(self.jm(level) + 2) * self.h(level)
            self._cache[level] = (
                np.ascontiguousarray(self.pot.evaluate(r, side="left"), dtype=float),
                np.ascontiguousarray(self.pot.evaluate(r, side="right"), dtype=float),
            )
        return self._cache[level]

    def free_arrays(self, level: int) -> np.ndarray:
        if level not in self._free:
            self._free[level] = np.zeros(self.jm(level) + 2)
        return self._free[level]

    def level_for(self, lam: np.ndarray) -> np.ndarray:
        kloc = np.sqrt(np.maximum(np.abs(lam) - min(self.vmin, 0.0), 1e-300))
        need = np.log2(np.maximum(self.base * kloc / self.settings.kh_max, 1.0))
        # slack keeps a round grid top (k_max * step = kh_max * 2^L) off a level boundary
        return np.ceil(need - 0.05).astype(int)

    def start_index(self, nu: float, lam: np.ndarray, level: int) -> np.ndarray:
        h = self.h(level)
        kloc = np.sqrt(np.abs(lam) + max(-self.vmin, 0.0) + 1e-300)
        r0 = np.minimum(0.25, 1.0 / kloc)
        r0 = np.maximum(r0, 5.0 * max(nu, 0.0) * h)
        r0 = np.minimum(r0, 0.5 * self.taylor_radius)
        j0 = np.maximum(np.floor(r0 / h), 1).astype(np.int64)
        return np.minimum(j0, self.jm(level) - 3)


def _wrap(x):
    """Reduce modulo pi to (-pi/2, pi/2]."""
    return x - np.pi * np.ceil(x / np.pi - 0.5)


def _raw_match(grid: _RadialGrid, nu: float, lam: np.ndarray, level: int, free: bool, want_y: bool = True):
    h = grid.h(level)
    if free:
        vl = vr = grid.free_arrays(level)
        vt = np.zeros(1)
    else:
        vl, vr = grid.arrays(level)
        vt = grid.taylor
    j0 = grid.start_index(nu, lam, level)
    return _kernels.integrate_many(
        float(nu), np.ascontiguousarray(lam, dtype=float), h, vl, vr, vt, j0, grid.jm(level), want_y
    )


def _phase_from_match(out: np.ndarray, nu: float, k: np.ndarray, rm: float):
    """Principal phase and d(delta)/d(lambda) from (u, u', y, y') at r_match."""
    u, du, y, dy = out[:, 0], out[:, 1], out[:, 2], out[:, 3]
    x = k * rm
    jj, yy, djj, dyy = riccati_arrays(nu, x)
    with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
        d2j = ((nu * nu - 0.25) / (x * x) - 1.0) * jj
        d2y = ((nu * nu - 0.25) / (x * x) - 1.0) * yy
        kl = 0.5 / k
        num = du * jj - k * u * djj
        den = du * yy - k * u * dyy
        dnum = dy * jj + du * djj * rm * kl - kl * u * djj - k * y * djj - k * u * d2j * rm * kl
        dden = dy * yy + du * dyy * rm * kl - kl * u * dyy - k * y * dyy - k * u * d2y * rm * kl
        delta = _wrap(np.arctan2(num, den))
        dprime = (den * dnum - num * dden) / (num * num + den * den)
    bad = ~(np.isfinite(delta) & np.isfinite(dprime))
    delta = np.where(bad, 0.0, delta)
    dprime = np.where(bad, 0.0, dprime)
    return delta, dprime


NEGLIGIBLE_PHASE = 1e-15


def _negligible(grid: _RadialGrid, nu: float, lam: np.ndarray) -> np.ndarray:
    """
    Points where the centrifugal barrier makes the channel inert.

    Below the turning point J^_nu is increasing, so the first-order phase
    is bounded by J^_nu(k_eff R)^2 int |V| / k with R the support radius and
    k_eff the largest local wave number inside the well.
    """
    if nu < 2.0:
        return np.zeros(lam.shape, dtype=bool)
    k = np.sqrt(lam)
    keff = np.sqrt(lam + max(-grid.vmin, 0.0))
    x = keff * grid.pot.support_radius
    below = x < nu - 1.0
    jj = np.zeros_like(lam)
    if np.any(below):
        jj[below] = riccati_arrays(nu, x[below])[0]
    bound = np.where(below, jj * jj * grid.abs_moment / k * (nu + 2.0), np.inf)
    return below & (np.nan_to_num(bound, nan=np.inf) < NEGLIGIBLE_PHASE)


def _channel_values(grid: _RadialGrid, nu: float, lam: np.ndarray):
    """Richardson-extrapolated, free-subtracted (delta mod pi, d delta / d lambda)."""
    lam = np.asarray(lam, dtype=float)
    skip = _negligible(grid, nu, lam)
    if np.any(skip):
        delta = np.zeros_like(lam)
        dprime = np.zeros_like(lam)
        if not np.all(skip):
            delta[~skip], dprime[~skip] = _channel_values_full(grid, nu, lam[~skip])
        return delta, dprime
    return _channel_values_full(grid, nu, lam)


def _channel_values_full(grid: _RadialGrid, nu: float, lam: np.ndarray):
    k = np.sqrt(lam)
    levels = grid.level_for(lam)
    delta = np.empty_like(lam)
    dprime = np.empty_like(lam)
    for level in np.unique(levels):
        sel = levels == level
        parts = []
        for lv in (level, level + 1):
            dv, pv = _phase_from_match(_raw_match(grid, nu, lam[sel], lv, False), nu, k[sel], grid.r_match)
            d0, p0 = _phase_from_match(_raw_match(grid, nu, lam[sel], lv, True), nu, k[sel], grid.r_match)
            parts.append((_wrap(dv - d0), pv - p0))
        (dh, ph), (dh2, ph2) = parts
        delta[sel] = _wrap(dh2 + _wrap(dh2 - dh) / 15.0)
        dprime[sel] = ph2 + (ph2 - ph) / 15.0
    return delta, dprime


# -------------------------------------------------------------- public ops
def solve_radial(pot: Potential, pw: PartialWave, energy: float, r_grid: Sequence[float]):
    """
    Regular solution of the reduced radial equation on a uniform grid.

    ``r_grid`` must be uniform and start at 0.  Returns ``(u, du_end)`` with
    u ~ r^(nu + 1/2) near the origin and the derivative at the last node.
    """
    r = np.asarray(r_grid, dtype=float)
    if r[0] != 0.0 or r.size < 8:
        raise DomainError("radial grid must start at 0 and have at least 8 nodes")
    h = float(r[1] - r[0])
    if np.max(np.abs(np.diff(r) - h)) > 1e-9 * h:
        raise DomainError("radial grid must be uniform")
    nu = pw.nu
    if h * h * abs(energy - pot.min_value()) >= 0.05:
        warnings.warn("radial step is coarse for this energy; expect reduced accuracy", stacklevel=2)
    ext = np.append(r, r[-1] + h)
    vl = np.ascontiguousarray(pot.evaluate(ext, side="left"), dtype=float)
    vr = np.ascontiguousarray(pot.evaluate(ext, side="right"), dtype=float)
    vt, rad = pot.taylor()
    kloc = math.sqrt(abs(energy) + max(-pot.min_value(), 0.0) + 1e-300)
    r0 = min(0.25, 1.0 / kloc, 0.5 * rad, r[-1] / 4.0)
    r0 = max(r0, min(5.0 * max(nu, 0.0) * h, 0.5 * rad))
    j0 = max(int(r0 / h), 1)
    u = _kernels.integrate_path(float(nu), float(energy), h, vl, vr, vt, j0, r.size)
    if j0 > 1:
        # below the start point the Frobenius series is the solution
        for j in range(1, j0):
            rr = j * h
            a, _, _, _ = _kernels.frobenius_start(float(nu), float(energy), vt, rr, rr + h)
            u[j] = a * rr ** (nu + 0.5)
    if nu < 0:
        u[0] = 1.0
    uu = u[: r.size]
    jl = r.size - 1
    f = lambda j: ((nu * nu - 0.25) / (ext[j] ** 2) + vl[j] - energy) * u[j]  # noqa: E731
    du = (u[jl + 1] - u[jl - 1] - h * h / 6.0 * (f(jl + 1) - f(jl - 1))) / (2.0 * h)
    return uu, du


def phase_shift(pot: Potential, pw: PartialWave, lam: float, settings: SolverSettings | None = None) -> float:
    """Phase shift modulo pi, reduced to (-pi/2, pi/2]."""
    if not lam > 0.0:
        raise DomainError("energy must be positive")
    if pot.is_zero:
        return 0.0
    grid = _RadialGrid(pot, settings or SolverSettings())
    d, _ = _channel_values(grid, pw.nu, np.array([float(lam)]))
    return float(d[0])


@dataclass(frozen=True, eq=False)
class PhaseShiftTable:
    """Branch-continuous phase shifts of one channel on an energy grid."""

    wave: PartialWave
    lam: np.ndarray
    delta: np.ndarray
    dprime: np.ndarray
    refinements: int = 0

    @property
    def k(self) -> np.ndarray:
        return np.sqrt(self.lam)


def _unwrap_down(grid: _RadialGrid, nu: float, lam: np.ndarray, raw: np.ndarray, dp: np.ndarray, depth: int = 0):
    """
    Continuous branch through ``raw`` (known mod pi), walking down from the
    top.  Each step is predicted from the trapezoid of delta'; if the
    prediction and the nearest representative disagree by more than pi/4
    the interval is subdivided.
    """
    out = np.empty_like(raw)
    out[-1] = raw[-1]
    refinements = 0
    for i in range(raw.size - 2, -1, -1):
        pred = out[i + 1] - 0.5 * (dp[i] + dp[i + 1]) * (lam[i + 1] - lam[i])
        cand = pred + _wrap(raw[i] - pred)
        if abs(cand - pred) > 0.25 * np.pi and depth < 12:
            sub_lam = np.geomspace(lam[i], lam[i + 1], 9)
            sd, sp = _channel_values(grid, nu, sub_lam)
            sd[-1] = out[i + 1] - np.pi * round((out[i + 1] - sd[-1]) / np.pi)
            path, r = _unwrap_down(grid, nu, sub_lam, sd, sp, depth + 1)
            path = path + (out[i + 1] - path[-1])
            cand = path[0]
            refinements += 1 + r
        out[i] = cand
    return out, refinements


def phase_shift_table(
    pot: Potential, pw: PartialWave, settings: SolverSettings | None = None, lam: np.ndarray | None = None, *, _grid=None
) -> PhaseShiftTable:
    """
    Branch-continuous phase shifts on the energy grid.

    The branch is fixed at the top of the grid by taking the representative
    of delta(lambda_max) mod pi closest to zero, then followed downward.
    """
    settings = settings or SolverSettings()
    if lam is None:
        lam = momentum_grid(settings) ** 2
    lam = np.asarray(lam, dtype=float)
    if lam.ndim != 1 or lam.size < 2 or np.any(lam <= 0.0) or np.any(np.diff(lam) <= 0.0):
        raise DomainError("energy grid must be positive and strictly increasing")
    if pot.is_zero:
        z = np.zeros_like(lam)
        return PhaseShiftTable(pw, lam, z, z.copy())
    grid = _grid or _RadialGrid(pot, settings)
    raw, dp = _channel_values(grid, pw.nu, lam)
    if abs(raw[-1]) > settings.branch_tail_tol:
        raise BranchError(
            f"phase shift of channel l={pw.ell} is {raw[-1]:.3g} (mod pi) at the top of the grid; "
            "increase k_max"
        )
    delta, nref = _unwrap_down(grid, pw.nu, lam, raw, dp)
    return PhaseShiftTable(pw, lam, delta, dp, nref)


# ------------------------------------------------------------------ 1D Jost
class _LineGrid:
    def __init__(self, pot: Potential, settings: SolverSettings):
        self.radial = _RadialGrid(pot, settings)
        self.pot = pot
        self._cache: dict[int, tuple] = {}

    def arrays(self, level: int):
        if level not in self._cache:
            h = self.radial.h(level)
            jm = self.radial.jm(level)
            x = (np.arange(2 * jm + 1) - jm) * h
            ax = np.abs(x)
            # left/right limits in x map to outer/inner radial limits for x < 0
            vl = np.where(x < 0, self.pot.evaluate(ax, side="right"), self.pot.evaluate(ax, side="left"))
            vr = np.where(x < 0, self.pot.evaluate(ax, side="left"), self.pot.evaluate(ax, side="right"))
            self._cache[level] = (np.ascontiguousarray(vl), np.ascontiguousarray(vr), float(x[0]), x.size)
        return self._cache[level]


def jost_1d(pot: Potential, k, settings: SolverSettings | None = None):
    """
    Transmission and reflection amplitudes of a one-dimensional even potential.

    Returns ``(t, r_plus, r_minus)`` arrays (scalars for scalar ``k``) with
    the scattering matrix [[t, r], [r, t]].  The potential is even, so the
    left and right reflection amplitudes coincide.
    """
    settings = settings or SolverSettings()
    if pot.dimension != 1:
        raise DomainError("jost_1d needs a one-dimensional potential")
    scalar = np.ndim(k) == 0
    ks = np.atleast_1d(np.asarray(k, dtype=float))
    if np.any(ks <= 0.0):
        raise DomainError("momentum must be positive")
    if pot.is_zero:
        t = np.ones(ks.size, dtype=complex)
        r = np.zeros(ks.size, dtype=complex)
        return (t[0], r[0], r[0]) if scalar else (t, r, r.copy())
    grid = _LineGrid(pot, settings)
    levels = grid.radial.level_for(ks * ks)
    t = np.empty(ks.size, dtype=complex)
    r = np.empty(ks.size, dtype=complex)
    for level in np.unique(levels):
        sel = levels == level
        res = []
        for lv in (level, level + 1):
            vl, vr, x0, npts = grid.arrays(lv)
            out = _kernels.line_many(np.ascontiguousarray(ks[sel]), grid.radial.h(lv), vl, vr, x0, npts)
            res.append((1.0 / out[:, 0], out[:, 1] / out[:, 0]))
        (t1, r1), (t2, r2) = res
        t[sel] = t2 + (t2 - t1) / 15.0
        r[sel] = r2 + (r2 - r1) / 15.0
    defect = np.max(np.abs(np.abs(t) ** 2 + np.abs(r) ** 2 - 1.0))
    if defect > 1e-6:
        raise ConsistencyError(f"unitarity defect {defect:.2e} in the line solver")
    if scalar:
        return t[0], r[0], r[0]
    return t, r, r.copy()


# ------------------------------------------------------------- bound states
def _exterior_logderiv(nu: float, energy: float, r: float) -> float:
    """Logarithmic derivative of the decaying free solution at r (energy < 0)."""
    kap = math.sqrt(-energy)
    z = kap * r
    anu = abs(nu)
    with np.errstate(all="ignore"):
        kv = special.kve(anu, z)
        dk = -0.5 * (special.kve(abs(anu - 1.0), z) + special.kve(anu + 1.0, z))
        val = 0.5 / r + kap * dk / kv
    if math.isfinite(val):
        return float(val)
    # threshold limit z K'_nu(z) / K_nu(z) -> -nu
    return (0.5 - anu) / r


def _zero_energy_pair(nu: float, r: float):
    """
    Bounded (b) and growing (g) zero-energy free solutions, both normalised
    to 1 at r; returns their log-derivatives (Lb, Lg) at r.
    """
    if nu == -0.5:
        return 0.0, 1.0 / r
    if nu == 0.0:
        # b = sqrt(r), g = sqrt(r) (1 + ln(r / r_m))
        return 0.5 / r, 1.5 / r
    return (0.5 - nu) / r, (0.5 + nu) / r


def _shoot(grid: _RadialGrid, nu: float, energy: float, level: int):
    out = _raw_match(grid, nu, np.array([energy]), level, False, want_y=False)
    return float(out[0, 0]), float(out[0, 1]), int(out[0, 4])


def _bound_grid(pot: Potential, settings: SolverSettings) -> _RadialGrid:
    return _RadialGrid(pot, settings)


def _level_at(grid: _RadialGrid, energy: float) -> int:
    return int(grid.level_for(np.array([energy]))[0])


def _sturm_count(grid: _RadialGrid, nu: float, energy: float, level: int) -> int:
    """Number of radial eigenvalues strictly below ``energy`` (< 0)."""
    u, du, nodes = _shoot(grid, nu, energy, level)
    w = du - _exterior_logderiv(nu, energy, grid.r_match) * u
    return nodes + (1 if u * w < 0.0 else 0)


def zero_energy_ratio(pot: Potential, pw: PartialWave, settings: SolverSettings | None = None):
    """
    Zero-energy regular solution decomposed as alpha b + beta g outside the
    support, with b bounded and g growing, both normalised to 1 at r_match.

    Returns ``(q, nodes, alpha_sign)`` where q = beta / alpha (Richardson
    extrapolated) and ``nodes`` is the node count on (0, r_match).
    """
    settings = settings or SolverSettings()
    grid = _RadialGrid(pot, settings)
    return _zero_ratio(grid, pw.nu)


def _zero_ratio(grid: _RadialGrid, nu: float):
    lb, lg = _zero_energy_pair(nu, grid.r_match)
    level = _level_at(grid, 0.0)
    qs = []
    nodes = None
    sign = 1.0
    for lv in (level, level + 1):
        u, du, nd = _shoot(grid, nu, 0.0, lv)
        beta = (du - lb * u) / (lg - lb)
        alpha = u - beta
        qs.append(beta / alpha if alpha != 0.0 else math.inf)
        nodes = nd if nodes is None else nodes
        sign = math.copysign(1.0, alpha)
    q1, q2 = qs
    q = q2 + (q2 - q1) / 15.0 if math.isfinite(q1) and math.isfinite(q2) else math.inf
    return q, nodes, sign


def count_bound_states(pot: Potential, pw: PartialWave, settings: SolverSettings | None = None) -> int:
    """
    Number of negative radial eigenvalues in channel ``pw`` by Sturm
    oscillation of the zero-energy solution.

    A zero-energy (threshold) solution is not counted.
    """
    settings = settings or SolverSettings()
    if pot.is_zero:
        return 0
    grid = _RadialGrid(pot, settings)
    return _count_zero(grid, pw, settings)


def _count_zero(grid: _RadialGrid, pw: PartialWave, settings: SolverSettings) -> int:
    nu = pw.nu
    q, nodes, _ = _zero_ratio(grid, nu)
    if abs(q) < 10.0 * settings.resonance_tol:
        warnings.warn(
            f"channel l={pw.ell}: zero-energy solution is (nearly) bounded; threshold state not counted",
            stacklevel=3,
        )
        return nodes
    lb, lg = _zero_energy_pair(nu, grid.r_match)
    # q = beta/alpha; L_int < L_b  <=>  (u' - lb u)/u < 0  <=>  beta/(alpha+beta) * (lg-lb) < 0
    extra = 1 if q / (1.0 + q) < 0.0 else 0
    return nodes + extra


def _eigen_one_level(grid: _RadialGrid, nu: float, count: int, level: int, tol: float) -> list[float]:
    e_floor = grid.vmin - 1.0
    rm = grid.r_match

    def defect(e):
        u, du, _ = _shoot(grid, nu, e, level)
        return du - _exterior_logderiv(nu, e, rm) * u

    def n_below(e):
        return _sturm_count(grid, nu, e, level)

    top = -1e-300
    roots = []
    for i in range(count):
        lo, hi = e_floor, top
        # shrink [lo, hi] until exactly eigenvalue i lies inside
        for _ in range(200):
            nlo, nhi = n_below(lo), n_below(hi)
            if nlo == i and nhi == i + 1:
                break
            mid = 0.5 * (lo + hi)
            if n_below(mid) <= i:
                lo = mid
            else:
                hi = mid
        else:
            raise ConsistencyError("could not isolate eigenvalue by Sturm bisection")
        flo, fhi = defect(lo), defect(hi)
        if flo * fhi > 0.0:
            # defect sign is not monotone in scale; fall back to pure bisection
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                if n_below(mid) <= i:
                    lo = mid
                else:
                    hi = mid
                if hi - lo < tol:
                    break
            roots.append(0.5 * (lo + hi))
        else:
            roots.append(optimize.brentq(defect, lo, hi, xtol=tol, rtol=1e-15, maxiter=500))
    return roots


def eigenvalues(pot: Potential, pw: PartialWave, tol: float = 1e-12, settings: SolverSettings | None = None) -> list[float]:
    """
    Negative eigenvalues of channel ``pw`` in increasing order.

    Each root of the interior/exterior matching defect is bracketed by
    Sturm counting, refined with Brent's method, and the grid error is
    removed by Richardson extrapolation over two nested grids.
    """
    if not tol > 0.0:
        raise DomainError("tolerance must be positive")
    settings = settings or SolverSettings()
    if pot.is_zero:
        return []
    grid = _RadialGrid(pot, settings)
    count = _count_zero(grid, pw, settings)
    if count == 0:
        return []
    level = _level_at(grid, grid.vmin - 1.0)
    e1 = _eigen_one_level(grid, pw.nu, count, level, tol * 1e-2)
    e2 = _eigen_one_level(grid, pw.nu, count, level + 1, tol * 1e-2)
    roots = [b + (b - a) / 15.0 for a, b in zip(e1, e2)]
    if len(roots) != count:
        raise ConsistencyError("eigenvalue list length disagrees with the node count")
    return sorted(min(x, -1e-300) for x in roots)


@dataclass(frozen=True)
class BoundStateCatalog:
    """Negative eigenvalues per channel and the degeneracy-weighted total."""

    dimension: int
    levels: dict[int, tuple[float, ...]]
    counts: dict[int, int]
    total: int
    threshold_channels: tuple[int, ...] = ()

    def multiplicities(self) -> list[tuple[float, int]]:
        """(eigenvalue, multiplicity) pairs, one per radial eigenvalue."""
        out = []
        for ell, levels in sorted(self.levels.items()):
            m = PartialWave(self.dimension, ell).degeneracy
            out.extend((e, m) for e in levels)
        return sorted(out)


def bound_state_catalog(
    pot: Potential, settings: SolverSettings | None = None, with_energies: bool = True
) -> BoundStateCatalog:
    """
    Bound states over all channels.  Channels are scanned upward in l
    until two consecutive channels hold no bound state and are not
    threshold-resonant.
    """
    settings = settings or SolverSettings()
    n = pot.dimension
    levels: dict[int, tuple[float, ...]] = {}
    counts: dict[int, int] = {}
    thresh = []
    if pot.is_zero:
        return BoundStateCatalog(n, {}, {}, 0)
    grid = _RadialGrid(pot, settings)
    ells = [0, 1] if n == 1 else range(0, 10_000)
    empty = 0
    for ell in ells:
        pw = PartialWave(n, ell)
        q, _, _ = _zero_ratio(grid, pw.nu)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            c = _count_zero(grid, pw, settings)
        if abs(q) < 10.0 * settings.resonance_tol:
            thresh.append(ell)
        counts[ell] = c
        if with_energies and c:
            lvl = _level_at(grid, grid.vmin - 1.0)
            e1 = _eigen_one_level(grid, pw.nu, c, lvl, settings.eigen_tol * 1e-2)
            e2 = _eigen_one_level(grid, pw.nu, c, lvl + 1, settings.eigen_tol * 1e-2)
            levels[ell] = tuple(sorted(min(b + (b - a) / 15.0, -1e-300) for a, b in zip(e1, e2)))
        elif c:
            levels[ell] = ()
        if n > 1:
            empty = empty + 1 if (c == 0 and ell not in thresh) else 0
            if empty >= 2:
                break
    total = sum(PartialWave(n, ell).degeneracy * c for ell, c in counts.items())
    return BoundStateCatalog(n, levels, counts, total, tuple(thresh))


# ---------------------------------------------------------------- resonance
@dataclass(frozen=True)
class ResonanceReport:
    """Outcome of the zero-energy resonance analysis."""

    dimension: int
    resonance_present: bool
    type: str
    count: int
    c_plus: float | None = None
    c_minus: float | None = None
    ratios: dict = field(default_factory=dict)
    convention: str = ""


def detect_resonance(pot: Potential, n: int | None = None, settings: SolverSettings | None = None) -> ResonanceReport:
    """
    Zero-energy resonance analysis.

    In each relevant channel the zero-energy regular solution is split into
    bounded and growing free solutions outside the support; a resonance is
    declared when the growing part is below ``resonance_tol`` relative to the
    bounded part.  Ratios within a factor 10 above the tolerance are
    reported as inconclusive.
    """
    settings = settings or SolverSettings()
    n = pot.dimension if n is None else n
    if n != pot.dimension:
        raise DomainError("dimension mismatch between potential and request")
    if n >= 5:
        return ResonanceReport(n, False, "none", 0)
    if pot.is_zero:
        if n == 1:
            # constants solve the free equation on the line
            s = 1.0 / math.sqrt(2.0)
            return ResonanceReport(1, True, "s", 1, s, s, convention="free line: constant solution, c_plus > 0")
        return ResonanceReport(n, False, "none", 0, convention="zero potential is treated as non-resonant")
    grid = _RadialGrid(pot, settings)
    tol = settings.resonance_tol
    channels = {1: [0, 1], 2: [0, 1], 3: [0], 4: [0]}[n]
    ratios = {}
    flags = {}
    signs = {}
    for ell in channels:
        q, _, sign = _zero_ratio(grid, PartialWave(n, ell).nu)
        ratios[ell] = abs(q)
        signs[ell] = sign
        if tol <= abs(q) < 10.0 * tol:
            raise InconclusiveResonanceError(
                f"growth ratio {abs(q):.3e} in channel {ell} is within a factor 10 of resonance_tol={tol:g}",
                abs(q),
            )
        flags[ell] = abs(q) < tol
    if n == 1:
        if not (flags[0] or flags[1]):
            return ResonanceReport(1, False, "none", 0, ratios=ratios)
        s = 1.0 / math.sqrt(2.0)
        # bounded solution tends to alpha on the right and +-alpha on the left
        if flags[0] and flags[1]:
            raise InconclusiveResonanceError("both parity channels are threshold-resonant", 0.0)
        cm = s if flags[0] else -s
        return ResonanceReport(
            1, True, "s", 1, s, cm, ratios=ratios, convention="sign fixed by c_plus > 0"
        )
    if n == 2:
        if flags[1]:
            return ResonanceReport(2, True, "p", 2, ratios=ratios)
        if flags[0]:
            return ResonanceReport(2, True, "s", 0, ratios=ratios)
        return ResonanceReport(2, False, "none", 0, ratios=ratios)
    if flags[0]:
        return ResonanceReport(n, True, "s", 1, ratios=ratios)
    return ResonanceReport(n, False, "none", 0, ratios=ratios)
