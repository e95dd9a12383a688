"""
Scattering-matrix data assembled from partial waves.

For n >= 2 the scattering matrix is diagonal over spherical harmonics with
eigenvalue exp(2 i delta_l) of multiplicity m(n, l), so

    xi(lambda)    = -(1/pi) sum_l m(n, l) delta_l(lambda)
    Tr(S* S')     = 2i sum_l m(n, l) delta_l'(lambda) = -2 pi i xi'(lambda)
    det S(lambda) = exp(2i sum_l m(n, l) delta_l) = exp(-2 pi i xi).

In one dimension the 2x2 matrix [[t, r], [r, t]] of the full-line problem is
used for det S, and the parity eigenphases give xi'.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import BranchError, ConsistencyError, DomainError, RangeError
from .potential import Potential
from .radial import (
    PartialWave,
    PhaseShiftTable,
    SolverSettings,
    _RadialGrid,
    _channel_values,
    degeneracy,
    detect_resonance,
    jost_1d,
    momentum_grid,
    phase_shift_table,
)

__all__ = [
    "SpectralShiftProfile",
    "SZeroCheck",
    "degeneracy",
    "channel_tables",
    "spectral_shift",
    "build_profile",
    "trace_s_star_sprime",
    "det_s",
    "s_matrix_zero_check",
]


@dataclass(frozen=True, eq=False)
class SpectralShiftProfile:
    """xi, xi', Tr(S* S') and det S on a common energy grid."""

    n: int
    lam: np.ndarray
    xi: np.ndarray
    xi_prime: np.ndarray
    trace: np.ndarray
    det: np.ndarray
    tables: tuple[PhaseShiftTable, ...] = ()
    xi_channels: np.ndarray | None = None
    truncation: float = 0.0

    @property
    def k(self) -> np.ndarray:
        return np.sqrt(self.lam)

    @property
    def lmax(self) -> int:
        return max((t.wave.ell for t in self.tables), default=-1)

    def _check_range(self, lam: float) -> None:
        if not self.lam[0] * (1 - 1e-12) <= lam <= self.lam[-1] * (1 + 1e-12):
            raise RangeError(f"lambda={lam} outside the grid [{self.lam[0]}, {self.lam[-1]}]")

    def _interp(self, values: np.ndarray, lam: float):
        self._check_range(lam)
        i = int(np.searchsorted(self.lam, lam))
        if i < self.lam.size and abs(self.lam[i] - lam) <= 1e-14 * lam:
            return values[i]
        if i > 0 and abs(self.lam[i - 1] - lam) <= 1e-14 * lam:
            return values[i - 1]
        x = np.log(self.lam)
        return CubicSpline(x, values)(math.log(lam))


def _weight(pw: PartialWave) -> int:
    return pw.degeneracy


def _tail_measure(table: PhaseShiftTable) -> float:
    """Size of a channel's contribution: m * max(|delta| + |lambda delta'|)."""
    return _weight(table.wave) * float(np.max(np.abs(table.delta) + np.abs(table.lam * table.dprime)))


def channel_tables(pot: Potential, settings: SolverSettings | None = None, lam: np.ndarray | None = None):
    """
    Phase-shift tables for all channels that matter.

    For n >= 2 channels are added in increasing l until two consecutive
    channels contribute less than ``l_tail_tol`` (or up to ``l_max`` when
    that is set).  Returns ``(tables, truncation)`` where ``truncation`` is
    the contribution measure of the last channel kept.
    """
    settings = settings or SolverSettings()
    n = pot.dimension
    if lam is None:
        lam = momentum_grid(settings) ** 2
    if n == 1:
        grid = None if pot.is_zero else _RadialGrid(pot, settings)
        tabs = tuple(phase_shift_table(pot, PartialWave(1, p), settings, lam, _grid=grid) for p in (0, 1))
        return tabs, 0.0
    if pot.is_zero:
        return (phase_shift_table(pot, PartialWave(n, 0), settings, lam),), 0.0
    grid = _RadialGrid(pot, settings)
    tabs = []
    quiet = 0
    last = 0.0
    ell = 0
    while True:
        tab = phase_shift_table(pot, PartialWave(n, ell), settings, lam, _grid=grid)
        tabs.append(tab)
        last = _tail_measure(tab)
        if settings.l_max is not None:
            if ell >= settings.l_max:
                break
        else:
            quiet = quiet + 1 if last < settings.l_tail_tol else 0
            if quiet >= 2:
                break
            if ell > 5000:
                raise ConsistencyError("partial-wave sum does not converge; check the potential's support")
        ell += 1
    return tuple(tabs), last


def _unwrap_from_top(phase: np.ndarray) -> np.ndarray:
    """Continuous branch of an angle, anchored at the representative nearest 0 at the top."""
    top = phase[-1] - 2.0 * np.pi * round(phase[-1] / (2.0 * np.pi))
    rev = np.unwrap(phase[::-1])
    rev = rev - rev[0] + top
    return rev[::-1]


def spectral_shift(tables, onedim=None, branch_tail_tol: float = 0.5, truncation: float = 0.0) -> SpectralShiftProfile:
    """
    Assemble xi, xi', Tr(S* S') and det S.

    ``onedim`` is ``(t, r)`` on the same grid for n = 1; det S = t^2 - r^2
    and xi = -(1/2 pi) arg det S, continued downward from the top of the
    grid.  xi' always comes from the channel derivatives.
    """
    tables = tuple(tables)
    if not tables:
        raise DomainError("no phase-shift tables given")
    lam = tables[0].lam
    n = tables[0].wave.dimension
    for t in tables:
        if t.lam.shape != lam.shape or not np.array_equal(t.lam, lam):
            raise DomainError("phase-shift tables do not share one energy grid")
        if t.wave.dimension != n:
            raise DomainError("phase-shift tables mix dimensions")
    dsum = np.zeros_like(lam)
    psum = np.zeros_like(lam)
    # fixed reduction order for reproducible sums
    for t in sorted(tables, key=lambda t: t.wave.ell):
        m = _weight(t.wave)
        dsum = dsum + m * t.delta
        psum = psum + m * t.dprime
    xi_ch = -dsum / np.pi
    xi_prime = -psum / np.pi
    trace = 2j * psum
    if n == 1 and onedim is not None:
        tt, rr = (np.asarray(v, dtype=complex) for v in onedim)
        if tt.shape != lam.shape or rr.shape != lam.shape:
            raise DomainError("one-dimensional S-matrix data has the wrong shape")
        det = tt * tt - rr * rr
        xi = -_unwrap_from_top(np.angle(det)) / (2.0 * np.pi)
    else:
        xi = xi_ch
        det = np.exp(2j * dsum)
    # for n >= 2 each channel is anchored separately; xi itself tends to -P_n/(2 pi i)
    if n == 1 and abs(xi[-1]) > branch_tail_tol / np.pi:
        raise BranchError(f"xi is {xi[-1]:.3g} at the top of the grid; increase k_max")
    return SpectralShiftProfile(n, lam, xi, xi_prime, trace, det, tables, xi_ch if n == 1 else None, truncation)


def build_profile(pot: Potential, settings: SolverSettings | None = None) -> SpectralShiftProfile:
    """Run the channel sweep (and the full-line solver in n = 1) and assemble the profile."""
    settings = settings or SolverSettings()
    k = momentum_grid(settings)
    lam = k * k
    tables, trunc = channel_tables(pot, settings, lam)
    onedim = None
    if pot.dimension == 1:
        t, r, _ = jost_1d(pot, k, settings)
        onedim = (t, r)
    return spectral_shift(tables, onedim, settings.branch_tail_tol, trunc)


def trace_s_star_sprime(profile: SpectralShiftProfile, lam: float) -> complex:
    """Tr(S(lambda)* S'(lambda)), purely imaginary."""
    return complex(0.0, float(profile._interp(profile.trace.imag, lam)))


def det_s(profile: SpectralShiftProfile, lam: float) -> complex:
    """det S(lambda) = exp(-2 pi i xi(lambda))."""
    if profile.n == 1:
        profile._check_range(lam)
        i = int(np.searchsorted(profile.lam, lam))
        if i < profile.lam.size and abs(profile.lam[i] - lam) <= 1e-14 * lam:
            return complex(profile.det[i])
    return complex(np.exp(-2j * np.pi * float(profile._interp(profile.xi, lam))))


@dataclass(frozen=True)
class SZeroCheck:
    """Distance between S at the lowest grid energy and the predicted S(0)."""

    n: int
    lam: float
    predicted: str
    distance: float
    ok: bool
    channels: dict = field(default_factory=dict)
    matrix: tuple | None = None


def s_matrix_zero_check(
    pot: Potential, n: int | None = None, settings: SolverSettings | None = None, tol: float = 5e-2, lmax: int = 3
) -> SZeroCheck:
    """
    Compare S(lambda_min) with its zero-energy limit: Id generically,
    Id - 2 P_s for an s-resonance in n = 3, and the 2x2 forms in n = 1.
    """
    settings = settings or SolverSettings()
    n = pot.dimension if n is None else n
    if n != pot.dimension or not 1 <= n <= 5:
        raise DomainError("dimension must match the potential and lie in 1..5")
    lam = settings.k_min**2
    k = settings.k_min
    if n == 1:
        rep = detect_resonance(pot, 1, settings) if not pot.is_zero else None
        if pot.is_zero:
            pred = np.eye(2, dtype=complex)
            label = "identity (free)"
            t, r = 1.0 + 0j, 0j
        else:
            t, r, _ = jost_1d(pot, k, settings)
            if rep.resonance_present:
                cp, cm = rep.c_plus, rep.c_minus
                pred = np.array([[2 * cp * cm, cp * cp - cm * cm], [cm * cm - cp * cp, 2 * cp * cm]], dtype=complex)
                label = "resonant [[2c+c-, c+^2-c-^2], [c-^2-c+^2, 2c+c-]]"
            else:
                pred = np.array([[0, -1], [-1, 0]], dtype=complex)
                label = "generic [[0, -1], [-1, 0]]"
        meas = np.array([[t, r], [r, t]], dtype=complex)
        dist = float(np.max(np.abs(meas - pred)))
        mat = tuple(tuple(complex(v) for v in row) for row in meas)
        return SZeroCheck(1, lam, label, dist, bool(dist < tol), {}, mat)
    resonant_s = False
    if n == 3 and not pot.is_zero:
        resonant_s = detect_resonance(pot, 3, settings).resonance_present
    grid = None if pot.is_zero else _RadialGrid(pot, settings)
    chans = {}
    dist = 0.0
    for ell in range(lmax + 1):
        d = float(_channel_values(grid, PartialWave(n, ell).nu, np.array([lam]))[0][0]) if grid else 0.0
        target = -1.0 if (resonant_s and ell == 0) else 1.0
        e = float(abs(np.exp(2j * d) - target))
        chans[ell] = e
        dist = max(dist, e)
    label = "Id - 2 P_s" if resonant_s else "identity"
    return SZeroCheck(n, lam, label, dist, bool(dist < tol), chans)
