"""
Levinson's theorem and the small-t heat-trace check.

The identity verified is

    -N = (1/2 pi i) int_0^inf (Tr S*S' - p_n) dlambda - beta_n + N_res,

with the integral split into a low-energy head (from the extrapolated
xi(0+)), the body on the momentum grid, the closed-form integral of p_n, and
a high-energy tail.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np
from scipy import integrate

from .asymptotics import AsymptoticData, build_asymptotics, eval_poly
from .errors import DomainError, IntegrationError, TailError
from .potential import Potential, moment_power
from .radial import (
    BoundStateCatalog,
    PhaseShiftTable,
    ResonanceReport,
    SolverSettings,
    bound_state_catalog,
    detect_resonance,
)
from .scattering import SpectralShiftProfile, build_profile
from .specfun import sphere_volume

__all__ = [
    "LevinsonReport",
    "IntegralResult",
    "HeatTraceRow",
    "HeatTraceResult",
    "HighEnergyResult",
    "n_res",
    "channel_zero_limit",
    "xi_zero_plus",
    "levinson_integral",
    "verify_levinson",
    "heat_trace_check",
    "high_energy_ssf_check",
    "LEVINSON_TOL",
]

LEVINSON_TOL = {1: 1e-3, 2: 2e-2, 3: 1e-2, 4: 5e-2, 5: 5e-2}
CRITICAL_TOL = 2e-2


def n_res(report: ResonanceReport, n: int | None = None) -> Fraction:
    """
    Resonance correction.

    n = 1: 0 with a resonance, -1/2 without (half of the even-channel
    phase at threshold); n = 2: number of p-resonances; n = 3: 1/2 with an
    s-resonance; n = 4: number of s-resonances; n >= 5: 0.
    """
    n = report.dimension if n is None else n
    if n != report.dimension:
        raise DomainError("resonance report dimension does not match")
    if n == 1:
        return Fraction(0) if report.resonance_present else Fraction(-1, 2)
    if n == 2:
        return Fraction(report.count if report.type == "p" else 0)
    if n == 3:
        return Fraction(1, 2) if report.resonance_present else Fraction(0)
    if n == 4:
        return Fraction(report.count if report.type == "s" else 0)
    return Fraction(0)


# ---------------------------------------------------------- low energy
def channel_zero_limit(table: PhaseShiftTable) -> tuple[float, str]:
    """
    delta_l(0+) extrapolated from the three lowest grid points.

    nu = +-1/2: quadratic in k.  nu >= 1: delta0 + b k^2.  nu = 0 (the
    two-dimensional s-wave): cot delta is linear in ln k, so delta runs to
    the next multiple of pi above; the limit is exact given one point.
    """
    nu = table.wave.nu
    k = table.k[:3]
    d = table.delta[:3]
    if nu == 0.0:
        x = 1.0 / math.tan(d[0]) if math.sin(d[0]) != 0.0 else -math.inf
        arccot = math.pi / 2.0 - math.atan(x)
        return float(d[0] + math.pi - arccot), "log"
    if abs(nu) == 0.5:
        coef = np.polyfit(k, d, 2)
        return float(coef[-1]), "quadratic-k"
    coef = np.polyfit(k * k, d, 1)
    return float(coef[-1]), "k^2"


def xi_zero_plus(profile: SpectralShiftProfile) -> float:
    """xi(0+) = -(1/pi) sum_l m(n, l) delta_l(0+)."""
    total = 0.0
    for t in sorted(profile.tables, key=lambda t: t.wave.ell):
        d0, _ = channel_zero_limit(t)
        total += t.wave.degeneracy * d0
    return -total / math.pi


# ------------------------------------------------------------ integral
@dataclass(frozen=True)
class IntegralResult:
    """Pieces of (1/2 pi i) int_0^inf (T - p_n) dlambda."""

    value: float
    imag: float
    head: float
    body: float
    poly: float
    tail: float
    tail_fit: float | None
    tail_fit_exponent: float | None
    tail_analytic: float
    tail_method: str
    xi_zero_plus: float


def _simpson_lnk(k: np.ndarray, f: np.ndarray) -> complex:
    """int f dlambda over the grid with lambda = k^2, done in ln k."""
    x = np.log(k)
    g = 2.0 * k * k * f
    return integrate.simpson(g.real, x=x) + 1j * integrate.simpson(g.imag, x=x)


def _tail(profile: SpectralShiftProfile, data: AsymptoticData, use_fit: bool):
    """
    High-energy tail int_{lambda_max}^inf (T - p_n)/(2 pi i).

    The primary estimate integrates the first omitted term of p_n; the
    two-parameter power fit over the top decade is reported alongside and
    used only when that coefficient is unavailable.
    """
    n = data.n
    lam = profile.lam
    top = lam[-1]
    sel = lam >= top / 10.0
    f = ((profile.trace[sel] - eval_poly(data, "p", lam[sel])) / (2j * math.pi)).real
    jn = (n - 1) // 2 + 1
    e = 0.5 * n - jn - 1.0
    analytic = None
    if data.c_next is not None:
        cn = (data.c_next / (2j * math.pi)).real
        analytic = -cn * top ** (e + 1.0) / (e + 1.0) if cn != 0.0 else 0.0
    fit_val = fit_exp = None
    if use_fit and np.all(f != 0.0) and (np.all(f > 0) or np.all(f < 0)):
        x = np.log(lam[sel])
        y = np.log(np.abs(f))
        coef, res, *_ = np.polyfit(x, y, 1, full=True)
        slope, icpt = float(coef[0]), float(coef[1])
        rms = math.sqrt(float(res[0]) / x.size) if res.size else 0.0
        if rms < 0.05:
            fit_exp = slope
            significant = abs(f[-1]) * top > 1e-8
            if slope >= -1.0 and significant:
                raise TailError(f"fitted tail exponent {slope:.3f} is not integrable; increase k_max")
            if slope < -1.0:
                amp = math.copysign(math.exp(icpt), f[-1])
                fit_val = -amp * top ** (slope + 1.0) / (slope + 1.0)
    if analytic is not None:
        return analytic, fit_val, fit_exp, analytic, "analytic"
    if fit_val is not None:
        return fit_val, fit_val, fit_exp, math.nan, "power-fit"
    if np.max(np.abs(f)) * top > 1e-8:
        raise TailError("no tail model available and the top-decade integrand does not fit a power law")
    return 0.0, None, None, math.nan, "negligible"


def levinson_integral(
    profile: SpectralShiftProfile, data: AsymptoticData, tail_fit: bool = True, xi0: float | None = None
) -> IntegralResult:
    """
    (1/2 pi i) int_0^inf (Tr S*S' - p_n) dlambda.

    Head: xi(0+) - xi(lambda_min) (the p_n part below lambda_min is
    included in the closed form).  Body: Simpson in ln k on the grid.
    Poly: -(P_n(lambda_max) - 2 pi i beta_n)/(2 pi i), the exact integral
    of p_n over (0, lambda_max].  Tail: power-law fit over the top decade,
    or the first omitted term of p_n when the fit is poor or disabled.
    """
    if profile.n != data.n:
        raise DomainError("profile and asymptotic data disagree on the dimension")
    if xi0 is None:
        xi0 = xi_zero_plus(profile)
    lam = profile.lam
    k = profile.k
    if not np.any(profile.trace) and data.beta == 0.0 and not any(data.c) and xi0 == 0.0:
        return IntegralResult(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, None, None, 0.0, "none", 0.0)
    head = xi0 - float(profile.xi[0])
    body_c = _simpson_lnk(k, profile.trace / (2j * math.pi))
    poly_c = -(eval_poly(data, "P", lam[-1]) - 2j * math.pi * data.beta) / (2j * math.pi)
    tail, tfit, texp, tan, method = _tail(profile, data, tail_fit)
    value = head + body_c.real + poly_c.real + tail
    imag = body_c.imag + poly_c.imag
    return IntegralResult(
        float(value), float(imag), float(head), float(body_c.real), float(poly_c.real),
        float(tail), tfit, texp, float(tan), method, float(xi0),
    )


# --------------------------------------------------------- full report
@dataclass
class LevinsonReport:
    """Every piece of the Levinson identity plus the settings that produced it."""

    n: int
    N: int
    N_res: Fraction
    integral: float
    integral_imag: float
    tail: float
    beta_n: float
    residual: float
    tolerance: float
    passed: bool
    xi_zero_plus_measured: float
    xi_zero_plus_predicted: float
    resonance: dict
    pieces: dict
    display_forms: dict
    bound_states: dict
    low_confidence: bool
    notes: list = field(default_factory=list)
    settings: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["N_res"] = float(self.N_res)
        out["xi_zero_plus"] = {"measured": self.xi_zero_plus_measured, "predicted": self.xi_zero_plus_predicted}
        del out["xi_zero_plus_measured"], out["xi_zero_plus_predicted"]
        return out


def _display_forms(pot: Potential, data: AsymptoticData, integral: float, nres: float) -> dict:
    """
    Dimension-specific statements of the theorem, evaluated from their own
    constants, and whether they agree with the general form.
    """
    n = data.n
    general = integral - data.beta + nres
    if n == 1:
        rhs = integral + nres
        return {"form": "-N = (1/2pi i) int Tr S*S' + N_res", "rhs": rhs, "agrees": abs(rhs - general) < 1e-12}
    if n == 2:
        v1 = moment_power(pot, 1)
        rhs = integral + v1 / (4.0 * math.pi) + nres
        return {
            "form": "-N = (1/2pi i) int Tr S*S' + (1/4pi) int V + N_res",
            "rhs": rhs,
            "agrees": abs(rhs - general) < 1e-10 * max(1.0, abs(v1)),
        }
    if n == 3:
        v1 = moment_power(pot, 1)
        c1 = -2j * math.pi * sphere_volume(3) / (4.0 * (2.0 * math.pi) ** 3) * v1
        same = abs(c1 - data.c[0]) < 1e-10 * max(1.0, abs(c1))
        return {
            "form": "-N = (1/2pi i) int (Tr S*S' + 2pi i Vol(S^2)/(4(2pi)^3) lambda^(-1/2) int V) + N_res",
            "rhs": general,
            "p3_coefficient": [c1.real, c1.imag],
            "agrees": bool(same),
        }
    if n == 4:
        v1 = moment_power(pot, 1)
        v2 = moment_power(pot, 2)
        c1 = -2j * math.pi * sphere_volume(4) / (2.0 * (2.0 * math.pi) ** 4) * v1
        b4 = sphere_volume(4) / (4.0 * (2.0 * math.pi) ** 4) * v2
        same = abs(c1 - data.c[0]) < 1e-10 * max(1.0, abs(c1)) and abs(b4 - data.beta) < 1e-10 * max(1.0, abs(b4))
        return {
            "form": "-N = (1/2pi i) int (Tr S*S' + 2pi i Vol(S^3)/(2(2pi)^4) int V) - Vol(S^3)/(4(2pi)^4) int V^2 + N_res",
            "rhs": integral - b4 + nres,
            "agrees": bool(same),
        }
    return {"form": "general", "rhs": general, "agrees": True}


def _settings_dict(settings: SolverSettings) -> dict:
    return asdict(settings)


def verify_levinson(
    pot: Potential,
    settings: SolverSettings | None = None,
    *,
    profile: SpectralShiftProfile | None = None,
    catalog: BoundStateCatalog | None = None,
    resonance: ResonanceReport | None = None,
) -> LevinsonReport:
    """Run the whole pipeline for one potential and check the identity."""
    settings = settings or SolverSettings()
    n = pot.dimension
    if not 1 <= n <= 5:
        raise DomainError("dimension must be in 1..5")
    resonance = resonance or detect_resonance(pot, n, settings)
    nres = n_res(resonance, n)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        catalog = catalog or bound_state_catalog(pot, settings)
    profile = profile or build_profile(pot, settings)
    data = build_asymptotics(pot, n, max_j=2 if n < 5 else 3)
    xi0 = xi_zero_plus(profile)
    res = levinson_integral(profile, data, settings.tail_fit, xi0)
    N = catalog.total
    residual = abs(-N - (res.value - data.beta + float(nres)))
    tol = LEVINSON_TOL[n]
    if n == 3 and resonance.resonance_present:
        tol = CRITICAL_TOL
    low_conf = False
    notes = []
    if resonance.resonance_present and n in (2, 4):
        low_conf = True
        notes.append("resonant low-energy limit is non-analytic; xi(0+) extrapolation is low confidence")
    if n == 2:
        notes.append("radial symmetry ties both p channels together, so N_res = 1 cannot occur")
    if catalog.threshold_channels:
        notes.append(f"threshold states in channels {list(catalog.threshold_channels)} are not counted in N")
    if res.tail_fit is not None and res.tail_method == "analytic":
        notes.append(f"tail cross-check: analytic {res.tail_analytic:.6g}, power fit {res.tail_fit:.6g}")
    display = _display_forms(pot, data, res.value, float(nres)) if not pot.is_zero else {
        "form": "free", "rhs": 0.0, "agrees": True
    }
    passed = residual < tol and display["agrees"] and abs(res.imag) < 1e-8
    return LevinsonReport(
        n=n,
        N=N,
        N_res=nres,
        integral=res.value,
        integral_imag=res.imag,
        tail=res.tail,
        beta_n=data.beta,
        residual=float(residual),
        tolerance=tol,
        passed=bool(passed),
        xi_zero_plus_measured=xi0,
        xi_zero_plus_predicted=float(-N - nres),
        resonance={
            "present": resonance.resonance_present,
            "type": resonance.type,
            "count": resonance.count,
            "c_plus": resonance.c_plus,
            "c_minus": resonance.c_minus,
            "ratios": {str(k): v for k, v in sorted(resonance.ratios.items())},
            "convention": resonance.convention,
        },
        pieces={
            "head": res.head,
            "body": res.body,
            "poly": res.poly,
            "tail": res.tail,
            "tail_fit": res.tail_fit,
            "tail_fit_exponent": res.tail_fit_exponent,
            "tail_analytic": res.tail_analytic,
            "tail_method": res.tail_method,
            "l_max": profile.lmax,
            "truncation": profile.truncation,
        },
        display_forms=display,
        bound_states={
            "counts": {str(k): v for k, v in sorted(catalog.counts.items())},
            "levels": {str(k): list(v) for k, v in sorted(catalog.levels.items())},
        },
        low_confidence=low_conf,
        notes=notes,
        settings=_settings_dict(settings),
    )


# ----------------------------------------------------------- heat trace
@dataclass(frozen=True)
class HeatTraceRow:
    t: float
    lhs: float
    rhs: float
    difference: float


@dataclass(frozen=True)
class HeatTraceResult:
    rows: tuple[HeatTraceRow, ...]
    order: float | None
    expected_order: float


def heat_trace_check(
    pot: Potential,
    t_list,
    settings: SolverSettings | None = None,
    *,
    profile: SpectralShiftProfile | None = None,
    catalog: BoundStateCatalog | None = None,
    resonance: ResonanceReport | None = None,
    J: int = 3,
) -> HeatTraceResult:
    """
    Compare Tr(e^{-tH} - e^{-tH0}) with sum_{j <= J} a_j t^{j - n/2}.

    The trace is evaluated by the Birman-Krein formula in integrated form,

        sum_k M_k (e^{-t lambda_k} - 1) - t int_0^inf xi(lambda) e^{-t lambda} dlambda,

    the threshold term having been absorbed through xi(0+) = -N - N_res.
    """
    settings = settings or SolverSettings()
    ts = [float(t) for t in t_list]
    if not ts or any(t <= 0.0 for t in ts):
        raise DomainError("t values must be positive")
    if any(b >= a for a, b in zip(ts, ts[1:])):
        raise DomainError("t values must be strictly decreasing")
    n = pot.dimension
    if pot.is_zero:
        rows = tuple(HeatTraceRow(t, 0.0, 0.0, 0.0) for t in ts)
        return HeatTraceResult(rows, None, J + 1 - 0.5 * n)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        catalog = catalog or bound_state_catalog(pot, settings)
    profile = profile or build_profile(pot, settings)
    a = [build_asymptotics(pot, n, max_j=J).a[j - 1] for j in range(1, J + 1)]
    xi = profile.xi if profile.n > 1 else profile.xi_channels if profile.xi_channels is not None else profile.xi
    xi0 = xi_zero_plus(profile)
    lam = profile.lam
    k = profile.k
    rows = []
    for t in ts:
        disc = sum(m * math.expm1(-t * e) for e, m in catalog.multiplicities())
        w = np.exp(-t * lam)
        body = _simpson_lnk(k, xi * w).real
        # (0, lambda_min): xi is flat to O(k); beyond the grid e^{-t lambda} kills the rest
        head = xi0 * (-math.expm1(-t * lam[0])) / t
        top = lam[-1]
        if t * top < 40.0:
            raise IntegrationError(f"grid top lambda={top:g} too low for t={t:g}; increase k_max")
        lhs = disc - t * (body + head)
        rhs = sum(a[j - 1] * t ** (j - 0.5 * n) for j in range(1, J + 1))
        rows.append(HeatTraceRow(t, float(lhs), float(rhs), float(lhs - rhs)))
    diffs = np.array([abs(r.difference) for r in rows])
    order = None
    if len(rows) >= 2 and np.all(diffs > 0):
        order = float(np.polyfit(np.log(ts), np.log(diffs), 1)[0])
    return HeatTraceResult(tuple(rows), order, J + 1 - 0.5 * n)


# ---------------------------------------------------------- high energy
@dataclass(frozen=True)
class HighEnergyResult:
    lam: np.ndarray
    residual: np.ndarray
    magnitude: float
    exponent: float | None


def high_energy_ssf_check(profile: SpectralShiftProfile, data: AsymptoticData) -> HighEnergyResult:
    """
    r(lambda) = -2 pi i xi(lambda) - P_n(lambda) over the top decade, its
    size at lambda_max and the fitted power-law exponent.
    """
    if profile.n != data.n:
        raise DomainError("profile and asymptotic data disagree on the dimension")
    lam = profile.lam
    sel = lam >= lam[-1] / 10.0
    r = -2j * math.pi * profile.xi[sel] - eval_poly(data, "P", lam[sel])
    mag = np.abs(r)
    exponent = None
    if np.all(mag > 0):
        exponent = float(np.polyfit(np.log(lam[sel]), np.log(mag), 1)[0])
    return HighEnergyResult(lam[sel], r, float(mag[-1]), exponent)
