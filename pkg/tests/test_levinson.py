import json
import math
from fractions import Fraction

import numpy as np
import pytest

from scatlab import asymptotics as A
from scatlab import levinson as L
from scatlab import potential as P
from scatlab import radial as R
from scatlab import scattering as S
from scatlab.errors import DomainError, IntegrationError, TailError

# Tr(e^{-tH} - e^{-tH0}) for V = -2 sech^2 x from the exact reflectionless
# xi = -(2/pi) arctan(1/k), integrated with mpmath at 30 digits (frozen)
PT_HEAT = {0.5: 1.1255646869698814, 0.2: 0.5776144860280074}


def _report(n, present, kind="none", count=0):
    return R.ResonanceReport(n, present, kind, count)


@pytest.mark.parametrize(
    "report, expected",
    [
        (_report(1, True, "half-bound", 1), Fraction(0)),
        (_report(1, False), Fraction(-1, 2)),
        (_report(2, True, "p", 2), Fraction(2)),
        (_report(2, True, "s", 1), Fraction(0)),
        (_report(3, True, "s", 1), Fraction(1, 2)),
        (_report(3, False), Fraction(0)),
        (_report(4, True, "s", 1), Fraction(1)),
        (_report(4, True, "p", 1), Fraction(0)),
        (_report(5, True, "s", 1), Fraction(0)),
    ],
)
def test_resonance_correction_table(report, expected):
    assert L.n_res(report) == expected


def test_resonance_correction_dimension_mismatch():
    with pytest.raises(DomainError):
        L.n_res(_report(3, False), 2)


def _table(n, ell, k, delta):
    lam = np.asarray(k) ** 2
    return R.PhaseShiftTable(R.PartialWave(n, ell), lam, np.asarray(delta, dtype=float), np.zeros(lam.size))


def test_channel_zero_limit_models():
    k = np.array([1e-3, 1.2e-3, 1.5e-3])
    val, model = L.channel_zero_limit(_table(3, 0, k, 1.0 + 2.0 * k + 3.0 * k * k))
    assert model == "quadratic-k" and val == pytest.approx(1.0, abs=1e-12)
    val, model = L.channel_zero_limit(_table(3, 1, k, 0.5 + 2.0 * k * k))
    assert model == "k^2" and val == pytest.approx(0.5, abs=1e-12)
    # two-dimensional s-wave: the phase creeps up to the next multiple of pi
    assert L.channel_zero_limit(_table(2, 0, k, [-0.1, -0.1, -0.1]))[0] == pytest.approx(0.0, abs=1e-14)
    assert L.channel_zero_limit(_table(2, 0, k, [math.pi - 0.05] * 3))[0] == pytest.approx(math.pi)


def test_xi_zero_plus_matches_bound_state_count(pt_profile, well3_profile):
    assert L.xi_zero_plus(pt_profile) == pytest.approx(-1.0, abs=1e-6)
    assert L.xi_zero_plus(well3_profile) == pytest.approx(-1.0, abs=1e-6)


# ------------------------------------------------------------------- tail
def _synthetic(n, extra, c_next=None):
    """Profile whose (T - p_n)/(2 pi i) is ``extra(lam)`` exactly."""
    k = np.geomspace(1e-3, 40.0, 600)
    lam = k * k
    data = A.AsymptoticData(n, (1.0,), 0.0, (), (), c_next)
    T = A.eval_poly(data, "p", lam) + 2j * math.pi * extra(lam)
    zeros = np.zeros_like(lam)
    prof = S.SpectralShiftProfile(n, lam, zeros, zeros, T, np.ones_like(T))
    return prof, data


def test_tail_power_fit_recovers_exact_power():
    prof, data = _synthetic(5, lambda lam: 3.0 * lam**-2.0)
    tail, fit, exp_, analytic, method = L._tail(prof, data, True)
    assert method == "power-fit" and math.isnan(analytic)
    assert exp_ == pytest.approx(-2.0, abs=1e-10)
    assert tail == pytest.approx(3.0 / prof.lam[-1], rel=1e-9)


def test_tail_rejects_non_integrable_decay():
    prof, data = _synthetic(5, lambda lam: 3.0 * lam**-0.5)
    with pytest.raises(TailError):
        L._tail(prof, data, True)


def test_tail_without_model_or_fit():
    prof, data = _synthetic(5, lambda lam: 1e-3 * np.sin(lam))
    with pytest.raises(TailError):
        L._tail(prof, data, False)
    quiet, data = _synthetic(5, lambda lam: 0.0 * lam)
    assert L._tail(quiet, data, True)[4] == "negligible"


def test_tail_analytic_is_primary():
    cn = 0.7
    prof, data = _synthetic(3, lambda lam: cn * lam**-1.5, c_next=2j * math.pi * cn)
    tail, fit, exp_, analytic, method = L._tail(prof, data, True)
    top = prof.lam[-1]
    assert method == "analytic"
    assert tail == analytic == pytest.approx(2 * cn / math.sqrt(top), rel=1e-12)
    assert fit == pytest.approx(tail, rel=1e-8)


def test_levinson_integral_dimension_check(pt_profile):
    with pytest.raises(DomainError):
        L.levinson_integral(pt_profile, A.build_asymptotics(P.gaussian(3, -1.0, 1.0)))


# ---------------------------------------------------------------- reports
def test_poschl_teller_levinson(pt_profile):
    rep = L.verify_levinson(P.poschl_teller(1.0), profile=pt_profile)
    assert rep.N == 1 and rep.N_res == 0
    assert rep.integral == pytest.approx(-1.0, abs=1e-3)
    assert rep.residual < 1e-3 and rep.passed
    assert rep.xi_zero_plus_measured == pytest.approx(-1.0, abs=1e-3)
    assert rep.resonance["c_plus"] == pytest.approx(1 / math.sqrt(2), abs=1e-6)


def test_square_well_levinson(well3_profile):
    rep = L.verify_levinson(P.square_well(3, 4.0, 1.0), profile=well3_profile)
    assert rep.N == 1 and rep.N_res == 0
    assert rep.residual < 1e-2 and rep.passed
    assert rep.pieces["tail_method"] == "analytic"
    assert any(note.startswith("tail cross-check") for note in rep.notes)
    assert rep.display_forms["agrees"]


def test_report_serialises(pt_profile):
    d = L.verify_levinson(P.poschl_teller(1.0), profile=pt_profile).to_dict()
    assert d["N_res"] == 0.0 and set(d["xi_zero_plus"]) == {"measured", "predicted"}
    json.dumps(d, default=float)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_display_forms_agree_with_general_form(n):
    pot = P.gaussian(n, -2.0, 1.0)
    data = A.build_asymptotics(pot, n, max_j=2)
    forms = L._display_forms(pot, data, -0.3, 0.0)
    assert forms["agrees"]
    assert forms["rhs"] == pytest.approx(-0.3 - data.beta, abs=1e-12)


# ------------------------------------------------------------- heat trace
def test_poschl_teller_heat_trace_lhs(pt_profile):
    res = L.heat_trace_check(P.poschl_teller(1.0), [0.5, 0.2], profile=pt_profile)
    for row in res.rows:
        assert row.lhs == pytest.approx(PT_HEAT[row.t], abs=1e-7)
        rhs = sum(a * row.t ** (j - 0.5) for j, a in enumerate(A.build_asymptotics(P.poschl_teller(1.0)).a, 1))
        assert row.rhs == pytest.approx(rhs, rel=1e-14)
    assert res.expected_order == 3.5


def test_heat_trace_argument_checks(pt_profile):
    pt = P.poschl_teller(1.0)
    with pytest.raises(DomainError):
        L.heat_trace_check(pt, [0.1, 0.2], profile=pt_profile)
    with pytest.raises(DomainError):
        L.heat_trace_check(pt, [-0.1], profile=pt_profile)
    with pytest.raises(IntegrationError):
        L.heat_trace_check(pt, [0.01], profile=pt_profile)


def test_free_heat_trace_is_zero():
    res = L.heat_trace_check(P.zero(3), [0.5, 0.1])
    assert all(r.lhs == r.rhs == r.difference == 0.0 for r in res.rows)
    assert res.order is None


def test_high_energy_residual_poschl_teller(pt_profile):
    # n = 1 has P_1 = 0, and xi ~ -(2/pi)/k
    res = L.high_energy_ssf_check(pt_profile, A.build_asymptotics(P.poschl_teller(1.0)))
    assert -0.7 <= res.exponent <= -0.3
    assert res.magnitude == pytest.approx(4.0 / math.sqrt(pt_profile.lam[-1]), rel=1e-2)


def test_high_energy_residual_square_well(well3_profile):
    res = L.high_energy_ssf_check(well3_profile, A.build_asymptotics(P.square_well(3, 4.0, 1.0)))
    assert -0.7 <= res.exponent <= -0.3
