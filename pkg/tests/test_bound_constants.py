from __future__ import annotations

import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import closed_form_abc, region_by_integration
from scipy.integrate import quad
from scipy.special import loggamma

from argbound import bound_constants as bc
from argbound.bound_constants import (
    ROSSER,
    MAIN_BOUND,
    BoundConstants,
    BoundParams,
    ConvexityBoundary,
    InfeasibleParams,
    JensenInstance,
)
from argbound.historical import crossover
from argbound.quadrature import gauss_legendre_adaptive
from argbound.zeta_engine import a_array, zeta_array

THM = BoundParams(0.06, 2.08, 6.8e6)


@st.composite
def feasible_pairs(draw):
    eta = draw(st.floats(0.005, 0.5))
    lo, hi = bc.r_lower(eta), bc.r_upper(eta)
    u = draw(st.floats(1e-6, 1.0))
    return eta, lo + u * (hi - lo)


# -- parameters and angles -----------------------------------------------------

def test_params_derived_geometry():
    assert THM.sigma1 == pytest.approx(0.5 + math.sqrt(2) * 0.56)
    assert THM.jensen_radius == pytest.approx(2.08 * 0.56)
    assert THM.q == pytest.approx(1.06 - 2.08 * 0.56)
    assert THM.q < 0


def test_params_violations_name_constraint():
    with pytest.raises(InfeasibleParams, match="lower bound"):
        BoundParams(0.06, 1.5)
    with pytest.raises(InfeasibleParams, match="upper bound"):
        BoundParams(0.06, 3.0)
    with pytest.raises(InfeasibleParams, match="eta"):
        BoundParams(0.6, 2.0)
    with pytest.raises(InfeasibleParams, match="k2"):
        BoundParams(0.06, 2.08, k2=0.3)
    with pytest.raises(InfeasibleParams, match="Q0"):
        BoundParams(0.06, 2.08, Q0=1.5)


def test_angles_examples():
    ang = bc.angles(THM)
    mpmath.mp.dps = 30
    try:
        oracle = mpmath.asin(mpmath.mpf(1) / mpmath.mpf("2.08"))
    finally:
        mpmath.mp.dps = 15
    assert abs(ang.phi2 - float(oracle)) < 1e-14
    assert ang.phi1 < ang.phi2 < ang.phi3
    tiny = bc.angles(BoundParams(1e-9, 2.5))
    assert tiny.phi1 < 1e-8


@settings(max_examples=500, deadline=None)
@given(feasible_pairs())
def test_angle_ordering(pair):
    eta, r = pair
    ang = bc.angles(BoundParams(eta, r))
    assert 0 <= ang.phi1 < ang.phi2 < ang.phi3 <= math.pi / 2
    R = r * (0.5 + eta)
    assert abs(ang.phi1 - math.asin(eta / R)) < 1e-14
    assert abs(ang.phi3 - math.asin((1 + eta) / R)) < 1e-14


# -- error terms -----------------------------------------------------------------

def test_g_certificates():
    assert bc.g_of(math.sqrt(2), 1e6) * 1e6 <= 4.4
    assert bc.g_of(math.sqrt(2), 1e9) * 1e9 <= 4.4
    assert bc.g_of(math.sqrt(2), 1e7) > bc.g_of(math.sqrt(2), 1e8)
    with pytest.raises(ValueError):
        bc.g_of(0.0, 1e6)
    with pytest.raises(ValueError):
        bc.g_of(1.0, -1.0)


def test_g_monotone_grid():
    deltas = np.linspace(0.05, math.sqrt(2), 20)
    Ts = np.geomspace(1e2, 1e12, 20)
    G = np.array([[bc.g_of(d, T) for T in Ts] for d in deltas])
    assert np.all(np.diff(G, axis=1) < 0)
    assert np.all(np.diff(G, axis=0) > 0)


def test_eps0():
    R = 2.08 * 0.56
    expected = R / 6.8e6 + (0.06 + R) ** 2 / (2 * 6.8e6**2)
    assert bc.eps0(THM) == pytest.approx(expected, rel=1e-15)
    assert bc.eps0(THM) * THM.T0 <= 3
    assert bc.eps0(BoundParams(0.06, 2.08, 1e300)) < 1e-299


@settings(max_examples=100, deadline=None)
@given(feasible_pairs(), st.floats(1e6, 1e15))
def test_eps0_certificate(pair, T0):
    assert bc.eps0(BoundParams(*pair, T0)) * T0 <= 3


def test_log_adjustments():
    adj = bc.log_adjustments(2.0, 1e6)
    assert adj.slack_log == pytest.approx(6e-6) and adj.slack_log <= 1e-5
    assert bc.log_adjustments(2.0, 1e9).slack_log == pytest.approx(6e-9)
    assert adj.loglog_shift == 0.007 and adj.log_factor == 1.007
    with pytest.raises(ValueError):
        bc.log_adjustments(2.0, 5e5)


def test_log_adjustment_covers_sampled_points():
    # |log(Q0 + s)| <= 1.007 log T on the circles used at T >= 1e6
    T = 1e6
    rng = np.random.default_rng(3)
    s = rng.uniform(-1.5, 2.5, 1000) + 1j * (T + rng.uniform(-2, 2, 1000))
    ratio = bc.log_modulus(2 + s) / np.log(np.abs(s.imag))
    assert ratio.max() <= 1.007


# -- convexity interpolation --------------------------------------------------------

def test_convexity_endpoints():
    bd = bc.strip_setups(THM)[2]
    for t in (10.0, 1e4, 1e7):
        left = convexity_closed(bd, complex(bd.a_line, t))
        right = convexity_closed(bd, complex(bd.b_line, t))
        assert bc.convexity_interp(bd, complex(bd.a_line, t)) == pytest.approx(left, rel=1e-13)
        assert bc.convexity_interp(bd, complex(bd.b_line, t)) == pytest.approx(right, rel=1e-13)


def convexity_closed(bd: ConvexityBoundary, s: complex) -> float:
    """Direct mpmath evaluation of the interpolated bound."""
    z = mpmath.mpc(bd.Q + s.real, s.imag)
    w = (s.real - bd.a_line) / (bd.b_line - bd.a_line)
    left = bd.A * abs(z) ** bd.alpha1 * abs(mpmath.log(z)) ** bd.alpha2
    right = bd.B * abs(z) ** bd.beta1 * abs(mpmath.log(z)) ** bd.beta2
    return float(left ** (1 - w) * right**w)


def test_convexity_midpoint_is_geometric_mean():
    bd = bc.strip_setups(THM)[2]
    s = complex(0.75, 1e7)
    z = mpmath.mpc(2.75, 1e7)
    lg = abs(mpmath.log(z))
    left = 2.38 * abs(z) ** (7 / 6) * lg
    right = abs(z) * lg
    assert bc.convexity_interp(bd, s) == pytest.approx(float(mpmath.sqrt(left * right)), rel=1e-12)


def test_convexity_domain():
    bd = bc.strip_setups(THM)[2]
    with pytest.raises(ValueError):
        bc.convexity_interp(bd, 1.2 + 10j)
    with pytest.raises(ValueError):
        ConvexityBoundary(0.5, 1.0, 0.4, 1, 1, 1, 1, 1, 1)
    with pytest.raises(ValueError):
        ConvexityBoundary(0.5, 1.0, 2.0, 1, 1, 1, 1, 2, 1)


def test_convexity_dominance_r2():
    bd = bc.strip_setups(BoundParams(0.06, 2.08))[2]
    rng = np.random.default_rng(5)
    t = rng.uniform(1e3, 1e4, 200)
    for side, sigma in (("left", 0.5), ("right", 1.0)):
        assert np.all(np.abs(a_array(sigma + 1j * t)) <= bc.boundary_value(bd, side, t))
    s = rng.uniform(0.5, 1.0, 200) + 1j * t
    assert np.all(np.abs(a_array(s)) <= bc.convexity_interp(bd, s))


def test_gamma_ratio_small_sample():
    rng = np.random.default_rng(9)
    s = rng.uniform(-0.5, 0.5, 100) + 1j * rng.uniform(1, 1e3, 100)
    lhs = np.real(loggamma(0.5 - s / 2) - loggamma(s / 2))
    rhs = (0.5 - s.real) * np.log(np.abs(1 + s) / 2)
    assert np.all(lhs <= rhs + 1e-12)


# -- regions ------------------------------------------------------------------------

def test_region0():
    rc = bc.region_contribution(0, THM)
    assert rc.coef_logT == math.pi
    assert rc.epsilon_slack == pytest.approx(math.pi * bc.eps0(THM))
    R = THM.jensen_radius
    oracle = mpmath.quad(lambda phi: mpmath.log(mpmath.zeta(1.06 + R * mpmath.cos(phi))),
                         [-mpmath.pi / 2, 0, mpmath.pi / 2])
    assert abs(rc.constant - float(oracle)) < 1e-10


def test_region1_log_coefficient():
    assert bc.region_contribution(1, THM).coef_logT == bc.angles(THM).phi1


def test_region4_log_coefficient():
    ang = bc.angles(THM)
    R = THM.jensen_radius
    expected = 0.44 * (math.pi / 2 - ang.phi3) + R * math.cos(ang.phi3)
    assert bc.region_contribution(4, THM).coef_logT == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("region_id", [1, 2, 3, 4])
@pytest.mark.parametrize("pair", [(0.06, 2.08), (0.28, 2.28), (0.12, 2.48), (0.4, 2.1)])
def test_regions_match_arc_integration(region_id, pair):
    rc = bc.region_contribution(region_id, BoundParams(*pair))
    logT, loglog, const = region_by_integration(region_id, *pair)
    assert rc.coef_logT == pytest.approx(logT, abs=1e-12)
    assert rc.coef_loglogT == pytest.approx(loglog, abs=1e-12)
    assert rc.constant == pytest.approx(const, abs=1e-11)
    assert rc.coef_logT >= 0


def test_quadrature_stable_under_node_doubling():
    R = THM.jensen_radius
    f = lambda phi: np.log(bc.zeta_real_array(1.06 + R * np.cos(phi)))  # noqa: E731
    base = gauss_legendre_adaptive(f, -math.pi / 2, math.pi / 2, tol=1e-10, order=20).value
    doubled = gauss_legendre_adaptive(f, -math.pi / 2, math.pi / 2, tol=1e-10, order=40).value
    assert abs(base - doubled) < 1e-10
    assert abs(base - quad(f, -math.pi / 2, math.pi / 2, epsabs=1e-13)[0]) < 1e-10


# -- closed forms ---------------------------------------------------------------

def test_main_constants():
    abc = bc.constants_abc(THM)
    assert abc.a <= 0.111 and abc.b <= 0.275 and abc.c <= 2.450
    oracle = closed_form_abc(0.06, 2.08)
    np.testing.assert_allclose([abc.a, abc.b, abc.c], oracle, atol=1e-10)


def test_table2_first_row_alpha():
    abc = bc.constants_abc(BoundParams(0.28, 2.28, 1e6))
    assert bc.alpha_for(abc, 1e6) <= 0.260 + 0.0005


def test_a_ignores_T0_and_k1():
    base = bc.constants_abc(THM)
    other = bc.constants_abc(BoundParams(0.06, 2.08, 1e12, k1=3.0))
    assert other.a == base.a
    assert other.c != base.c


def test_constants_require_large_T0():
    with pytest.raises(ValueError):
        bc.constants_abc(BoundParams(0.06, 2.08, 1e5))


@settings(max_examples=60, deadline=None)
@given(feasible_pairs())
def test_constants_positive(pair):
    abc = bc.constants_abc(BoundParams(*pair))
    assert all(math.isfinite(x) and x > 0 for x in (abc.a, abc.b, abc.c))


def test_a_unimodal_along_r_report():
    """Report, without asserting, any eta where a(r) is not unimodal."""
    violations = []
    for eta in np.linspace(0.02, 0.5, 12):
        rs = np.linspace(bc.r_lower(eta) + 1e-3, bc.r_upper(eta), 40)
        a = np.array([bc.constants_abc(BoundParams(eta, r)).a for r in rs])
        signs = np.sign(np.diff(a))
        changes = np.count_nonzero(np.diff(signs[signs != 0]) > 0)
        if changes:
            violations.append(float(eta))
    print(f"a(r) unimodality violations at eta = {violations}")


@pytest.mark.parametrize("row", [(1e7, 0.24, 2.35, 0.246), (1e15, 0.12, 2.48, 0.193)])
def test_alpha_examples(row):
    T0, eta, r, printed = row
    assert bc.alpha_for(bc.constants_abc(BoundParams(eta, r, T0)), T0) <= printed + 0.0005


def test_alpha_decreasing():
    T0s = np.geomspace(1e3, 1e30, 50)
    alphas = [bc.alpha_for(MAIN_BOUND, T0) for T0 in T0s]
    assert np.all(np.diff(alphas) < 0)
    with pytest.raises(ValueError):
        bc.alpha_for(MAIN_BOUND, 10.0)


def test_bound_S():
    assert bc.bound_S(math.e, MAIN_BOUND) == pytest.approx(0.111 + 2.450)
    T = 6.8e6
    assert bc.bound_S(T, MAIN_BOUND) == pytest.approx(0.111 * math.log(T) + 0.275 * math.log(math.log(T)) + 2.450)
    with pytest.raises(ValueError):
        bc.bound_S(2.0, MAIN_BOUND)


def test_rosser_crossover():
    T_cross = crossover(MAIN_BOUND, ROSSER)
    assert 6.4e6 / 2 <= T_cross <= 6.4e6 * 2
    assert bc.bound_S(T_cross / 1.5, MAIN_BOUND) > bc.bound_S(T_cross / 1.5, ROSSER)
    assert bc.bound_S(T_cross * 1.5, MAIN_BOUND) < bc.bound_S(T_cross * 1.5, ROSSER)


def test_rvm_error_terms():
    assert bc.rvm_error_terms(1e6) <= 0.2 / 1e6
    assert bc.rvm_error_terms(1.0) <= 0.2
    assert bc.rvm_error_terms(1e12) < 1e-12
    assert bc.bound_N_error(1e7, 6.8e6, MAIN_BOUND) == bc.bound_S(1e7, MAIN_BOUND) + 0.2 / 6.8e6
    with pytest.raises(ValueError):
        bc.bound_N_error(10.0, 100.0, MAIN_BOUND)


# -- assembly -------------------------------------------------------------------------

def test_assembled_below_closed_form():
    assert bc.assembled_bound(THM.T0, THM) <= bc.bound_S(THM.T0, bc.constants_abc(THM))
    p = BoundParams(0.24, 2.35, 1e7)
    gap = bc.bound_S(1e7, bc.constants_abc(p)) - bc.assembled_bound(1e7, p)
    assert 0 <= gap <= 0.01


def test_assembled_slope():
    abc = bc.constants_abc(THM)
    T = 1e12
    slope = (bc.assembled_bound(10 * T, THM) - bc.assembled_bound(T, THM)) / math.log(10)
    expected = abc.a + abc.b * (math.log(math.log(10 * T)) - math.log(math.log(T))) / math.log(10)
    assert slope == pytest.approx(expected, rel=0.01)


def test_slack_audit_covered():
    audit = bc.slack_audit(THM)
    assert audit.covered and audit.total <= 0.003
    assert 0 <= audit.gap <= 0.01


# -- critical-line constant -------------------------------------------------------------

def test_k1_branches_large_t():
    t = 1e6
    br = bc.k1_branches(t)
    target = 2.38 * t ** (1 / 6) * math.log(t)
    assert br["target"] == pytest.approx(target)
    assert br["cgt3"] == pytest.approx(1.457 * 10 * math.log(t) + 40.995 * 10 + 1.863 * math.log(t) + 123.125)
    # the t^(1/4) branch is the one that dominates here; the three-term bound does not
    assert br["active"] == "lehman" and br["holds"]
    assert br["cgt3"] > target


def test_k1_small_t_reports_branch():
    br = bc.k1_branches(math.e)
    assert br["active"] == "lehman"
    with pytest.raises(ValueError):
        bc.k1_branches(2.0)


def test_k1_actual_zeta_below_bound_near_e():
    """Where the analytic branches overshoot, |zeta(1/2+it)| itself is far below the bound."""
    t = np.linspace(math.e, 10.0, 400)
    values, bounds = zeta_array(0.5 + 1j * t)
    assert np.all(np.abs(values) + bounds <= 2.38 * t ** (1 / 6) * np.log(t))


# -- Jensen -------------------------------------------------------------------------------

def test_jensen_single_zero():
    inst = JensenInstance(0j, 1.0, (0.3 + 0.2j,))
    assert bc.jensen_residual(inst) < 1e-8


def test_jensen_constant():
    inst = JensenInstance(1 + 1j, 2.0, (), lead=3.7)
    assert bc.jensen_residual(inst) < 1e-12


def test_jensen_five_zeros():
    rng = np.random.default_rng(1)
    rad = rng.uniform(0.05, 0.9, 5)
    zeros = tuple(rad * np.exp(2j * np.pi * rng.uniform(size=5)))
    assert bc.jensen_residual(JensenInstance(0j, 1.0, zeros)) < 1e-6


def test_jensen_degenerate():
    with pytest.raises(ValueError):
        bc.jensen_residual(JensenInstance(0j, 1.0, (1.0 + 0j,)))
    with pytest.raises(ValueError):
        JensenInstance(0j, 1.0, (0j,))


def test_bound_constants_dict():
    assert BoundConstants(1.0, 2.0, 3.0).as_dict() == {"a": 1.0, "b": 2.0, "c": 3.0}
