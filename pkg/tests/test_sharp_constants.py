import json
from fractions import Fraction

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rellich.numeric import to_mpf
from rellich.errors import DegenerateParameterError, ParameterDomainError
from rellich.sharp_constants import (InequalityParams, alpha_poly_jet, cancellation_report, constant_A,
                                     constant_A_double_prime, constant_A_prime, constant_A_root, constant_B,
                                     expansion_a_ij, lemma_new_sign, proof_r_coefficients, q_factor, sharp_constants,
                                     star_condition, verify_radio, verify_recursions)

rationals = st.fractions(min_value=-10, max_value=10, max_denominator=12)
codims = st.fractions(min_value=Fraction(1, 2), max_value=40, max_denominator=12)


def P(m, p, k, gamma=0, **kw):
    return InequalityParams(m=m, p=p, k=k, gamma=gamma, **kw)


# -- constants --------------------------------------------------------------


@pytest.mark.parametrize("m,k,value", [(2, 8, 64), (1, 8, 9), (4, 12, 147456)])
def test_constant_A_values(m, k, value):
    assert constant_A(P(m, 2, k), exact=True) == value
    assert constant_A(P(m, 2, k)) == value


def test_classical_cross_check():
    k = 8
    assert constant_A(P(2, 2, k), exact=True) == Fraction(k * (k - 4), 4) ** 2


@pytest.mark.parametrize("m,k,value", [(2, 12, 13), (2, 8, 5), (1, 8, Fraction(1, 4))])
def test_constant_B_values(m, k, value):
    assert constant_B(P(m, 2, k), exact=True) == value


@pytest.mark.parametrize("gamma,k,q", [(0, 8, 8), (0, 12, 24), (4, 12, 16)])
def test_q_factor_values(gamma, k, q):
    params = P(2, 2, k, gamma)
    assert q_factor(params, exact=True) == q
    assert q**2 == constant_A(params, exact=True)


def test_invalid_parameters():
    with pytest.raises(ParameterDomainError):
        P(2, 1, 8)
    with pytest.raises(ParameterDomainError):
        P(0, 2, 8)
    with pytest.raises(ParameterDomainError):
        P(2, 2, 8, D=0.5, R=1)


def test_degenerate_B_reports_division_by_zero():
    # gamma = k - 2p makes a base vanish
    with pytest.raises(DegenerateParameterError):
        constant_B(P(2, 2, 8, 4), exact=True)


def test_star_condition_examples():
    v = star_condition(P(2, 2, 5))
    assert not v.ok and v.critical_gamma == 0
    assert star_condition(P(2, 6, 5)).ok
    v = star_condition(P(2, 2, 8))
    assert v.ok and v.critical_gamma == 2
    assert star_condition(P(1, 2, 5)).ok


def test_sharp_constants_record():
    c = sharp_constants(P(2, 2, 12), exact=True)
    assert (c.a_prime * c.a_double_prime, c.a, c.b, c.q, c.star_ok) == (576, 576, 13, 24, True)


@settings(max_examples=60, deadline=None)
@given(m=st.integers(1, 8), p=st.sampled_from([2, 3, 4]), gamma=rationals, k=codims)
def test_A_factorises_exactly(m, p, gamma, k):
    params = P(m, p, k, gamma)
    a = constant_A(params, exact=True)
    assert a == constant_A_prime(params, exact=True) * constant_A_double_prime(params, exact=True)
    root = constant_A_root(params)
    assert root**p == a


@settings(max_examples=60, deadline=None)
@given(p=st.sampled_from([2, 3, 5]), gamma=rationals, k=codims)
def test_Q_power_is_A2(p, gamma, k):
    params = P(2, p, k, gamma)
    assert q_factor(params, exact=True) ** p == constant_A(params, exact=True)


@settings(max_examples=40, deadline=None)
@given(m=st.integers(1, 8), p=st.sampled_from([2, 3]), gamma=rationals, k=codims)
def test_recursions_exact(m, p, gamma, k):
    try:
        reports = verify_recursions(m, gamma, p, k, exact=True)
    except ZeroDivisionError:
        return
    assert reports and all(r.exact and r.holds for r in reports)


@settings(max_examples=30, deadline=None)
@given(m=st.integers(1, 8), p=st.floats(1.2, 6), gamma=st.floats(0, 5), k=st.floats(1, 40))
def test_recursions_floating(m, p, gamma, k):
    try:
        reports = verify_recursions(m, mp.mpf(gamma), mp.mpf(p), mp.mpf(k))
    except ZeroDivisionError:
        return
    assert all(to_rel(r) < mp.mpf("1e-12") for r in reports)


def to_rel(r):
    return mp.mpf(r.rel_err) if not isinstance(r.rel_err, Fraction) else mp.mpf(r.rel_err.numerator) / r.rel_err.denominator


def test_recursion_examples():
    assert constant_A(P(4, 2, 12), exact=True) == constant_A(P(2, 2, 12), exact=True) * constant_A(P(2, 2, 12, 4), exact=True)
    assert constant_A(P(3, 2, 12), exact=True) == constant_A(P(1, 2, 12), exact=True) * constant_A(P(2, 2, 12, 2), exact=True)
    assert all(r.holds for r in verify_recursions(2, 0, 2, 8))


# -- alpha polynomial -------------------------------------------------------


def test_alpha_examples():
    assert alpha_poly_jet(1, 8, -2)[:2] == (-8, 2)
    assert alpha_poly_jet(1, 8, 0)[0] == 0
    assert alpha_poly_jet(2, 12, 2)[0] == 0


@settings(max_examples=40, deadline=None)
@given(m=st.integers(1, 4), k=codims, s=rationals)
def test_alpha_jet_matches_product(m, k, s):
    a, d1, d2 = alpha_poly_jet(m, k, s)
    roots = [2 * i for i in range(m)] + [2 * j - k for j in range(1, m + 1)]

    def f(x):
        out = Fraction(1)
        for r in roots:
            out *= x - r
        return out

    assert a == f(s)
    # exact derivatives from a cubic fit through nearby rational points
    h = Fraction(1, 1000)
    assert abs(d1 - (f(s + h) - f(s - h)) / (2 * h)) < Fraction(1, 10**3) * max(1, abs(d1)) + Fraction(1, 10**2)


@pytest.mark.parametrize("m,k,a,b", [(1, 8, 64, 5), (1, 12, 576, 13)])
def test_radio_examples(m, k, a, b):
    reps = verify_radio(m, 2, k)
    assert all(r.holds for r in reps)
    assert any(r.lhs == a for r in reps) and any(r.lhs == b for r in reps)


def test_radio_fourth_order():
    reps = verify_radio(2, 2, 12)
    assert all(r.holds for r in reps)
    assert reps[1].lhs == reps[1].rhs == 147456


def test_radio_degenerate_flagged():
    reps = verify_radio(2, 2, 8)  # s = 0 is a root of alpha_2
    assert all(r.degenerate for r in reps) and all(r.holds for r in reps)


def test_identity_report_json():
    rec = json.loads(verify_radio(1, 2, 8)[0].to_json())
    assert set(rec) == {"identity", "params", "lhs", "rhs", "abs_err", "rel_err", "exact"}


# -- the m = 2 coefficient system ------------------------------------------


def test_r_coefficients_examples():
    c = proof_r_coefficients(P(2, 2, 8), 0, 0)
    assert c.r0 == 64 and abs(c.r1) < 1e-50 and abs(c.r2) < 1e-50 and abs(c.r2p - 5) < 1e-50
    assert abs(proof_r_coefficients(P(2, 2, 8), 0, 1).r2p - 69) < 1e-50
    assert abs(c.lam - 8) < 1e-50 and abs(c.alpha - mp.mpf(1) / 8) < 1e-50 and abs(c.r3pp + 1) < 1e-50


def test_r_coefficients_precondition():
    with pytest.raises(ParameterDomainError):
        proof_r_coefficients(P(2, 2, 3), 0, 0)


@settings(max_examples=40, deadline=None)
@given(p=st.floats(1.1, 7), extra=st.floats(0.1, 30), frac=st.floats(0, 0.95), mu=st.floats(0, 3),
       beta=st.floats(-3, 3))
def test_r1_r2_vanish(p, extra, frac, mu, beta):
    p = mp.mpf(p)
    k = 2 * p + mp.mpf(extra)
    gamma = (k - 2 * p) * mp.mpf(frac)
    params = P(2, p, k, gamma)
    c = proof_r_coefficients(params, beta, mu)
    scale = max(1, abs(c.r0))
    assert abs(c.r1) <= mp.mpf("1e-40") * scale and abs(c.r2) <= mp.mpf("1e-40") * scale
    target = constant_B(params) + mp.mpf(mu) * constant_A(params)
    assert abs(c.r2p - target) <= mp.mpf("1e-40") * max(1, abs(target))


def test_new_sign_at_critical_gamma():
    crit6 = star_condition(P(2, 6, 5)).critical_gamma
    assert lemma_new_sign(P(2, mp.mpf(6), mp.mpf(5), to_mpf(crit6)), 0) > 0
    assert lemma_new_sign(P(2, 2, 5, 0), 0) < 0


def test_new_sign_linear_in_beta():
    params = P(2, 2, 8)
    v0, v1, v2 = (lemma_new_sign(params, b) for b in (0, 1, 2))
    assert abs((v2 - v1) - (v1 - v0)) < mp.mpf("1e-40") * max(1, abs(v1))
    slope = v1 - v0
    assert slope != 0
    big = 10**6 * (abs(v0) / abs(slope) + 1)
    assert mp.sign(lemma_new_sign(params, big)) == -mp.sign(lemma_new_sign(params, -big))


@settings(max_examples=30, deadline=None)
@given(p=st.floats(1.1, 5.8), k=st.floats(3, 40))
def test_new_sign_follows_quadratic(p, k):
    p, k = mp.mpf(p), mp.mpf(k)
    crit = star_condition(P(2, p, k)).critical_gamma
    if crit < 0 or k - crit - 2 * p <= 0 or abs(p * k - k + crit) < 1e-6:
        return
    quad = 2 * p**2 - 13 * p + 8
    if abs(quad) < 1e-6:
        return
    c = proof_r_coefficients(P(2, p, k, crit), 0, 0)
    value = lemma_new_sign(P(2, p, k, crit), 0)
    assert mp.sign(value) == mp.sign(quad) * mp.sign(c.alpha * c.lam)


# -- expansion coefficients --------------------------------------------------


def test_a00_vanishes_at_extremal_exponent():
    for k in (8, 12, 20):
        s0 = Fraction(4 - k, 2)
        table = expansion_a_ij(P(2, 2, k), [s0, Fraction(-1, 2)])
        assert table.a_ij[(0, 0)] == 0


def test_zero_exponent_kills_row_zero():
    table = expansion_a_ij(P(2, 2, 12), [Fraction(-4), Fraction(0), Fraction(-1, 2)])
    assert table.a_ij[(0, 1)] == 0 and table.a_ij[(0, 2)] != 0


def test_a11_limit_equals_B():
    table = expansion_a_ij(P(2, 2, 12), [Fraction(-4), Fraction(-1, 2)])
    assert table.a_ij[(1, 1)] == 13  # a_11 - |B| = 0 at eps = 0


def test_expansion_requires_even_order():
    with pytest.raises(ParameterDomainError):
        expansion_a_ij(P(3, 2, 12), [0, 0])


@pytest.mark.parametrize("p,k,r", [(2, 12, 1), (2, 8, 2), (3, 20, 2), (mp.mpf("2.5"), 12, 2)])
def test_cancellation_reports_hold(p, k, r):
    reps = cancellation_report(P(2, p, k), r)
    assert reps and all(rep.holds for rep in reps), [rep.identity for rep in reps if not rep.holds]
    names = {rep.identity for rep in reps}
    assert "A_{0,00} = 0" in names
    if r == 2:
        assert "B_{1,12} = 0" in names
    else:
        assert any(n.startswith("B_{0,11}") for n in names)


def test_cancellation_terminal_limit():
    reps = cancellation_report(P(2, 2, 12), 1)
    lim = [r for r in reps if r.identity.startswith("lim a_11")][0]
    assert abs(lim.rhs - 13) < 1e-50

