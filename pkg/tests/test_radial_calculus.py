import random

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rellich.errors import ParameterDomainError
from rellich.iterlog import central_difference, x_derivative, x_values
from rellich.jets import Jet
from rellich.radial_calculus import (CutoffSpec, FunctionProfile, LogPowerProfile, cutoff, family_exponents,
                                     iterated_operator, radial_derivative, radial_laplacian, test_family, x_jet)
from rellich.sharp_constants import InequalityParams, alpha_jet


def power(s):
    return FunctionProfile(lambda tj: tj.pow(s))


def close(a, b, rel="1e-30"):
    return abs(a - b) <= mp.mpf(rel) * max(1, abs(b))


# -- x_jet -------------------------------------------------------------------


def test_x_jet_examples():
    e1 = mp.exp(-1)
    j = x_jet(e1, 1, 1)
    assert close(j.value, mp.mpf(1) / 2) and close(j.coeffs[1], mp.e / 4)
    assert close(x_jet(e1, 2, 0).value, 1 / (1 + mp.log(2)))


@pytest.mark.parametrize("i,beta", [(1, 2), (2, mp.mpf(-1) / 2), (3, 1)])
def test_x_jet_power_rule(i, beta):
    t = mp.exp(-2)
    j = x_jet(t, i, 1).pow(beta)
    assert close(j.coeffs[1], x_derivative(t, i, beta))


def test_x_jet_domain():
    with pytest.raises(ParameterDomainError):
        x_jet(1, 1, 1)


# -- Laplacian and iterated operator ----------------------------------------


def test_laplacian_examples():
    k = 3
    sq = radial_laplacian(power(2), k)
    assert close(sq(mp.mpf("0.3")), 2 * k) and close(sq(mp.mpf(2)), 2 * k)
    s, t = mp.mpf("1.7"), mp.mpf("0.4")
    assert close(radial_laplacian(power(s), 5)(t), s * (s + 3) * t ** (s - 2))
    assert abs(radial_laplacian(power(-3), 5)(t)) < mp.mpf(10) ** -50


def test_iterated_operator_examples():
    k, s, t = mp.mpf(9), mp.mpf("2.3"), mp.mpf("0.7")
    assert close(iterated_operator(power(s), 2, k)(t), abs(s * (s + k - 2)) * t ** (s - 2))
    a2 = s * (s - 2) * (s + k - 2) * (s + k - 4)
    assert close(iterated_operator(power(s), 4, k)(t), abs(a2) * t ** (s - 4))
    assert close(iterated_operator(power(-s), 1, k)(t), s * t ** (-s - 1))


def test_alpha_laws_random():
    rng = random.Random(11)
    for _ in range(20):
        s = mp.mpf(rng.uniform(-6, 6))
        k = mp.mpf(rng.uniform(1, 30))
        t = mp.mpf(rng.uniform(0.1, 2))
        for m in range(1, 5):
            want = alpha_jet(m, k, s, 0).value * t ** (s - 2 * m)
            generic = iterated_operator(power(s), 2 * m, k, signed=True)(t)
            closed = iterated_operator(LogPowerProfile(s, ()), 2 * m, k, signed=True)(t)
            assert close(generic, want) and close(closed, want)


def test_odd_order_consistency():
    # Delta^2 f = g' + (k-1) g / t with g = (Delta f)'
    k, t = mp.mpf(7), mp.mpf("0.35")
    for f in (power(mp.mpf("1.3")), LogPowerProfile(mp.mpf("-0.4"), (mp.mpf("0.2"), mp.mpf("-0.5")), 2)):
        g = iterated_operator(f, 3, k, signed=True)
        two_ways = radial_derivative(g)(t) + (k - 1) * g(t) / t
        assert close(two_ways, iterated_operator(f, 4, k, signed=True)(t), "1e-40")


def test_logpower_matches_generic_jets():
    prof = LogPowerProfile(mp.mpf("-1.2"), (mp.mpf("-0.45"), mp.mpf("0.3")), 3)
    generic = FunctionProfile(lambda tj: prof.eval(tj.center, tj.order))
    for m in (1, 2, 3, 4):
        t = mp.mpf("0.2")
        a = iterated_operator(prof, m, 12, signed=True)(t)
        b = iterated_operator(generic, m, 12, signed=True)(t)
        assert close(a, b, "1e-40")


def test_insufficient_order_rejected():
    f = FunctionProfile(lambda tj: tj.pow(2), smoothness_order=1)
    with pytest.raises(ParameterDomainError):
        radial_laplacian(f, 3)
    with pytest.raises(ParameterDomainError):
        iterated_operator(f, 2, 3)


# -- cutoff --------------------------------------------------------------------


def test_cutoff_examples():
    chi = cutoff(CutoffSpec(R=1))
    j = chi.eval(mp.mpf("0.25"), 4)
    assert j.value == 1 and all(c == 0 for c in j.coeffs[1:])
    j = chi.eval(mp.mpf(1), 4)
    assert all(c == 0 for c in j.coeffs)
    j = chi.eval(mp.mpf("0.75"), 1)
    assert 0 < j.value < 1 and j.coeffs[1] < 0


def test_cutoff_spec_validation():
    with pytest.raises(ParameterDomainError):
        CutoffSpec(R=1, R_flat=1)


@settings(max_examples=40, deadline=None)
@given(a=st.floats(0.5, 1), b=st.floats(0.5, 1))
def test_cutoff_monotone(a, b):
    chi = cutoff(CutoffSpec(R=1))
    lo, hi = sorted((mp.mpf(a), mp.mpf(b)))
    assert 0 <= chi(hi) <= chi(lo) <= 1


# -- the test family ------------------------------------------------------------


P = InequalityParams(m=2, p=2, k=12)


def test_family_pure_power_smoke():
    # r = 0 and eps_0 chosen so that s_0 = 2m on the plateau
    params = InequalityParams(m=4, p=2, k=12)
    eps0 = 2 * 4 * 2 - (4 * 2 - 12)  # p s_0 = m p - k + eps_0 with s_0 = 2m
    u = test_family(params, [eps0])
    assert family_exponents(params, [eps0])[0] == 8
    t = mp.mpf("0.3")
    got = iterated_operator(u, 8, 12, signed=True)(t)
    want = iterated_operator(power(8), 8, 12, signed=True)(t)
    assert close(got, want) and close(got, alpha_jet(4, 12, 8, 0).value)


def test_family_support_and_plateau():
    u = test_family(P, [mp.mpf("0.1"), mp.mpf("0.2")])
    j = u.eval(mp.mpf(1), 3)
    assert all(c == 0 for c in j.coeffs)
    t = mp.mpf("0.2")
    s0, s = family_exponents(P, [mp.mpf("0.1"), mp.mpf("0.2")])
    pure = t**s0 * x_values(t / P.scale, 1)[0] ** s[0]
    assert close(u(t), pure, "1e-50")
    assert u(mp.mpf("0.4")) > 0


@settings(max_examples=15, deadline=None)
@given(t=st.floats(0.05, 0.95), e0=st.floats(0.01, 1), e1=st.floats(0.01, 1))
def test_family_jets_match_finite_differences(t, e0, e1):
    u = test_family(P, [mp.mpf(e0), mp.mpf(e1)])
    t, h = mp.mpf(t), mp.mpf("1e-8")
    j = u.eval(t, 2)
    d1 = central_difference(u, t, h)
    d2 = central_difference(lambda x: u.eval(x, 1).coeffs[1], t, h)
    assert abs(j.coeffs[1] - d1) <= mp.mpf("1e-10") * max(1, abs(d1))
    assert abs(2 * j.coeffs[2] - d2) <= mp.mpf("1e-10") * max(1, abs(d2))


@settings(max_examples=25, deadline=None)
@given(t=st.floats(0.001, 0.5), eps=st.lists(st.floats(0.01, 1), min_size=1, max_size=4))
def test_log_derivative_closed_form(t, eps):
    params = InequalityParams(m=2, p=mp.mpf("2.5"), k=12, gamma=1)
    u = test_family(params, [mp.mpf(e) for e in eps])
    t = mp.mpf(t)
    s0, s = family_exponents(params, [mp.mpf(e) for e in eps])
    xs = x_values(t / params.scale, len(s))
    prods = [mp.fprod(xs[: j + 1]) for j in range(len(s))]
    j = u.eval(t, 1)
    assert close(j.coeffs[1] / j.value, (s0 + mp.fsum(sj * pj for sj, pj in zip(s, prods))) / t, "1e-45")


def test_family_requires_D_at_least_R():
    with pytest.raises(ParameterDomainError):
        test_family(P, [])
    with pytest.raises(ParameterDomainError):
        test_family(InequalityParams(m=2, p=2, k=12, D=2, R=1), [1], CutoffSpec(R=3))
