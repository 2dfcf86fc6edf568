import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rellich.errors import ConvergenceError, ParameterDomainError
from rellich.iterlog import (eta_zeta_theta, series_tail, tabulate, verify_derivative_rule, verify_eta_identities,
                             x_derivative, x_values)

unit = st.floats(min_value=1e-12, max_value=1, allow_nan=False, exclude_min=True)


def test_x_values_at_one():
    assert x_values(1, 5) == [1] * 5


def test_x_values_examples():
    e1 = mp.exp(-1)
    assert abs(x_values(e1, 1)[0] - mp.mpf(1) / 2) < mp.mpf(10) ** -58
    assert abs(x_values(e1, 2)[1] - 1 / (1 + mp.log(2))) < mp.mpf(10) ** -58
    assert mp.nstr(x_values(e1, 2)[1], 7) == "0.5906161"


@pytest.mark.parametrize("t", [0, -1, mp.mpf("1.5")])
def test_x_values_domain(t):
    with pytest.raises(ParameterDomainError):
        x_values(t, 2)


def test_x_derivative_examples():
    e1 = mp.exp(-1)
    assert abs(x_derivative(e1, 1, 1) - mp.e / 4) < mp.mpf(10) ** -55
    assert x_derivative(mp.mpf("0.3"), 3, 0) == 0
    x2 = 1 / (1 + mp.log(2))
    assert abs(x_derivative(e1, 2, 1) - mp.e / 2 * x2**2) < mp.mpf(10) ** -55
    with pytest.raises(ParameterDomainError):
        x_derivative(1, 1, 1)


@settings(max_examples=50, deadline=None)
@given(t=unit, r=st.integers(1, 6))
def test_x_values_ordered_in_unit_interval(t, r):
    xs = x_values(mp.mpf(t), r)
    assert all(0 < x <= 1 for x in xs)
    assert all(a <= b for a, b in zip(xs, xs[1:]))


@settings(max_examples=50, deadline=None)
@given(a=unit, b=unit, i=st.integers(1, 5))
def test_x_values_increasing_in_t(a, b, i):
    if a == b:
        return
    lo, hi = sorted((mp.mpf(a), mp.mpf(b)))
    assert x_values(lo, i)[-1] < x_values(hi, i)[-1]


@settings(max_examples=30, deadline=None)
@given(a=st.floats(0.01, 0.9), b=st.floats(0.01, 0.9), r=st.integers(0, 4))
def test_tail_bound_monotone_in_X1(a, b, r):
    lo, hi = sorted((mp.mpf(a), mp.mpf(b)))
    if lo == hi:
        return
    # larger t means larger X_1 and a larger omitted tail
    assert series_tail(lo, r).tail_bound < series_tail(hi, r).tail_bound


def test_eta_against_direct_partial_sums():
    e1 = mp.exp(-1)
    n, x, prod, partial = 2000, mp.mpf(1), mp.mpf(1), mp.mpf(0)
    for _ in range(n):
        prod /= 1 + x
        partial += prod
        x = mp.log1p(x)
    # the terms decay like 4/i^2, so the omitted tail is about n times the last term
    eta = eta_zeta_theta(e1).eta
    assert abs(eta - partial - n * prod) < mp.mpf("1e-3") * n * prod
    assert abs(eta - partial - series_tail(e1, n).tail_bound) < mp.mpf(10) ** -50


def test_eta_zeta_theta_at_inverse_e():
    v = eta_zeta_theta(mp.exp(-1))
    assert mp.mpf(1) / 2 <= v.eta < mp.inf
    assert v.eta > v.zeta > 0 and v.theta > 0


def test_tolerance_self_consistency():
    e1 = mp.exp(-1)
    a = eta_zeta_theta(e1, tol=mp.mpf("1e-30"))
    b = eta_zeta_theta(e1, tol=mp.mpf("1e-40"))
    assert all(abs(x - y) < mp.mpf("1e-30") for x, y in zip(a, b))


def test_refuses_t_near_one():
    with pytest.raises(ConvergenceError):
        eta_zeta_theta(1 - mp.mpf("1e-7"))
    with pytest.raises(ConvergenceError):
        eta_zeta_theta(1)


def test_small_t_asymptotics():
    # t = exp(-e^100) is represented through -log t
    v = eta_zeta_theta(neg_log_t=mp.exp(100))
    x1 = x_values(neg_log_t=mp.exp(100))[0]
    for ratio in (v.eta**3 / x1**3, v.eta * v.zeta / x1**3, v.theta / x1**3):
        assert abs(ratio - 1) < mp.mpf("0.1")


def test_small_t_ratios_approach_one():
    ratios = []
    for big in (10, 100, 1000):
        v = eta_zeta_theta(neg_log_t=mp.exp(big))
        ratios.append(v.eta / x_values(neg_log_t=mp.exp(big))[0])
    assert all(abs(b - 1) < abs(a - 1) for a, b in zip(ratios, ratios[1:]))


@pytest.mark.parametrize("t", [mp.exp(-1), mp.exp(-4)])
def test_identities_fine_step(t):
    reps = verify_eta_identities([t], tol="1e-20", h="1e-10")
    assert all(r.holds for r in reps)
    assert max(r.abs_err for r in reps) < mp.mpf("1e-20")


def test_identities_on_log_grid():
    grid = [mp.exp(-j) for j in (1, 3, 10, 30)]
    reps = verify_eta_identities(grid) + verify_derivative_rule(grid)
    assert all(r.holds for r in reps)
    assert any("termwise" in r.identity for r in reps)


def test_identity_grid_domain():
    with pytest.raises(ParameterDomainError):
        verify_eta_identities([mp.mpf("0.9999999")])


def test_tabulate_columns():
    rows = tabulate([mp.exp(-1), mp.exp(-2)], 3)
    assert list(rows[0]) == ["t", "X1", "X2", "X3", "eta", "zeta", "theta"]
    assert rows[0]["X1"] == mp.mpf(1) / 2
