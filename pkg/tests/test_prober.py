import mpmath as mp
import pytest

from rellich.errors import ParameterDomainError
from rellich.prober import (d_scale_sweep, finite_part_remainder, inequality_sides, richardson, sharpness_A_sweep,
                            sharpness_B_schedule, sign_changes, standard_probes, theta_probe)
from rellich.radial_calculus import LogPowerProfile, test_family
from rellich.sharp_constants import InequalityParams, constant_A

P = InequalityParams(m=2, p=2, k=12)


def eps(*xs):
    return [mp.mpf(x) for x in xs]


@pytest.fixture(scope="module")
def far_family():
    with mp.workdps(60):
        return test_family(P, eps("0.5", "0.5", "0.5", "0.5"))


def test_large_eps_remainder_positive(far_family):
    rep = inequality_sides(P, far_family, 3)
    assert rep.converged and rep.hypotheses_ok and rep.star_ok
    assert rep.remainder > 0 and rep.nonnegative
    assert len(rep.series_terms) == 3


def test_remainder_matches_parts(far_family):
    rep = inequality_sides(P, far_family, 3)
    assert abs(rep.remainder - rep.remainder_from_parts) <= 10 * rep.error_budget + mp.mpf("1e-30") * rep.lhs


def test_homogeneity(far_family):
    c = mp.mpf("-3.7")
    base = inequality_sides(P, far_family, 2)
    scaled = inequality_sides(P, far_family.scaled(c), 2)
    w = abs(c) ** 2
    assert abs(scaled.lhs / (w * base.lhs) - 1) < mp.mpf("1e-25")
    assert abs(scaled.remainder / (w * base.remainder) - 1) < mp.mpf("1e-25")
    assert abs(scaled.quotient / base.quotient - 1) < mp.mpf("1e-25")


def test_plain_rellich_with_r0():
    for e0 in ("0.5", "0.05"):
        rep = inequality_sides(P, test_family(P, eps(e0)), 0)
        assert rep.remainder >= 0
        assert rep.series_terms == []


def test_remainder_decreases_with_depth(far_family):
    rems = [inequality_sides(P, far_family, r).remainder for r in (1, 2, 3)]
    assert rems[0] >= rems[1] >= rems[2]


def test_series_terms_nonnegative_and_ordered(far_family):
    rep = inequality_sides(P, far_family, 3)
    # X_1^2 .. X_i^2 <= 1 decreases in i
    assert all(t > 0 for t in rep.series_terms)
    assert all(b < a for a, b in zip(rep.series_terms, rep.series_terms[1:]))
    assert rep.series_terms[0] < rep.t0


def test_hypothesis_violation_still_computed():
    params = InequalityParams(m=2, p=2, k=5)
    rep = inequality_sides(params, test_family(params, eps("0.5", "0.5")), 1)
    assert rep.hypotheses_ok and not rep.star_ok
    assert mp.isfinite(rep.remainder)
    params = InequalityParams(m=2, p=2, k=3)
    rep = inequality_sides(params, test_family(params, eps("0.5", "0.5")), 1)
    assert not rep.hypotheses_ok and mp.isfinite(rep.remainder)


def test_requires_test_function():
    with pytest.raises(TypeError):
        inequality_sides(P, LogPowerProfile(mp.mpf(-4), ()), 0)


def test_odd_order_and_fractional_power():
    params = InequalityParams(m=3, p=mp.mpf("2.5"), k=16)
    rep = inequality_sides(params, test_family(params, eps("0.3", "0.3", "0.3")), 2)
    assert rep.converged and rep.nonnegative


def test_richardson_exact_on_lines():
    assert richardson(mp.mpf(2), mp.mpf(7), mp.mpf(1), mp.mpf(5)) == 3


def test_sign_changes_finds_roots():
    roots = sign_changes(mp.sin, mp.mpf(1), mp.mpf(10))
    assert len(roots) == 3
    assert all(abs(mp.sin(x)) < mp.mpf("1e-40") for x in roots)


def test_sharpness_A_short_grid():
    table = sharpness_A_sweep(P, ("1e-1", "1e-2"))
    assert table.target == 576
    assert all(row.quotient_A > 576 for row in table.rows)
    assert table.rows[1].quotient_A < table.rows[0].quotient_A
    assert table.relative_error < mp.mpf("1e-2")


def test_sharpness_A_validation():
    with pytest.raises(ParameterDomainError):
        sharpness_A_sweep(P, ("1e-3", "1e-2"))
    with pytest.raises(ParameterDomainError):
        sharpness_A_sweep(P, ("1e-2",), r=1)


def test_sharpness_B_needs_r1():
    with pytest.raises(ParameterDomainError):
        sharpness_B_schedule(P, 2)


def test_finite_part_against_direct_quadrature():
    # as eps_0 -> 0 the directly integrated quantities approach the finite part
    e1 = mp.mpf("0.5")
    num, den = finite_part_remainder(P, e1)
    A = constant_A(P)
    diffs, den_diffs = [], []
    for e0 in ("1e-4", "1e-6"):
        rep = inequality_sides(P, test_family(P, [mp.mpf(e0), e1]), 1)
        diffs.append(abs((rep.lhs - A * rep.t0) - num.value))
        den_diffs.append(abs(rep.series_terms[0] - den.value))
    # both gaps shrink like eps_0^{eps_1} = eps_0^{1/2}
    assert 5 < diffs[0] / diffs[1] < 20
    assert 5 < den_diffs[0] / den_diffs[1] < 20


def test_theta_probe_smaller_than_B():
    row = theta_probe(P, mp.mpf("1e-2"))
    assert abs(row.eps_0 - mp.mpf("1e-4")) < mp.mpf("1e-50")
    assert 0 < row.quotient_theta < 13


def test_standard_probes_deterministic():
    a, b = standard_probes(2, 4, seed=3), standard_probes(2, 4, seed=3)
    assert a == b and len(a) == 4 and all(len(v) == 3 for v in a)
    assert all(mp.mpf("0.05") <= x <= mp.mpf("0.5") for v in a for x in v)


def test_d_scale_sweep():
    probes = standard_probes(2, 2, seed=1)
    grid = [mp.e, mp.e**2, mp.e**4]
    table = d_scale_sweep(P, probes, grid)
    assert table.threshold == grid[0]
    assert all(row.remainder >= -10 * row.error_budget for row in table.rows)
    for i in range(len(probes)):
        rows = [row for row in table.rows if row.probe == i]
        for j in range(2):
            terms = [row.series_terms[j] for row in rows]
            assert all(b < a for a, b in zip(terms, terms[1:]))


def test_d_scale_continuity():
    probe = standard_probes(2, 1, seed=2)
    grid = [mp.e, mp.e * (1 + mp.mpf("1e-8"))]
    rows = d_scale_sweep(P, probe, grid).rows
    jump = abs(rows[1].remainder - rows[0].remainder)
    assert jump < mp.mpf("1e-5") * abs(rows[0].remainder)


def test_d_scale_grid_validation():
    with pytest.raises(ParameterDomainError):
        d_scale_sweep(P, standard_probes(2, 1), [mp.mpf("0.5")])
