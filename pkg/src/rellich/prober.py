"""The two sides of the improved inequality and the sharpness experiments.

All integrals are radial (``int ... t^{k-1} dt`` over ``(0, R)``) and split at
the plateau edge ``R_flat`` of the cutoff.  On the plateau the test functions
are :class:`~rellich.radial_calculus.LogPowerProfile` objects, so
``|Delta^{m/2} u|^p``, ``|u|^p`` and every series weight share one monomial
``t^{p s_0 - gamma - m p} prod X_j^{p s_j}`` and differ by a bounded factor;
on ``[R_flat, R]`` the cutoff is handled with ordinary jets.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Sequence

import mpmath as mp

from .errors import ConvergenceError, ParameterDomainError
from .jets import Jet
from .numeric import is_int, to_mpf
from .quadrature import (DEFAULT_TOL, IntegralResult, RadialIntegrand, finite_part, integrate_radial)
from .radial_calculus import (CutoffSpec, LogPowerProfile, RadialPoint, TestFunction, iterated_operator,
                              poly_eval, test_family)
from .sharp_constants import InequalityParams, constant_A, constant_B, star_condition

__all__ = [
    "RemainderReport",
    "SharpnessARow",
    "SharpnessATable",
    "SharpnessBRow",
    "ThetaRow",
    "SharpnessBTable",
    "DScaleRow",
    "DScaleTable",
    "inequality_sides",
    "sharpness_A_sweep",
    "sharpness_B_schedule",
    "theta_probe",
    "finite_part_remainder",
    "d_scale_sweep",
    "standard_probes",
    "richardson",
    "sign_changes",
    "DEFAULT_EPS0_GRID",
    "DEFAULT_B_SCHEDULE",
]

DEFAULT_EPS0_GRID = ("1e-2", "1e-3", "1e-4")
DEFAULT_B_SCHEDULE = ("1e-1", "1e-2", "1e-3")


def richardson(e_a, q_a, e_b, q_b):
    """Limit at ``e = 0`` of the line through ``(e_a, q_a)`` and ``(e_b, q_b)``."""
    return (e_a * q_b - e_b * q_a) / (e_a - e_b)


# ---------------------------------------------------------------------------
# the two sides
# ---------------------------------------------------------------------------


@dataclass
class RemainderReport:
    params: InequalityParams
    r: int
    lhs: object
    t0: object
    series_terms: list
    remainder: object
    quotient: object
    error_budget: object
    remainder_from_parts: object
    hypotheses_ok: bool
    star_ok: bool
    converged: bool
    a: object = None
    b: object = None

    @property
    def nonnegative(self) -> bool:
        return self.remainder >= -10 * self.error_budget


def _weights(A, B, r):
    """Coefficients of ``[lhs, t0, term_1..term_r]`` in the remainder."""
    return [mp.mpf(1), -A] + [-B] * (r - 1) + [mp.mpf(0)] if r >= 1 else [mp.mpf(1), -A]


def _plateau_part(params: InequalityParams, core: LogPowerProfile, r: int, weights, extra_last=None):
    """Plateau integrand with vector factor ``[lhs, t0, term_1..term_r, remainder]``."""
    m, p, k, g = params.m, to_mpf(params.p), to_mpf(params.k), to_mpf(params.gamma)
    op = iterated_operator(core, m, k, signed=True)
    depth = max(core.r, r)
    tp = p * core.a - g - m * p
    xp = tuple(p * sj for sj in core.s)
    base_q = core.poly

    def vec(pt):
        ps = pt.ps(depth)
        lhs = abs(poly_eval(op.poly, ps)) ** p
        qu = abs(poly_eval(base_q, ps)) ** p
        return _assemble(lhs, qu, ps, lambda: pt.x(r), r, weights, extra_last)

    return RadialIntegrand(tp, xp, core.D, vec, 1, depth)


def _assemble(lhs, base, ps, x_last, r, weights, extra_last):
    terms = [ps[i - 1] ** 2 * base for i in range(1, r + 1)]
    if extra_last is not None and r >= 1:
        prev = ps[r - 2] ** 2 if r >= 2 else 1
        terms[-1] = prev * x_last() ** extra_last * base
    parts = [lhs, base] + terms
    return parts + [mp.fsum(w * v for w, v in zip(weights, parts))]


def _transition_part(params: InequalityParams, u: TestFunction, r: int, weights, extra_last=None):
    """``t -> [lhs, t0, term_1..term_r, remainder]`` densities (without ``t^{k-1}``)."""
    m, p, k, g = params.m, to_mpf(params.p), to_mpf(params.k), to_mpf(params.gamma)
    op = iterated_operator(u, m, k)
    D = u.core.D
    depth = max(r, 1)

    def vec(t):
        uval = abs(u(t))
        if uval == 0:
            return [mp.mpf(0)] * (3 + r)
        lhs = t ** (-g) * op(t) ** p
        base = t ** (-g - m * p) * uval**p
        pt = RadialPoint.from_t(t, D, depth)
        return _assemble(lhs, base, pt.ps(depth), lambda: pt.x(r), r, weights, extra_last)

    return vec


def sign_changes(fn: Callable, a, b, n: int = 64) -> list:
    """Zeros of ``fn`` on ``(a, b)`` found from sign changes on an ``n``-point grid."""
    a, b = to_mpf(a), to_mpf(b)
    grid = [a + (b - a) * q / n for q in range(n + 1)]
    vals = [fn(x) for x in grid]
    roots = []
    for x0, x1, v0, v1 in zip(grid, grid[1:], vals, vals[1:]):
        if v0 == 0 and a < x0:
            roots.append(x0)
        elif v0 * v1 < 0:
            roots.append(mp.findroot(fn, (x0, x1), solver="anderson"))
    return roots


def _kinks(params: InequalityParams, u: TestFunction) -> list:
    """Zeros of ``Delta^{m/2} u`` on the cutoff transition (kinks of ``|.|^p``)."""
    if is_int(params.p) and int(params.p) % 2 == 0:
        return []
    op = iterated_operator(u, params.m, params.k, signed=True)
    spec = u.chi.spec
    return sign_changes(op, spec.R_flat, spec.R)


def _sides(params, u: TestFunction, r, A, B, tol, extra_last=None):
    """Integrals of ``[lhs, t0, term_1..term_r, remainder]`` on shared nodes."""
    weights = _weights(A, B, r)
    spec = u.chi.spec
    width = 3 + r
    head = integrate_radial(_plateau_part(params, u.core, r, weights, extra_last), params.k, 0, spec.R_flat,
                            tol, width=width)
    tail = integrate_radial(_transition_part(params, u, r, weights, extra_last), params.k, spec.R_flat, spec.R,
                            tol, substitution="identity", breaks=_kinks(params, u), width=width)
    return [h + t for h, t in zip(head, tail)]


def inequality_sides(params: InequalityParams, u: TestFunction, r: int, *, tol=DEFAULT_TOL,
                     a=None, b=None) -> RemainderReport:
    """``lhs = int d^-gamma |Delta^{m/2}u|^p``, ``t0 = int d^{-gamma-mp}|u|^p``,
    series terms with ``X_1^2..X_i^2`` (``i = 1..r``) and the remainder
    ``lhs - A t0 - B sum_{i<r} term_i``.

    The remainder is integrated as one density (no cancellation between
    separately rounded integrals); ``remainder_from_parts`` is the same
    quantity assembled from the parts, as a consistency check.
    """
    if not isinstance(u, TestFunction):
        raise TypeError("inequality_sides expects a TestFunction (plateau + cutoff) profile")
    A = constant_A(params) if a is None else to_mpf(a)
    B = constant_B(params) if b is None else to_mpf(b)
    res = _sides(params, u, r, A, B, tol)
    lhs, t0, terms, rem = res[0], res[1], res[2:2 + r], res[-1]
    parts = lhs.value - A * t0.value - B * mp.fsum(t.value for t in terms[:-1] if r >= 1)
    budget = sum((x.err_estimate for x in res), mp.mpf(0))
    last = terms[-1].value if r >= 1 else t0.value
    return RemainderReport(
        params=params, r=r, lhs=lhs.value, t0=t0.value, series_terms=[t.value for t in terms],
        remainder=rem.value, quotient=rem.value / last, error_budget=budget, remainder_from_parts=parts,
        hypotheses_ok=params.hypothesis_gap() > 0, star_ok=star_condition(params).ok,
        converged=all(x.converged for x in res), a=A, b=B)


# ---------------------------------------------------------------------------
# sharpness of A
# ---------------------------------------------------------------------------


@dataclass
class SharpnessARow:
    eps_0: object
    quotient_A: object
    gap: object
    gap_ratio: object


@dataclass
class SharpnessATable:
    rows: list
    limit: object
    target: object

    @property
    def relative_error(self):
        return abs(self.limit - self.target) / abs(self.target)


def sharpness_A_sweep(params: InequalityParams, eps0_grid: Sequence = DEFAULT_EPS0_GRID, r: int = 0, *,
                      spec: CutoffSpec | None = None, tol=DEFAULT_TOL) -> SharpnessATable:
    """``lhs/t0`` for ``u = chi d^{s_0}`` along decreasing ``eps_0``.

    The limit is a two-point Richardson extrapolation from the last two grid
    points and does not use ``A``; ``gap`` (quotient minus ``|A|``) is only
    for comparison.
    """
    if r != 0:
        raise ParameterDomainError("the A-sweep uses the r = 0 family")
    grid = [to_mpf(e) for e in eps0_grid]
    if any(e <= 0 for e in grid) or any(b >= a for a, b in zip(grid, grid[1:])):
        raise ParameterDomainError("eps0 grid must be positive and decreasing")
    target = abs(constant_A(params))
    rows, prev = [], None
    for e in grid:
        u = test_family(params, [e], spec)
        res = _sides(params, u, 0, mp.mpf(0), mp.mpf(0), tol)
        q = res[0].value / res[1].value
        gap = q - target
        rows.append(SharpnessARow(e, q, gap, prev / gap if prev is not None else None))
        prev = gap
    if len(rows) >= 2:
        ra, rb = rows[-2], rows[-1]
        limit = richardson(ra.eps_0, ra.quotient_A, rb.eps_0, rb.quotient_A)
    else:
        limit = rows[-1].quotient_A
    return SharpnessATable(rows, limit, target)


# ---------------------------------------------------------------------------
# sharpness of B
# ---------------------------------------------------------------------------


@dataclass
class SharpnessBRow:
    eps_r: object
    quotient: object
    numerator: object
    denominator: object


@dataclass
class ThetaRow:
    eps_1: object
    eps_0: object
    quotient_theta: object


@dataclass
class SharpnessBTable:
    rows: list
    limit: object
    target: object
    theta: object = None
    theta_rows: list = field(default_factory=list)
    complete: bool = True


def _phi_taylor(op: LogPowerProfile, p, A, order: int):
    """Taylor coefficients at ``X = 0`` of ``|Q(X)|^p - A`` (``r = 1``)."""
    q = poly_eval(op.poly, [Jet.variable(mp.mpf(0), order, mp.mpf(1))])
    out = q.abs_pow(p)
    return [out.coeffs[0] - A] + out.coeffs[1:]


def finite_part_remainder(params: InequalityParams, eps_1, *, spec: CutoffSpec | None = None, tol=DEFAULT_TOL):
    """``lim_{eps_0 -> 0}`` of ``(lhs - A t0, term_1)`` for ``r = 1``.

    On the plateau ``dt/t = dX/X^2`` with ``X = X_1(t/D)`` turns the
    remainder into ``int_0^{X_c} X^{-3+eps_1} Phi(X) dX``; as ``eps_0 -> 0``
    the divergent pieces cancel and what survives is the finite part of that
    integral (analytic continuation in the exponent).  The transition part
    is finite at ``eps_0 = 0`` and integrated directly.
    Returns ``(numerator, denominator)`` as :class:`IntegralResult` values.
    """
    eps_1 = to_mpf(eps_1)
    p, k, g, m = to_mpf(params.p), to_mpf(params.k), to_mpf(params.gamma), params.m
    A = constant_A(params)
    u = test_family(params, [mp.mpf(0), eps_1], spec)
    spec = u.chi.spec
    op = iterated_operator(u.core, m, k, signed=True)
    xc = 1 / (1 + mp.log(u.core.D / to_mpf(spec.R_flat)))
    taylor = _phi_taylor(op, p, A, 3)

    def phi(x):
        return abs(poly_eval(op.poly, [x])) ** p - A

    num = finite_part(phi, -3 + eps_1, xc, taylor, tol=tol)
    den_plateau = xc**eps_1 / eps_1
    weights = [mp.mpf(1), -A, mp.mpf(0)]
    tail = integrate_radial(_transition_part(params, u, 1, weights), k, spec.R_flat, spec.R, tol,
                            substitution="identity", breaks=_kinks(params, u), width=4)
    tail_den, tail_num = tail[2], tail[3]
    den = IntegralResult(den_plateau, mp.mpf(0), 0, "closed_form", True) + tail_den
    return num + tail_num, den


def theta_probe(params: InequalityParams, eps_1, theta=1, *, coupling: Callable | None = None,
                spec: CutoffSpec | None = None, tol=DEFAULT_TOL) -> ThetaRow:
    """``(lhs - A t0) / int d^{-gamma-mp} X_1^theta |u|^p`` at ``eps_0 = coupling(eps_1)``.

    With ``theta < 2`` the denominator outgrows the numerator; the default
    coupling is ``eps_0 = eps_1^2``.
    """
    eps_1 = to_mpf(eps_1)
    eps_0 = (coupling or (lambda e: e**2))(eps_1)
    u = test_family(params, [eps_0, eps_1], spec)
    A = constant_A(params)
    res = _sides(params, u, 1, A, mp.mpf(0), tol, extra_last=to_mpf(theta))
    return ThetaRow(eps_1, eps_0, res[-1].value / res[2].value)


def sharpness_B_schedule(params: InequalityParams, r: int = 1, schedule: Sequence = DEFAULT_B_SCHEDULE, *,
                         spec: CutoffSpec | None = None, theta=1, tol=DEFAULT_TOL) -> SharpnessBTable:
    """Remainder quotient ``(lhs - A t0)/term_r`` along the nested limits.

    The inner limit ``eps_0 -> 0`` is taken exactly through
    :func:`finite_part_remainder`; the outer parameter runs over
    ``schedule`` and the last two points are Richardson-extrapolated.  With
    ``theta`` set, :func:`theta_probe` rows are added for the same schedule.
    """
    if r != 1:
        raise ParameterDomainError("only r = 1 is supported for the nested limit")
    grid = [to_mpf(e) for e in schedule]
    rows = []
    for e in grid:
        num, den = finite_part_remainder(params, e, spec=spec, tol=tol)
        rows.append(SharpnessBRow(e, num.value / den.value, num.value, den.value))
    limit = richardson(rows[-2].eps_r, rows[-2].quotient, rows[-1].eps_r, rows[-1].quotient) if len(rows) > 1 else rows[-1].quotient
    table = SharpnessBTable(rows, limit, abs(constant_B(params)))
    if theta is not None:
        table.theta = to_mpf(theta)
        table.theta_rows = [theta_probe(params, e, theta, spec=spec, tol=tol) for e in grid]
    return table


# ---------------------------------------------------------------------------
# the D scale
# ---------------------------------------------------------------------------


def standard_probes(r: int, n: int = 10, seed: int = 0, low="0.05", high="0.5") -> list:
    """``n`` deterministic eps-vectors of length ``r + 1`` with entries in ``[low, high]``."""
    rng = random.Random(seed)
    lo, hi = to_mpf(low), to_mpf(high)
    return [[lo + (hi - lo) * to_mpf(rng.random()) for _ in range(r + 1)] for _ in range(n)]


@dataclass
class DScaleRow:
    D: object
    probe: int
    remainder: object
    error_budget: object
    series_terms: list


@dataclass
class DScaleTable:
    rows: list
    threshold: object


def d_scale_sweep(params: InequalityParams, probes: Sequence, D_grid: Sequence, r: int = 2, *,
                  spec: CutoffSpec | None = None, tol=DEFAULT_TOL) -> DScaleTable:
    """Remainder as a function of ``D`` for each probe eps-vector.

    ``threshold`` is the smallest grid ``D`` from which on every probe has a
    nonnegative remainder (``None`` if there is none).
    """
    rows = []
    grid = [to_mpf(D) for D in D_grid]
    if any(D < to_mpf(params.R) for D in grid):
        raise ParameterDomainError("D grid must not go below R")
    ok_by_D = []
    for D in grid:
        pd = params.with_(D=D)
        ok = True
        for i, eps in enumerate(probes):
            rep = inequality_sides(pd, test_family(pd, eps, spec), r, tol=tol)
            rows.append(DScaleRow(D, i, rep.remainder, rep.error_budget, rep.series_terms))
            ok = ok and rep.nonnegative
        ok_by_D.append(ok)
    threshold = None
    for idx in range(len(grid) - 1, -1, -1):
        if not ok_by_D[idx]:
            break
        threshold = grid[idx]
    return DScaleTable(rows, threshold)
