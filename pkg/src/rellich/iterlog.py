"""Iterated logarithms ``X_i`` and the series ``eta``, ``zeta``, ``theta``.

``X_1(t) = 1/(1 - log t)`` and ``X_{i+1} = X_1(X_i)``.  In the variable
``x = -log t`` one step of the recursion is ``x -> log(1 + x)`` and
``X = 1/(1 + x)``, which is how everything here is evaluated; callers that
need ``t`` far below the floating range pass ``neg_log_t`` directly.

The series terms ``X_1...X_i`` tend to zero only like ``1/i^2`` (the ``X_i``
themselves tend to 1), so plain partial sums are useless at high precision.
After a few hundred explicit terms the remainder is a function of the current
``x`` alone, and that function has an asymptotic Laurent expansion at
``x = 0`` that we solve for exactly (see :func:`laurent_coefficients`).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import mpmath as mp

from .errors import ConvergenceError, ParameterDomainError
from .numeric import to_mpf
from .sharp_constants import IdentityReport, make_report

__all__ = [
    "T_MAX",
    "IterLogDepth",
    "SeriesValue",
    "neg_log",
    "x_values",
    "x_derivative",
    "laurent_coefficients",
    "eta_zeta_theta",
    "series_tail",
    "central_difference",
    "verify_derivative_rule",
    "verify_eta_identities",
    "tabulate",
]

T_MAX = Fraction(999999, 1000000)
LAURENT_TERMS = 40
_GROWTH = 1.4  # bound on |c_n|^(1/n) for the three expansions


@dataclass(frozen=True)
class IterLogDepth:
    """Truncation depth ``r`` and the exact size of the omitted ``eta`` tail."""

    r: int
    tail_bound: object


@dataclass(frozen=True)
class SeriesValue:
    eta: object
    zeta: object
    theta: object
    direct_terms: int
    tail_bound: object

    def __iter__(self):
        return iter((self.eta, self.zeta, self.theta))


def neg_log(t=None, neg_log_t=None, *, allow_one: bool = True):
    """``-log t`` after validating ``0 < t <= 1``."""
    if neg_log_t is not None:
        x = to_mpf(neg_log_t)
        if x < 0:
            raise ParameterDomainError("-log t must be non-negative")
        return x
    if t is None:
        raise ParameterDomainError("need t or neg_log_t")
    t = to_mpf(t)
    if not 0 < t <= 1 or (t == 1 and not allow_one):
        raise ParameterDomainError(f"t must lie in (0, 1], got {t}")
    return -mp.log(t)


def x_values(t=None, r: int = 1, *, neg_log_t=None) -> list:
    """``[X_1(t), ..., X_r(t)]``."""
    x = neg_log(t, neg_log_t)
    out = []
    for _ in range(r):
        out.append(1 / (1 + x))
        x = mp.log1p(x)
    return out


def x_derivative(t, i: int, beta):
    """``d/dt X_i(t)^beta = (beta/t) X_1...X_{i-1} X_i^{beta+1}``."""
    t = to_mpf(t)
    if not 0 < t < 1:
        raise ParameterDomainError(f"t must lie in (0, 1), got {t}")
    xs = x_values(t, i)
    beta = to_mpf(beta)
    if beta == 0:
        return mp.mpf(0)
    return beta / t * mp.fprod(xs[:-1]) * xs[-1] ** (beta + 1)


# ---------------------------------------------------------------------------
# Laurent expansions of the tails
# ---------------------------------------------------------------------------
#
# With w = 1/(1+x) and f = log(1+x) the three tails satisfy
#   S(x)  = w   (1 + S(f))                 (eta)
#   S2(x) = w^2 (1 + S2(f))                (zeta)
#   U(x)  = w^3 (1 + S2(f) + U(f))         (theta)
# We look for S = s(x)/x, S2 = s2(x)/x, U = u(x)/x^2 with s, s2, u power
# series.  Writing g = x/f, the equation for the unknown x^{-e} v(x) with
# weight w^m reads  v = w^m g^e v(f) + rho,  and the coefficient of x^{n+1}
# pins down v_n through the factor (m - e/2 + n/2).


def _mul(a, b, n):
    c = [Fraction(0)] * (n + 1)
    for i, ai in enumerate(a[: n + 1]):
        if ai:
            for j, bj in enumerate(b[: n + 1 - i]):
                c[i + j] += ai * bj
    return c


def _inv(a, n):
    c = [Fraction(0)] * (n + 1)
    c[0] = 1 / a[0]
    for k in range(1, n + 1):
        c[k] = -sum(a[j] * c[k - j] for j in range(1, min(k, len(a) - 1) + 1)) / a[0]
    return c


def _pow(a, e, n):
    out = [Fraction(1)] + [Fraction(0)] * n
    base = a if e >= 0 else _inv(a, n)
    for _ in range(abs(e)):
        out = _mul(out, base, n)
    return out


def _compose_powers(v, fpows, n):
    """``sum_j v_j f^j`` truncated at degree ``n``."""
    out = [Fraction(0)] * (n + 1)
    for j, vj in enumerate(v):
        if vj:
            for i in range(n + 1):
                out[i] += vj * fpows[j][i]
    return out


def _solve(weight_power, e, rho, w, g, fpows, n):
    lin = _mul(_pow(w, weight_power, n + 1), _pow(g, e, n + 1), n + 1)
    v = [Fraction(0)] * (n + 1)
    for k in range(n + 1):
        res = [a - b - c for a, b, c in zip(v + [Fraction(0)], _mul(lin, _compose_powers(v, fpows, n + 1), n + 1), rho)]
        v[k] = -res[k + 1] / (Fraction(weight_power) - Fraction(e, 2) + Fraction(k, 2))
    return v


@lru_cache(maxsize=None)
def laurent_coefficients(n: int = LAURENT_TERMS) -> tuple:
    """Exact coefficients ``(s, s2, u)`` with ``S = s/x, S2 = s2/x, U = u/x^2``.

    ``s = (2, -1/6, 1/18, ...)``; the expansions are asymptotic at ``x = 0``.
    """
    N = n + 1
    f = [Fraction(0)] + [Fraction((-1) ** (j + 1), j) for j in range(1, N + 1)]
    w = [Fraction((-1) ** j) for j in range(N + 1)]
    g = _inv(f[1:] + [Fraction(0)], N)
    fpows = [[Fraction(1)] + [Fraction(0)] * N]
    for _ in range(N):
        fpows.append(_mul(fpows[-1], f, N))
    x = [Fraction(0), Fraction(1)] + [Fraction(0)] * (N - 1)
    s = _solve(1, 1, _mul(x, w, N), w, g, fpows, n - 1)
    s2 = _solve(2, 1, _mul(x, _pow(w, 2, N), N), w, g, fpows, n - 1)
    # rho for U: x^2 w^3 (1 + s2(f)/f) = x^2 w^3 + x w^3 g s2(f)
    w3 = _pow(w, 3, N)
    rho_u = [a + b for a, b in zip(_mul(_mul(x, x, N), w3, N),
                                   _mul(_mul(_mul(x, w3, N), g, N), _compose_powers(s2, fpows, N), N))]
    u = _solve(3, 2, rho_u, w, g, fpows, n - 1)
    return tuple(s), tuple(s2), tuple(u)


def _tail_threshold(dps: int) -> float:
    return 10 ** (-(dps + 5) / LAURENT_TERMS) / _GROWTH


def _poly(coeffs, x):
    acc = mp.mpf(0)
    for c in reversed(coeffs):
        acc = acc * x + to_mpf(c)
    return acc


def _tails(x):
    s, s2, u = laurent_coefficients()
    return _poly(s, x) / x, _poly(s2, x) / x, _poly(u, x) / x**2


def _walk(x, threshold):
    """Explicit terms until ``x`` drops below ``threshold``."""
    P = mp.mpf(1)
    eta = zeta = theta = mp.mpf(0)
    n = 0
    while x > threshold:
        P = P / (1 + x)
        eta += P
        zeta += P * P
        theta += eta * P * P
        x = mp.log1p(x)
        n += 1
    return x, P, eta, zeta, theta, n


def eta_zeta_theta(t=None, tol=None, *, neg_log_t=None, dps: int | None = None) -> SeriesValue:
    """``eta = sum X_1..X_i``, ``zeta = sum X_1^2..X_i^2`` and
    ``theta = sum_{j<=i} X_1^3..X_j^3 X_{j+1}^2..X_i^2`` at ``t``.

    The result is accurate to the working precision (default: current mpmath
    precision, raised when ``tol`` asks for more).  ``tail_bound`` estimates
    the truncation error of the asymptotic tail.
    """
    if dps is None:
        dps = mp.mp.dps
    if tol is not None:
        dps = max(dps, int(-mp.log10(to_mpf(tol))) + 10)
    with mp.workdps(dps + 10):
        x = neg_log(t, neg_log_t)
        if neg_log_t is None and to_mpf(t) > to_mpf(T_MAX):
            raise ConvergenceError(f"t = {t} is too close to 1 for the series", partial=None)
        if x == 0:
            raise ConvergenceError("the series diverge at t = 1")
        thr = _tail_threshold(dps)
        x, P, eta, zeta, theta, n = _walk(x, thr)
        S, S2, U = _tails(x)
        s = laurent_coefficients()[0]
        bound = P * abs(to_mpf(s[-1])) * x ** (len(s) - 1)
        value = SeriesValue(eta + P * S, zeta + P**2 * S2, theta + eta * P**2 * S2 + P**3 * U, n, bound)
    return SeriesValue(+value.eta, +value.zeta, +value.theta, n, +bound)


def series_tail(t=None, r: int = 1, *, neg_log_t=None) -> IterLogDepth:
    """Exact remainder ``sum_{i>r} X_1...X_i`` of ``eta`` after ``r`` terms."""
    x = neg_log(t, neg_log_t, allow_one=False)
    with mp.workdps(mp.mp.dps + 10):
        P = mp.mpf(1)
        for _ in range(r):
            P /= 1 + x
            x = mp.log1p(x)
        tail = P * eta_zeta_theta(neg_log_t=x).eta
    return IterLogDepth(r, +tail)


# ---------------------------------------------------------------------------
# finite-difference oracles
# ---------------------------------------------------------------------------

_STENCIL8 = [(1, Fraction(4, 5)), (2, Fraction(-1, 5)), (3, Fraction(4, 105)), (4, Fraction(-1, 280))]


def central_difference(fn, x, h):
    """Eighth-order central difference for ``fn'(x)``."""
    return sum(to_mpf(c) * (fn(x + j * h) - fn(x - j * h)) for j, c in _STENCIL8) / h


def _tau_grid(grid):
    for t in grid:
        yield to_mpf(t), mp.log(to_mpf(t))


def verify_derivative_rule(grid: Iterable, pairs: Sequence = ((1, 1), (2, 1), (1, 2), (2, -0.5), (3, 1)),
                           *, h="1e-4", dps: int = 60, tol="1e-15") -> list[IdentityReport]:
    """The rule ``d/dt X_i^beta = (beta/t) X_1..X_{i-1} X_i^{beta+1}`` against
    finite differences in ``log t``."""
    out = []
    with mp.workdps(dps):
        h, tol = to_mpf(h), to_mpf(tol)
        for t, tau in _tau_grid(grid):
            for i, beta in pairs:
                beta = to_mpf(beta)

                def fn(u, i=i, beta=beta):
                    return x_values(neg_log_t=-u, r=i)[-1] ** beta

                fd = central_difference(fn, tau, h) / t
                out.append(make_report(f"d/dt X_{i}^beta", {"t": t, "i": i, "beta": beta},
                                       x_derivative(t, i, beta), fd, tol=tol))
    return out


def verify_eta_identities(grid: Iterable, tol="1e-15", *, h="1e-4", dps: int = 60,
                          termwise_depth: int = 3) -> list[IdentityReport]:
    """``eta' = (eta^2 + zeta)/(2t)`` and ``zeta' = 2 theta / t`` on ``grid``.

    Derivatives come from an eighth-order stencil in ``log t``.  Also checks
    that the derivative of the ``i``-th term of ``eta`` is
    ``(X_1..X_i)(sum_{j<=i} X_1..X_j)/t`` for ``i <= termwise_depth``.
    """
    out = []
    with mp.workdps(dps):
        h, tol = to_mpf(h), to_mpf(tol)
        for t, tau in _tau_grid(grid):
            if not 0 < t <= to_mpf(T_MAX):
                raise ParameterDomainError(f"grid point {t} outside (0, 1 - 1e-6]")
            vals = {}

            def series(u):
                if u not in vals:
                    vals[u] = eta_zeta_theta(neg_log_t=-u)
                return vals[u]

            eta, zeta, theta = series(tau)
            d_eta = central_difference(lambda u: series(u).eta, tau, h) / t
            d_zeta = central_difference(lambda u: series(u).zeta, tau, h) / t
            tag = {"t": t}
            out.append(make_report("eta' = (eta^2 + zeta)/(2t)", tag, d_eta, (eta**2 + zeta) / (2 * t), tol=tol))
            out.append(make_report("zeta' = 2 theta / t", tag, d_zeta, 2 * theta / t, tol=tol))
            xs = x_values(t, termwise_depth)
            for i in range(1, termwise_depth + 1):
                def term(u, i=i):
                    return mp.fprod(x_values(neg_log_t=-u, r=i))

                prods = [mp.fprod(xs[:j]) for j in range(1, i + 1)]
                closed = prods[-1] * mp.fsum(prods) / t
                fd = central_difference(term, tau, h) / t
                out.append(make_report(f"d/dt (X_1..X_{i}) termwise", {"t": t, "i": i}, closed, fd, tol=tol))
    return out


def tabulate(grid: Iterable, r: int, *, dps: int = 60) -> list[dict]:
    """Rows ``{t, X1..Xr, eta, zeta, theta}``."""
    rows = []
    with mp.workdps(dps):
        for t in grid:
            t = to_mpf(t)
            row = {"t": t}
            for i, x in enumerate(x_values(t, r), 1):
                row[f"X{i}"] = x
            v = eta_zeta_theta(t)
            row.update(eta=v.eta, zeta=v.zeta, theta=v.theta)
            rows.append(row)
    return rows
