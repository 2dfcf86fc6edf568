"""Singular radial integrals ``int_a^b g(t) t^{k-1} dt`` in extended precision.

After the coarea reduction (cross-sectional constant set to 1) all the
integrals of interest look like

    int_0^b t^{e_0 - 1} X_1^{1+e_1} ... X_n^{1+e_n} Phi dt

with ``Phi`` bounded near ``t = 0``.  Such an integral is finite exactly when
the first nonzero ``e_j`` is positive.  If that is ``e_{L-1}`` we integrate in
``z = y_L``, where ``y_0 = log(D/t)`` and ``y_j = log(1 + y_{j-1})``; then
``dt/t = exp(y_1 + ... + y_L) dz``, the weight becomes
``exp(-e_{L-1} y_{L-1} - ...)`` with ``y_{L-1} = expm1(z)``, and the
integrand decays double-exponentially in ``z``.  Weights are combined in log
space, so radii far below the floating range cost nothing extra.

Each panel goes to :func:`mpmath.quad` (tanh-sinh); panels whose error
estimate misses the target are bisected, in a fixed order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import mpmath as mp

from .errors import ConvergenceError, ParameterDomainError
from .numeric import to_mpf
from .radial_calculus import Cutoff, CutoffSpec, RadialPoint, family_exponents
from .sharp_constants import InequalityParams

__all__ = [
    "IntegralResult",
    "GammaIndex",
    "RadialIntegrand",
    "DivergenceReport",
    "BoundedCombination",
    "exponent_excesses",
    "finiteness_check",
    "integrate_radial",
    "integrate_interval",
    "gamma_ij",
    "gamma_integrand",
    "divergence_rate_probe",
    "parts_combination_check",
    "finite_part",
    "DEFAULT_TOL",
    "EVAL_BUDGET",
]

DEFAULT_TOL = mp.mpf("1e-20")
EVAL_BUDGET = 10**6
MAX_BISECTIONS = 12


@dataclass
class IntegralResult:
    value: object
    err_estimate: object
    panels: int
    substitution: str
    converged: bool
    evaluations: int = 0

    def __add__(self, other: "IntegralResult") -> "IntegralResult":
        sub = self.substitution if self.substitution == other.substitution else f"{self.substitution}+{other.substitution}"
        return IntegralResult(self.value + other.value, self.err_estimate + other.err_estimate,
                              self.panels + other.panels, sub, self.converged and other.converged,
                              self.evaluations + other.evaluations)

    def scaled(self, c) -> "IntegralResult":
        return IntegralResult(c * self.value, abs(c) * self.err_estimate, self.panels, self.substitution,
                              self.converged, self.evaluations)


@dataclass(frozen=True)
class GammaIndex:
    i: int
    j: int

    def __post_init__(self):
        if not 0 <= self.i <= self.j:
            raise ParameterDomainError(f"need 0 <= i <= j, got ({self.i}, {self.j})")

    def y_powers(self, r: int) -> list:
        """Exponents of ``Y_ij = X_1^2..X_i^2 X_{i+1}..X_j`` on ``X_1..X_r``."""
        return [2 if q <= self.i else (1 if q <= self.j else 0) for q in range(1, r + 1)]


@dataclass(frozen=True)
class RadialIntegrand:
    """``g(t) = coeff * t^{t_power} prod X_j(t/D)^{x_powers[j]} * factor(point)``.

    ``factor`` receives a :class:`RadialPoint` carrying at least ``depth``
    iterated logs and must stay bounded as ``t -> 0``.
    """

    t_power: object = 0
    x_powers: tuple = ()
    D: object = 1
    factor: Callable | None = None
    coeff: object = 1
    depth: int = 0


def exponent_excesses(t_power, x_powers: Sequence) -> list:
    """``[e_0, e_1, ...]`` for ``t^{t_power} prod X_j^{x_j}`` against ``dt``.

    A sentinel ``-1`` is appended for the first absent ``X``.
    """
    return [to_mpf(t_power) + 1] + [to_mpf(x) - 1 for x in x_powers] + [mp.mpf(-1)]


def finiteness_check(eps: Sequence) -> bool:
    """``int_0 t^{eps_0-1} X_1^{1+eps_1}..X_r^{1+eps_r} dt < inf``.

    True iff the first nonzero ``eps_j`` is positive.
    """
    for e in eps:
        if e > 0:
            return True
        if e < 0:
            return False
    return False


def _first_nonzero(excess: Sequence) -> int:
    for idx, e in enumerate(excess):
        if e != 0:
            return idx
    raise AssertionError("sentinel missing")


# ---------------------------------------------------------------------------
# the panel engine
# ---------------------------------------------------------------------------


class _Budget:
    def __init__(self, limit: int):
        self.limit, self.used = limit, 0

    def wrap(self, fn):
        def counted(x):
            self.used += 1
            return fn(x)

        return counted


def _adaptive(fn, breaks: Sequence, tol, budget: _Budget):
    """Integrate ``fn`` over consecutive ``breaks`` with bisection on failure."""
    total, err, panels, ok = mp.mpf(0), mp.mpf(0), 0, True
    stack = [(breaks[i], breaks[i + 1], 0) for i in range(len(breaks) - 1)]
    stack.reverse()
    counted = budget.wrap(fn)
    while stack:
        lo, hi, level = stack.pop()
        if budget.used > budget.limit:
            ok = False
            val, e = mp.quad(counted, [lo, hi], error=True)
        else:
            val, e = mp.quad(counted, [lo, hi], error=True)
            if e > tol * max(1, abs(val)) and level < MAX_BISECTIONS:
                mid = (lo + hi) / 2
                stack.append((mid, hi, level + 1))
                stack.append((lo, mid, level + 1))
                continue
        total += val
        err += e
        panels += 1
        if e > tol * max(1, abs(val)):
            ok = False
    return total, err, panels, ok


def _quad_panel_vector(fn, a, b, width: int, tol):
    """One tanh-sinh panel for a vector-valued ``fn``.

    Same nodes and error estimator as :func:`mpmath.quad`; the degree stops
    growing once every component is well inside ``tol``.
    """
    ctx = mp.mp
    rule = ctx._tanh_sinh
    prec = ctx.prec
    eps = ctx.eps / 8
    max_degree = rule.guess_degree(prec)
    history = [[] for _ in range(width)]
    errs = [mp.inf] * width
    ctx.prec += 20
    try:
        for degree in range(1, max_degree + 1):
            h = mp.mpf(2) ** (-degree)
            sums = [hist[-1] / (2 * h) if hist else mp.mpf(0) for hist in history]
            for x, w in rule.get_nodes(a, b, degree, prec):
                v = fn(x)
                if isinstance(v, (list, tuple)):
                    for c in range(width):
                        sums[c] += w * v[c]
                elif v:
                    for c in range(width):
                        sums[c] += w * v
            for c in range(width):
                history[c].append(h * sums[c])
            if degree > 1:
                errs = [rule.estimate_error(hist, prec, eps) for hist in history]
                if all(e <= max(eps, tol * mp.mpf("1e-5") * max(1, abs(hist[-1])))
                       for e, hist in zip(errs, history)):
                    break
    finally:
        ctx.prec -= 20
    return [+hist[-1] for hist in history], [+e for e in errs]


def _adaptive_vector(fn, breaks: Sequence, width: int, tol, budget: _Budget):
    """Vector version of :func:`_adaptive`; a panel is split if any component misses ``tol``."""
    totals, errs = [mp.mpf(0)] * width, [mp.mpf(0)] * width
    panels, ok = 0, True
    stack = [(breaks[i], breaks[i + 1], 0) for i in range(len(breaks) - 1)]
    stack.reverse()
    counted = budget.wrap(fn)
    while stack:
        lo, hi, level = stack.pop()
        vals, es = _quad_panel_vector(counted, lo, hi, width, tol)
        bad = any(e > tol * max(1, abs(v)) for v, e in zip(vals, es))
        if bad and level < MAX_BISECTIONS and budget.used <= budget.limit:
            mid = (lo + hi) / 2
            stack.append((mid, hi, level + 1))
            stack.append((lo, mid, level + 1))
            continue
        ok = ok and not bad
        totals = [t + v for t, v in zip(totals, vals)]
        errs = [t + e for t, e in zip(errs, es)]
        panels += 1
    return totals, errs, panels, ok


def _log_floor():
    return -(mp.mp.dps + 15) * mp.log(10)


def _log_weight_fn(t_power, x_powers, D, level, depth, coeff):
    """``z -> (log weight, point)`` of ``t^{t_power} X^{x} dt`` in ``z = y_level``."""
    D = to_mpf(D)
    tp1 = to_mpf(t_power) + 1
    const = tp1 * mp.log(D) + mp.log(abs(to_mpf(coeff)))
    cs = [-tp1] + [(1 if j <= level else 0) - (to_mpf(x_powers[j - 1]) if j <= len(x_powers) else 0)
                   for j in range(1, depth + 1)]

    def weight(z):
        pt = RadialPoint.from_level(z, level, D, depth)
        lw = const
        for c, y in zip(cs, pt.ys):
            if c:
                if y == mp.inf:
                    if c < 0:
                        return -mp.inf, pt
                    return mp.inf, pt
                lw += c * y
        return lw, pt

    return weight


def _times(c, f):
    if isinstance(f, (list, tuple)):
        return [c * v for v in f]
    return c * f


def _run(fn, breaks, tol, budget, width):
    if width is None:
        return _adaptive(fn, breaks, tol, budget)
    return _adaptive_vector(fn, breaks, width, tol, budget)


def _results(val, err, panels, sub, ok, used, width):
    if width is None:
        return IntegralResult(val, err, panels, sub, ok, used)
    return [IntegralResult(v, e, panels, sub, ok, used) for v, e in zip(val, err)]


def _integrate_log_scale(g: RadialIntegrand, a, b, tol, level=None, budget=None, width=None):
    a, b, D = to_mpf(a), to_mpf(b), to_mpf(g.D)
    if not 0 <= a < b <= D:
        raise ParameterDomainError(f"log-scale map needs 0 <= a < b <= D, got a={a}, b={b}, D={D}")
    excess = exponent_excesses(g.t_power, g.x_powers)
    if a == 0:
        first = _first_nonzero(excess)
        if excess[first] < 0:
            raise ParameterDomainError(f"integrand is not integrable at t = 0 (exponent excesses {excess[:-1]})")
        level = first + 1
    elif level is None:
        level = 1
    depth = max(level, len(g.x_powers), g.depth)
    weight = _log_weight_fn(g.t_power, g.x_powers, D, level, depth, g.coeff)
    sign = 1 if to_mpf(g.coeff) >= 0 else -1
    floor = _log_floor()

    def fn(z):
        lw, pt = weight(z)
        if lw < floor:
            return mp.mpf(0)
        if lw == mp.inf:
            raise ParameterDomainError("integrand blows up inside the domain")
        f = 1 if g.factor is None else g.factor(pt)
        if not isinstance(f, (list, tuple)) and f == 0:
            return mp.mpf(0)
        return _times(sign * mp.exp(lw), f)

    z_lo = RadialPoint.from_t(b, D, level).ys[level]
    if a > 0:
        z_hi = RadialPoint.from_t(a, D, level).ys[level]
        n = max(1, min(64, int(mp.ceil(z_hi - z_lo))))
        breaks = [z_lo + (z_hi - z_lo) * q / n for q in range(n + 1)]
    else:
        e_dec = excess[level - 1]
        z_end = mp.log1p((abs(floor) + 60) / e_dec)
        z_end = max(z_end, z_lo + 1)
        # push past any late growth of the other factors
        for _ in range(200):
            if weight(z_end)[0] < floor:
                break
            z_end += 1
        n = int(mp.ceil(z_end - z_lo))
        breaks = [z_lo + q for q in range(n)] + [z_end]
    budget = budget or _Budget(EVAL_BUDGET)
    val, err, panels, ok = _run(fn, breaks, tol, budget, width)
    return _results(val, err, panels, "log_scale", ok, budget.used, width)


def _integrate_identity(g, a, b, tol, budget=None, breaks=(), width=None):
    a, b = to_mpf(a), to_mpf(b)
    if isinstance(g, RadialIntegrand):
        D = to_mpf(g.D)
        depth = max(len(g.x_powers), g.depth)

        def fn(t):
            if t <= 0:
                return mp.mpf(0)
            pt = RadialPoint.from_t(t, D, depth)
            lw = to_mpf(g.t_power) * pt.log_t - sum((to_mpf(x) * pt.ys[j] for j, x in enumerate(g.x_powers, 1)), mp.mpf(0))
            f = 1 if g.factor is None else g.factor(pt)
            return _times(to_mpf(g.coeff) * mp.exp(lw), f)
    else:
        fn = g
    budget = budget or _Budget(EVAL_BUDGET)
    n = 4
    pts = [a + (b - a) * q / n for q in range(n + 1)] + [to_mpf(x) for x in breaks if a < x < b]
    val, err, panels, ok = _run(fn, sorted(set(pts)), tol, budget, width)
    return _results(val, err, panels, "identity", ok, budget.used, width)


def integrate_interval(g, a, b, tol=DEFAULT_TOL, substitution: str = "auto", level: int | None = None,
                       breaks: Sequence = (), width: int | None = None):
    """``int_a^b g(t) dt`` (no ``t^{k-1}`` factor).

    ``breaks`` are extra panel edges for the identity map (kinks of ``g``).
    With ``width`` set, ``g`` (or its factor) returns ``width`` values that
    are integrated on shared nodes, and a list of results comes back.
    """
    tol = to_mpf(tol)
    if substitution == "auto":
        substitution = "log_scale" if (isinstance(g, RadialIntegrand) and to_mpf(a) == 0) else "identity"
    if substitution == "log_scale":
        if not isinstance(g, RadialIntegrand):
            g = RadialIntegrand(factor=lambda pt, _g=g: _g(pt.t))
        return _integrate_log_scale(g, a, b, tol, level, width=width)
    if substitution == "identity":
        return _integrate_identity(g, a, b, tol, breaks=breaks, width=width)
    raise ValueError(f"unknown substitution {substitution!r}")


def integrate_radial(g, k, a, b, tol=DEFAULT_TOL, substitution: str = "auto", level: int | None = None,
                     raise_on_failure: bool = False, breaks: Sequence = (), width: int | None = None):
    """``int_a^b g(t) t^{k-1} dt``.

    ``g`` is a :class:`RadialIntegrand` (required for ``a = 0`` with the
    log-scale map) or a plain callable of ``t``.
    """
    k = to_mpf(k)
    if isinstance(g, RadialIntegrand):
        h = RadialIntegrand(to_mpf(g.t_power) + k - 1, g.x_powers, g.D, g.factor, g.coeff, g.depth)
    else:
        h = lambda t, _g=g: _times(t ** (k - 1), _g(t))  # noqa: E731
    res = integrate_interval(h, a, b, tol, substitution, level, breaks, width)
    if raise_on_failure:
        bad = [x for x in (res if width is not None else [res]) if not x.converged]
        if bad:
            raise ConvergenceError(f"quadrature missed tol={tol}: err={bad[0].err_estimate}", partial=res)
    return res


# ---------------------------------------------------------------------------
# the Gamma_ij family
# ---------------------------------------------------------------------------


def gamma_integrand(params: InequalityParams, eps: Sequence, idx: GammaIndex, extra_x=(), factor=None) -> RadialIntegrand:
    """``t^{(s_0 - m)p - gamma} prod X_j^{p s_j} Y_ij`` (times ``t^{k-1}`` later)."""
    s0, s = family_exponents(params, eps)
    p = to_mpf(params.p)
    r = max(len(s), idx.j, len(extra_x))
    xp = [mp.mpf(0)] * r
    for q, sq in enumerate(s):
        xp[q] += p * sq
    for q, y in enumerate(idx.y_powers(r)):
        xp[q] += y
    for q, x in enumerate(extra_x):
        xp[q] += to_mpf(x)
    tp = (s0 - params.m) * p - to_mpf(params.gamma)
    return RadialIntegrand(tp, tuple(xp), to_mpf(params.scale), factor)


def _cutoff_split(g: RadialIntegrand, k, spec: CutoffSpec, power, tol) -> IntegralResult:
    chi = Cutoff(spec)
    head = integrate_radial(g, k, 0, spec.R_flat, tol)

    def with_chi(pt, _f=g.factor):
        c = chi.eval(pt.t, 0).value ** power
        return c if _f is None else c * _f(pt)

    tail_g = RadialIntegrand(g.t_power, g.x_powers, g.D, with_chi, g.coeff, g.depth)
    tail = integrate_radial(tail_g, k, spec.R_flat, spec.R, tol, substitution="identity")
    return head + tail


def gamma_ij(params: InequalityParams, eps: Sequence, idx: GammaIndex, *, with_cutoff: bool = False,
             spec: CutoffSpec | None = None, tol=DEFAULT_TOL) -> IntegralResult:
    """``Gamma_ij = int_0^R t^{eps_0 - 1} X_1^{-1+eps_1}..X_r^{-1+eps_r} Y_ij (chi^p) dt``."""
    g = gamma_integrand(params, eps, idx)
    pattern = exponent_excesses(to_mpf(g.t_power) + params.k - 1, g.x_powers)
    if not finiteness_check(pattern[:-1]):
        raise ParameterDomainError(f"Gamma_{idx.i}{idx.j} diverges for eps={list(eps)}")
    if with_cutoff:
        return _cutoff_split(g, params.k, spec or CutoffSpec(params.R), params.p, tol)
    return integrate_radial(g, params.k, 0, params.R, tol)


# ---------------------------------------------------------------------------
# divergence rates and the integration-by-parts cancellation
# ---------------------------------------------------------------------------


@dataclass
class DivergenceReport:
    beta: object
    which: str
    i: int
    eps: list
    values: list
    slope: object
    expected: object
    slack: object

    @property
    def relative_deviation(self):
        return abs(self.slope - self.expected) / abs(self.expected)

    @property
    def ok(self) -> bool:
        return self.slope <= self.expected + self.slack


def _fit_slope(xs, ys):
    lx = [mp.log(x) for x in xs]
    ly = [mp.log(y) for y in ys]
    n = len(lx)
    mx, my = mp.fsum(lx) / n, mp.fsum(ly) / n
    return mp.fsum((a - mx) * (b - my) for a, b in zip(lx, ly)) / mp.fsum((a - mx) ** 2 for a in lx)


def divergence_rate_probe(beta, which: str = "i", i: int = 0, eps: Sequence = ("1e-2", "1e-3", "1e-4"),
                          *, D=mp.e, R=1, slack="0.05", tol=DEFAULT_TOL) -> DivergenceReport:
    """Fitted exponent of the divergence rate, expected ``-1 + beta``.

    ``which="i"``: ``int_0^R t^{eps-1} X_1^beta dt``.
    ``which="ii"``: ``int_0^R t^{-1} X_1..X_{i-1} X_i^{1+eps} X_{i+1}^beta dt`` (``i >= 1``).
    """
    beta = to_mpf(beta)
    if not beta < 1:
        raise ParameterDomainError("need beta < 1")
    eps = [to_mpf(e) for e in eps]
    vals = []
    for e in eps:
        if which == "i":
            g = RadialIntegrand(e - 1, (beta,), D)
        elif which == "ii":
            if i < 1:
                raise ParameterDomainError("part (ii) needs i >= 1")
            g = RadialIntegrand(-1, tuple([1] * (i - 1) + [1 + e, beta]), D)
        else:
            raise ValueError(f"which must be 'i' or 'ii', got {which!r}")
        vals.append(integrate_interval(g, 0, R, tol).value)
    slope = _fit_slope(eps, vals)
    return DivergenceReport(beta, which, i, eps, vals, slope, beta - 1, abs((beta - 1) * to_mpf(slack)))


@dataclass
class BoundedCombination:
    i: int
    eps_i: list
    combination: list
    gamma_ii: list

    @property
    def spread(self):
        return max(self.combination) - min(self.combination)

    @property
    def cancellation(self):
        """How much of the divergent ``eps_i Gamma_ii`` the combination removes."""
        return self.spread / max(abs(e * g) for e, g in zip(self.eps_i, self.gamma_ii))


def parts_combination_check(params: InequalityParams, i: int, eps_rest: Sequence, eps_i_grid: Sequence = ("1e-2", "1e-3", "1e-4"),
                            tol=DEFAULT_TOL) -> BoundedCombination:
    """``eps_i Gamma_ii - sum_{j>i} (1 - eps_j) Gamma_ij`` along ``eps_i -> 0``.

    ``eps_0 = .. = eps_{i-1} = 0``; ``eps_rest`` holds ``eps_{i+1}..eps_r``.
    """
    r = i + len(eps_rest)
    combos, diag, grid = [], [], [to_mpf(e) for e in eps_i_grid]
    for ei in grid:
        eps = [mp.mpf(0)] * i + [ei] + [to_mpf(e) for e in eps_rest]
        gii = gamma_ij(params, eps, GammaIndex(i, i), tol=tol).value
        total = ei * gii
        for j in range(i + 1, r + 1):
            total -= (1 - eps[j]) * gamma_ij(params, eps, GammaIndex(i, j), tol=tol).value
        combos.append(total)
        diag.append(gii)
    return BoundedCombination(i, grid, combos, diag)


# ---------------------------------------------------------------------------
# finite parts
# ---------------------------------------------------------------------------


def finite_part(fn: Callable, power, upper, taylor: Sequence, *, switch="1e-12", tol=DEFAULT_TOL) -> IntegralResult:
    """Hadamard finite part of ``int_0^upper x^power fn(x) dx``.

    ``taylor = (c_0, ..., c_N)`` are Taylor coefficients of ``fn`` at 0.  The
    first ``N`` are subtracted and integrated by analytic continuation in the
    exponent; on ``(0, switch)`` the remainder is replaced by ``c_N x^N``,
    because ``fn - head`` cancels catastrophically there.
    """
    power, upper, switch = to_mpf(power), to_mpf(upper), to_mpf(switch)
    cs = [to_mpf(c) for c in taylor]
    if len(cs) < 2:
        raise ParameterDomainError("need at least two Taylor coefficients")
    head_cs, last = cs[:-1], cs[-1]
    n = len(head_cs)
    if power + n + 1 <= 0:
        raise ParameterDomainError("the remainder after subtraction is not integrable at 0")
    analytic = mp.mpf(0)
    for q, c in enumerate(head_cs):
        e = power + q + 1
        if e == 0:
            raise ParameterDomainError("logarithmic finite part is not supported")
        analytic += c * upper**e / e
    switch = min(switch, upper / 2)
    near = last * switch ** (power + n + 1) / (power + n + 1)

    def rem(x):
        head = mp.fsum(c * x**q for q, c in enumerate(head_cs))
        return x**power * (fn(x) - head)

    breaks = [switch] + [upper * mp.mpf(2) ** (-q) for q in range(40, -1, -4)]
    breaks = sorted(set(b for b in breaks if switch <= b <= upper))
    val, err, panels, ok = _adaptive(rem, breaks, to_mpf(tol), _Budget(EVAL_BUDGET))
    return IntegralResult(val + analytic + near, err, panels, "finite_part", ok)
