"""Radial reduction of ``Delta^m`` and ``grad Delta^m`` for functions of ``d``.

For affine ``K`` the distance satisfies ``Delta d = (k-1)/d``, so on
``u = f(d)`` the Laplacian acts as ``f'' + (k-1) f'/t``.  Profiles are
evaluated as jets in ``t``; this is exact to the jet order and fine for
moderate ``t``.

Near ``t = 0`` the interesting functions are ``t^a X_1^{s_1}...X_r^{s_r}``
times polynomials in ``P_j = X_1...X_j`` (all ``X_j`` taken at ``t/D``).
With ``E = t d/dt`` one has ``E P_j = P_j (P_1 + ... + P_j)`` and
``Delta(t^a H) = t^{a-2} (E + a)(E + a + k - 2) H``, so that class is closed
under the radial operators and :class:`LogPowerProfile` keeps it in that
form.  Its values only need the ``X_j``, so ``t`` may be far below the
floating range (see :class:`RadialPoint`).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import mpmath as mp

from .errors import ParameterDomainError
from .jets import Jet, jet_arith, jet_fn
from .numeric import to_mpf
from .sharp_constants import InequalityParams

__all__ = [
    "Jet",
    "jet_arith",
    "jet_fn",
    "Y_CAP",
    "RadialPoint",
    "RadialProfile",
    "FunctionProfile",
    "LogPowerProfile",
    "CutoffSpec",
    "Cutoff",
    "TestFunction",
    "x_jet",
    "radial_laplacian",
    "radial_derivative",
    "iterated_operator",
    "test_family",
    "cutoff",
    "family_exponents",
    "INF_ORDER",
]

INF_ORDER = 10**9
# y_{j-1} = expm1(y_j) is only formed while y_j stays below this
Y_CAP = mp.mpf(10) ** 6


# ---------------------------------------------------------------------------
# points
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RadialPoint:
    """A radius ``t`` stored through its log cascade.

    ``ys[0] = log(D/t)`` and ``ys[j] = log(1 + ys[j-1])``, so that
    ``X_j(t/D) = exp(-ys[j])``.  Entries may be ``+inf`` when the true value
    is beyond what can be represented; the corresponding ``X`` are 0.
    """

    D: object
    ys: tuple

    @classmethod
    def from_t(cls, t, D, depth: int) -> "RadialPoint":
        t, D = to_mpf(t), to_mpf(D)
        if not 0 < t <= D:
            raise ParameterDomainError(f"need 0 < t <= D, got t={t}, D={D}")
        ys = [mp.log(D / t)]
        for _ in range(depth):
            ys.append(mp.log1p(ys[-1]))
        return cls(D, tuple(ys))

    @classmethod
    def from_level(cls, z, level: int, D, depth: int) -> "RadialPoint":
        """Point with ``ys[level] = z``; lower levels by ``expm1``, higher by ``log1p``."""
        z = to_mpf(z)
        ys = [None] * (max(depth, level) + 1)
        ys[level] = z
        for j in range(level, 0, -1):
            y = ys[j]
            ys[j - 1] = mp.inf if (y == mp.inf or y > Y_CAP) else mp.expm1(y)
        for j in range(level + 1, len(ys)):
            ys[j] = mp.log1p(ys[j - 1]) if ys[j - 1] != mp.inf else mp.inf
        return cls(to_mpf(D), tuple(ys))

    @property
    def depth(self) -> int:
        return len(self.ys) - 1

    @property
    def log_t(self):
        return mp.log(self.D) - self.ys[0]

    @property
    def t(self):
        return mp.mpf(0) if self.ys[0] == mp.inf else self.D * mp.exp(-self.ys[0])

    def x(self, j: int):
        y = self.ys[j]
        return mp.mpf(0) if y == mp.inf else mp.exp(-y)

    def xs(self, r: int) -> list:
        return [self.x(j) for j in range(1, r + 1)]

    def ps(self, r: int) -> list:
        """``[P_1, ..., P_r]`` with ``P_j = X_1...X_j``."""
        out, acc = [], mp.mpf(1)
        for x in self.xs(r):
            acc = acc * x
            out.append(acc)
        return out


# ---------------------------------------------------------------------------
# polynomials in P_1..P_r
# ---------------------------------------------------------------------------

Poly = Mapping[tuple, object]


def _padd(acc: dict, key, value):
    v = acc.get(key, 0) + value
    if v == 0:
        acc.pop(key, None)
    else:
        acc[key] = v


def _poly_E(poly: Poly, r: int) -> dict:
    out: dict = {}
    for mono, c in poly.items():
        for j in range(r):
            n = mono[j]
            if n:
                for i in range(j + 1):
                    key = tuple(e + (1 if q == i else 0) for q, e in enumerate(mono))
                    _padd(out, key, n * c)
    return out


def _poly_T(poly: Poly, c, s: Sequence) -> dict:
    """``(E + c)`` conjugated by ``G = prod X_j^{s_j}``: ``c Q + g Q + E Q``."""
    r = len(s)
    out: dict = {}
    for mono, v in poly.items():
        _padd(out, mono, c * v)
        for j in range(r):
            if s[j]:
                key = tuple(e + (1 if q == j else 0) for q, e in enumerate(mono))
                _padd(out, key, s[j] * v)
    for mono, v in _poly_E(poly, r).items():
        _padd(out, mono, v)
    return out


def poly_eval(poly: Poly, ps: Sequence):
    total = 0
    for mono, c in poly.items():
        term = c
        for pj, n in zip(ps, mono):
            if n:
                term = term * pj**n
        total = total + term
    return total


# ---------------------------------------------------------------------------
# profiles
# ---------------------------------------------------------------------------


class RadialProfile:
    """``t -> Jet`` for a radial function ``u(x) = f(d(x))``."""

    support = (0, mp.inf)
    smoothness_order = INF_ORDER

    def eval(self, t, order: int) -> Jet:
        raise NotImplementedError

    def __call__(self, t):
        return self.eval(t, 0).value

    def _check_order(self, need: int):
        if self.smoothness_order < need:
            raise ParameterDomainError(f"profile smoothness {self.smoothness_order} is below the required {need}")


class FunctionProfile(RadialProfile):
    """Profile from a function of a ``t``-jet, built with jet arithmetic."""

    def __init__(self, fn: Callable[[Jet], Jet], smoothness_order: int = INF_ORDER, support=(0, mp.inf)):
        self.fn = fn
        self.smoothness_order = smoothness_order
        self.support = support

    def eval(self, t, order: int) -> Jet:
        return self.fn(Jet.variable(to_mpf(t), order))


def _x_jets(tj: Jet, r: int, D=1) -> list:
    out = []
    w = tj / D if D != 1 else tj
    for _ in range(r):
        w = (1 - w.log()).reciprocal()
        out.append(w)
    return out


def x_jet(t, i: int, order: int, D=1) -> Jet:
    """Jet in ``t`` of ``X_i(t/D)``."""
    t = to_mpf(t)
    if not 0 < t < to_mpf(D):
        raise ParameterDomainError(f"t must lie in (0, {D}), got {t}")
    return _x_jets(Jet.variable(t, order), i, D)[-1]


@dataclass(frozen=True)
class LogPowerProfile(RadialProfile):
    """``t^a X_1^{s_1} ... X_r^{s_r} Q(P_1, ..., P_r)``, all ``X_j`` at ``t/D``."""

    a: object
    s: tuple
    D: object = 1
    poly: Mapping = field(default=None)

    def __post_init__(self):
        if self.poly is None:
            object.__setattr__(self, "poly", {(0,) * len(self.s): mp.mpf(1)})

    @property
    def r(self) -> int:
        return len(self.s)

    def laplacian(self, k) -> "LogPowerProfile":
        k = to_mpf(k)
        q = _poly_T(_poly_T(self.poly, self.a + k - 2, self.s), self.a, self.s)
        return LogPowerProfile(self.a - 2, self.s, self.D, q)

    def derivative(self) -> "LogPowerProfile":
        return LogPowerProfile(self.a - 1, self.s, self.D, _poly_T(self.poly, self.a, self.s))

    def scaled(self, c) -> "LogPowerProfile":
        return LogPowerProfile(self.a, self.s, self.D, {m: c * v for m, v in self.poly.items()})

    def poly_value(self, point: RadialPoint):
        """``Q(P)`` at ``point``."""
        return poly_eval(self.poly, point.ps(self.r))

    def log_weight(self, point: RadialPoint):
        """``log(t^a prod X_j^{s_j})``."""
        total = self.a * point.log_t if self.a else mp.mpf(0)
        for j, sj in enumerate(self.s, 1):
            if sj:
                total -= sj * point.ys[j]
        return total

    def value_at(self, point: RadialPoint):
        q = self.poly_value(point)
        if q == 0:
            return q
        return q * mp.exp(self.log_weight(point))

    def eval(self, t, order: int) -> Jet:
        t = to_mpf(t)
        tj = Jet.variable(t, order)
        xs = _x_jets(tj, self.r, self.D)
        ps, acc = [], None
        for x in xs:
            acc = x if acc is None else acc * x
            ps.append(acc)
        out = tj.pow(self.a) if self.a else Jet.constant(mp.mpf(1), t, order)
        for x, sj in zip(xs, self.s):
            if sj:
                out = out * x.pow(sj)
        return out * poly_eval(self.poly, ps)


class _LaplacianProfile(RadialProfile):
    def __init__(self, inner: RadialProfile, k):
        inner._check_order(2)
        self.inner, self.k = inner, to_mpf(k)
        self.support = inner.support
        self.smoothness_order = inner.smoothness_order - 2

    def eval(self, t, order: int) -> Jet:
        t = to_mpf(t)
        f = self.inner.eval(t, order + 2)
        d1 = f.deriv()
        d2 = d1.deriv()
        inv_t = Jet.variable(t, order).reciprocal()
        return d2 + (self.k - 1) * inv_t * d1.truncate(order)


class _DerivativeProfile(RadialProfile):
    def __init__(self, inner: RadialProfile):
        inner._check_order(1)
        self.inner = inner
        self.support = inner.support
        self.smoothness_order = inner.smoothness_order - 1

    def eval(self, t, order: int) -> Jet:
        return self.inner.eval(t, order + 1).deriv()


class AbsProfile(RadialProfile):
    """``|f|``; not smooth where ``f`` vanishes (values there are still exact)."""

    def __init__(self, inner: RadialProfile):
        self.inner = inner
        self.support = inner.support
        self.smoothness_order = inner.smoothness_order

    def is_smooth_at(self, t) -> bool:
        return self.inner.eval(t, 0).value != 0

    def eval(self, t, order: int) -> Jet:
        j = self.inner.eval(t, order)
        if j.value == 0:
            if order == 0:
                return j
            raise ParameterDomainError(f"|f| is not smooth at t={t} (zero of f)")
        return j.abs()


def radial_laplacian(f: RadialProfile, k) -> RadialProfile:
    """``t -> f''(t) + (k-1) f'(t)/t``."""
    if isinstance(f, LogPowerProfile):
        return f.laplacian(k)
    return _LaplacianProfile(f, k)


def radial_derivative(f: RadialProfile) -> RadialProfile:
    if isinstance(f, LogPowerProfile):
        return f.derivative()
    return _DerivativeProfile(f)


def iterated_operator(f: RadialProfile, m: int, k, *, signed: bool = False) -> RadialProfile:
    """``|Delta^{m/2} f|``, read as ``|(Delta^{(m-1)/2} f)'|`` for odd ``m``.

    ``signed=True`` drops the absolute value.
    """
    if m < 1:
        raise ParameterDomainError("m must be positive")
    f._check_order(m + (m % 2))
    g = f
    for _ in range(m // 2):
        g = radial_laplacian(g, k)
    if m % 2:
        g = radial_derivative(g)
    return g if signed else AbsProfile(g)


# ---------------------------------------------------------------------------
# cutoff and the test family
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CutoffSpec:
    R: object = 1
    R_flat: object = None

    def __post_init__(self):
        if self.R_flat is None:
            object.__setattr__(self, "R_flat", to_mpf(self.R) / 2)
        if not 0 < self.R_flat < self.R:
            raise ParameterDomainError(f"need 0 < R_flat < R, got {self.R_flat}, {self.R}")


def _glue(x: Jet) -> Jet:
    """``exp(-1/x)`` for ``x > 0`` and 0 otherwise."""
    if x.value <= 0:
        return Jet.constant(mp.mpf(0), x.center, x.order)
    return (-x.reciprocal()).exp()


class Cutoff(RadialProfile):
    """Smooth ``chi``: 1 on ``(0, R_flat]``, 0 on ``[R, inf)``, decreasing between."""

    def __init__(self, spec: CutoffSpec):
        self.spec = spec
        self.R, self.R_flat = to_mpf(spec.R), to_mpf(spec.R_flat)
        self.support = (0, self.R)

    def eval(self, t, order: int) -> Jet:
        t = to_mpf(t)
        if t <= self.R_flat:
            return Jet.constant(mp.mpf(1), t, order)
        if t >= self.R:
            return Jet.constant(mp.mpf(0), t, order)
        # normalise the transition to (0, 1) for better conditioning
        w = (Jet.variable(t, order) - self.R_flat) / (self.R - self.R_flat)
        a, b = _glue(1 - w), _glue(w)
        return a / (a + b)


def cutoff(spec: CutoffSpec) -> Cutoff:
    return Cutoff(spec)


class TestFunction(RadialProfile):
    """``chi(t) * core(t)`` with ``core`` a :class:`LogPowerProfile`."""

    __test__ = False  # not a pytest class

    def __init__(self, core: LogPowerProfile, chi: Cutoff, params: InequalityParams | None = None, eps=None):
        self.core, self.chi = core, chi
        self.params, self.eps = params, eps
        self.support = (0, chi.R)

    def eval(self, t, order: int) -> Jet:
        t = to_mpf(t)
        if t >= self.chi.R:
            return Jet.constant(mp.mpf(0), t, order)
        core = self.core.eval(t, order)
        if t <= self.chi.R_flat:
            return core
        return self.chi.eval(t, order) * core

    def scaled(self, c) -> "TestFunction":
        return TestFunction(self.core.scaled(c), self.chi, self.params, self.eps)


def family_exponents(params: InequalityParams, eps: Sequence) -> tuple:
    """``(s_0, (s_1, ..., s_r))`` of the minimising family.

    ``s_0 = (m p + gamma - k + eps_0)/p`` (the extremal exponent for the
    weight ``d^{-gamma}``) and ``s_j = (-1 + eps_j)/p``.
    """
    p = to_mpf(params.p)
    eps = [to_mpf(e) for e in eps]
    s0 = (params.m * p + to_mpf(params.gamma) - to_mpf(params.k) + eps[0]) / p
    return s0, tuple((-1 + e) / p for e in eps[1:])


def test_family(params: InequalityParams, eps: Sequence, spec: CutoffSpec | None = None) -> TestFunction:
    """``chi(t) t^{s_0} prod_j X_j(t/D)^{s_j}`` (see :func:`family_exponents`)."""
    if not eps:
        raise ParameterDomainError("eps must contain at least eps_0")
    spec = spec or CutoffSpec(R=params.R)
    if params.scale < to_mpf(spec.R):
        raise ParameterDomainError("need D >= R")
    s0, s = family_exponents(params, eps)
    core = LogPowerProfile(s0, s, to_mpf(params.scale))
    return TestFunction(core, Cutoff(spec), params, tuple(eps))


test_family.__test__ = False
