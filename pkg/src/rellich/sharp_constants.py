"""Closed-form constants of the weighted higher-order Rellich inequality.

Everything here is a finite algebraic expression in ``(m, p, gamma, k)``.
When the inputs are rational and ``p`` is a positive integer the exact path
(``exact=True``) returns :class:`fractions.Fraction` values; otherwise the
computation runs in :mod:`mpmath` at the requested number of digits.

Powers of possibly negative bases with non-integer exponent use the odd
extension ``x**p := sign(x) * |x|**p``, which is multiplicative, so
``A = A' * A''`` and ``Q**p = A(2, gamma)`` keep holding with signs.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, replace
from fractions import Fraction
from numbers import Rational
from typing import Any, Sequence

import mpmath as mp

from .errors import DegenerateParameterError, ParameterDomainError
from .jets import Jet, poly_jet
from .numeric import is_int as _is_int, to_mpf

__all__ = [
    "DEFAULT_DPS",
    "ParameterDomainError",
    "DegenerateParameterError",
    "InequalityParams",
    "SharpConstants",
    "StarVerdict",
    "ProofCoefficients",
    "ExpansionCoefficients",
    "IdentityReport",
    "constant_A_prime",
    "constant_A_double_prime",
    "constant_A",
    "constant_A_root",
    "constant_B",
    "q_factor",
    "star_condition",
    "sharp_constants",
    "alpha_jet",
    "alpha_poly_jet",
    "verify_radio",
    "proof_r_coefficients",
    "lemma_new_sign",
    "verify_recursions",
    "expansion_a_ij",
    "cancellation_report",
]

DEFAULT_DPS = 60
STAR_P_THRESHOLD_EXPR = "(13 + sqrt(105)) / 4"


# ---------------------------------------------------------------------------
# parameters and records
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InequalityParams:
    """One instance ``(m, p, gamma, k, D, R)`` of the inequality.

    ``m`` is the total derivative order (``|Delta^{m/2} u|``, read as
    ``|grad Delta^{(m-1)/2} u|`` for odd ``m``), ``k`` the codimension
    (any positive real), ``R`` the radius of ``{0 < d < R}`` and ``D`` the
    log-normalisation scale.  ``D=None`` means ``e * R``.
    """

    m: int
    p: Any
    k: Any
    gamma: Any = 0
    D: Any = None
    R: Any = 1

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise ParameterDomainError(f"m must be a positive integer, got {self.m!r}")
        if not self.p > 1:
            raise ParameterDomainError(f"p must exceed 1, got {self.p!r}")
        if not self.k > 0:
            raise ParameterDomainError(f"k must be positive, got {self.k!r}")
        if not self.R > 0:
            raise ParameterDomainError(f"R must be positive, got {self.R!r}")
        if self.D is not None and self.D < self.R:
            raise ParameterDomainError(f"D={self.D!r} must be at least R={self.R!r}")

    @property
    def scale(self):
        """The log scale ``D`` (``e * R`` when unset)."""
        return mp.e * to_mpf(self.R) if self.D is None else self.D

    def with_(self, **changes) -> "InequalityParams":
        return replace(self, **changes)

    def hypothesis_gap(self):
        """``k - gamma - m p``; positive when the plain inequality applies."""
        return self.k - self.gamma - self.m * self.p

    def as_dict(self) -> dict:
        return {name: _jsonable(v) for name, v in asdict(self).items()}


@dataclass(frozen=True)
class StarVerdict:
    ok: bool
    critical_gamma: Any
    reason: str

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class SharpConstants:
    a_prime: Any
    a_double_prime: Any
    a: Any
    b: Any
    q: Any
    star: StarVerdict

    @property
    def star_ok(self) -> bool:
        return self.star.ok


@dataclass(frozen=True)
class ProofCoefficients:
    lam: Any
    alpha: Any
    beta: Any
    mu: Any
    r0: Any
    r1: Any
    r2: Any
    r2p: Any
    r3: Any
    r3p: Any
    r3pp: Any


@dataclass(frozen=True)
class ExpansionCoefficients:
    s: tuple
    a_ij: dict  # (i, j) -> value, 0 <= i <= j <= r

    @property
    def r(self) -> int:
        return len(self.s) - 1


@dataclass
class IdentityReport:
    """Outcome of checking ``lhs == rhs`` for one identity."""

    identity: str
    params: dict
    lhs: Any
    rhs: Any
    abs_err: Any
    rel_err: Any
    exact: bool
    tol: Any = None
    degenerate: bool = False

    @property
    def holds(self) -> bool:
        if self.exact:
            return self.abs_err == 0
        # relative for large values, absolute near zero
        return self.abs_err <= self.tol * max(1, abs(self.lhs), abs(self.rhs))

    def to_record(self) -> dict:
        return {
            "identity": self.identity,
            "params": {k: _jsonable(v) for k, v in self.params.items()},
            "lhs": _jsonable(self.lhs),
            "rhs": _jsonable(self.rhs),
            "abs_err": _jsonable(self.abs_err),
            "rel_err": _jsonable(self.rel_err),
            "exact": self.exact,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_record(), sort_keys=True)


def _jsonable(v):
    if v is None or isinstance(v, (bool, int, str)):
        return v
    if isinstance(v, Fraction):
        return str(v) if v.denominator != 1 else v.numerator
    if isinstance(v, (mp.mpf, float)):
        return mp.nstr(to_mpf(v), mp.mp.dps) if mp.isfinite(v) else str(v)
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return str(v)


def make_report(identity, params, lhs, rhs, *, tol=None, degenerate=False) -> IdentityReport:
    exact = isinstance(lhs, Rational) and isinstance(rhs, Rational)
    diff = abs(lhs - rhs)
    if exact:
        scale = max(abs(lhs), abs(rhs))
        rel = Fraction(0) if diff == 0 else diff / scale
    else:
        lhs, rhs = to_mpf(lhs), to_mpf(rhs)
        diff = abs(lhs - rhs)
        scale = max(abs(lhs), abs(rhs))
        rel = diff / scale if scale else diff
    if tol is None:
        tol = mp.mpf(10) ** (-(mp.mp.dps - 10))
    return IdentityReport(identity, dict(params), lhs, rhs, diff, rel, exact, tol, degenerate)


# ---------------------------------------------------------------------------
# arithmetic helpers
# ---------------------------------------------------------------------------


def _rational(x) -> Fraction:
    if isinstance(x, Rational):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise ParameterDomainError(f"{x!r} has no exact rational value")


def _field(exact: bool):
    """Conversion for the chosen arithmetic."""
    return _rational if exact else to_mpf


def _spow(x, p):
    """Signed power ``x**p`` (odd extension for non-integer ``p``)."""
    if _is_int(p):
        return x ** int(p)
    if x == 0:
        return mp.mpf(0)
    return mp.sign(x) * mp.power(abs(x), p)


def _unpack(params: InequalityParams, exact: bool):
    conv = _field(exact)
    if exact and not (_is_int(params.p) and params.p > 0):
        raise ParameterDomainError("the exact path needs a positive integer p")
    return params.m, conv(params.p), conv(params.gamma), conv(params.k)


def _prime_bases(m, p, gamma, k):
    return [(k - gamma - (m - 2 * i) * p) / p for i in range((m - 1) // 2 + 1)]


def _double_prime_bases(m, p, gamma, k):
    return [(p * k - k + gamma + (m - 2 * j) * p) / p for j in range(1, m // 2 + 1)]


def _bases(params: InequalityParams, exact: bool):
    m, p, gamma, k = _unpack(params, exact)
    return _prime_bases(m, p, gamma, k), _double_prime_bases(m, p, gamma, k), p


def _product(xs, one):
    out = one
    for x in xs:
        out = out * x
    return out


def _check_m(params):
    if params.m < 1:
        raise ParameterDomainError("m must be at least 1")


# ---------------------------------------------------------------------------
# the constants
# ---------------------------------------------------------------------------


def constant_A_prime(params: InequalityParams, *, exact: bool = False, dps: int = DEFAULT_DPS):
    with mp.workdps(dps):
        primes, _, p = _bases(params, exact)
        one = Fraction(1) if exact else mp.mpf(1)
        return _product((_spow(b, p) for b in primes), one)


def constant_A_double_prime(params: InequalityParams, *, exact: bool = False, dps: int = DEFAULT_DPS):
    with mp.workdps(dps):
        _, dprimes, p = _bases(params, exact)
        one = Fraction(1) if exact else mp.mpf(1)
        return _product((_spow(b, p) for b in dprimes), one)


def constant_A(params: InequalityParams, *, exact: bool = False, dps: int = DEFAULT_DPS):
    """Leading sharp constant ``A(m, gamma) = A'(m, gamma) A''(m, gamma)``.

    Empty products are 1, so ``A'' = 1`` when ``m = 1``.
    """
    _check_m(params)
    with mp.workdps(dps):
        primes, dprimes, p = _bases(params, exact)
        one = Fraction(1) if exact else mp.mpf(1)
        return _product((_spow(b, p) for b in primes + dprimes), one)


def constant_A_root(params: InequalityParams):
    """Exact signed product ``prod(bases)`` whose ``p``-th power is ``A``.

    Available for any rational ``p`` (not only integers); this is the form in
    which ``|A(2m, 0)|^{1/p} = |alpha_m((2mp - k)/p)|`` holds exactly.
    """
    conv = _rational
    m, p, gamma, k = params.m, conv(params.p), conv(params.gamma), conv(params.k)
    return _product(_prime_bases(m, p, gamma, k) + _double_prime_bases(m, p, gamma, k), Fraction(1))


def constant_B(params: InequalityParams, *, exact: bool = False, dps: int = DEFAULT_DPS):
    """Sharp constant ``B(m, gamma)`` of the iterated-logarithm series terms."""
    _check_m(params)
    with mp.workdps(dps):
        primes, dprimes, p = _bases(params, exact)
        if any(b == 0 for b in primes + dprimes):
            raise DegenerateParameterError(f"a base of A({params.m}, gamma) vanishes for {params}")
        one = Fraction(1) if exact else mp.mpf(1)
        a = _product((_spow(b, p) for b in primes + dprimes), one)
        return (p - 1) / (2 * p) * a * sum(b ** -2 for b in primes + dprimes)


def q_factor(params: InequalityParams, *, exact: bool = False, dps: int = DEFAULT_DPS):
    """``Q = (k - gamma - 2p)(pk - k + gamma) / p^2``; checks ``Q^p == A(2, gamma)``."""
    with mp.workdps(dps):
        _, p, gamma, k = _unpack(params, exact)
        q = (k - gamma - 2 * p) * (p * k - k + gamma) / p**2
        a2 = constant_A(params.with_(m=2), exact=exact, dps=dps)
        qp = _spow(q, p)
        if exact:
            if qp != a2:
                raise ArithmeticError(f"Q^p = {qp} differs from A(2, gamma) = {a2}")
        elif abs(qp - a2) > mp.mpf(10) ** (10 - dps) * max(1, abs(a2)):
            raise ArithmeticError(f"Q^p = {qp} differs from A(2, gamma) = {a2}")
        return q


def star_condition(params: InequalityParams, *, dps: int = DEFAULT_DPS) -> StarVerdict:
    """Technical hypothesis (*) under which the series improvement is proved."""
    with mp.workdps(dps):
        exact = all(isinstance(v, (Rational, float)) for v in (params.p, params.gamma, params.k))
        conv = _rational if exact else to_mpf
        m, p, gamma, k = params.m, conv(params.p), conv(params.gamma), conv(params.k)
        crit = (3 * p * k - 8 * p**2 - 2 * k + 6 * p) / (4 * p - 2)
        if to_mpf(p) > (13 + mp.sqrt(105)) / 4:
            return StarVerdict(True, crit, f"p > {STAR_P_THRESHOLD_EXPR}")
        if m == 1:
            return StarVerdict(True, crit, "m = 1: no condition")
        if m % 2 == 0:
            ok = gamma != crit
            return StarVerdict(ok, crit, "gamma != gamma_crit" if ok else "gamma == gamma_crit")
        ok = gamma + p != crit
        return StarVerdict(ok, crit, "gamma + p != gamma_crit" if ok else "gamma + p == gamma_crit")


def sharp_constants(params: InequalityParams, *, exact: bool = False, dps: int = DEFAULT_DPS) -> SharpConstants:
    return SharpConstants(
        a_prime=constant_A_prime(params, exact=exact, dps=dps),
        a_double_prime=constant_A_double_prime(params, exact=exact, dps=dps),
        a=constant_A(params, exact=exact, dps=dps),
        b=constant_B(params, exact=exact, dps=dps),
        q=q_factor(params, exact=exact, dps=dps),
        star=star_condition(params, dps=dps),
    )


# ---------------------------------------------------------------------------
# the polynomial alpha_m of the optimality argument
# ---------------------------------------------------------------------------


def _alpha_roots(m: int, k):
    return [2 * i for i in range(m)] + [2 * j - k for j in range(1, m + 1)]


def alpha_jet(m: int, k, s, order: int = 2) -> Jet:
    """Jet at ``s`` of ``alpha_m(s) = prod_{i<m}(s - 2i) prod_{j<=m}(s + k - 2j)``.

    ``m`` counts Laplacians, so ``alpha_m`` belongs to ``Delta^m``.  Built as a
    product of linear-factor jets; exact when ``k`` and ``s`` are rational.
    """
    if m < 1:
        raise ParameterDomainError("alpha_m needs m >= 1")
    exact = isinstance(k, Rational) and isinstance(s, Rational)
    one = Fraction(1) if exact else mp.mpf(1)
    if not exact:
        k, s = to_mpf(k), to_mpf(s)
    return poly_jet(_alpha_roots(m, k), s, order, one)


def alpha_poly_jet(m: int, k, s) -> tuple:
    """``(alpha_m(s), alpha_m'(s), alpha_m''(s))``."""
    j = alpha_jet(m, k, s, 2)
    return j.coeffs[0], j.coeffs[1], 2 * j.coeffs[2]


_alpha_triplet = alpha_poly_jet


def _abs_pow(x, q):
    """``|x|**q`` (exact for integer ``q`` and rational ``x``)."""
    if _is_int(q):
        return abs(x) ** int(q)
    return mp.power(abs(to_mpf(x)), to_mpf(q))


def verify_radio(m: int, p, k, *, dps: int = DEFAULT_DPS) -> list[IdentityReport]:
    """``|A(2m,0)| = |alpha_m|^p`` and the matching ``|B(2m,0)|`` identity.

    Both sides are evaluated at ``s = (2mp - k)/p``.  For rational ``p`` and
    ``k`` the first identity is also compared exactly before taking powers:
    ``|alpha_m(s)|`` against the signed product whose ``p``-th power is ``A``.
    """
    with mp.workdps(dps):
        params = InequalityParams(m=2 * m, p=p, k=k, gamma=0)
        rational = all(isinstance(v, (Rational, float)) for v in (p, k))
        if rational:
            pr, kr = _rational(p), _rational(k)
            s = (2 * m * pr - kr) / pr
            alpha, d1, d2 = _alpha_triplet(m, kr, s)
        else:
            pr, kr = to_mpf(p), to_mpf(k)
            s = (2 * m * pr - kr) / pr
            alpha, d1, d2 = _alpha_triplet(m, kr, s)
        degenerate = alpha == 0
        tag = {"m": m, "p": p, "k": k, "s": s}
        reports = []
        if rational:
            reports.append(make_report("radio(i) |alpha_m| = |A(2m)|^(1/p) [exact, pre-power]", tag,
                                       abs(alpha), abs(constant_A_root(params)), degenerate=degenerate))
        exact_pow = rational and _is_int(p)
        a_val = abs(constant_A(params, exact=exact_pow, dps=dps))
        lhs_i = _abs_pow(alpha, pr) if exact_pow else mp.power(abs(to_mpf(alpha)), to_mpf(pr))
        reports.append(make_report("radio(i) |A(2m)| = |alpha_m|^p", tag, a_val, lhs_i, degenerate=degenerate))
        if degenerate:
            return reports
        b_val = abs(constant_B(params, exact=exact_pow, dps=dps))
        if exact_pow:
            rhs_ii = (pr - 1) / (2 * pr) * _abs_pow(alpha, pr - 2) * (d1**2 - alpha * d2)
        else:
            al, d1m, d2m, pm = to_mpf(alpha), to_mpf(d1), to_mpf(d2), to_mpf(pr)
            rhs_ii = (pm - 1) / (2 * pm) * mp.power(abs(al), pm - 2) * (d1m**2 - al * d2m)
        reports.append(make_report("radio(ii) |B(2m)| = (p-1)/(2p)|alpha|^(p-2)(alpha'^2 - alpha alpha'')",
                                   tag, b_val, rhs_ii, tol=mp.mpf("1e-12")))
        return reports


# ---------------------------------------------------------------------------
# the m = 2 coefficient system behind the improved inequality
# ---------------------------------------------------------------------------


def proof_r_coefficients(params: InequalityParams, beta=0, mu=0, *, dps: int = DEFAULT_DPS) -> ProofCoefficients:
    """Coefficients ``r_0 .. r_3''`` of the potential ``V`` for ``m = 2``.

    ``lambda = Q^{p-1}`` and ``alpha`` are fixed as in the optimal choice;
    ``beta`` stays free and ``mu >= 0`` weights the ``(1 + mu zeta)`` factor.
    Raises :class:`ParameterDomainError` unless ``k - gamma - 2p > 0`` and
    ``pk - k + gamma != 0``.
    """
    with mp.workdps(dps):
        p, g, k = to_mpf(params.p), to_mpf(params.gamma), to_mpf(params.k)
        beta, mu = to_mpf(beta), to_mpf(mu)
        a1 = k - g - 2 * p
        a2 = p * k - k + g
        if not a1 > 0:
            raise ParameterDomainError(f"need k - gamma - 2p > 0, got {a1}")
        if a2 == 0:
            raise DegenerateParameterError("pk - k + gamma vanishes")
        q = a1 * a2 / p**2
        lam = mp.power(q, p - 1)
        lam_pp = mp.power(lam, p / (p - 1))
        alpha = (p - 1) * (p * k - 2 * k + 2 * p + 2 * g) / (a1 * a2)
        c = 2 * g + 4 * p - k - 2
        r0 = a1 * a2 / p * lam - (p - 1) * lam_pp
        r1 = a1 * a2 / p * lam * alpha - p * lam_pp * alpha
        r2 = ((p * k + 2 * p - 2 * k + 2 * g) / (2 * p) * alpha * lam
              + a1 * a2 / p * beta * lam
              - (p - 1) * (p * beta / (p - 1) + p * alpha**2 / (2 * (p - 1) ** 2)) * lam_pp)
        r2p = ((p - 1) / p + (p * k - 2 * k + 2 * p + 2 * g) / (2 * p) * alpha) * lam + mu * lam_pp
        r3 = (lam * (-alpha / 2 + c * beta)
              - (p - 1) * lam_pp * (p * alpha * beta / (p - 1) ** 2 - p * (p - 2) * alpha**3 / (6 * (p - 1) ** 3)))
        r3p = lam * (-alpha / 2 + c * beta) + p * alpha * mu / (p - 1) * lam_pp
        r3pp = -lam * alpha
        return ProofCoefficients(lam, alpha, beta, mu, r0, r1, r2, r2p, r3, r3p, r3pp)


def lemma_new_sign(params: InequalityParams, beta=0, *, dps: int = DEFAULT_DPS):
    """``r_3 + r_3' + r_3''`` at ``mu = 0``.

    At ``gamma = gamma_crit`` with ``beta = 0`` the value is cross-checked
    against ``2(2p-1) alpha Q^{p-1} / (3p(4p-3)) * (2p^2 - 13p + 8)``.
    """
    with mp.workdps(dps):
        c = proof_r_coefficients(params, beta, 0, dps=dps)
        total = c.r3 + c.r3p + c.r3pp
        crit = star_condition(params).critical_gamma
        if beta == 0 and abs(to_mpf(params.gamma) - to_mpf(crit)) <= mp.mpf(10) ** (10 - dps):
            p = to_mpf(params.p)
            closed = (2 * (2 * p - 1) * c.alpha * c.lam / (3 * p * (4 * p - 3))) * (2 * p**2 - 13 * p + 8)
            if abs(closed - total) > mp.mpf(10) ** (15 - dps) * max(1, abs(total)):
                raise ArithmeticError(f"closed form {closed} disagrees with {total}")
        return total


def verify_recursions(m: int, gamma, p, k, *, exact: bool | None = None, dps: int = DEFAULT_DPS,
                      tol=mp.mpf("1e-12")) -> list[IdentityReport]:
    """The factorisations of ``A`` and ``B`` that drive the induction on ``m``.

    Even ``m``: ``A(m,g) = A(2,g) A(m-2,g+2p)`` and
    ``B(m,g) = A(2,g) B(m-2,g+2p) + A(m-2,g+2p) B(2,g)``; odd ``m`` splits off
    ``A(1, g)``/``B(1, g)`` with shift ``g + p``.  ``A(0, .) = 1`` and
    ``B(0, .) = 0`` (empty product and sum).
    """
    if exact is None:
        exact = all(isinstance(v, (Rational, float)) for v in (gamma, p, k)) and _is_int(p)
    with mp.workdps(dps):
        conv = _field(exact)
        g, pp, kk = conv(gamma), conv(p), conv(k)
        one = Fraction(1) if exact else mp.mpf(1)
        zero = one - one

        def A(mm, gg):
            if mm == 0:
                return one
            return constant_A(InequalityParams(m=mm, p=pp, k=kk, gamma=gg), exact=exact, dps=dps)

        def B(mm, gg):
            if mm == 0:
                return zero
            return constant_B(InequalityParams(m=mm, p=pp, k=kk, gamma=gg), exact=exact, dps=dps)

        head, shift = (2, 2 * pp) if m % 2 == 0 else (1, pp)
        sh = "2p" if head == 2 else "p"
        tag = {"m": m, "gamma": gamma, "p": p, "k": k}
        kind = "even" if m % 2 == 0 else "odd"
        reports = [make_report(f"recursion {kind} (a) A(m,g) = A({head},g) A(m-{head},g+{sh})", tag,
                               A(m, g), A(head, g) * A(m - head, g + shift), tol=tol)]
        reports.append(make_report(
            f"recursion {kind} (b) B(m,g) = A({head},g) B(m-{head},g+{sh}) + A(m-{head},g+{sh}) B({head},g)",
            tag, B(m, g), A(head, g) * B(m - head, g + shift) + A(m - head, g + shift) * B(head, g), tol=tol))
        return reports


# ---------------------------------------------------------------------------
# asymptotic expansion along the minimising family
# ---------------------------------------------------------------------------


def _alpha_data(m, p, k, s0):
    """``(|alpha|^{p-2}, alpha, alpha', alpha'')`` at ``s0``."""
    alpha, d1, d2 = _alpha_triplet(m, k, s0)
    if alpha == 0 and not (_is_int(p) and p >= 2):
        raise DegenerateParameterError("|alpha_m|^{p-2} is singular at a root of alpha_m")
    w = _abs_pow(alpha, p - 2) if (_is_int(p) and p >= 2) else mp.power(abs(alpha), p - 2)
    return w, alpha, d1, d2


def _half_order(params: InequalityParams) -> int:
    if params.m % 2 or params.gamma != 0:
        raise ParameterDomainError("the expansion is set up for even order 2m and gamma = 0")
    return params.m // 2


def expansion_a_ij(params: InequalityParams, s: Sequence, *, dps: int = DEFAULT_DPS) -> ExpansionCoefficients:
    """Coefficient table ``a_ij`` of the expansion of the Rellich functional.

    ``u = d^{s_0} X_1^{s_1} ... X_r^{s_r}`` and ``Delta^m`` (``m`` Laplacians,
    ``gamma = 0``).  Diagonal entries ``a_ii`` with ``1 <= i <= r-1`` carry the
    ``-|B(2m)|`` shift, ``a_rr`` does not.  Exact (``Fraction``) when ``p`` is
    a positive integer and ``k``, ``s`` are rational.
    """
    m, p, k = _half_order(params), params.p, params.k
    with mp.workdps(dps):
        r = len(s) - 1
        exact = _is_int(p) and all(isinstance(v, (Rational,)) for v in (k, *s))
        if exact:
            p, k, s = int(p), Fraction(k), [Fraction(v) for v in s]
        else:
            p, k, s = to_mpf(p), to_mpf(k), [to_mpf(v) for v in s]
        params = InequalityParams(m=2 * m, p=p, k=k)
        a_abs = abs(constant_A(params, exact=exact, dps=dps))
        b_abs = abs(constant_B(params, exact=exact, dps=dps)) if r >= 2 else 0
        w, al, d1, d2 = _alpha_data(m, p, k, s[0])
        table = {(0, 0): _abs_pow(al, p) - a_abs if exact else mp.power(abs(al), p) - a_abs}
        for j in range(1, r + 1):
            table[(0, j)] = p * s[j] * w * al * d1
        for i in range(1, r + 1):
            diag = p * s[i] / 2 * w * (al * d2 * (s[i] + 1) + (p - 1) * d1**2 * s[i])
            table[(i, i)] = diag - (b_abs if i <= r - 1 else 0)
            for j in range(i + 1, r + 1):
                table[(i, j)] = p * s[j] / 2 * w * (al * d2 * (2 * s[i] + 1) + 2 * (p - 1) * d1**2 * s[i])
        return ExpansionCoefficients(tuple(s), table)


def _eps_taylor_a00(m, p, k, order=3):
    """Taylor coefficients in ``eps_0`` of ``|alpha_m((2mp-k+eps_0)/p)|^p`` and
    of ``|alpha|^{p-2} alpha alpha'`` (both evaluated along ``s_0(eps_0)``)."""
    s_star = (2 * m * p - k) / p
    e = Jet.variable(mp.mpf(0), order + 1)
    s_jet = e / p + s_star
    alpha_s = alpha_jet(m, k, s_star, order + 1)
    alpha_e = alpha_s.compose(s_jet)
    a00 = alpha_e.abs_pow(p)
    # d/ds alpha evaluated along s_0(eps) is p * d/d eps
    dalpha_e = alpha_e.deriv() * p
    core = alpha_e.truncate(order).abs_pow(p - 2) * alpha_e.truncate(order) * dalpha_e
    return a00, core


def _fit_poly(xs, ys, degree):
    """Exact-interpolation fit through ``degree + 1`` points; residual on the rest."""
    n = degree + 1
    mat = mp.matrix([[x**d for d in range(n)] for x in xs[:n]])
    coeffs = mp.lu_solve(mat, mp.matrix(ys[:n]))
    coeffs = [coeffs[i] for i in range(n)]
    resid = max((abs(sum(c * x**d for d, c in enumerate(coeffs)) - y) for x, y in zip(xs, ys)), default=mp.mpf(0))
    return coeffs, resid


def cancellation_report(params: InequalityParams, r: int, *, eps_tail=None, dps: int = DEFAULT_DPS,
                        tol=mp.mpf("1e-20")) -> list[IdentityReport]:
    """The coefficient cancellations behind the sequential limits (``gamma = 0``).

    Works at ``s_0 = (2mp - k + eps_0)/p``, ``s_j = (-1 + eps_j)/p``.  Taylor
    coefficients in ``eps_0`` (``A_{n,0j}``) come from jets; the ``b_{1j}``
    are treated as polynomials in ``eps_1`` and recovered by exact
    interpolation at several points, with the spare points as residual check.
    ``eps_tail`` gives ``eps_2..eps_r`` (defaults to a fixed set of values).
    """
    m, p, k = _half_order(params), params.p, params.k
    if r < 1:
        raise ParameterDomainError("need r >= 1")
    with mp.workdps(dps + 20):
        p, k = to_mpf(p), to_mpf(k)
        params = InequalityParams(m=2 * m, p=p, k=k)
        a_abs = abs(constant_A(params, dps=dps + 20))
        b_abs = abs(constant_B(params, dps=dps + 20))
        tag = {"m": m, "p": p, "k": k, "r": r}
        reports: list[IdentityReport] = []

        a00, core = _eps_taylor_a00(m, p, k)
        A0_00 = a00.coeffs[0] - a_abs
        A1_00 = a00.coeffs[1]
        A2_00 = a00.coeffs[2]
        reports.append(make_report("A_{0,00} = 0", tag, A0_00, mp.mpf(0), tol=tol))
        # the derivative of |alpha|^p in eps_0 equals |alpha|^{p-2} alpha alpha'
        reports.append(make_report("A_{1,00} = |alpha|^(p-2) alpha alpha'", tag, A1_00, core.coeffs[0], tol=tol))

        probe = [mp.mpf(v) for v in ("0.013", "0.071", "0.19", "0.37", "0.55")]
        tail = list(eps_tail) if eps_tail is not None else [mp.mpf("0.05") * (j + 1) for j in range(max(r - 1, 1))]

        # A_{0,0j} = p s_j A_{1,00} and A_{1,0j} = 2 p s_j A_{2,00}, as functions of eps_j
        s_star = (2 * m * p - k) / p
        w, al, d1, d2 = _alpha_data(m, p, k, s_star)
        for j in range(1, r + 1):
            a0j = [p * ((-1 + e) / p) * w * al * d1 for e in probe]
            a1j = [((-1 + e) / p) * p * core.coeffs[1] for e in probe]
            (c0, c1), res0 = _fit_poly(probe, a0j, 1)
            reports.append(make_report(f"A_{{0,0{j}}} = (eps_{j} - 1) A_{{1,00}} [constant]", tag, c0, -A1_00, tol=tol))
            reports.append(make_report(f"A_{{0,0{j}}} = (eps_{j} - 1) A_{{1,00}} [slope]", tag, c1, A1_00, tol=tol))
            reports.append(make_report(f"A_{{0,0{j}}} linear-fit residual", tag, res0, mp.mpf(0), tol=tol))
            (c0, c1), res1 = _fit_poly(probe, a1j, 1)
            reports.append(make_report(f"A_{{1,0{j}}} = 2(eps_{j} - 1) A_{{2,00}} [constant]", tag, c0, -2 * A2_00, tol=tol))
            reports.append(make_report(f"A_{{1,0{j}}} = 2(eps_{j} - 1) A_{{2,00}} [slope]", tag, c1, 2 * A2_00, tol=tol))
            reports.append(make_report(f"A_{{1,0{j}}} linear-fit residual", tag, res1, mp.mpf(0), tol=tol))

        # b_{1j}(eps_1) at eps_0 = 0
        def s_of(e):
            return (-1 + e) / p

        def b11(e1):
            s1 = s_of(e1)
            a11 = p * s1 / 2 * w * (al * d2 * (s1 + 1) + (p - 1) * d1**2 * s1)
            shift = b_abs if r >= 2 else 0
            return a11 - shift + A2_00 * (e1 - e1**2)

        def b1j(e1, ej):
            s1, sj = s_of(e1), s_of(ej)
            a1j = p * sj / 2 * w * (al * d2 * (2 * s1 + 1) + 2 * (p - 1) * d1**2 * s1)
            return a1j - A2_00 * (1 - ej) * (1 - 2 * e1)

        if r >= 2:
            (B0, B1, B2), res = _fit_poly(probe, [b11(e) for e in probe], 2)
            reports.append(make_report("B_{0,11} = 0", tag, B0, mp.mpf(0), tol=tol))
            reports.append(make_report("B_{2,11} = 0", tag, B2, mp.mpf(0), tol=tol))
            reports.append(make_report("b_11 quadratic-fit residual", tag, res, mp.mpf(0), tol=tol))
            for j, ej in zip(range(2, r + 1), tail):
                (C0, C1), resj = _fit_poly(probe, [b1j(e, ej) for e in probe], 1)
                reports.append(make_report(f"B_{{1,1{j}}} = 0", tag, C1, mp.mpf(0), tol=tol))
                reports.append(make_report(f"B_{{0,1{j}}} = (eps_{j} - 1) B_{{1,11}}", tag, C0, (ej - 1) * B1, tol=tol))
                reports.append(make_report(f"b_1{j} linear-fit residual", tag, resj, mp.mpf(0), tol=tol))
        # terminal step: a_rr -> |B(2m)| as eps_r -> 0 (a_rr carries no shift)
        coeffs = expansion_a_ij(params, [s_star] + [s_of(mp.mpf(0))] * r, dps=dps + 20)
        reports.append(make_report(f"lim a_{r}{r} = |B(2m)|", tag, coeffs.a_ij[(r, r)], b_abs, tol=tol))
        if r == 1:
            reports.append(make_report("B_{0,11} = 0 (a_11 - |B| at eps_1 = 0)", tag,
                                       coeffs.a_ij[(1, 1)] - b_abs, mp.mpf(0), tol=tol))
        return reports
