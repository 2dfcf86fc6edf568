"""Command-line front end: constants, identity suites, integrals and sharpness tables.

Every run writes one provenance line (command, parameters, precision, tool
version) followed by one record per row, as CSV or JSON lines.  Exit codes:
0 success, 1 I/O or usage error (or a failed identity), 2 hypothesis
violation, 3 quadrature non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import metadata

import mpmath as mp

from . import iterlog, prober, quadrature
from .errors import ConvergenceError, DegenerateParameterError, ParameterDomainError
from .numeric import to_mpf
from .radial_calculus import test_family
from .sharp_constants import (InequalityParams, _jsonable, constant_A, constant_A_double_prime, constant_A_prime,
                              q_factor, sharp_constants, star_condition, verify_recursions)

__all__ = ["RunConfig", "run", "schema_docs", "main", "COMMANDS", "SCHEMAS"]

EXIT_OK, EXIT_ERROR, EXIT_HYPOTHESIS, EXIT_CONVERGENCE = 0, 1, 2, 3

SCHEMAS = {
    "constants": ["m", "p", "gamma", "k", "A_prime", "A_double_prime", "A", "B", "Q", "star_ok", "gamma_crit",
                  "star_reason"],
    "identities": ["trial", "identity", "m", "p", "gamma", "k", "lhs", "rhs", "rel_err", "exact", "holds"],
    "tabulate-iterlog": ["t", "X1..Xr", "eta", "zeta", "theta"],
    "integrate": ["eps", "depth", "k", "value", "err_estimate", "panels", "substitution", "converged"],
    "check-inequality": ["eps", "r", "lhs", "t0", "term_1..term_r", "remainder", "quotient", "error_budget",
                         "nonnegative", "converged"],
    "sharpness-A": ["eps_0", "quotient_A", "gap", "gap_ratio"],
    "sharpness-B": ["kind", "eps_1", "eps_0", "quotient", "numerator", "denominator"],
    "d-sweep": ["D", "probe", "remainder", "error_budget", "term_1..term_r", "nonnegative"],
}

_SCHEMA_NOTES = {
    "constants": "one row; A = A' * A''; exit 2 when (*) fails unless --allow-star-violation",
    "identities": "A = A'A'', Q^p = A(2,gamma) and the two recursions, exact rational arithmetic",
    "tabulate-iterlog": "t on a log grid; X_j at t (D = 1); eta, zeta, theta series",
    "integrate": "int_0^R t^(eps_0 - 1) X_1^(1+eps_1)..X_depth^(1+eps_depth) dt (X_j at t/D)",
    "check-inequality": "remainder = lhs - A t0 - B sum_{i<r} term_i for the test family at --eps",
    "sharpness-A": "last row: eps_0 = 'limit' holds the Richardson value and its gap",
    "sharpness-B": "kind 'fp' (eps_0 -> 0 taken exactly), 'theta' (eps_0 = eps_1^2, X_1^theta weight), "
                   "'limit' (Richardson in eps_1)",
    "d-sweep": "last row: D = 'threshold', the smallest grid D from which all probes are nonnegative",
}

COMMANDS = tuple(SCHEMAS) + ("schema",)


def schema_docs() -> str:
    """Column schemas of every command."""
    lines = []
    for name, cols in SCHEMAS.items():
        lines.append(f"{name}: {', '.join(cols)}")
        lines.append(f"    {_SCHEMA_NOTES[name]}")
    return "\n".join(lines) + "\n"


@dataclass
class RunConfig:
    command: str
    params: InequalityParams | None = None
    precision_digits: int = 60
    tol: object = "1e-20"
    output: str | None = None
    format: str = "csv"
    seed: int = 0
    allow_star_violation: bool = False
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if self.precision_digits < 30:
            raise ValueError("precision_digits must be at least 30")
        if not to_mpf(self.tol) > 0:
            raise ValueError("tol must be positive")
        if self.format not in ("csv", "json"):
            raise ValueError("format must be csv or json")


class _Hypothesis(Exception):
    pass


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "unknown"


def _provenance(cfg: RunConfig) -> dict:
    return {
        "command": cfg.command,
        "params": cfg.params.as_dict() if cfg.params is not None else None,
        "options": {k: _jsonable(v) for k, v in sorted(cfg.options.items())},
        "precision_digits": cfg.precision_digits,
        "tol": _jsonable(cfg.tol),
        "seed": cfg.seed,
        "version": _version(),
        "mpmath": mp.__version__,
    }


def _flatten(row: dict) -> dict:
    out = {}
    for k, v in row.items():
        if isinstance(v, (list, tuple)) and k.endswith("_terms"):
            for i, x in enumerate(v, 1):
                out[f"term_{i}"] = _jsonable(x)
        else:
            out[k] = _jsonable(v)
    return out


def _emit(cfg: RunConfig, rows: list, stream) -> None:
    rows = [_flatten(r) for r in rows]
    if cfg.format == "json":
        stream.write(json.dumps({"provenance": _provenance(cfg)}, sort_keys=True) + "\n")
        for r in rows:
            stream.write(json.dumps(r) + "\n")
        return
    stream.write("# " + json.dumps(_provenance(cfg), sort_keys=True) + "\n")
    cols = []
    for r in rows:
        cols += [c for c in r if c not in cols]
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n", restval="")
    w.writeheader()
    for r in rows:
        w.writerow({k: json.dumps(v) if isinstance(v, (list, bool)) else v for k, v in r.items()})
    stream.write(buf.getvalue())


def _check_hypotheses(cfg: RunConfig, need_gap: bool = True) -> None:
    if cfg.allow_star_violation:
        return
    p = cfg.params
    if need_gap and not p.hypothesis_gap() > 0:
        raise _Hypothesis(f"k - gamma - m p = {p.hypothesis_gap()} is not positive")
    verdict = star_condition(p)
    if not verdict.ok:
        raise _Hypothesis(f"condition (*) fails: {verdict.reason} (gamma_crit = {verdict.critical_gamma})")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _cmd_constants(cfg: RunConfig) -> tuple[list, int]:
    p = cfg.params
    c = sharp_constants(p, exact=True)
    row = {"m": p.m, "p": p.p, "gamma": p.gamma, "k": p.k, "A_prime": c.a_prime, "A_double_prime": c.a_double_prime,
           "A": c.a, "B": c.b, "Q": c.q, "star_ok": c.star.ok, "gamma_crit": c.star.critical_gamma,
           "star_reason": c.star.reason}
    code = EXIT_OK if c.star.ok or cfg.allow_star_violation else EXIT_HYPOTHESIS
    return [row], code


def _random_rational(rng: random.Random, lo: int, hi: int) -> Fraction:
    return Fraction(rng.randint(lo * 6, hi * 6), rng.choice((1, 2, 3, 6)))


def _cmd_identities(cfg: RunConfig) -> tuple[list, int]:
    rng = random.Random(cfg.seed)
    max_m, trials = cfg.options.get("max_m", 8), cfg.options.get("trials", 50)
    rows, ok = [], True
    trial = 0
    while trial < trials:
        m, p = rng.randint(1, max_m), rng.choice((2, 3))
        gamma, k = _random_rational(rng, -10, 10), _random_rational(rng, 1, 40)
        try:
            params = InequalityParams(m=m, p=p, k=k, gamma=gamma)
            a = constant_A(params, exact=True)
            prod = constant_A_prime(params, exact=True) * constant_A_double_prime(params, exact=True)
            q = q_factor(params, exact=True)
            a2 = constant_A(params.with_(m=2), exact=True)
            reports = verify_recursions(m, gamma, p, k, exact=True)
        except (ParameterDomainError, ZeroDivisionError):
            continue  # degenerate draw, resample
        checks = [("A = A' A''", prod, a, None), ("Q^p = A(2,gamma)", q**p, a2, None)]
        checks += [(r.identity, r.lhs, r.rhs, r.holds) for r in reports]
        for name, lhs, rhs, holds in checks:
            if holds is None:
                holds = lhs == rhs
            diff = abs(lhs - rhs)
            scale = max(abs(lhs), abs(rhs))
            rows.append({"trial": trial, "identity": name, "m": m, "p": p, "gamma": gamma, "k": k, "lhs": lhs,
                         "rhs": rhs, "rel_err": diff / scale if scale else diff, "exact": True, "holds": holds})
            ok = ok and holds
        trial += 1
    return rows, EXIT_OK if ok else EXIT_ERROR


def _cmd_tabulate(cfg: RunConfig) -> tuple[list, int]:
    o = cfg.options
    lo, hi, n = o.get("log_t_min", -30), o.get("log_t_max", -1), o.get("points", 30)
    grid = [mp.exp(to_mpf(lo) + (to_mpf(hi) - to_mpf(lo)) * j / max(n - 1, 1)) for j in range(n)]
    return iterlog.tabulate(grid, o.get("r", 3), dps=cfg.precision_digits), EXIT_OK


def _cmd_integrate(cfg: RunConfig) -> tuple[list, int]:
    o = cfg.options
    eps = [to_mpf(e) for e in o.get("eps") or ["1", "0"]]
    depth = o.get("depth")
    if depth is not None:
        eps = (eps + [mp.mpf(0)] * depth)[: depth + 1]
    depth = len(eps) - 1
    p = cfg.params
    k = to_mpf(p.k)
    g = quadrature.RadialIntegrand(eps[0] - k, tuple(1 + e for e in eps[1:]), to_mpf(p.scale))
    res = quadrature.integrate_radial(g, k, 0, p.R, cfg.tol)
    row = {"eps": eps, "depth": depth, "k": p.k, "value": res.value, "err_estimate": res.err_estimate,
           "panels": res.panels, "substitution": res.substitution, "converged": res.converged}
    return [row], EXIT_OK if res.converged else EXIT_CONVERGENCE


def _cmd_check(cfg: RunConfig) -> tuple[list, int]:
    _check_hypotheses(cfg)
    o = cfg.options
    r = o.get("r", 1)
    eps = o.get("eps") or ["0.3"] + ["0.2"] * r
    rep = prober.inequality_sides(cfg.params, test_family(cfg.params, eps), r, tol=cfg.tol)
    row = {"eps": [to_mpf(e) for e in eps], "r": r, "lhs": rep.lhs, "t0": rep.t0, "series_terms": rep.series_terms,
           "remainder": rep.remainder, "quotient": rep.quotient, "error_budget": rep.error_budget,
           "nonnegative": rep.nonnegative, "converged": rep.converged}
    return [row], EXIT_OK if rep.converged else EXIT_CONVERGENCE


def _cmd_sharpness_A(cfg: RunConfig) -> tuple[list, int]:
    _check_hypotheses(cfg, need_gap=True)
    grid = cfg.options.get("eps") or prober.DEFAULT_EPS0_GRID
    table = prober.sharpness_A_sweep(cfg.params, grid, tol=cfg.tol)
    rows = [{"eps_0": r.eps_0, "quotient_A": r.quotient_A, "gap": r.gap, "gap_ratio": r.gap_ratio}
            for r in table.rows]
    rows.append({"eps_0": "limit", "quotient_A": table.limit, "gap": table.limit - table.target, "gap_ratio": None})
    return rows, EXIT_OK


def _cmd_sharpness_B(cfg: RunConfig) -> tuple[list, int]:
    _check_hypotheses(cfg)
    o = cfg.options
    schedule = o.get("eps") or prober.DEFAULT_B_SCHEDULE
    table = prober.sharpness_B_schedule(cfg.params, o.get("r", 1), schedule, theta=o.get("theta", 1), tol=cfg.tol)
    rows = [{"kind": "fp", "eps_1": r.eps_r, "eps_0": 0, "quotient": r.quotient, "numerator": r.numerator,
             "denominator": r.denominator} for r in table.rows]
    rows += [{"kind": "theta", "eps_1": r.eps_1, "eps_0": r.eps_0, "quotient": r.quotient_theta}
             for r in table.theta_rows]
    rows.append({"kind": "limit", "quotient": table.limit})
    return rows, EXIT_OK


def _cmd_d_sweep(cfg: RunConfig) -> tuple[list, int]:
    _check_hypotheses(cfg)
    o = cfg.options
    r = o.get("r", 2)
    grid = o.get("D_grid") or [mp.e, mp.e**2, mp.e**4]
    probes = prober.standard_probes(r, o.get("probes", 10), cfg.seed)
    table = prober.d_scale_sweep(cfg.params, probes, grid, r, tol=cfg.tol)
    rows = [{"D": row.D, "probe": row.probe, "remainder": row.remainder, "error_budget": row.error_budget,
             "series_terms": row.series_terms, "nonnegative": row.remainder >= -10 * row.error_budget}
            for row in table.rows]
    rows.append({"D": "threshold", "probe": None, "remainder": table.threshold})
    return rows, EXIT_OK


_HANDLERS = {
    "constants": _cmd_constants,
    "identities": _cmd_identities,
    "tabulate-iterlog": _cmd_tabulate,
    "integrate": _cmd_integrate,
    "check-inequality": _cmd_check,
    "sharpness-A": _cmd_sharpness_A,
    "sharpness-B": _cmd_sharpness_B,
    "d-sweep": _cmd_d_sweep,
}


def run(cfg: RunConfig, stream=None) -> int:
    """Execute ``cfg`` and write its table; returns the exit status."""
    if cfg.command == "schema":
        (stream or sys.stdout).write(schema_docs())
        return EXIT_OK
    with mp.workdps(cfg.precision_digits):
        cfg.tol = to_mpf(cfg.tol)
        try:
            rows, code = _HANDLERS[cfg.command](cfg)
        except _Hypothesis as exc:
            print(f"hypothesis violation: {exc} (pass --allow-star-violation to run anyway)", file=sys.stderr)
            return EXIT_HYPOTHESIS
        except ConvergenceError as exc:
            print(f"quadrature did not converge: {exc}", file=sys.stderr)
            return EXIT_CONVERGENCE
        except (ParameterDomainError, DegenerateParameterError) as exc:
            print(f"parameter error: {exc}", file=sys.stderr)
            return EXIT_HYPOTHESIS
        try:
            if stream is not None:
                _emit(cfg, rows, stream)
            elif cfg.output in (None, "-"):
                _emit(cfg, rows, sys.stdout)
            else:
                with open(cfg.output, "w", encoding="utf-8", newline="") as fh:
                    _emit(cfg, rows, fh)
        except OSError as exc:
            print(f"cannot write output: {exc}", file=sys.stderr)
            return EXIT_ERROR
    return code


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_ERROR)


def _number(text: str):
    """Exact rational when the literal allows it (``2``, ``5/2``, ``2.5``)."""
    try:
        q = Fraction(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    return q.numerator if q.denominator == 1 else q


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rellich", description="Sharp Rellich constants and numerical experiments.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        if name == "schema":
            continue
        sp.add_argument("--m", type=int, default=2)
        sp.add_argument("--p", type=_number, default=2)
        sp.add_argument("--gamma", type=_number, default=0)
        sp.add_argument("--k", type=_number, default=12)
        sp.add_argument("--D", type=_number, default=None)
        sp.add_argument("--R", type=_number, default=1)
        sp.add_argument("--r", type=int, default=None)
        sp.add_argument("--eps", type=str, nargs="+", default=None)
        sp.add_argument("--precision", type=int, default=60)
        sp.add_argument("--tol", type=str, default="1e-20")
        sp.add_argument("--out", default=None)
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--allow-star-violation", action="store_true")
        if name == "identities":
            sp.add_argument("--max-m", type=int, default=8)
            sp.add_argument("--trials", type=int, default=50)
        if name == "tabulate-iterlog":
            sp.add_argument("--log-t-min", type=float, default=-30)
            sp.add_argument("--log-t-max", type=float, default=-1)
            sp.add_argument("--points", type=int, default=30)
        if name == "integrate":
            sp.add_argument("--depth", type=int, default=None)
        if name == "sharpness-B":
            sp.add_argument("--theta", type=_number, default=1)
        if name == "d-sweep":
            sp.add_argument("--D-grid", type=_number, nargs="+", default=None)
            sp.add_argument("--probes", type=int, default=10)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    if args.command == "schema":
        return RunConfig("schema")
    params = InequalityParams(m=args.m, p=args.p, k=args.k, gamma=args.gamma, D=args.D, R=args.R)
    options = {"eps": args.eps}
    if args.r is not None:
        options["r"] = args.r
    for key in ("max_m", "trials", "log_t_min", "log_t_max", "points", "depth", "theta", "D_grid", "probes"):
        if hasattr(args, key):
            options[key] = getattr(args, key)
    return RunConfig(args.command, params, args.precision, args.tol, args.out, args.format, args.seed,
                     args.allow_star_violation, options)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return exc.code if isinstance(exc.code, int) else EXIT_ERROR
    try:
        cfg = config_from_args(args)
    except ParameterDomainError as exc:
        print(f"parameter error: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except ValueError as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
