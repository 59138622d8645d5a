"""Command line entry point.

Exit codes: 0 when every requested check passes, 1 when a check ran and
came out false, 2 for bad input, 3 for solver or internal failures.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import json
import logging
import sys
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import __version__
from ._random import DEFAULT_SEED, rng_for
from .admissibility import POS_TOL, RANK_TOL, LPSolverError, check, equivariant_check
from .biharmonic import SingularCauchyMap, mu, nu, poisson_map_mode
from .catalog import EXAMPLE_IDS, CatalogError, example_catalog
from .io import atomic_write, basis_from_json, configuration_to_dict, dumps, jsonable, point_from_json
from .kernel import ModelManifold, SymmetryGroup, invariant_subbasis, kernel_basis, random_points
from .ledger import base_window, verify_ledger
from .ode import IntegratorError, fit_trajectory, integrate_zeta, lambda_dual
from .search import (PartialCoverError, SearchFailure, cover_construct, m0_estimate,
                     random_rank_search)
from .suite import paper_suite, suite_passed

SCHEMA = 1
EXIT_OK, EXIT_FALSE, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3

log = logging.getLogger(__name__)


class InputError(ValueError):
    pass


@dataclass
class Outcome:
    payload: dict
    rows: list
    code: int = EXIT_OK
    message: str = ""
    extra_files: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# argument types


def fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def seed_u64(text: str) -> int:
    try:
        v = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from exc
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must lie in [0, 2^64)")
    return v


def positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return v


# ---------------------------------------------------------------------------
# shared helpers


def _manifold_from(args, config) -> ModelManifold:
    if config.get("manifold") is not None:
        return ModelManifold.from_dict(config["manifold"])
    if args.n is None:
        raise InputError("give --n or a configuration with a 'manifold' entry")
    return ModelManifold.projective(args.n)


def _group_from(manifold, config):
    raw = config.get("group")
    return None if raw is None else SymmetryGroup.from_dict(manifold, raw)


def _basis_from(manifold, config, group, seed):
    if config.get("basis") is not None:
        return basis_from_json(manifold, config["basis"])
    full = kernel_basis(manifold)
    return full if group is None else invariant_subbasis(full, group, seed=seed)


def _report_row(rep) -> dict:
    return {"c1": rep.c1, "d": rep.d, "m": rep.m, "kernel_dim": rep.kernel_dim,
            "c2": bool(rep.c2_positive), "margin": rep.to_dict()["margin"], "verdict": rep.status}


# ---------------------------------------------------------------------------
# subcommands


def cmd_check(args, config) -> Outcome:
    if args.example is not None:
        params = {k: v for k, v in (("n", args.n), ("alpha", args.alpha), ("beta", args.beta))
                  if v is not None}
        entry = example_catalog(args.example, **params)
        manifold, basis, pts = entry.configuration.manifold, entry.configuration.basis, \
            entry.configuration.points
        rep = check(manifold, basis, pts, args.rank_tol, args.tol_pos)
        payload = {"example": args.example, "params": entry.params, "report": rep.to_dict()}
        return Outcome(payload, [_report_row(rep)], EXIT_OK if rep.verdict else EXIT_FALSE)

    manifold = _manifold_from(args, config)
    group = _group_from(manifold, config)
    if args.random is not None:
        pts = random_points(manifold, args.random, rng_for(args.seed, "cli_check"))
    elif config.get("representatives") is not None:
        if group is None:
            raise InputError("'representatives' needs a 'group'")
        full = kernel_basis(manifold)
        reps = [point_from_json(manifold, p) for p in config["representatives"]]
        er = equivariant_check(full, group, reps, rank_tol=args.rank_tol, tol_pos=args.tol_pos)
        payload = {"report": er.reduced.to_dict(), "full_report": er.full.to_dict(),
                   "orbit_sizes": er.orbit_sizes, "consistent": er.consistent}
        row = {**_report_row(er.reduced), "consistent": er.consistent}
        code = EXIT_OK if er.verdict else EXIT_FALSE
        if not er.consistent:
            code = EXIT_INTERNAL
        return Outcome(payload, [row], code,
                       "" if er.consistent else "reduced and full checks disagree")
    elif config.get("points") is not None:
        pts = [point_from_json(manifold, p) for p in config["points"]]
    else:
        raise InputError("check needs --example, --random M, or a configuration with points")
    basis = _basis_from(manifold, config, group, args.seed)
    rep = check(manifold, basis, pts, args.rank_tol, args.tol_pos)
    payload = {"manifold": manifold.to_dict(), "basis_labels": basis.labels, "report": rep.to_dict()}
    msg = "" if rep.verdict else f"not admissible ({rep.status}, rank {rep.c1} of {rep.d})"
    return Outcome(payload, [_report_row(rep)], EXIT_OK if rep.verdict else EXIT_FALSE, msg)


def cmd_search(args, config) -> Outcome:
    manifold = _manifold_from(args, config)
    group = _group_from(manifold, config)
    basis = _basis_from(manifold, config, group, args.seed)
    try:
        if args.method == "random":
            m = args.m if args.m is not None else basis.d + 1
            cfg = random_rank_search(basis, m, args.seed, args.tries)
            extra = {}
        elif args.method == "cover":
            cfg = cover_construct(basis, net_angle=args.net_angle, budget=args.budget, seed=args.seed)
            extra = {"net_size": int(len(cfg.net))}
        else:
            m0, cfg = m0_estimate(basis, budget=args.tries, seed=args.seed)
            extra = {"m0_upper_bound": m0}
    except PartialCoverError as exc:
        return Outcome({"error": str(exc), "uncovered": jsonable(exc.uncovered)}, [], EXIT_FALSE, str(exc))
    except SearchFailure as exc:
        return Outcome({"error": str(exc)}, [], EXIT_FALSE, str(exc))
    cfg.group = group
    payload = {"configuration": configuration_to_dict(cfg), **extra}
    row = {"method": args.method, "points": cfg.m, **_report_row(cfg.report), **extra}
    return Outcome(payload, [row], EXIT_OK if cfg.admissible else EXIT_FALSE)


def cmd_catalog(args, config) -> Outcome:
    ids = [args.example] if args.example is not None else list(EXAMPLE_IDS)
    params = {k: v for k, v in (("n", args.n), ("alpha", args.alpha), ("beta", args.beta))
              if v is not None}
    entries, rows = [], []
    for k in ids:
        usable = params if args.example is not None else {}
        e = example_catalog(k, **usable)
        entries.append(e.to_dict())
        rows.append({"example": k, "params": e.params, "status": e.status,
                     "matrix_match": e.diff["matrix_match"], "verdict_match": e.diff["verdict_match"],
                     "rank": e.report.c1, "verdict": e.report.status,
                     "discrepancy": e.diff["discrepancy"] or ""})
    failed = [r["example"] for r in rows if r["status"] == "failed"]
    return Outcome({"entries": entries}, rows, EXIT_FALSE if failed else EXIT_OK,
                   f"examples failing: {failed}" if failed else "")


def cmd_ode(args, config) -> Outcome:
    traj = integrate_zeta(args.n, args.smax, args.rtol)
    payload = {"n": args.n, "lambda": traj.lam, "s_max": traj.s_max}
    if args.n >= 3:
        fit = fit_trajectory(traj, args.leading)
        payload.update({"c": fit.c, "remainder_slope": fit.remainder_slope,
                        "expansion": fit.to_dict()})
    else:
        payload.update({"c": 0.0, "remainder_slope": None,
                        "sup_zeta_minus_1": float(np.max(np.abs(traj.zeta - 1)))})
    if args.dual:
        payload["dual"] = lambda_dual(args.n, args.smax)
    row = {k: payload[k] for k in ("n", "lambda", "c", "remainder_slope")}
    out = Outcome(payload, [row])
    if args.samples:
        buf = _io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["s", "zeta", "f"])
        for s, z, f in zip(traj.s, traj.zeta, traj.f):
            w.writerow([repr(float(s)), repr(float(z)), repr(float(f))])
        out.extra_files[args.samples] = buf.getvalue()
    return out


def cmd_ledger(args, config) -> Outcome:
    delta = args.delta if args.delta is not None else base_window(args.n).midpoint
    led = verify_ledger(args.n, delta, args.delta_model, args.entries)
    rows = [{"name": r.name, "lhs_exponent": str(r.lhs_exponent), "rhs_exponent": str(r.rhs_exponent),
             "gap": str(r.gap), "verdict": "pass" if r.passed else "fail", "claim": r.claim}
            for r in led.rows]
    payload = {**led.to_dict(), "window": str(base_window(args.n))}
    failing = led.failing()
    msg = f"inequalities failing: {', '.join(failing)}" if failing else ""
    return Outcome(payload, rows, EXIT_FALSE if failing else EXIT_OK, msg)


def cmd_match(args, config) -> Outcome:
    rows = []
    for n in args.n:
        if n < 2:
            raise InputError("match needs n >= 2")
        for g in range(args.gamma_max + 1):
            P = poisson_map_mode(g, n)
            rows.append({"n": n, "gamma": g, "restricted": P.restricted,
                         "inner_exponents": [g, g + 2], "outer_exponents": [2 - 2 * n - g, 4 - 2 * n - g],
                         "mu": mu(g, n), "nu": nu(g, n), "det": P.det, "cond": P.cond})
    bad = [(r["n"], r["gamma"]) for r in rows if not abs(r["det"]) > 1e-8]
    return Outcome({"modes": rows}, rows, EXIT_FALSE if bad else EXIT_OK,
                   f"singular modes: {bad}" if bad else "")


def cmd_suite(args, config) -> Outcome:
    rows = paper_suite(args.seed)
    flat = [{"key": r.key, "status": r.status, "claim": r.claim, "note": r.note,
             "metrics": r.metrics} for r in rows]
    bad = [r.key for r in rows if not r.ok]
    return Outcome({"rows": [r.to_dict() for r in rows], "passed": suite_passed(rows)}, flat,
                   EXIT_OK if not bad else EXIT_FALSE, f"rows failing: {bad}" if bad else "")


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON file; keys act as defaults for flags")
    common.add_argument("--seed", type=seed_u64, default=DEFAULT_SEED)
    common.add_argument("--format", choices=("json", "csv", "table"), default="json")
    common.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")

    parser = argparse.ArgumentParser(prog="blowup-csc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="admissibility of a point configuration")
    p.add_argument("--example", type=int, choices=EXAMPLE_IDS)
    p.add_argument("--n", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--random", type=int, metavar="M", help="M uniformly random points")
    p.add_argument("--rank-tol", type=positive_float, default=RANK_TOL)
    p.add_argument("--tol-pos", type=positive_float, default=POS_TOL)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("search", parents=[common], help="construct an admissible configuration")
    p.add_argument("--n", type=int)
    p.add_argument("--method", choices=("random", "cover", "m0"), default="cover")
    p.add_argument("--m", type=int)
    p.add_argument("--tries", type=int, default=100)
    p.add_argument("--net-angle", type=positive_float, default=0.05)
    p.add_argument("--budget", type=int, default=10 ** 7)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("catalog", parents=[common], help="reproduce the worked examples")
    p.add_argument("--example", type=int, choices=EXAMPLE_IDS)
    p.add_argument("--n", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("ode", parents=[common], help="radial potential of the model metric")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--smax", type=float, default=1000.0)
    p.add_argument("--rtol", type=float, default=1e-12)
    p.add_argument("--leading", choices=("derived", "reference"), default="derived")
    p.add_argument("--dual", action="store_true", help="also run the second integrator")
    p.add_argument("--samples", metavar="PATH", help="CSV of (s, zeta, f)")
    p.set_defaults(func=cmd_ode)

    p = sub.add_parser("ledger", parents=[common], help="exact exponent inequalities")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--delta", type=fraction, help="weight as p/q; default: window midpoint")
    p.add_argument("--delta-model", type=fraction, default=Fraction(1, 2))
    p.add_argument("--entries", nargs="+", help="names or groups, e.g. ii iv.a")
    p.set_defaults(func=cmd_ledger)

    p = sub.add_parser("match", parents=[common], help="per-mode Cauchy maps")
    p.add_argument("--n", type=int, nargs="+", default=[2, 3, 4, 5])
    p.add_argument("--gamma-max", type=int, default=20)
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("paper-suite", parents=[common], help="full reproduction summary")
    p.set_defaults(func=cmd_suite)
    return parser


def _load_config(path):
    if path is None:
        return {}
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise InputError("config must be a JSON object")
    return data


def _parse(parser, argv):
    args = parser.parse_args(argv)
    config = _load_config(args.config)
    if config:
        # config keys fill in flags that were left at their defaults
        sub = parser._subparsers._group_actions[0].choices[args.command]
        dests = {a.dest: a for a in sub._actions}
        defaults = {}
        for key, value in config.items():
            dest = key.replace("-", "_")
            if dest in dests and dest not in ("config", "help"):
                action = dests[dest]
                if action.type is not None and isinstance(value, str):
                    value = action.type(value)
                defaults[dest] = value
        if defaults:
            sub.set_defaults(**defaults)
            args = parser.parse_args(argv)
    return args, config


# ---------------------------------------------------------------------------
# rendering


def _flat(v):
    if isinstance(v, (dict, list, tuple)):
        return json.dumps(jsonable(v), sort_keys=True)
    v = jsonable(v)
    return "" if v is None else v


def _columns(rows):
    cols = []
    for r in rows:
        for k in r:
            if k not in cols:
                cols.append(k)
    return cols


def render(fmt: str, report: dict, rows: list) -> str:
    if fmt == "json":
        return dumps(report)
    cols = _columns(rows)
    if fmt == "csv":
        buf = _io.StringIO()
        w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: _flat(r.get(k)) for k in cols})
        return buf.getvalue()
    cells = [[str(_flat(r.get(k))) for k in cols] for r in rows]
    widths = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(cols)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(cols, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in cells]
    return "\n".join(lines) + "\n"


def _echo(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out")}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args, config = _parse(parser, argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_INPUT
    except (InputError, argparse.ArgumentTypeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT

    try:
        outcome = args.func(args, config)
    except (InputError, CatalogError, KeyError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (IntegratorError, LPSolverError, SingularCauchyMap) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001
        log.exception("internal error")
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL

    report = {"schema": SCHEMA, "version": __version__, "command": args.command,
              "config": _echo(args), "exit_code": outcome.code, **outcome.payload}
    if outcome.message:
        report["message"] = outcome.message
    text = render(args.format, report, outcome.rows)
    try:
        for path, body in outcome.extra_files.items():
            atomic_write(path, body)
        if args.out:
            atomic_write(args.out, text)
        else:
            sys.stdout.write(text)
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if outcome.message:
        print(outcome.message, file=sys.stderr)
    return outcome.code


if __name__ == "__main__":
    sys.exit(main())
