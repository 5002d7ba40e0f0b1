"""Command line: ``isotower {obstruction,degree,eval,fv,selftest}``.

Results go to standard output as JSON; diagnostics go to standard error.
Exit codes: 0 success (or "not obstructed"), 1 self-test failure,
2 input error, 3 obstructed splitting.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from . import facial, kresidue, maps, opcalc, selftest, tower
from .io import (InputError, dumps, load_json_file, matrix_from_json,
                 thom_point_from_json, tower_point_from_json, value_to_json)

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_OBSTRUCTED = 0, 1, 2, 3
TOL_ENV = "ISOTOWER_TOL"


def _load(arg: str, what: str):
    """A JSON argument: a file path, or an inline JSON literal."""
    text = arg.strip()
    if text[:1] in "[{":
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"{what} is not valid JSON: {exc}") from None
    return load_json_file(arg, what)


def _emit(obj) -> None:
    sys.stdout.write(dumps(obj) + "\n")


def _need(args, *names):
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n) is None]
    if missing:
        raise InputError(f"{args.command} needs {' '.join(missing)}")


# -- subcommands ---------------------------------------------------------

def cmd_obstruction(args) -> int:
    _need(args, "group", "v0", "v1")
    group = kresidue.parse_group(_load(args.group, "group"))
    v0 = kresidue.parse_representation(group, _load(args.v0, "v0"))
    v1 = kresidue.parse_representation(group, _load(args.v1, "v1"))
    verdict = kresidue.obstruction_check(v0, v1)
    _emit(verdict.to_json())
    if not verdict.divides:
        print("splitting obstructed: f_V0 does not divide f_V1", file=sys.stderr)
    return EXIT_OK if verdict.divides else EXIT_OBSTRUCTED


def cmd_fv(args) -> int:
    _need(args, "group", "v0")
    group = kresidue.parse_group(_load(args.group, "group"))
    v = kresidue.parse_representation(group, _load(args.v0, "v0"))
    f = kresidue.k_polynomial(v)
    out = {
        "dim": v.dim,
        "exterior_powers": [e.to_json() for e in kresidue.exterior_powers(v)],
        "f_v": f.to_json(),
        "f_v_text": str(f),
        "gysin_values": [r.to_json() for r in kresidue.gysin_values(v)],
    }
    if v.dim:
        out["diagonal_class"] = kresidue.diagonal_class(v).to_json()
    _emit(out)
    return EXIT_OK


def cmd_degree(args) -> int:
    _need(args, "map")
    kind, m = maps.degree_map(args.map)
    if kind == "circle":
        deg = facial.circle_degree(m, samples=args.samples or 1024)
    else:
        deg = facial.sphere_degree(m, grid=args.samples or 16, seed=args.seed)
    print(f"{args.map}: {kind} degree {deg}", file=sys.stderr)
    _emit(deg)
    return EXIT_OK


def _matrix(obj, key):
    if not isinstance(obj, dict) or key not in obj:
        raise InputError(f"input needs a {key!r} matrix")
    return matrix_from_json(obj[key], key)


def _tower_eval(name, obj, k):
    """Evaluate a tower or operator map on parsed JSON input."""
    if name in ("q_k", "f_k", "delta_k", "pi_k", "tau", "embed_coords"):
        p = tower_point_from_json(obj)
        if name == "q_k":
            return tower.qk_map(p)
        if name == "f_k":
            return tower.fk_map(p, k)
        if name == "delta_k":
            return tower.delta_k(p, k)
        if name == "pi_k":
            return tower.pi_k(p)
        if name == "tau":
            return tower.tau_map(p)
        return tower.embed_coords(p)
    if name in ("r_k", "phi_k"):
        q = thom_point_from_json(obj)
        return tower.rk_map(q) if name == "r_k" else tower.phi_k(q)
    if name == "g_k":
        if not isinstance(obj, dict) or "t" not in obj or "thom" not in obj:
            raise InputError("g_k input is {\"t\": real, \"thom\": Thom point}")
        return tower.gk_map(float(obj["t"]), thom_point_from_json(obj["thom"]))
    if name == "chi":
        return tower.chi_map(_matrix(obj, "gamma"))
    if name == "kappa":
        return opcalc.kappa(opcalc.as_hermitian(_matrix(obj, "alpha")), _matrix(obj, "theta"))
    if name == "kappa_inv":
        inv = opcalc.kappa_inv(_matrix(obj, "gamma"))
        return {"alpha": inv.alpha, "theta": inv.theta}
    if name == "miller_rank":
        return tower.miller_rank(_matrix(obj, "theta"), _matrix(obj, "inclusion"))
    return None


TOWER_MAPS = ("q_k", "r_k", "f_k", "g_k", "delta_k", "phi_k", "pi_k", "tau", "chi",
              "kappa", "kappa_inv", "embed_coords", "miller_rank")


def _point_arg(obj):
    if isinstance(obj, dict) and "point" in obj:
        obj = obj["point"]
    if obj == "basepoint":
        return facial.INFINITY
    return obj


def cmd_eval(args) -> int:
    _need(args, "map", "input")
    obj = _load(args.input, "input")
    name = args.map
    if name in TOWER_MAPS:
        out = _tower_eval(name, obj, args.k)
    elif isinstance(obj, dict) and ("alpha" in obj or "gamma" in obj):
        key = "alpha" if "alpha" in obj else "gamma"
        m = _matrix(obj, key)
        f = maps.facial_map(name, m.shape[1])
        out = opcalc.apply_A(f, m) if key == "alpha" else opcalc.apply_B(f, m)
    else:
        x = _point_arg(obj)
        if isinstance(x, list):
            if name in maps.SPHERE_MAPS:
                out = maps.SPHERE_MAPS[name](tuple(float(c) for c in x))
            else:
                out = maps.facial_map(name, len(x))(tuple(float(c) for c in x))
        elif x is facial.INFINITY or isinstance(x, (int, float)):
            kind, m = maps.degree_map(name)
            if kind != "circle":
                raise InputError(f"{name} acts on points [s, t] of the plane")
            out = m(x if x is facial.INFINITY else float(x))
        else:
            raise InputError("input must be a point, {\"alpha\": ...}, {\"gamma\": ...} or a tower/Thom point")
    _emit({"map": name, "result": value_to_json(out)})
    return EXIT_OK


def cmd_selftest(args) -> int:
    samples = 200 if args.samples is None else args.samples
    if samples < 1:
        raise InputError("--samples must be positive")
    results = selftest.run_suite(args.suite, samples, args.seed)
    rep = selftest.report(results)
    for r in results:
        if not r.ok:
            msg = f"FAIL {r.suite}/{r.name}: {r.passed}/{r.trials} passed, worst {r.worst:.3g} > {r.tol:g}"
            if r.error:
                msg += f" ({r.error})"
            print(msg + f"; reproduce with seed {r.failing_seed}", file=sys.stderr)
    _emit(rep)
    return EXIT_OK if rep["ok"] else EXIT_FAIL


COMMANDS = {"obstruction": cmd_obstruction, "degree": cmd_degree, "eval": cmd_eval,
            "fv": cmd_fv, "selftest": cmd_selftest}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="isotower",
        description="Spectral calculus, tower maps and K-theoretic splitting obstructions.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--tol", type=float, default=None,
                       help=f"base face tolerance (default from ${TOL_ENV} or 1e-9)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--samples", type=int, default=None)

    p = sub.add_parser("obstruction", help="check whether f_V0 divides f_V1 (exit 0) or not (exit 3)")
    p.add_argument("--group", help="group JSON file or literal, e.g. '{\"cyclic\": [2]}'")
    p.add_argument("--v0", help="representation V0: array of characters")
    p.add_argument("--v1", help="representation V1: array of characters")
    common(p)

    p = sub.add_parser("fv", help="exterior powers, f_V, Gysin values and diagonal class of V")
    p.add_argument("--group")
    p.add_argument("--v0", help="the representation V")
    common(p)

    p = sub.add_parser("degree", help="degree of a builtin map of the circle or the sphere")
    p.add_argument("--map", help="builtin id, e.g. f-double-prime, g-triple-prime, shift:<c>")
    common(p)

    p = sub.add_parser("eval", help="evaluate a builtin or tower map on JSON input")
    p.add_argument("--map", help=f"builtin facial map id, or one of {', '.join(TOWER_MAPS)}")
    p.add_argument("--input", help="input JSON file or literal")
    p.add_argument("--k", type=int, default=None, help="tower level for f_k and delta_k")
    common(p)

    p = sub.add_parser("selftest", help="run the seeded property suites")
    p.add_argument("--suite", default="all", choices=("all",) + selftest.SUITES)
    common(p)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else EXIT_OK
    if args.tol is not None:
        if not args.tol > 0:
            print("error: --tol must be positive", file=sys.stderr)
            return EXIT_INPUT
        os.environ[TOL_ENV] = repr(args.tol)
    try:
        return COMMANDS[args.command](args)
    except (InputError, kresidue.GroupSpecError, maps.UnknownMapError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ValueError, ArithmeticError, facial.DegreeError) as exc:
        # precondition failures of the evaluators are input errors too
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
