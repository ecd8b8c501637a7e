"""Command-line surface: evaluate, classify, search, simulate, report.

Outcomes of a search (found / exhausted / budget_hit) are all successful runs
and exit 0 with a machine-readable outcome field; a witness simply may not
exist at desk scale.  Exit 2 means malformed input (with the parse position
for JSON errors), exit 3 a budget misconfiguration.

Output is byte-identical for identical inputs and configuration; wall-clock
timing is therefore omitted from reports unless --timing is passed.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import genpoly, nilsys, search
from .sets import DisjointCollection, FiniteSet
from .setpoly import SetPolynomial

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_BUDGET = 3


class InputError(Exception):
    pass


def _load_json(path: str) -> object:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise InputError(f"{path}: no such file")
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: parse failure at position {e.pos} (line {e.lineno})")


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise InputError(f"not a rational number: {text!r}")


def _budget(args) -> search.SearchBudget:
    try:
        return search.SearchBudget(
            max_r=args.max_r,
            max_subsets=args.budget_subsets,
            max_subcollections=args.budget_subcollections,
            time_cap=args.time_cap,
        )
    except ValueError as e:
        raise BudgetConfigError(str(e))


class BudgetConfigError(Exception):
    pass


def _emit(args, text: str) -> None:
    if getattr(args, "output", None):
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _emit_json(args, payload: object) -> None:
    _emit(args, json.dumps(payload, indent=2, sort_keys=True))


def _load_genpoly(path: str) -> genpoly.GenPoly:
    data = _load_json(path)
    try:
        return genpoly.from_json(data)
    except (KeyError, ValueError, TypeError) as e:
        raise InputError(f"{path}: {e}")


def _load_setpoly(path: str) -> SetPolynomial:
    data = _load_json(path)
    try:
        return SetPolynomial.from_json(data)
    except (KeyError, ValueError, TypeError) as e:
        raise InputError(f"{path}: {e}")


def _load_system(path: str, mode: str) -> nilsys.System:
    data = _load_json(path)
    try:
        return nilsys.system_from_json(data, float_mode=(mode == "float"))
    except (KeyError, ValueError, TypeError) as e:
        raise InputError(f"{path}: {e}")


def _parse_point(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(p) for p in text.split(","))
    except ValueError:
        raise InputError(f"not an integer point: {text!r}")


def _maps_from_instance(path: str):
    """Witness instance file: {"maps": [...]} with setpoly or composed entries."""
    data = _load_json(path)
    if not isinstance(data, dict) or "maps" not in data:
        raise InputError(f"{path}: expected an object with a 'maps' list")
    maps = []
    for entry in data["maps"]:
        try:
            if "gp" in entry:
                gp = genpoly.from_json(entry["gp"])
                phi = SetPolynomial.from_json(entry["phi"])
                maps.append(genpoly.compose(gp, phi))
            else:
                maps.append(SetPolynomial.from_json(entry))
        except (KeyError, ValueError, TypeError) as e:
            raise InputError(f"{path}: {e}")
    return maps


def cmd_gp_eval(args) -> int:
    gp = _load_genpoly(args.file)
    points = [_parse_point(p) for p in args.point]
    if not points:
        raise InputError("at least one --point is required")
    values = {",".join(str(c) for c in p): str(gp.eval(p)) for p in points}
    if args.format == "json":
        _emit_json(args, {"values": values})
    else:
        _emit(args, "\n".join(f"{k} -> {v}" for k, v in values.items()))
    return EXIT_OK


def cmd_gp_attrs(args) -> int:
    gp = _load_genpoly(args.file)
    a = gp.attributes()
    flags = {
        "open": gp.is_open(),
        "constant_free": gp.is_constant_free(),
    }
    if args.format == "json":
        _emit_json(
            args,
            {"height": a.height, "width": a.width, "degree": a.degree, **flags},
        )
    else:
        _emit(
            args,
            f"h={a.height} w={a.width} d={a.degree} "
            f"open={str(flags['open']).lower()} "
            f"constant_free={str(flags['constant_free']).lower()}",
        )
    return EXIT_OK


def cmd_witness(args) -> int:
    maps = _maps_from_instance(args.instance)
    rep = search.find_small_alpha(maps, _fraction(args.eps), _budget(args), r=args.r)
    _emit_json(args, rep.to_json(include_timing=args.timing))
    return EXIT_OK


def cmd_skob(args) -> int:
    phi = _load_setpoly(args.phi)
    bound = _fraction(args.bound) if args.bound else None
    try:
        rep = search.skob_search(phi, args.s, _budget(args), bound=bound)
    except search.PreconditionError as e:
        raise InputError(str(e))
    _emit_json(args, rep.to_json(include_timing=args.timing))
    return EXIT_OK


def cmd_skop(args) -> int:
    data = _load_json(args.phis)
    if not isinstance(data, list):
        raise InputError(f"{args.phis}: expected a list of t-table objects")
    phis = [SetPolynomial.from_json(d) for d in data]
    rep = search.skop_search(phis, args.s, _budget(args))
    _emit_json(args, rep.to_json(include_timing=args.timing))
    return EXIT_OK


def cmd_gps(args) -> int:
    maps = _maps_from_instance(args.instance)
    rep = search.gps_search(maps, args.s, _budget(args))
    _emit_json(args, rep.to_json(include_timing=args.timing))
    return EXIT_OK


def cmd_return_set(args) -> int:
    system = _load_system(args.system, args.mode)
    rs = nilsys.return_set(system, _fraction(args.eps), args.horizon, threads=args.threads)
    if args.format == "csv":
        _emit(args, "\n".join(rs.csv_rows()))
    else:
        _emit_json(args, rs.to_json())
    return EXIT_OK


def cmd_orbit(args) -> int:
    system = _load_system(args.system, args.mode)
    lo, hi = (args.n, args.n) if args.n is not None else (args.start, args.stop)
    if lo is None or hi is None or lo > hi:
        raise InputError("give --n, or --start and --stop with start <= stop")
    rows = []
    for n in range(lo, hi + 1):
        p = system.orbit_point(n)
        rows.append((n, [str(c) for c in p.coords]))
    if args.format == "csv":
        width = len(rows[0][1])
        header = "n," + ",".join(f"c{i+1}" for i in range(width))
        lines = [header] + [f"{n}," + ",".join(cs) for n, cs in rows]
        _emit(args, "\n".join(lines))
    else:
        _emit_json(args, {"orbit": [{"n": n, "point": cs} for n, cs in rows]})
    return EXIT_OK


def cmd_ip_test(args) -> int:
    if args.fixture == "tower":
        xs = search.dilated_segment_union(args.fixture_max_r)
        blocks = {r: search.dilated_segment(r) for r in range(1, args.fixture_max_r + 1)}
        payload = {
            "fixture": "tower",
            "max_r": args.fixture_max_r,
            "size": len(xs),
            "dilation_blocks_ok": all(
                blocks[r] == [j * 2 ** (2**r) for j in range(1, r + 1)] for r in blocks
            ),
            "gaps_non_decreasing": search.gaps_non_decreasing(xs),
        }
        _emit_json(args, payload)
        return EXIT_OK
    if not args.system:
        raise InputError("either --fixture tower or --system is required")
    system = _load_system(args.system, args.mode)
    rs = nilsys.return_set(system, _fraction(args.eps), args.horizon, threads=args.threads)
    pool = range(args.pool_min, args.pool_max + 1)
    rep = search.ipstar_hit_test(set(rs.members), pool, args.r, _budget(args))
    _emit_json(args, rep.to_json(include_timing=args.timing))
    return EXIT_OK


def cmd_vip_test(args) -> int:
    system = _load_system(args.system, args.mode)
    phi = _load_setpoly(args.phi)
    g = system.g if isinstance(system, nilsys.PolySeqSystem) else None
    rep = nilsys.vip_return_test(system, g, phi, _fraction(args.eps), _budget(args))
    _emit_json(args, rep.to_json(include_timing=args.timing))
    return EXIT_OK


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mode", choices=["exact", "float"], default="exact")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized instances")
    p.add_argument("--threads", type=int, default=1, help="worker cap for parallel filters")
    p.add_argument("--output", help="write to a file instead of stdout")
    p.add_argument("--format", choices=["json", "csv", "text"], default="json")
    p.add_argument("--timing", action="store_true", help="include elapsed_ms in reports")
    p.add_argument("--max-r", type=int, default=20, dest="max_r")
    p.add_argument("--budget-subsets", type=int, default=1_000_000, dest="budget_subsets")
    p.add_argument(
        "--budget-subcollections", type=int, default=200_000, dest="budget_subcollections"
    )
    p.add_argument("--time-cap", type=float, default=120.0, dest="time_cap")


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="bracketdyn",
        description="Set-polynomial algebra, bracket polynomials, witness searches, orbit simulators.",
    )
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gp-eval", help="evaluate a bracket polynomial at integer points")
    p.add_argument("file")
    p.add_argument("--point", action="append", default=[], help="comma-separated integers")
    _add_common(p)
    p.set_defaults(func=cmd_gp_eval, format="text")

    p = sub.add_parser("gp-attrs", help="height/width/degree and classification flags")
    p.add_argument("file")
    _add_common(p)
    p.set_defaults(func=cmd_gp_attrs, format="text")

    p = sub.add_parser("witness", help="first subset with all fractional parts below eps")
    p.add_argument("--instance", required=True)
    p.add_argument("--eps", required=True)
    p.add_argument("--r", type=int, default=None)
    _add_common(p)
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("skob", help="floor-shift search over singleton subcollections")
    p.add_argument("--phi", required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--bound", default=None, help="relaxed hypothesis bound p/q")
    _add_common(p)
    p.set_defaults(func=cmd_skob)

    p = sub.add_parser("skop", help="floor-shift search over general subcollections")
    p.add_argument("--phis", required=True, help="JSON list of t-table objects")
    p.add_argument("--s", type=int, required=True)
    _add_common(p)
    p.set_defaults(func=cmd_skop)

    p = sub.add_parser("gps", help="subcollection on which bracket mappings turn polynomial")
    p.add_argument("--instance", required=True)
    p.add_argument("--s", type=int, required=True)
    _add_common(p)
    p.set_defaults(func=cmd_gps)

    p = sub.add_parser("return-set", help="eps-returns of the marked point over a horizon")
    p.add_argument("--system", required=True)
    p.add_argument("--eps", required=True)
    p.add_argument("--horizon", type=int, required=True)
    _add_common(p)
    p.set_defaults(func=cmd_return_set)

    p = sub.add_parser("orbit", help="orbit coordinates over a range of times")
    p.add_argument("--system", required=True)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--start", type=int, default=None)
    p.add_argument("--stop", type=int, default=None)
    _add_common(p)
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("ip-test", help="sum-set hit test against a return set or fixture")
    p.add_argument("--fixture", choices=["tower"], default=None)
    p.add_argument("--fixture-max-r", type=int, default=5, dest="fixture_max_r")
    p.add_argument("--system", default=None)
    p.add_argument("--eps", default="1/10")
    p.add_argument("--horizon", type=int, default=1000)
    p.add_argument("--pool-min", type=int, default=1)
    p.add_argument("--pool-max", type=int, default=10)
    p.add_argument("--r", type=int, default=3)
    _add_common(p)
    p.set_defaults(func=cmd_ip_test)

    p = sub.add_parser("vip-test", help="recurrence along polynomial images of subsets")
    p.add_argument("--system", required=True)
    p.add_argument("--phi", required=True)
    p.add_argument("--eps", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_vip_test)

    return top


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except BudgetConfigError as e:
        print(f"budget error: {e}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
