"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 bad configuration,
3 numeric failure.  All floats are emitted with 17 significant digits so
repeated runs are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from fractions import Fraction

from . import __version__
from .lattice import HoleSystem, LozengeLocation, left
from .coupling import coupling_p, reduce_domain

FMT = "%.17g"


def _fmt(x: float) -> str:
    return FMT % x


def _load_holes(path: str) -> HoleSystem:
    with open(path) as fh:
        return HoleSystem.from_json(fh.read())


def _worker_count() -> int:
    try:
        return max(1, int(os.environ.get("LOZENGE_THREADS", "1")))
    except ValueError:
        return 1


def _write_lines(path: str | None, lines: list[str]) -> None:
    text = "\n".join(lines) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


# --- subcommands ---------------------------------------------------------------


def cmd_coupling(args) -> int:
    val = coupling_p(args.x, args.y)
    if args.float_only:
        print(_fmt(float(val)))
        return 0
    rx, ry = reduce_domain(args.x, args.y)
    print(f"P({args.x},{args.y}) = {val.rational_part} + {val.root_part}*(sqrt3/pi)")
    print(f"reduced = ({rx},{ry})")
    print(f"float = {_fmt(float(val))}")
    return 0


def cmd_coupling_table(args) -> int:
    lines = ["x,y,p_num,p_den,r_num,r_den,float"]
    n = args.range
    for x in range(-n, n + 1):
        for y in range(-n, n + 1):
            v = coupling_p(x, y)
            p, r = v.rational_part, v.root_part
            lines.append(
                f"{x},{y},{p.numerator},{p.denominator},"
                f"{r.numerator},{r.denominator},{_fmt(float(v))}"
            )
    _write_lines(args.out, lines)
    return 0


def _parse_grid(spec: str) -> list[tuple[int, int]]:
    if not spec.startswith("grid:"):
        raise ValueError("probe spec must look like grid:x0,y0,x1,y1")
    x0, y0, x1, y1 = (int(v) for v in spec[5:].split(","))
    return [(a, b) for a in range(x0, x1 + 1) for b in range(y0, y1 + 1)]


def cmd_field(args) -> int:
    from concurrent.futures import ThreadPoolExecutor

    from .correlation import ProbeOverlapsHole, discrete_field

    hs = _load_holes(args.holes)
    probes = _parse_grid(args.probes)

    def sample(ab):
        try:
            return discrete_field(left(*ab), hs)
        except ProbeOverlapsHole:
            return None

    workers = _worker_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(sample, probes))
    else:
        results = [sample(ab) for ab in probes]

    lines = ["a,b,p1,p2,p3,Fx,Fy,exactness"]
    for (a, b), fs in zip(probes, results):
        if fs is None:
            continue
        lines.append(
            f"{a},{b},{_fmt(fs.p1)},{_fmt(fs.p2)},{_fmt(fs.p3)},"
            f"{_fmt(fs.fx)},{_fmt(fs.fy)},{fs.exactness}"
        )
    _write_lines(args.out, lines)
    return 0


def _load_limit_config(path: str):
    from .continuum import Charge, LimitConfig, Probe

    with open(path) as fh:
        data = json.load(fh)
    positives = tuple(
        Charge(c["x"], c["y"], c.get("size", 1), c.get("alpha", 0), c.get("beta", 0))
        for c in data.get("positives", [])
    )
    negatives = tuple(
        Charge(c["x"], c["y"], c.get("size", 1), c.get("alpha", 0), c.get("beta", 0))
        for c in data.get("negatives", [])
    )
    pr = data.get("probe", {"x": 0.0, "y": 0.0})
    probe = Probe(pr["x"], pr["y"], pr.get("alpha", 0), pr.get("beta", 0))
    return LimitConfig(positives, negatives, probe, Fraction(data.get("q", 1)))


def cmd_coulomb(args) -> int:
    from dataclasses import replace

    from .continuum import Probe, coulomb_field

    cfg = _load_limit_config(args.config)
    x0, y0, x1, y1, nx, ny = (float(v) for v in args.grid.split(","))
    nx, ny = int(nx), int(ny)
    lines = ["x,y,Fx,Fy"]
    for i in range(nx):
        for j in range(ny):
            x = x0 + (x1 - x0) * i / max(nx - 1, 1)
            y = y0 + (y1 - y0) * j / max(ny - 1, 1)
            try:
                c = replace(cfg, probe=Probe(x, y))
                fx, fy = coulomb_field(c, args.R)
            except Exception:
                continue
            lines.append(f"{_fmt(x)},{_fmt(y)},{_fmt(fx)},{_fmt(fy)}")
    _write_lines(args.out, lines)
    return 0


def cmd_converge(args) -> int:
    from .convergence import field_convergence_table

    cfg = _load_limit_config(args.holes)
    rows = field_convergence_table(cfg, [int(r) for r in args.r_list.split(",")])
    lines = ["R,RFx,RFy,limit_Fx,limit_Fy,rel_error"]
    for row in rows:
        lines.append(
            f"{row.R},{_fmt(row.r_fx)},{_fmt(row.r_fy)},"
            f"{_fmt(row.limit_fx)},{_fmt(row.limit_fy)},{_fmt(row.rel_error)}"
        )
    _write_lines(args.out, lines)
    return 0


def cmd_surface(args) -> int:
    from .surface import MultiSheetSurface, Window, average_surface, export_mesh

    hs = _load_holes(args.holes)
    a0, b0, a1, b1 = (int(v) for v in args.window.split(","))
    sheet = average_surface(hs, Window(a0, b0, a1, b1))
    export_mesh(MultiSheetSurface(sheet), args.sheets, args.out)
    print(f"residual = {_fmt(sheet.residual)}")
    if args.compare:
        from .continuum import Charge, LimitConfig, Probe
        from .surface import compare_to_helicoids
        from .continuum import helicoids_for_config

        R = args.R
        positives = []
        negatives = []
        for m in hs.multiholes:
            c = Charge(m.anchor[0] / R, m.anchor[1] / R, m.size)
            (positives if m.kind == "E" else negatives).append(c)
        cfg = LimitConfig(tuple(positives), tuple(negatives), Probe(1e6, 1e6))
        report = compare_to_helicoids(sheet, R, helicoids_for_config(cfg))
        print(
            json.dumps(
                {
                    "max_abs": float(_fmt(report.max_abs)),
                    "mean_abs": float(_fmt(report.mean_abs)),
                    "grad_max_rel": float(_fmt(report.grad_max_rel)),
                },
                sort_keys=True,
            )
        )
    return 0


def cmd_verify(args) -> int:
    from . import verify as ver

    rng = random.Random(args.seed)
    if args.what in ("field-identity", "identity31"):
        res = ver.verify_field_identity(trials=args.trials, rng=rng)
    elif args.what in ("block-shift", "lemma33"):
        res = ver.verify_block_shift(trials=args.trials, rng=rng)
    elif args.what in ("border-shift", "lemma34"):
        res = ver.verify_border_shift(trials=args.trials, rng=rng)
    elif args.what == "symmetries":
        res = ver.verify_symmetries(limit=args.limit)
    elif args.what == "circulation":
        res = ver.verify_circulation()
    else:
        print(f"unknown verification {args.what!r}", file=sys.stderr)
        return 2
    print(f"{args.what}: max residual = {_fmt(res.max_residual)} over {res.cases} cases")
    return 0 if res.ok else 1


def cmd_oracle(args) -> int:
    from .oracle import (
        Region,
        count_tilings,
        hexagon,
        oracle_probability,
        oracle_probability_float,
    )

    def build_region() -> Region:
        kind, _, rest = args.region.partition(":")
        if kind != "hex":
            raise ValueError("region must look like hex:a,b,c")
        a, b, c = (int(v) for v in rest.split(","))
        return hexagon(a, b, c)

    region = build_region()
    if args.holes:
        region = region.remove(_load_holes(args.holes))
    if args.action == "count":
        print(count_tilings(region))
        return 0
    # compare
    from .correlation import placement_probability

    x, y, d = (int(v) for v in args.lozenge.split(","))
    loz = LozengeLocation(x, y, d)
    hs = _load_holes(args.holes) if args.holes else HoleSystem(())
    bulk = placement_probability(loz, hs)
    if len(region) <= 600:
        finite = float(oracle_probability(loz, region))
    else:
        finite = oracle_probability_float(loz, region)
    print(f"finite_region = {_fmt(finite)}")
    print(f"bulk = {_fmt(bulk)}")
    print(f"gap = {_fmt(abs(finite - bulk))}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lozenge", description=__doc__)
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coupling", help="evaluate the coupling function at one point")
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--y", type=int, required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--exact", action="store_true", default=True)
    g.add_argument("--float", dest="float_only", action="store_true")
    p.set_defaults(func=cmd_coupling, float_only=False)

    p = sub.add_parser("coupling-table", help="dump coupling values on a square range")
    p.add_argument("--range", type=int, required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_coupling_table)

    p = sub.add_parser("field", help="discrete field over a probe grid")
    p.add_argument("--holes", required=True)
    p.add_argument("--probes", required=True, help="grid:x0,y0,x1,y1 (oblique coords)")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_field)

    p = sub.add_parser("coulomb", help="limit field on a grid of probe positions")
    p.add_argument("--config", required=True)
    p.add_argument("--grid", required=True, help="x0,y0,x1,y1,nx,ny")
    p.add_argument("--R", type=float, default=1.0)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_coulomb)

    p = sub.add_parser("converge", help="exact field vs limit field over an R list")
    p.add_argument("--holes", required=True, help="limit configuration json")
    p.add_argument("--R-list", dest="r_list", required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("surface", help="average lifting surface as an OBJ mesh")
    p.add_argument("--holes", required=True)
    p.add_argument("--window", required=True, help="node bounds a0,b0,a1,b1")
    p.add_argument("--R", type=float, default=16.0)
    p.add_argument("--sheets", type=int, default=1)
    p.add_argument("--out", required=True)
    p.add_argument("--compare", action="store_true")
    p.set_defaults(func=cmd_surface)

    p = sub.add_parser("verify", help="run one of the identity checks")
    p.add_argument(
        "what",
        choices=[
            "field-identity",
            "identity31",
            "block-shift",
            "lemma33",
            "border-shift",
            "lemma34",
            "symmetries",
            "circulation",
        ],
    )
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--limit", type=int, default=12)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="finite-region enumeration cross-checks")
    p.add_argument("action", choices=["count", "compare"])
    p.add_argument("--region", required=True, help="hex:a,b,c")
    p.add_argument("--holes", default=None)
    p.add_argument("--lozenge", default=None, help="x,y,direction")
    p.set_defaults(func=cmd_oracle)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except ArithmeticError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
