"""Command line entry point.

Exit codes: 0 success, 1 verification failure, 2 invalid input, 3 resource
cap exceeded.  ``--config FILE`` reads ``key = value`` lines that act as
defaults for the matching flags; explicit flags win.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .boxnorm import box_norm, lift
from .corners import FunctionGk, corner_stats, good_fraction
from .errors import ConvergenceError, InvalidInputError, QRCornersError, ResourceCapError
from .experiments import REPORT_FIELDS, resolve_theta, tv_scan, verify_suite
from .groups import _split_top, check_axioms, parse_group
from .regularity import rank_expansion, weak_regularity
from .spectral import character_degrees
from .subsets import generate_subset, parse_subset_spec, random_sign_function

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3


def read_config(path: str) -> dict:
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise InvalidInputError(f"{path}:{lineno}: expected 'key = value'")
        out[key.strip().lstrip("-").replace("-", "_")] = value.strip()
    return out


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _series_csv(values) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["g_index", "c_g"])
    for g, v in enumerate(values):
        w.writerow([g, repr(float(v))])
    return buf.getvalue()


def _load_function(args, k: int | None = None) -> tuple[np.ndarray, object]:
    """Function source shared by ``boxnorm`` and ``regularity``."""
    k = args.k if k is None else k
    if args.source == "random":
        G = parse_group(args.group) if args.group else None
        n = args.n if G is None else G.order
        return random_sign_function(n, k, args.seed).values, G
    if args.source == "subset":
        if args.group is None:
            raise InvalidInputError("--source subset needs --group")
        G = parse_group(args.group)
        spec = parse_subset_spec(args.subset, args.delta, args.seed)
        return generate_subset(G, k, spec).indicator.astype(float), G
    if args.source == "file":
        if not args.path:
            raise InvalidInputError("--source file needs --path")
        p = Path(args.path)
        vals = np.asarray(np.load(p) if p.suffix == ".npy" else np.loadtxt(p, ndmin=1), dtype=float)
        if vals.ndim == 1 and k > 1:
            n = round(len(vals) ** (1.0 / k))
            if n**k != len(vals):
                raise InvalidInputError(f"{len(vals)} values do not fill an n^{k} grid")
            vals = vals.reshape((n,) * k)
        G = parse_group(args.group) if args.group else None
        return vals, G
    raise InvalidInputError(f"unknown source {args.source!r}")


# --------------------------------------------------------------------------
# subcommands


def cmd_groups_info(args) -> int:
    G = parse_group(args.desc)
    rep = check_axioms(G)
    info = {
        "label": G.label,
        "order": G.order,
        "identity": G.identity,
        "abelian": G.is_abelian(),
        "axioms_ok": rep.ok,
        "associativity_exhaustive": rep.exhaustive,
    }
    print(_dumps(info))
    return EXIT_OK if rep.ok else EXIT_VERIFY


def cmd_qdegree(args) -> int:
    print(_dumps(character_degrees(parse_group(args.desc), seed=args.seed).to_dict()))
    return EXIT_OK


def _require(args, name: str) -> str:
    value = getattr(args, name)
    if not value:
        raise InvalidInputError(f"--{name} is required (flag or config file)")
    return value


def cmd_corners_run(args) -> int:
    G = parse_group(_require(args, "group"))
    spec = parse_subset_spec(args.subset, args.delta, args.seed)
    A = generate_subset(G, args.k, spec)
    series = corner_stats(G, A)
    theta = resolve_theta(args.theta, series.mean)
    summary = {
        "group": G.label,
        "order": G.order,
        "k": args.k,
        "subset": spec.describe(),
        "seed": args.seed,
        "density": float(A.density),
        "mean": series.mean,
        "tv": series.tv,
        "theta": theta,
        "good_fraction": good_fraction(series, theta),
        "count": series.total_count,
    }
    if args.format == "json":
        _emit(_dumps(summary) + "\n", args.out)
    else:
        _emit(_series_csv(series.values), args.out)
        if args.out:
            print(_dumps(summary))
    return EXIT_OK


def cmd_boxnorm(args) -> int:
    vals, G = _load_function(args)
    if args.lift is not None:
        if G is None:
            raise InvalidInputError("--lift needs a group")
        vals = lift(G, vals.ndim, args.lift, FunctionGk(vals, max(1.0, np.abs(vals).max()))).values
    print(_dumps(box_norm(vals).to_dict()))
    return EXIT_OK


def cmd_regularity(args) -> int:
    vals, _ = _load_function(args)
    try:
        d = weak_regularity(vals, args.eps, max_iter=args.max_iter, seed=args.seed)
        converged = True
    except ConvergenceError as exc:
        d, converged = exc.best, False
    out = {
        "converged": converged,
        "achieved_eps": d.achieved_eps,
        "eps": args.eps,
        "iterations": d.iterations,
        "atom_counts": d.atom_counts,
        "L": rank_expansion(d).L,
    }
    print(_dumps(out))
    return EXIT_OK if converged else EXIT_VERIFY


def cmd_tv_scan(args) -> int:
    family = [d.strip() for d in _split_top(_require(args, "family")) if d.strip()]
    spec = parse_subset_spec(args.subset, args.delta, args.seed)
    reports = tv_scan(family, args.k, spec, args.theta)
    rows = [r.row(timing=args.timing) for r in reports]
    if args.format == "json":
        _emit(_dumps(rows) + "\n", args.out)
    else:
        buf = io.StringIO()
        fields = REPORT_FIELDS + (["wall_time"] if args.timing else [])
        w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow({k: ("" if v is None else repr(v) if isinstance(v, float) else v)
                        for k, v in row.items()})
        _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    results = verify_suite(args.level)
    for r in results:
        status = "PASS" if r.ok else "FAIL"
        print(f"{status}  {r.name:<26} {r.seconds:7.2f}s  {r.detail}")
    return EXIT_OK if all(r.ok for r in results) else EXIT_VERIFY


# --------------------------------------------------------------------------


def _function_flags(p):
    p.add_argument("--source", choices=["random", "subset", "file"], default="random")
    p.add_argument("--group", default=None)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--n", type=int, default=8, help="domain size for --source random")
    p.add_argument("--subset", default="random")
    p.add_argument("--delta", type=float, default=0.5)
    p.add_argument("--path", default=None)
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qrcorners", description=__doc__.splitlines()[0])
    parser.add_argument("--config", default=None, help="key = value defaults file")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    groups = sub.add_parser("groups", help="group constructors")
    gsub = groups.add_subparsers(dest="groups_command", required=True)
    info = gsub.add_parser("info", help="order, identity and axiom check")
    info.add_argument("desc")
    info.set_defaults(func=cmd_groups_info)

    q = sub.add_parser("qdegree", help="character degrees and D as JSON")
    q.add_argument("desc")
    q.add_argument("--seed", type=int, default=0)
    q.set_defaults(func=cmd_qdegree)

    corners = sub.add_parser("corners", help="corner statistics")
    csub = corners.add_subparsers(dest="corners_command", required=True)
    run = csub.add_parser("run", help="per-g corner densities and summary")
    run.add_argument("--group", default=None)
    run.add_argument("--k", type=int, default=2)
    run.add_argument("--subset", default="random")
    run.add_argument("--delta", type=float, default=0.25)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--theta", default="mean/2")
    run.add_argument("--out", default=None)
    run.add_argument("--format", choices=["csv", "json"], default="csv")
    run.set_defaults(func=cmd_corners_run)

    bn = sub.add_parser("boxnorm", help="box norm of a function as JSON")
    _function_flags(bn)
    bn.add_argument("--lift", type=int, default=None, help="lift index i before the norm")
    bn.set_defaults(func=cmd_boxnorm)

    reg = sub.add_parser("regularity", help="weak regularity decomposition")
    _function_flags(reg)
    reg.add_argument("--eps", type=float, default=0.25)
    reg.add_argument("--max-iter", type=int, default=None)
    reg.set_defaults(func=cmd_regularity)

    scan = sub.add_parser("tv-scan", help="total variation across a group family")
    scan.add_argument("--family", default=None, help="comma separated group descriptors")
    scan.add_argument("--k", type=int, default=2)
    scan.add_argument("--subset", default="random")
    scan.add_argument("--delta", type=float, default=0.25)
    scan.add_argument("--seed", type=int, default=0)
    scan.add_argument("--theta", default="mean/2")
    scan.add_argument("--out", default=None)
    scan.add_argument("--format", choices=["csv", "json"], default="csv")
    scan.add_argument("--timing", action="store_true", help="add a wall_time column")
    scan.set_defaults(func=cmd_tv_scan)

    ver = sub.add_parser("verify", help="run the invariant suites")
    ver.add_argument("--level", choices=["fast", "full"], default="fast")
    ver.set_defaults(func=cmd_verify)
    return parser


def _apply_config(parser: argparse.ArgumentParser, cfg: dict) -> None:
    stack = [parser]
    while stack:
        p = stack.pop()
        known = {a.dest for a in p._actions}
        p.set_defaults(**{k: v for k, v in cfg.items() if k in known})
        for action in p._actions:
            if isinstance(action, argparse._SubParsersAction):
                stack.extend(action.choices.values())


def main(argv=None) -> int:
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", default=None)
    known, _ = pre.parse_known_args(argv)
    try:
        if known.config:
            _apply_config(parser, read_config(known.config))
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        return args.func(args)
    except ResourceCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (InvalidInputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except QRCornersError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
