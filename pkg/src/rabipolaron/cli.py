"""Command-line front end: ``rabipolaron <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields
from pathlib import Path

from . import __version__
from .batch import OUTPUTS, SweepConfig, _fmt, load_config, parse_grid, run_point, run_sweep
from .errors import ConfigurationError, DomainError
from .exact_diag import solve_exact
from .model import from_ratio
from .observables import photon_statistics
from .variational import minimize_ground
from .wigner import COMPONENTS, analytic_field, default_grid, field_negativities, write_grid_csv

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2


def _add_point_args(p, *, single=True):
    p.add_argument("-R", "--ratio", type=float, required=single, nargs=None if single else "+", help="Delta / omega")
    p.add_argument("--g-over-gc", type=float, required=single, nargs=None if single else "+", help="coupling in units of g_c")
    p.add_argument("--ansatz", choices=("full4", "eq19", "eq15"), default=None if not single else "full4")


def _outputs_arg(text):
    return [v for v in text.replace(",", " ").split() if v]


def _wigner_point(text):
    try:
        r, x = text.split(":")
        return float(r), float(x)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected R:g_over_gc, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rabipolaron", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("point", help="solve one point and print a JSON record")
    _add_point_args(p)
    p.add_argument("--outputs", type=_outputs_arg, default=["energy", "error", "weights", "displacements", "xi"],
                   help="comma-separated outputs or 'all'")
    p.add_argument("--entropy-base", choices=("e", "2"), default="e")

    s = sub.add_parser("sweep", help="run a parameter sweep and write CSV files plus a manifest")
    _add_point_args(s, single=False)
    s.add_argument("--grid", help="g/g_c grid as min:max:count")
    s.add_argument("--outputs", type=_outputs_arg, default=None, help=f"comma-separated subset of {','.join(OUTPUTS)}")
    s.add_argument("--wigner-point", type=_wigner_point, action="append", default=None, metavar="R:G")
    s.add_argument("--seed-policy", choices=("continuation", "multi-start"), default=None)
    s.add_argument("--entropy-base", choices=("e", "2"), default=None)
    s.add_argument("--out", default=None, help="output directory")
    s.add_argument("--jobs", type=int, default=None)
    s.add_argument("--config", default=None, help="key-value file with a [sweep] section")

    w = sub.add_parser("wigner", help="write a Wigner grid CSV")
    _add_point_args(w)
    w.add_argument("--component", choices=COMPONENTS, default="W_T")
    w.add_argument("--nodes", type=int, default=512)
    w.add_argument("--out", required=True, help="output CSV file")

    n = sub.add_parser("negativity", help="Wigner negativities of the total, even and odd fields")
    _add_point_args(n)

    f = sub.add_parser("fock", help="parity-resolved photon populations as CSV")
    _add_point_args(f)
    f.add_argument("--source", choices=("variational", "ed"), default="variational")
    f.add_argument("--n-max", type=int, default=None)
    f.add_argument("--out", default=None, help="output CSV file (stdout if omitted)")

    c = sub.add_parser("classify", help="nonclassical-state region label")
    _add_point_args(c)
    return parser


def _sweep_config(args) -> SweepConfig:
    values = {}
    if args.config:
        values.update(load_config(args.config))
    if args.ratio:
        values["ratios"] = list(args.ratio)
    if args.grid:
        values["g_over_gc"] = parse_grid(args.grid)
    if args.g_over_gc:
        values["g_over_gc"] = list(args.g_over_gc)
    for name, key in (("ansatz", "ansatz"), ("outputs", "outputs"), ("wigner_point", "wigner_points"),
                      ("seed_policy", "seed_policy"), ("entropy_base", "entropy_base"),
                      ("out", "output_dir"), ("jobs", "jobs")):
        value = getattr(args, name)
        if value is not None:
            values[key] = value
    known = {f.name for f in fields(SweepConfig)}
    return SweepConfig(**{k: v for k, v in values.items() if k in known}).validate()


def _write(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _dispatch(args) -> int:
    if args.command == "sweep":
        config = _sweep_config(args)
        manifest = run_sweep(config)
        failed = sum(1 for p in manifest["points"] if p["status"].startswith("error"))
        print(f"wrote {len(manifest['files'])} files to {config.output_dir}; {failed} failed points")
        return EXIT_OK
    if args.command == "point":
        record = run_point(args.ratio, args.g_over_gc, args.outputs, ansatz=args.ansatz, entropy_base=args.entropy_base)
        print(json.dumps(record, indent=2, sort_keys=True))
        return EXIT_OK

    model = from_ratio(args.ratio, args.g_over_gc)
    if args.command == "classify":
        record = run_point(args.ratio, args.g_over_gc, ["classify"], ansatz=args.ansatz)
        print(record["region"])
        return EXIT_OK
    if args.command == "fock":
        if args.source == "ed":
            dist = photon_statistics(solve_exact(model), args.n_max)
        else:
            dist = photon_statistics(minimize_ground(model, args.ansatz, compute_error=False), args.n_max)
        lines = ["n,population,parity"] + [f"{k},{_fmt(v)},{s}" for k, v, s in dist.records()]
        _write("\n".join(lines) + "\n", args.out)
        return EXIT_OK
    solution = minimize_ground(model, args.ansatz, compute_error=False)
    if args.command == "negativity":
        neg = field_negativities(solution)
        print(json.dumps({"total": neg["W_T"], "even": neg["W_E"], "odd": neg["W_O"]}, sort_keys=True))
        return EXIT_OK
    if args.command == "wigner":
        grid = default_grid(solution.params, n=args.nodes)
        write_grid_csv(args.out, grid, analytic_field(solution, grid)[args.component])
        return EXIT_OK
    raise ConfigurationError(f"unknown command {args.command!r}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except (ConfigurationError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
