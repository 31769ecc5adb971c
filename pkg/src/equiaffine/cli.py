"""Command-line front end: ``equiaffine analyze | lines | verify``.

Exit codes: 0 success, 1 verification failure, 2 usage or parse errors,
3 geometry errors.  Errors are also reported as one JSON object on stdout.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import sys

from . import analysis, verification
from .asymptotics import integrate_asymptotic_line, write_polyline_csv
from .errors import DomainError, EquiaffineError, GeometryError, ParseError, UnknownIdentifier, UnknownSurface
from .surface import CATALOG_NAMES, catalog, parse_immersion

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_GEOMETRY = 0, 1, 2, 3

# options whose values may start with "-" (negative numbers in ranges and seeds)
_VALUE_OPTIONS = ("--domain", "--seed", "--x", "--y", "--z", "--w", "--g", "--xi", "--tol", "--step", "--len")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def dumps(obj) -> str:
    """JSON with every float written at 17 significant digits; non-finite floats become null."""
    buf = io.StringIO()
    _write(obj, buf)
    return buf.getvalue()


def _write(obj, out):
    if obj is None or isinstance(obj, bool):
        out.write(json.dumps(obj))
    elif isinstance(obj, int):
        out.write(str(obj))
    elif isinstance(obj, float):
        out.write(format(obj, ".17g") if math.isfinite(obj) else "null")
    elif isinstance(obj, str):
        out.write(json.dumps(obj))
    elif isinstance(obj, dict):
        out.write("{")
        for i, (k, v) in enumerate(obj.items()):
            if i:
                out.write(", ")
            out.write(json.dumps(str(k)) + ": ")
            _write(v, out)
        out.write("}")
    elif isinstance(obj, (list, tuple)):
        out.write("[")
        for i, v in enumerate(obj):
            if i:
                out.write(", ")
            _write(v, out)
        out.write("]")
    else:
        _write(float(obj), out)


def _merge_negative_values(argv):
    """Join ``--opt -1:1`` into ``--opt=-1:1`` so argparse does not read the value as a flag."""
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a in _VALUE_OPTIONS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
        else:
            out.append(a)
            i += 1
    return out


def _pair(text: str, sep: str, conv):
    parts = text.split(sep)
    if len(parts) != 2:
        raise _UsageError(f"expected two values separated by {sep!r}, got {text!r}")
    try:
        return conv(parts[0]), conv(parts[1])
    except ValueError as exc:
        raise _UsageError(str(exc)) from exc


def _domain(text: str):
    (u0, u1), (v0, v1) = (_pair(p, ":", float) for p in _pair(text, ",", str))
    return u0, u1, v0, v1


def _grid(text: str):
    return _pair(text.lower(), "x", int)


def _add_surface_flags(p):
    p.add_argument("--surface", help="catalog:NAME, e.g. catalog:paraboloid-graph")
    for c in ("x", "y", "z", "w"):
        p.add_argument(f"--{c}", help=f"{c} component of X(u, v)")
    p.add_argument("--g", help="graph function for graph catalog surfaces")
    p.add_argument("--xi", help="metric field: 'auto' or four comma-separated expressions")
    p.add_argument("--domain", help="u0:u1,v0:v1")
    p.add_argument("--sigma0", choices=("euclidean", "second-derivatives"), default="euclidean",
                   help="starting transversal plane")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="equiaffine", description="Affine metrics and equiaffine planes of surfaces in R^4.")
    sub = parser.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="per-point reports on a parameter grid")
    _add_surface_flags(a)
    a.add_argument("--grid", default="11x11", help="NUxNV")
    a.add_argument("--out", help="output JSON path (default: stdout)")
    a.add_argument("--threads", type=int, help="worker threads (default: EQUIAFFINE_THREADS or CPU count)")

    lines = sub.add_parser("lines", help="integrate one asymptotic line to CSV")
    _add_surface_flags(lines)
    lines.add_argument("--seed", required=True, help="u,v")
    lines.add_argument("--branch", type=int, choices=(0, 1), default=0)
    lines.add_argument("--step", type=float, default=0.01)
    lines.add_argument("--len", type=float, default=1.0, dest="length")
    lines.add_argument("--out", help="output CSV path (default: stdout)")

    v = sub.add_parser("verify", help="run acceptance checks")
    v.add_argument("--suite", default="all", help=f"one of {', '.join(verification.SUITES)}")
    v.add_argument("--tol", type=float, help="replace every upper-bound tolerance")
    return parser


def surface_from_args(args):
    components = [getattr(args, c) for c in ("x", "y", "z", "w")]
    domain = _domain(args.domain) if args.domain else None
    if args.surface:
        if any(components):
            raise _UsageError("give either --surface or --x/--y/--z/--w, not both")
        name = args.surface.removeprefix("catalog:")
        spec = catalog(name, g=args.g, domain=domain)
    elif all(components):
        spec = parse_immersion(components, **({"domain": domain} if domain else {}))
    else:
        raise _UsageError("a surface is required: --surface catalog:NAME or all of --x --y --z --w")
    xi = None
    if args.xi:
        if args.xi.strip() == "auto":
            xi = "auto"
        else:
            parts = [p.strip() for p in args.xi.split(",")]
            if len(parts) != 4:
                raise _UsageError("--xi needs four comma-separated expressions")
            spec = spec.with_xi(parts)
    sigma0 = None if args.sigma0 == "euclidean" else args.sigma0
    return spec, xi, sigma0


def _emit(text: str, path: str | None):
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_analyze(args) -> int:
    spec, xi, sigma0 = surface_from_args(args)
    nu, nv = _grid(args.grid)
    if nu < 1 or nv < 1:
        raise _UsageError("grid sizes must be positive")
    records = analysis.analyze_grid(spec, nu, nv, xi=xi, sigma0=sigma0, threads=args.threads)
    report = {
        "schema_version": analysis.SCHEMA_VERSION,
        "surface": {"name": spec.name, "components": list(spec.texts()),
                    "xi": "auto" if xi == "auto" else (list(spec.xi_texts()) if spec.xi else None),
                    "domain": list(spec.domain)},
        "grid": [nu, nv],
        "sigma0": args.sigma0,
        "records": [r.to_dict() for r in records],
    }
    _emit(dumps(report) + "\n", args.out)
    return EXIT_OK


def cmd_lines(args) -> int:
    spec, xi, sigma0 = surface_from_args(args)
    seed = _pair(args.seed, ",", float)
    line = integrate_asymptotic_line(spec, seed, branch=args.branch, step=args.step, arclen=args.length,
                                     xi=xi, sigma0=sigma0)
    buf = io.StringIO()
    write_polyline_csv(line, buf)
    _emit(buf.getvalue(), args.out)
    sys.stderr.write(f"stopped: {line.reason} after {len(line.points)} points\n")
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.suite not in verification.SUITES:
        raise _UsageError(f"unknown suite {args.suite!r}; choose from {', '.join(verification.SUITES)}")
    results = verification.run_suite(args.suite, args.tol)
    for r in results:
        print(r.line())
    failed = [r.number for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return EXIT_FAIL if failed else EXIT_OK


def _error(kind: str, message: str, **extra) -> None:
    print(dumps({"error": kind, "message": message, **extra}))


def main(argv=None) -> int:
    argv = _merge_negative_values(list(sys.argv[1:] if argv is None else argv))
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return {"analyze": cmd_analyze, "lines": cmd_lines, "verify": cmd_verify}[args.command](args)
    except _UsageError as exc:
        _error("usage", str(exc))
        return EXIT_USAGE
    except ParseError as exc:
        _error("parse-error", str(exc), offset=exc.offset, expected=list(exc.expected))
        return EXIT_USAGE
    except UnknownIdentifier as exc:
        _error("unknown-identifier", str(exc), name=exc.name)
        return EXIT_USAGE
    except UnknownSurface as exc:
        _error("unknown-surface", str(exc), known=list(CATALOG_NAMES))
        return EXIT_USAGE
    except GeometryError as exc:
        _error(exc.status, str(exc))
        return EXIT_GEOMETRY
    except (DomainError, EquiaffineError) as exc:
        _error("domain-error", str(exc))
        return EXIT_GEOMETRY
    except ValueError as exc:
        # remaining bad inputs: inverted domains, non-positive steps, wrong component counts
        _error("usage", str(exc))
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
