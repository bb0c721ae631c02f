"""Command-line front end.

Complex flags are written per coordinate as ``re,im`` pairs joined by
``;`` (``--at "0.2,0;0.1,0"``).  Without a ``;`` a comma list of ``d``
bare reals is accepted (``--at 0.2,0.1``), and for ``d = 1`` a single
pair ``re,im`` is read as one complex number.  Decimal strings go through
:func:`float`, which rounds correctly, so parsing is bit-exact.

Exit status: 0 on success (a failing diagnostic verdict is still a
success), 2 for domain, parse and evaluation errors, 3 for resource
limits, 64 for usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from . import analysis, cauchy, holomorphy, quadrature, series
from .core import CPoint, CurveC1, MultiIndex, Polydisc, complex_to_json
from .errors import PolydiscError, ResolutionError, ResourceError
from .expr import parse

EXIT_OK = 0
EXIT_DOMAIN = 2
EXIT_RESOURCE = 3
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


# ---------------------------------------------------------------------------
# flag parsing


def parse_complex_tuple(text: str, d: int) -> tuple[complex, ...]:
    """Read a point in C^d from a flag value (see the module docstring)."""
    text = text.strip()
    if ";" in text:
        coords = []
        for part in text.split(";"):
            fields = [f.strip() for f in part.split(",")]
            if len(fields) == 1:
                coords.append(complex(float(fields[0]), 0.0))
            elif len(fields) == 2:
                coords.append(complex(float(fields[0]), float(fields[1])))
            else:
                raise ValueError(f"coordinate {part!r} is not 're' or 're,im'")
    else:
        fields = [float(f) for f in text.split(",")]
        if len(fields) == d:
            coords = [complex(f, 0.0) for f in fields]
        elif d == 1 and len(fields) == 2:
            coords = [complex(fields[0], fields[1])]
        elif len(fields) == 1:
            coords = [complex(fields[0], 0.0)] * d
        else:
            raise ValueError(f"{text!r} does not describe a point in C^{d}")
    if len(coords) != d:
        raise ValueError(f"{text!r} has {len(coords)} coordinates, expected {d}")
    return tuple(coords)


def parse_reals(text: str, d: int) -> tuple[float, ...]:
    vals = [float(f) for f in text.split(",")]
    if len(vals) == 1:
        vals = vals * d
    if len(vals) != d:
        raise ValueError(f"{text!r} has {len(vals)} entries, expected {d}")
    return tuple(vals)


def parse_ints(text: str, d: int | None = None) -> tuple[int, ...]:
    vals = [int(f) for f in text.split(",")]
    if d is not None and len(vals) == 1:
        vals = vals * d
    if d is not None and len(vals) != d:
        raise ValueError(f"{text!r} has {len(vals)} entries, expected {d}")
    return tuple(vals)


def format_complex(z: complex, digits: int = 12) -> str:
    """``a+bi`` with components below ``10^-digits`` of the magnitude shown as 0."""
    z = complex(z)
    scale = max(abs(z.real), abs(z.imag))
    cut = scale * 10.0 ** -digits
    re = 0.0 if abs(z.real) <= cut else z.real
    im = 0.0 if abs(z.imag) <= cut else z.imag
    return f"{re + 0.0:.{digits}g}{im + 0.0:+.{digits}g}i"


# ---------------------------------------------------------------------------
# config resolution


def _load_expr_source(args) -> str:
    if args.expr is not None:
        return args.expr
    if args.expr_file is None:
        raise UsageError(f"polydisc {args.command}: error: one of --expr or --expr-file is required")
    text = Path(args.expr_file).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError:
        return text.strip()
    if isinstance(doc, dict) and "expr" in doc:
        return doc["expr"]
    raise ValueError(f"{args.expr_file} has no 'expr' key")


def _space(expression, args):
    return expression.space(tuple(args.seminorm or ()))


def _function(args):
    expression = parse(_load_expr_source(args), args.d)
    return expression, expression.to_integrand(args.d, _space(expression, args))


def _disc(args, default_center=None) -> Polydisc:
    if args.center is not None:
        center = parse_complex_tuple(args.center, args.d)
    elif default_center is not None:
        center = default_center
    else:
        center = (0j,) * args.d
    return Polydisc(CPoint(center), parse_reals(args.radii, args.d))


def _nodes(args):
    return parse_ints(args.nodes, args.d)


def _config(args) -> dict:
    skip = {"func", "out", "format", "text"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


# ---------------------------------------------------------------------------
# subcommands


def cmd_taylor(args):
    if args.samples is not None:
        samples = cauchy.BoundarySamples.from_json(json.loads(Path(args.samples).read_text()))
        args.d = samples.d
    else:
        _, f = _function(args)
        samples = cauchy.sample_boundary(f, _disc(args), _nodes(args))
    result = cauchy.taylor_coefficients(samples, args.max_degree, args.method)
    doc = result.to_json()
    doc["expr"] = result.to_expression()
    return doc, _series_rows(result)


def _series_rows(result):
    d = result.d
    header = [f"beta{j + 1}" for j in range(d)] + ["entry", "re", "im"]
    rows = [header]
    for beta, coeff in result.items():
        for idx in np.ndindex(coeff.shape):
            v = coeff[idx]
            rows.append(list(beta.exponents) + ["/".join(map(str, idx)) or "0",
                                                repr(float(v.real)), repr(float(v.imag))])
    return rows


def cmd_deriv(args):
    _, f = _function(args)
    beta = MultiIndex(parse_ints(args.beta, args.d))
    at = CPoint(parse_complex_tuple(args.at, args.d))
    samples = cauchy.sample_boundary(f, _disc(args), _nodes(args))
    value = cauchy.cauchy_derivative(samples, at, beta)
    bound = cauchy.cauchy_bound(samples, beta, at)
    doc = {"beta": list(beta.exponents), "at": complex_to_json(at.array()), "value": value.to_json(),
           "flags": list(value.flags), "norms": value.norms(), "cauchy_bound": bound}
    text = " ".join(format_complex(v) for v in value.entries.ravel())
    return doc, _value_rows(value), text


def _value_rows(value):
    rows = [["entry", "re", "im"]]
    for idx in np.ndindex(value.entries.shape):
        v = value.entries[idx]
        rows.append(["/".join(map(str, idx)) or "0", repr(float(v.real)), repr(float(v.imag))])
    return rows


def cmd_integrate(args):
    _, f = _function(args)
    if args.curve == "torus":
        curve = CurveC1.torus(_disc(args))
        nodes = _nodes(args)
    else:
        if args.start is None or args.end is None:
            raise ValueError("a segment needs --from and --to")
        curve = CurveC1.segment(parse_complex_tuple(args.start, args.d),
                                parse_complex_tuple(args.end, args.d))
        nodes = parse_ints(args.panels, args.d)
    value = quadrature.integrate_curve(f, curve, nodes)
    doc = {"curve": args.curve, "length": curve.length(), "value": value.to_json(),
           "flags": list(value.flags), "norms": value.norms(),
           "sup_bound": quadrature.sup_bound(f, curve, nodes)}
    text = " ".join(format_complex(v) for v in value.entries.ravel())
    return doc, _value_rows(value), text


def cmd_check_holo(args):
    expression, f = _function(args)
    disc = _disc(args)
    nodes = int(_nodes(args)[0])
    if args.check == "all":
        report = holomorphy.holomorphy_report(f, disc, nodes, args.h, args.tol)
    elif args.check == "cr":
        report = holomorphy.cr_residual(f, holomorphy.interior_points(disc), args.h, domain=disc)
    elif args.check == "spectrum":
        report = holomorphy.negative_spectrum_check(cauchy.sample_boundary(f, disc, nodes), args.tol)
    elif args.check == "separate":
        report = holomorphy.separate_holomorphy_check(f, tol=args.tol, nodes=nodes, domain=disc)
    else:
        report = holomorphy.weak_holomorphy_probe(f, boundary=disc, tol=args.tol, nodes=nodes)
    doc = report.to_json()
    doc["expression_tainted"] = expression.tainted
    return doc, _flat_rows(doc), report.verdict


def cmd_liouville(args):
    _, f = _function(args)
    center = parse_complex_tuple(args.center, args.d) if args.center else None
    radii = [float(r) for r in args.radii_seq.split(",")]
    result = series.liouville_test(f, args.k, radii, tol=args.tol, center=center, d=args.d)
    doc = result.to_json()
    return doc, _flat_rows({k: v for k, v in doc.items() if k != "checked"}), str(result.is_poly_deg_k).lower()


def cmd_extend(args):
    _, f = _function(args)
    thin_poly = parse(args.thin, args.d).to_integrand(args.d)
    thin = analysis.ThinSetSpec(thin_poly, args.d, args.tau)
    target = parse_complex_tuple(args.target, args.d)
    disc = _disc(args, default_center=target)
    value = analysis.riemann_extend(f, thin, target, [disc], int(_nodes(args)[0]))
    doc = {"target": complex_to_json(np.array(target)), "value": value.to_json(),
           "flags": list(value.flags), "norms": value.norms()}
    text = " ".join(format_complex(v) for v in value.entries.ravel())
    return doc, _value_rows(value), text


def cmd_approx(args):
    _, f = _function(args)
    result = analysis.approx_polynomial(f, _disc(args), args.eps, degree_cap=args.degree_cap,
                                        seed=args.seed)
    doc = result.to_json()
    return doc, _flat_rows({k: v for k, v in doc.items() if k != "polynomial"}), None


def cmd_certify_identity(args):
    _, f = _function(args)
    other = parse(args.other, args.d)
    g = other.to_integrand(args.d, f.space)
    result = analysis.identity_certify(f, g, _disc(args), args.degree, args.tol)
    doc = result.to_json()
    return doc, _flat_rows(doc), str(result.equal_on_disc).lower()


def _flat_rows(doc) -> list:
    rows = [["key", "value"]]

    def walk(prefix, obj):
        if isinstance(obj, dict):
            for k in sorted(obj):
                walk(f"{prefix}.{k}" if prefix else str(k), obj[k])
        elif isinstance(obj, list):
            for i, v in enumerate(obj):
                walk(f"{prefix}[{i}]", v)
        else:
            rows.append([prefix, json.dumps(obj)])

    walk("", doc)
    return rows


# ---------------------------------------------------------------------------
# parser


def _common(p, radii="1", nodes="64", with_disc=True, with_nodes=True):
    src = p.add_mutually_exclusive_group()
    src.add_argument("--expr", help="expression in z1..zd (z when d=1)")
    src.add_argument("--expr-file", help="text file, or JSON fixture with an 'expr' key")
    p.add_argument("--d", type=int, default=1, help="number of complex variables (default 1)")
    if with_disc:
        p.add_argument("--center", help="polydisc center (default origin)")
        p.add_argument("--radii", default=radii, help=f"polydisc radii (default {radii})")
        if with_nodes:
            p.add_argument("--nodes", default=nodes, help=f"boundary nodes per axis (default {nodes})")
    p.add_argument("--seminorm", action="append",
                   help="seminorm of the value space: sup, euclid, op, coord[i], coord[i,j] (repeatable)")
    p.add_argument("--format", choices=("json", "csv", "text"), default=None,
                   help="output format (default json; deriv, integrate and extend default to text)")
    p.add_argument("--out", help="write the result to this path instead of standard output")
    p.add_argument("--seed", type=int, default=analysis.MODULUS_SEED,
                   help="seed for randomized sampling")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="polydisc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("taylor", help="Taylor coefficients from boundary samples",
                       description="Power series expansion: Taylor coefficients at the center of a "
                                   "polydisc from a DFT of distinguished-boundary samples.")
    _common(p)
    p.add_argument("--max-degree", type=int, required=True, help="largest total degree |beta|")
    p.add_argument("--method", choices=("auto", "fft", "direct"), default="auto")
    p.add_argument("--samples", help="BoundarySamples JSON to use instead of sampling --expr")
    p.set_defaults(func=cmd_taylor, text=False)

    p = sub.add_parser("deriv", help="partial derivative by Cauchy's integral formula",
                       description="Cauchy's integral formula on a polydisc: d^beta f at an interior point.")
    _common(p)
    p.add_argument("--beta", required=True, help="multi-index, e.g. 1,2")
    p.add_argument("--at", required=True, help="interior evaluation point")
    p.set_defaults(func=cmd_deriv, text=True)

    p = sub.add_parser("integrate", help="integral over a tensor-product curve",
                       description="Curve integral of a vector-valued function over a product of "
                                   "C1 curves: the distinguished boundary or a straight segment.")
    _common(p)
    p.add_argument("--curve", choices=("torus", "segment"), default="torus")
    p.add_argument("--from", dest="start", help="segment start point")
    p.add_argument("--to", dest="end", help="segment end point")
    p.add_argument("--panels", default="8", help="Gauss-Legendre panels per axis for segments")
    p.set_defaults(func=cmd_integrate, text=True)

    p = sub.add_parser("check-holo", help="holomorphy diagnostics",
                       description="Equivalent characterisations of holomorphy, tested numerically: "
                                   "Cauchy-Riemann residual, negative boundary spectrum, separate "
                                   "holomorphy on slices and weak holomorphy through functionals.")
    _common(p)
    p.add_argument("--check", choices=("all", "cr", "spectrum", "separate", "weak"), default="all")
    p.add_argument("--tol", type=float, default=holomorphy.SPECTRAL_TOL)
    p.add_argument("--h", type=float, default=holomorphy.CR_STEP, help="finite-difference step")
    p.set_defaults(func=cmd_check_holo, text=False)

    p = sub.add_parser("liouville", help="polynomial-growth test for entire functions",
                       description="Liouville's theorem: decide whether an entire function is a "
                                   "polynomial of degree at most k from coefficients on growing polydiscs.")
    _common(p, with_disc=False)
    p.add_argument("--k", type=int, required=True, help="degree to test")
    p.add_argument("--radii-seq", default="2,8", help="increasing radii (default 2,8)")
    p.add_argument("--center", help="expansion center (default origin)")
    p.add_argument("--tol", type=float, default=series.LIOUVILLE_TOL)
    p.set_defaults(func=cmd_liouville, text=False)

    p = sub.add_parser("extend", help="removable-singularity extension",
                       description="Riemann extension theorem: value of the holomorphic extension of a "
                                   "function bounded near a thin set p = 0.")
    _common(p, radii="0.5")
    p.add_argument("--thin", required=True, help="polynomial p whose zero set is removed")
    p.add_argument("--target", required=True, help="point on or near the thin set")
    p.add_argument("--tau", type=float, default=None, help="thin-set exclusion threshold")
    p.set_defaults(func=cmd_extend, text=True)

    p = sub.add_parser("approx", help="polynomial approximation on a closed polydisc",
                       description="Density of polynomials in the polydisc algebra: a polynomial "
                                   "within 2 eps of f on the closed polydisc.")
    _common(p, with_nodes=False)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--degree-cap", type=int, default=analysis.DEGREE_CAP)
    p.set_defaults(func=cmd_approx, text=False)

    p = sub.add_parser("certify-identity", help="identity theorem check",
                       description="Identity theorem: compare all Taylor coefficients of f - g up to a "
                                   "degree at the polydisc center.")
    _common(p)
    p.add_argument("--other", required=True, help="second expression g")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--tol", type=float, default=analysis.IDENTITY_TOL)
    p.set_defaults(func=cmd_certify_identity, text=False)
    return parser


# ---------------------------------------------------------------------------
# output


def _render(fmt: str, doc, rows, text) -> str:
    if fmt == "json":
        return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(rows)
        return buf.getvalue()
    return f"{text}\n"


def run(argv=None, stdout=None, stderr=None) -> int:
    """Execute one command; returns the process exit status."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_USAGE
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            out = args.func(args)
        for w in caught:
            print(f"polydisc: warning: {w.message}", file=stderr)
    except UsageError as exc:
        print(exc, file=stderr)
        return EXIT_USAGE
    except ResolutionError as exc:
        print(f"polydisc: error: {exc}", file=stderr)
        return EXIT_RESOURCE
    except ResourceError as exc:
        print(f"polydisc: error: {exc}", file=stderr)
        return EXIT_RESOURCE
    except (PolydiscError, ValueError, OSError, KeyError) as exc:
        print(f"polydisc: error: {exc}", file=stderr)
        return EXIT_DOMAIN
    doc, rows, *rest = out
    text = rest[0] if rest and rest[0] is not None else None
    fmt = args.format or ("text" if args.text else "json")
    if fmt == "text" and text is None:
        fmt = "json"
    if fmt == "json":
        doc = dict(doc, run={"command": args.command, "config": _config(args)})
    rendered = _render(fmt, doc, rows, text)
    if args.out:
        Path(args.out).write_text(rendered)
    else:
        stdout.write(rendered)
    return EXIT_OK


def main(argv=None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
