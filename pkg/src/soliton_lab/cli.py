"""Command-line front end: verify, solve-ode, shoot, classify, length, sweep, report.

Every file goes under ``--out`` and is indexed in ``manifest.json``.  JSON is
written with fixed key order and floats at 17 significant digits so that
identical invocations give byte-identical files.
"""
import argparse
import csv
import hashlib
import io
import itertools
import json
import math
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__, catalog, geometry, ode
from .errors import BadSeed, InvalidSpec, SolitonLabError

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

CSV_HELP = """\
CSV outputs (one header row, floats at 17 significant digits):
  solve-ode  trajectory.csv   z, f, f1, f2 [, aux]   stored nodes; f1 = f', f2 = f''
                                                    (t instead of z and the extra
                                                    aux = Theta column for --theta)
  shoot      shoot.csv        f2, L1, L2, width     kept concave runs with two zeros
  length     length.csv       cutoff, partial       cumulative length at each cutoff
  sweep      sweep.csv        index, family, <swept params...>, lambda,
                              full_tensor, passed
  report     report.csv       family, params, lambda, expected_lambda,
                              full_tensor, passed
"""


class UsageError(Exception):
    pass


# ------------------------------------------------------------ output

def _plain(obj):
    """numpy scalars/arrays and dataclass-like objects to plain Python."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if hasattr(obj, "to_json"):
        return _plain(obj.to_json())
    return obj


def _fmt_float(v):
    if math.isnan(v):
        return '"NaN"'
    if math.isinf(v):
        return '"Infinity"' if v > 0 else '"-Infinity"'
    s = format(v, ".17g")
    if not any(c in s for c in ".en"):
        s += ".0"
    return s


def dumps(obj, indent=2, _level=0):
    """Deterministic JSON; non-finite floats become the strings NaN/Infinity."""
    obj = _plain(obj)
    pad, inner = " " * (indent * _level), " " * (indent * (_level + 1))
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        parts = [f"{inner}{json.dumps(k)}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(parts) + "\n" + pad + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, bool, str)) or v is None for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        return "[\n" + ",\n".join(inner + dumps(v, indent, _level + 1) for v in obj) + "\n" + pad + "]"
    if isinstance(obj, float):
        return _fmt_float(obj)
    return json.dumps(obj)


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def write_atomic(path, text):
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_cell(v) for v in r])
    return buf.getvalue()


class Output:
    """Collects files written under one directory and their manifest entries."""

    def __init__(self, root, command, argv):
        self.root = root
        self.command = command
        self.argv = list(argv)
        self.files = []

    def write(self, name, text, kind):
        path = os.path.join(self.root, name)
        write_atomic(path, text)
        digest = hashlib.sha256(text.encode()).hexdigest()
        self.files.append({"path": name, "kind": kind, "sha256": digest})
        return path

    def json(self, name, obj, kind="json"):
        return self.write(name, dumps(obj) + "\n", kind)

    def csv(self, name, header, rows, kind="csv"):
        return self.write(name, csv_text(header, rows), kind)

    def manifest(self, code):
        self.json("manifest.json", {
            "tool": "soliton-lab",
            "version": __version__,
            "command": self.command,
            "argv": self.argv,
            "exit_code": code,
            "files": sorted(self.files, key=lambda f: f["path"]),
        }, kind="manifest")


# ------------------------------------------------------------ parsing helpers

def _floats(text, n=None, name="value"):
    try:
        vals = [float(v) for v in str(text).split(",")]
    except ValueError:
        raise UsageError(f"{name}: expected comma-separated numbers, got {text!r}") from None
    if n is not None and len(vals) != n:
        raise UsageError(f"{name}: expected {n} numbers, got {len(vals)}")
    return vals


def _param_value(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _extra_params(rest):
    """``--name value`` pairs left over by argparse become family parameters."""
    params = {}
    i = 0
    while i < len(rest):
        tok = rest[i]
        if not tok.startswith("--") or len(tok) <= 2:
            raise UsageError(f"unexpected argument {tok!r}")
        key = tok[2:]
        if "=" in key:
            key, val = key.split("=", 1)
            i += 1
        else:
            if i + 1 >= len(rest):
                raise UsageError(f"parameter {tok} needs a value")
            val = rest[i + 1]
            i += 2
        params[key.replace("-", "_")] = _param_value(val)
    return params


def _spec_from(args, rest):
    params = dict(_extra_params(rest))
    for kv in args.param or []:
        if "=" not in kv:
            raise UsageError(f"--param expects key=value, got {kv!r}")
        k, v = kv.split("=", 1)
        params[k] = _param_value(v)
    return catalog.FamilySpec(args.family, params, args.lam)


def _tolerances(items):
    tol = {}
    for kv in items or []:
        if "=" not in kv:
            raise UsageError(f"--tol expects key=value, got {kv!r}")
        k, v = kv.split("=", 1)
        if k not in catalog.DEFAULT_TOLERANCES:
            raise UsageError(f"unknown tolerance {k!r}; choose from {sorted(catalog.DEFAULT_TOLERANCES)}")
        tol[k] = float(v)
    return tol


def _controls(args, span_default):
    span = tuple(_floats(args.span, 2, "--span")) if args.span else span_default
    kw = dict(span=span)
    for name in ("rtol", "atol", "blowup", "eps", "max_step"):
        v = getattr(args, name, None)
        if v is not None:
            kw[name] = v
    return ode.Controls(**kw)


def _mode(text):
    """auto | series | offset | offset:EPS"""
    if text.startswith("offset:"):
        try:
            return "offset", float(text.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"bad --mode {text!r}") from None
    if text not in ("auto", "series", "offset"):
        raise UsageError(f"bad --mode {text!r}; use auto, series, offset or offset:EPS")
    return text, None


# ------------------------------------------------------------ commands

def cmd_verify(args, rest, out):
    tol = _tolerances(args.tol)
    if args.all or args.explicit:
        if args.family or rest or args.param or args.lam is not None:
            raise UsageError("--all/--explicit take no family or parameters")
        specs = catalog.default_specs(explicit_only=args.explicit)
        reports = catalog.verify_families(specs, args.workers, tol, not args.no_geometry)
    else:
        if not args.family:
            raise UsageError("verify needs --family (or --all / --explicit)")
        spec = _spec_from(args, rest)
        grid = None
        if args.grid:
            grid = catalog.default_grid(spec, n=args.grid)
        reports = [catalog.verify_family(spec, grid, tol, not args.no_geometry)]
    for r in reports:
        print(r.table())
    passed = all(r.passed for r in reports)
    out.json("verify.json", {"passed": passed, "reports": [r.to_json() for r in reports]})
    return EXIT_PASS if passed else EXIT_FAIL


def _solution_rows(sol):
    keys = [k for k in ("z", "f", "f1", "f2", "aux") if k in sol.nodes]
    header = ["t" if (k == "z" and sol.param == "t") else k for k in keys]
    return header, zip(*(sol.nodes[k] for k in keys))


def cmd_solve_ode(args, rest, out):
    if rest:
        raise UsageError(f"unexpected arguments {rest}")
    if (args.star is None) == (args.theta is None):
        raise UsageError("solve-ode needs exactly one of --star a0,b0,lam or --theta VARIANT")
    if args.star is not None:
        a0, b0, lam = _floats(args.star, 3, "--star")
        if args.f0 is None or args.f2 is None:
            raise UsageError("--star needs --f0 and --f2")
        mode, eps = _mode(args.mode)
        ctl = _controls(args, (-10.0, 10.0))
        if eps is not None:
            ctl.eps = eps
        sol = ode.integrate_star(a0, b0, lam, (args.f0, args.f1, args.f2), mode=mode, controls=ctl)
    else:
        if args.lam is None or args.start is None:
            raise UsageError("--theta needs --lambda and --start th,th1,th2")
        ctl = _controls(args, (0.0, 4.0))
        sol = ode.integrate_theta(args.theta, args.lam, _floats(args.start, 3, "--start"),
                                  t0=args.t0, controls=ctl)
    header, rows = _solution_rows(sol)
    out.csv("trajectory.csv", header, rows)
    summary = {
        "problem": sol.problem,
        "start": sol.start,
        "interval": list(sol.interval),
        "L1": sol.L1,
        "L2": sol.L2,
        "concave": sol.is_concave(),
        "nodes": len(sol.nodes["z"]),
        "residual": sol.residual_profile(),
        "events": [e.to_json() for e in sol.events],
    }
    out.json("events.json", summary)
    print(f"interval [{sol.interval[0]:.10g}, {sol.interval[1]:.10g}]  L1 {sol.L1}  L2 {sol.L2}")
    for e in sol.events:
        print(f"  {e.kind:<18} {e.location:.12g}")
    return EXIT_PASS


def cmd_shoot(args, rest, out):
    if rest:
        raise UsageError(f"unexpected arguments {rest}")
    a0, b0, lam = _floats(args.star, 3, "--star")
    lo, hi, n = _floats(args.f2_range, 3, "--f2-range")
    if not n >= 1 or n != int(n):
        raise UsageError("--f2-range count must be a positive integer")
    ctl = _controls(args, (-10.0, 10.0))
    hits = ode.shoot_boundary_solutions(a0, b0, lam, args.f0, (lo, hi, int(n)), controls=ctl)
    rows = [(f2, s.L1, s.L2, s.L2 - s.L1) for f2, s in hits]
    out.csv("shoot.csv", ["f2", "L1", "L2", "width"], rows)
    out.json("shoot.json", {"problem": {"a0": a0, "b0": b0, "lam": lam, "f0": args.f0},
                            "f2_range": [lo, hi, int(n)],
                            "solutions": [{"f2": f2, "L1": s.L1, "L2": s.L2} for f2, s in hits]})
    print(f"{len(hits)} of {int(n)} initial values give concave solutions with two zeros")
    return EXIT_PASS


def cmd_classify(args, rest, out):
    spec = _spec_from(args, rest)
    c = catalog.build_family(spec)
    fam = catalog._REGISTRY[spec.family]
    p = spec.resolved
    seed = _floats(args.seed, 2, "--seed") if args.seed else (fam.seed(p) if fam.seed else None)
    if seed is None:
        raise UsageError(f"{spec.family} has no default seed; pass --seed x,y")
    region = geometry.compute_domain(c.m, seed)
    got, why = geometry.classify_domain(region)
    want = fam.domain(p) if fam.domain else None
    probes = []
    ok = want is None or got == want
    for pr in (fam.probes(p) if fam.probes else []):
        try:
            bc = geometry.boundary_character(c.m, pr.point, pr.inward)
            kind, detail = bc.kind, bc.to_json()
        except SolitonLabError as exc:
            kind, detail = None, f"{type(exc).__name__}: {exc}"
        probes.append({"label": pr.label, "point": list(pr.point), "expected": pr.expected,
                       "kind": kind, "passed": kind == pr.expected, "detail": detail})
        ok = ok and kind == pr.expected
    out.json("classify.json", {
        "spec": spec.to_json(), "seed": list(seed), "class": got, "expected": want, "reason": why,
        "x_window": list(region.x_window), "y_window": list(region.y_window),
        "zero_rays": list(region.zero_rays), "zero_slopes": region.zero_slopes(),
        "sector": list(region.sector) if region.sector else None,
        "closes": region.closes, "probes": probes, "passed": ok})
    print(f"{spec.family}: class {got} ({why})" + (f", expected {want}" if want else ""))
    for pr in probes:
        print(f"  {'PASS' if pr['passed'] else 'FAIL'}  {pr['label']}: {pr['kind']} (expected {pr['expected']})")
    return EXIT_PASS if ok else EXIT_FAIL


def _curve(text):
    kind, _, rest = text.partition(":")
    if kind == "vertical":
        return geometry.Curve.vertical(_floats(rest, 1, "--curve")[0])
    if kind == "horizontal":
        return geometry.Curve.horizontal(_floats(rest, 1, "--curve")[0])
    if kind == "radial":
        return geometry.Curve.radial(*_floats(rest, 2, "--curve"))
    if kind == "segment":
        v = _floats(rest, 4, "--curve")
        return geometry.Curve.segment(v[:2], v[2:])
    raise UsageError("--curve is vertical:X, horizontal:Y, radial:DX,DY or segment:X0,Y0,X1,Y1")


def cmd_length(args, rest, out):
    spec = _spec_from(args, rest)
    c = catalog.build_family(spec)
    curve = _curve(args.curve)
    res = geometry.path_length(c.m, curve, args.start_tau, args.end_tau,
                               singular_end="end" if args.singular_end else None)
    out.json("length.json", {"spec": spec.to_json(), "curve": curve.label,
                             "tau": [args.start_tau, args.end_tau], "result": res.to_json()})
    out.csv("length.csv", ["cutoff", "partial"], zip(res.cutoffs, res.partials))
    verdict = "Finite" if res.finite else "Divergent"
    print(f"{curve.label}: {verdict} ({res.kind}) value {res.value:.12g} rate {res.rate:.6g}")
    return EXIT_PASS


def _axis(v, name):
    if isinstance(v, dict):
        if "values" in v:
            return list(v["values"])
        if {"start", "stop", "num"} <= set(v):
            return np.linspace(v["start"], v["stop"], int(v["num"])).tolist()
        raise InvalidSpec(f"range for {name} needs 'values' or 'start'/'stop'/'num'")
    if isinstance(v, list):
        return v
    return [v]


def sweep_tuples(manifest):
    """Expand a sweep manifest into (family, params, lambda) tuples.

    The manifest is a list of (or one) blocks
    ``{"family": F, "params": {...}, "ranges": {name: [values] | {"start", "stop", "num"}},
    "lambda": optional, "lambda_offset": optional}``; ranges form a Cartesian product.
    """
    blocks = manifest if isinstance(manifest, list) else manifest.get("sweeps", [manifest])
    out = []
    for b in blocks:
        if "family" not in b:
            raise InvalidSpec("sweep block needs a 'family'")
        base = dict(b.get("params", {}))
        ranges = b.get("ranges", {})
        names = list(ranges)
        axes = [_axis(ranges[k], k) for k in names]
        for combo in itertools.product(*axes):
            p = dict(base)
            p.update(zip(names, combo))
            spec = catalog.FamilySpec(b["family"], p, b.get("lambda"))
            if b.get("lambda_offset") is not None:
                spec.lam = spec.expected_lambda() + float(b["lambda_offset"])
            out.append((spec, names))
    return out


def _sweep_one(job):
    idx, spec, tol, geo, root = job
    try:
        rep = catalog.verify_family(spec, None, tol, geo)
        body = rep.to_json()
        passed, lam = rep.passed, rep.lam
        ft = next((it.value for it in rep.items if it.name == "full_tensor"), None)
    except SolitonLabError as exc:
        body = {"spec": spec.to_json(), "passed": False, "error": f"{type(exc).__name__}: {exc}"}
        passed, lam, ft = False, spec.lam, None
    name = os.path.join("sweep", f"{idx:05d}.json")
    text = dumps(body) + "\n"
    write_atomic(os.path.join(root, name), text)
    return idx, name, hashlib.sha256(text.encode()).hexdigest(), passed, lam, ft


def cmd_sweep(args, rest, out):
    if rest:
        raise UsageError(f"unexpected arguments {rest}")
    try:
        with open(args.manifest) as fh:
            manifest = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read sweep manifest: {exc}") from None
    tuples = sweep_tuples(manifest)
    tol = _tolerances(args.tol)
    jobs = [(i, s, tol, not args.no_geometry, out.root) for i, (s, _) in enumerate(tuples)]
    workers = catalog.worker_count(args.workers)
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_one, jobs))
    else:
        results = [_sweep_one(j) for j in jobs]
    swept = sorted({k for _, names in tuples for k in names})
    rows = []
    for (idx, name, digest, passed, lam, ft), (spec, _) in zip(results, tuples):
        out.files.append({"path": name, "kind": "json", "sha256": digest})
        p = spec.resolved
        rows.append([idx, spec.family] + [p.get(k) for k in swept] + [lam, ft, passed])
    out.csv("sweep.csv", ["index", "family"] + swept + ["lambda", "full_tensor", "passed"], rows)
    n_pass = sum(1 for r in results if r[3])
    print(f"{n_pass} of {len(results)} parameter tuples PASS")
    return EXIT_PASS if n_pass == len(results) else EXIT_FAIL


def cmd_report(args, rest, out):
    if rest:
        raise UsageError(f"unexpected arguments {rest}")
    specs = catalog.default_specs(explicit_only=args.explicit)
    reports = catalog.verify_families(specs, args.workers, _tolerances(args.tol), not args.no_geometry)
    rows = []
    for r in reports:
        print(r.table())
        ft = next((it.value for it in r.items if it.name == "full_tensor"), None)
        rows.append([r.spec.family, json.dumps(r.spec.resolved, sort_keys=True), r.lam,
                     r.expected_lam, ft, r.passed])
    out.csv("report.csv", ["family", "params", "lambda", "expected_lambda", "full_tensor", "passed"], rows)
    passed = all(r.passed for r in reports)
    out.json("report.json", {"passed": passed, "reports": [r.to_json() for r in reports]})
    return EXIT_PASS if passed else EXIT_FAIL


# ------------------------------------------------------------ parser

def _family_args(p, required=True):
    p.add_argument("--family", required=required, choices=catalog.FAMILIES)
    p.add_argument("--lambda", dest="lam", type=float, default=None,
                   help="lambda to test (default: the family's closed-form value)")
    p.add_argument("--param", action="append", metavar="KEY=VALUE",
                   help="family parameter; plain --KEY VALUE also works")


def _verify_args(p):
    p.add_argument("--tol", action="append", metavar="KEY=VALUE",
                   help="override a tolerance (" + ", ".join(catalog.DEFAULT_TOLERANCES) + ")")
    p.add_argument("--no-geometry", action="store_true", help="skip domain and boundary checks")
    p.add_argument("--workers", type=int, default=None, help="process count (capped by SOLITON_LAB_THREADS)")


def _ode_args(p):
    p.add_argument("--span", help="lo,hi integration range")
    p.add_argument("--rtol", type=float)
    p.add_argument("--atol", type=float)
    p.add_argument("--blowup", type=float, help="|f'| or |f''| level that stops integration")
    p.add_argument("--max-step", dest="max_step", type=float)


class _Parser(argparse.ArgumentParser):
    def __init__(self, *a, **kw):
        kw.setdefault("allow_abbrev", False)
        super().__init__(*a, **kw)


def build_parser():
    top = argparse.ArgumentParser(
        prog="soliton-lab", description=__doc__.splitlines()[0], epilog=CSV_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter, allow_abbrev=False)
    top.add_argument("--out", default="soliton_lab_out", help="output directory (default: %(default)s)")
    top.add_argument("--version", action="version", version=f"soliton-lab {__version__}")
    # family params ride along as --name value, so option prefixes must not match
    sub = top.add_subparsers(dest="command", required=True, parser_class=_Parser)
    fmt = argparse.RawDescriptionHelpFormatter

    p = sub.add_parser("verify", help="verify a family (or the whole catalog)", epilog=CSV_HELP,
                       formatter_class=fmt,
                       description="Residuals, inferred lambda, relations, domain class and "
                                   "boundary types.  Exit 1 when any check fails.")
    _family_args(p, required=False)
    _verify_args(p)
    p.add_argument("--grid", type=int, help="n for an n x n grid (default 15)")
    p.add_argument("--all", action="store_true", help="every catalogued family with defaults")
    p.add_argument("--explicit", action="store_true", help="every closed-form family with defaults")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("solve-ode", help="integrate the profile or theta equation",
                       epilog=CSV_HELP, formatter_class=fmt)
    p.add_argument("--star", metavar="A0,B0,LAMBDA", help="homogeneous-profile equation")
    p.add_argument("--theta", type=int, choices=(1, 2), help="theta equation variant")
    p.add_argument("--f0", type=float)
    p.add_argument("--f1", type=float, default=0.0)
    p.add_argument("--f2", type=float)
    p.add_argument("--mode", default="auto", help="auto, series, offset or offset:EPS")
    p.add_argument("--eps", type=float, help="offset distance (also settable through --mode)")
    p.add_argument("--lambda", dest="lam", type=float, help="lambda for --theta")
    p.add_argument("--start", metavar="TH,TH1,TH2", help="theta data at t0")
    p.add_argument("--t0", type=float, default=1.0)
    _ode_args(p)
    p.set_defaults(func=cmd_solve_ode)

    p = sub.add_parser("shoot", help="scan f''(0) for concave solutions with two zeros",
                       epilog=CSV_HELP, formatter_class=fmt)
    p.add_argument("--star", required=True, metavar="A0,B0,LAMBDA")
    p.add_argument("--f0", type=float, default=1.0)
    p.add_argument("--f2-range", dest="f2_range", required=True, metavar="LO,HI,N",
                   help="f''(0) grid; write --f2-range=-2,-0.5,8 when LO is negative")
    p.add_argument("--eps", type=float)
    _ode_args(p)
    p.set_defaults(func=cmd_shoot)

    p = sub.add_parser("classify", help="domain class and boundary types of a family")
    _family_args(p)
    p.add_argument("--seed", metavar="X,Y", help="interior point (default: the family's seed)")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("length", help="metric length of a planar path", epilog=CSV_HELP,
                       formatter_class=fmt)
    _family_args(p)
    p.add_argument("--curve", required=True,
                   help="vertical:X, horizontal:Y, radial:DX,DY or segment:X0,Y0,X1,Y1")
    p.add_argument("--from", dest="start_tau", type=float, required=True)
    p.add_argument("--to", dest="end_tau", type=float, required=True, help="may be inf")
    p.add_argument("--singular-end", action="store_true",
                   help="treat the end point as a singular end (halving cutoffs)")
    p.set_defaults(func=cmd_length)

    p = sub.add_parser("sweep", help="verify every tuple of a JSON parameter manifest",
                       epilog=CSV_HELP + "\n" + sweep_tuples.__doc__, formatter_class=fmt)
    p.add_argument("--manifest", required=True)
    _verify_args(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("report", help="verify the default catalog and tabulate it",
                       epilog=CSV_HELP, formatter_class=fmt)
    p.add_argument("--explicit", action="store_true", help="closed-form families only")
    _verify_args(p)
    p.set_defaults(func=cmd_report)
    return top


def run(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args, rest = parser.parse_known_args(argv)
    except SystemExit as exc:
        return EXIT_PASS if exc.code == 0 else EXIT_USAGE
    if rest and args.command not in ("verify", "classify", "length"):
        print(f"soliton-lab: unrecognized arguments: {' '.join(rest)}", file=sys.stderr)
        return EXIT_USAGE
    out = Output(args.out, args.command, argv)
    try:
        code = args.func(args, rest, out)
    except (UsageError, InvalidSpec, BadSeed) as exc:
        print(f"soliton-lab {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SolitonLabError as exc:
        print(f"soliton-lab {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        code = EXIT_FAIL
        out.json("error.json", {"error": type(exc).__name__, "message": str(exc)})
    out.manifest(code)
    return code


def main():
    sys.exit(run())
