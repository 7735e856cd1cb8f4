"""Command-line front end: ``conemono {classify,gallery,synth,tv,venn}``.

Exit codes: 0 when every requested check holds (or the command simply
succeeded), 2 when a check or venn signature fails, 1 on bad input.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .classify import DEFINITIONS, ClassifyParams, classify
from .construct import load_cloud, synth_field
from .field import FieldError, GridDomain, load_field, save_field, save_pgm
from .gallery import gallery_generate, gallery_names
from .geometry import Cone, ConeError, parse_cone
from .variation import PERIMETERS, tv_report
from .venn import format_table, load_expected, run_venn

EMITS = ("json", "csv", "pgm")


def _bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected true/false, got {text!r}")


def _csv_list(text):
    return [t.strip() for t in text.split(",") if t.strip()]


def _floats(text):
    try:
        return [float(t) for t in _csv_list(text)]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _param_pair(text):
    key, sep, val = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected KEY=VALUE, got {text!r}")
    try:
        return key, float(val)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"{key}: {exc}") from exc


def dumps(obj):
    """Deterministic JSON: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def _write_text(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _sibling(out, suffix, what):
    if out is None:
        raise FieldError(f"--emit {what} needs --out")
    return Path(out).with_suffix(suffix)


def _field_source(p):
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--field", metavar="PATH", help="field JSON file")
    group.add_argument("--gallery", metavar="NAME", help=f"gallery field: {', '.join(gallery_names())}")
    p.add_argument("--nx", type=int, default=65, help="gallery grid size (default 65)")


def _load_source(args):
    if args.field is not None:
        return load_field(args.field), args.field
    return gallery_generate(args.gallery, nx=args.nx), f"gallery:{args.gallery}"


def _cone_arg(p, help_text):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--cone", metavar="LO:HI", help=help_text)
    g.add_argument("--cone-file", metavar="PATH", help="cone JSON file")


def _load_cone(args):
    if args.cone is not None:
        return parse_cone(args.cone)
    if args.cone_file is not None:
        try:
            return Cone.from_dict(json.loads(Path(args.cone_file).read_text(encoding="utf-8")))
        except json.JSONDecodeError as exc:
            raise ConeError(f"{args.cone_file}: not JSON ({exc})") from exc
    return None


def _params(args):
    kw = {}
    for name in ("eps", "q", "subdomains", "seed", "tau"):
        v = getattr(args, name, None)
        if v is not None:
            kw[name] = v
    if getattr(args, "radii", None) is not None:
        kw["radii"] = tuple(args.radii)
    if getattr(args, "closed_domain", None) is not None:
        kw["closed_domain"] = args.closed_domain
    return ClassifyParams(**kw)


def _params_flags(p, seed_default=None):
    p.add_argument("--eps", type=float, help="value tolerance (default 1e-9 x range)")
    p.add_argument("--q", type=int, help="level bins (default 64)")
    p.add_argument("--subdomains", type=int, help="sampled subdomains (default 200)")
    p.add_argument("--radii", type=_floats, help="VG radii, comma separated")
    p.add_argument("--seed", type=int, default=seed_default, help="subdomain sampling seed")
    p.add_argument("--tau", type=float, help="a.e. allowance for weak and VG (default 0)")
    p.add_argument("--closed-domain", type=_bool, help="level sets end at the domain edge (default true)")


def _emits(text):
    out = _csv_list(text)
    bad = set(out) - set(EMITS)
    if bad:
        raise argparse.ArgumentTypeError(f"unknown emit kinds {sorted(bad)}")
    return out


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_classify(args):
    field, source = _load_source(args)
    params = _params(args)
    checks = args.checks
    unknown = set(checks) - set(DEFINITIONS)
    if unknown:
        raise FieldError(f"unknown checks {sorted(unknown)}; choose from {', '.join(DEFINITIONS)}")
    cone = _load_cone(args)
    verdicts = classify(field, checks, params, cone, args.relatively_compact, args.strict)
    echo = params.echo(field)
    echo.update(relatively_compact_only=args.relatively_compact, strict=args.strict,
                cone=cone.to_dict() if cone is not None else None)
    report = {
        "field": source,
        "params": echo,
        "verdicts": [v.to_dict(with_report=args.with_report) for v in verdicts],
    }
    if "json" in args.emit:
        _write_text(dumps(report), args.out)
    if "csv" in args.emit:
        with open(_sibling(args.out, ".csv", "csv"), "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["definition", "holds"])
            for v in verdicts:
                w.writerow([v.definition, str(v.holds).lower()])
    if "pgm" in args.emit:
        save_pgm(field, _sibling(args.out, ".pgm", "pgm"))
    for v in verdicts:
        print(f"{v.definition}: {'holds' if v.holds else 'fails'}", file=sys.stderr)
    return 0 if all(v.holds for v in verdicts) else 2


def cmd_gallery(args):
    if args.list:
        print("\n".join(gallery_names()))
        return 0
    if args.name is None:
        raise FieldError("gallery needs a NAME (or --list)")
    field = gallery_generate(args.name, nx=args.nx, ny=args.ny, **dict(args.param or []))
    if args.out is None:
        raise FieldError("gallery needs --out")
    save_field(field, args.out)
    if "pgm" in args.emit:
        save_pgm(field, _sibling(args.out, ".pgm", "pgm"))
    return 0


def cmd_synth(args):
    cloud = load_cloud(args.points)
    grid = GridDomain.square(args.grid, args.lo, args.hi)
    field = synth_field(cloud, grid, mode=args.mode)
    save_field(field, args.out)
    if "pgm" in args.emit:
        save_pgm(field, _sibling(args.out, ".pgm", "pgm"))
    return 0


def cmd_tv(args):
    field, source = _load_source(args)
    cone = _load_cone(args)
    rep = tv_report(field, cone, q=args.q, perimeter=args.perimeter)
    d = rep.to_dict()
    d["field"] = source
    d["cone"] = cone.to_dict() if cone is not None else None
    _write_text(dumps(d), args.out)
    bound = "" if rep.tv_bound is None else f" bound={rep.tv_bound:.6g}"
    print(f"tv_gradient={rep.tv_gradient:.6g} tv_coarea={rep.tv_coarea:.6g}{bound}", file=sys.stderr)
    return 2 if rep.within_bound is False else 0


def cmd_venn(args):
    expected = load_expected(args.expected)
    report = run_venn(nx=args.nx, seed=args.seed, jobs=args.jobs, params=_params(args), expected=expected)
    _write_text(dumps(report), args.out)
    print(format_table(report), file=sys.stderr)
    return 0 if report["all_match"] else 2


def build_parser():
    ap = argparse.ArgumentParser(prog="conemono", description="Monotonicity checks for sampled 2-D fields.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="run monotonicity checks on one field")
    _field_source(p)
    p.add_argument("--checks", type=_csv_list, default=list(DEFINITIONS),
                   help=f"comma list from {','.join(DEFINITIONS)} (default all)")
    _cone_arg(p, "cone for the k check in degrees, e.g. 0:90 (default: search the cone family)")
    _params_flags(p)
    p.add_argument("--relatively-compact", type=_bool, default=True,
                   help="Mostow over compactly contained subdomains only (default true)")
    p.add_argument("--strict", type=_bool, default=False, help="strict normal monotonicity (default false)")
    p.add_argument("--with-report", action="store_true", help="include per-cell cone report")
    p.add_argument("--out", metavar="PATH", help="report path (default stdout)")
    p.add_argument("--emit", type=_emits, default=["json"], help="json,csv,pgm (default json)")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("gallery", help="write a gallery field")
    p.add_argument("name", nargs="?", help="gallery field name")
    p.add_argument("--list", action="store_true", help="list gallery names")
    p.add_argument("--nx", type=int, default=65)
    p.add_argument("--ny", type=int)
    p.add_argument("--param", type=_param_pair, action="append", metavar="KEY=VALUE",
                   help="override a generator parameter (repeatable)")
    p.add_argument("--out", metavar="PATH")
    p.add_argument("--emit", type=_emits, default=["json"])
    p.set_defaults(func=cmd_gallery)

    p = sub.add_parser("synth", help="synthesize a K-monotone field from a point cloud")
    p.add_argument("--points", required=True, metavar="PATH", help="point-cloud JSON")
    p.add_argument("--grid", type=int, default=65, help="cells per side (default 65)")
    p.add_argument("--lo", type=float, default=-1.0)
    p.add_argument("--hi", type=float, default=1.0)
    p.add_argument("--mode", choices=("inf", "sup"), default="inf")
    p.add_argument("--out", required=True, metavar="PATH")
    p.add_argument("--emit", type=_emits, default=["json"])
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("tv", help="total variation estimates and bound")
    _field_source(p)
    _cone_arg(p, "sector or half-plane cone for the upper bound, e.g. 0:90")
    p.add_argument("--q", type=int, default=256, help="levels for the coarea estimate (default 256)")
    p.add_argument("--perimeter", choices=PERIMETERS, default="contour")
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_tv)

    p = sub.add_parser("venn", help="gallery x definition table against the expected signatures")
    p.add_argument("--nx", type=int, default=65)
    _params_flags(p, seed_default=42)
    p.add_argument("--jobs", type=int, default=1, help="worker processes (default 1)")
    p.add_argument("--expected", metavar="PATH", help="expected table (default: bundled)")
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_venn)
    return ap


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (FieldError, ConeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
