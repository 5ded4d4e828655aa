"""Command line interface.

Machine-readable results go to declared output files or standard output;
diagnostics go to standard error.  Exit codes: 0 success, 1 validation
error, 2 runtime error.  Existing output files are only overwritten with
--force.  Worker counts never change results, only speed.
"""

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .codebook import (
    LdsMatrix,
    builtin_s1,
    builtin_s2,
    energy_distribution,
    expand,
    load,
    qpsk,
    save,
)
from .codebook import _load_codebooks, _load_lds  # reused by cmd_detect
from .detector import DetectionProblem, mpa_detect
from .eisenstein import list_rings, to_complex
from .errors import LdsError, ValidationError
from .graph import FactorGraph, builtin_graph, validate
from .metrics import DEFAULT_CAP, aber_union_bound, enumerate_superimposed, mpds
from .parallel import resolve_workers
from .search import SearchConfig, search
from .sim import SimConfig, ebno_to_n0, simulate, write_curve_csv


def _complex_vector(raw, where):
    out = []
    for i, v in enumerate(raw):
        if not isinstance(v, (list, tuple)) or len(v) != 2:
            raise ValidationError(f"{where}[{i}] must be a [re, im] pair")
        out.append(complex(v[0], v[1]))
    return np.array(out, dtype=complex)


def _parse_ebno_grid(text):
    parts = text.split(":")
    if len(parts) != 3:
        raise ValidationError(f"ebno grid must be a:b:step in dB, got {text!r}")
    try:
        a, b, step = (float(p) for p in parts)
    except ValueError:
        raise ValidationError(f"ebno grid must be numeric a:b:step, got {text!r}")
    if step <= 0:
        raise ValidationError(f"ebno step must be positive, got {step}")
    if b < a:
        raise ValidationError(f"ebno grid end {b} is below start {a}")
    n = int(math.floor((b - a) / step + 1e-9)) + 1
    return [a + i * step for i in range(n)]


def _check_out(path, force):
    p = Path(path)
    if p.exists() and not force:
        raise ValidationError(f"refusing to overwrite existing file: {p} (use --force)")
    return p


def _sidecar_path(out):
    return Path(out).with_suffix(".config.json")


def _trace_path(out):
    return Path(out).with_suffix(".trace.csv")


def _dump_json(doc, path):
    text = json.dumps(doc, indent=1) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _constellation(name):
    if name != "qpsk":
        raise ValidationError(f"unknown constellation {name!r}, expected qpsk")
    return qpsk()


def _load_graph(spec):
    if spec == "paper":
        return builtin_graph()
    path = Path(spec)
    if not path.exists():
        raise ValidationError(f"graph file not found: {path}")
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: malformed JSON ({exc})") from exc
    for key in ("K", "J", "d_v", "d_c", "incidence"):
        if key not in doc:
            raise ValidationError(f"{path}: missing required key {key!r}")
    g = FactorGraph(K=int(doc["K"]), J=int(doc["J"]), d_v=int(doc["d_v"]),
                    d_c=int(doc["d_c"]), incidence=doc["incidence"])
    problems = validate(g)
    if problems:
        raise ValidationError(f"{path}: " + "; ".join(problems))
    return g


def _load_lds_file(path) -> LdsMatrix:
    obj = load(path)
    if not isinstance(obj, LdsMatrix):
        raise ValidationError(f"{path}: expected an LDS file (key 'S'), got codebooks")
    return obj


def _analysis_books(args):
    """(books, lds-or-None) from --lds/--codebooks flags."""
    if (args.lds is None) == (args.codebooks is None):
        raise ValidationError("exactly one of --lds or --codebooks is required")
    if args.lds is not None:
        s = _load_lds_file(args.lds)
        return expand(s, _constellation(args.constellation)), s
    obj = load(args.codebooks)
    if isinstance(obj, LdsMatrix):
        raise ValidationError(
            f"{args.codebooks}: expected a codebook file (key 'books'), got an LDS file"
        )
    return obj, None


def cmd_rings(args):
    if args.max_radius_sq < 1:
        raise ValidationError(f"--max-radius-sq must be >= 1, got {args.max_radius_sq}")
    table = []
    for ring in list_rings(args.max_radius_sq):
        table.append({
            "radius_sq": ring.radius_sq,
            "radius": ring.radius,
            "count": len(ring),
            "points": [
                {"a": p.a, "b": p.b,
                 "re": to_complex(p).real, "im": to_complex(p).imag}
                for p in ring.points
            ],
        })
    _dump_json({"max_radius_sq": args.max_radius_sq, "rings": table}, None)
    return 0


def cmd_builtin(args):
    builders = {"s1": builtin_s1, "s2": builtin_s2}
    if args.name not in builders:
        raise ValidationError(f"unknown built-in set {args.name!r}, expected s1 or s2")
    out = _check_out(args.out, args.force)
    save(builders[args.name](), out)
    print(f"wrote {out}", file=sys.stderr)
    return 0


def cmd_construct(args):
    try:
        radii = tuple(int(p) for p in args.rings_sq.split(","))
    except ValueError:
        raise ValidationError(f"--rings-sq must be comma-separated integers, got {args.rings_sq!r}")
    workers = resolve_workers(args.workers)
    out = _check_out(args.out, args.force)
    trace_out = _check_out(_trace_path(out), args.force)
    cfg = SearchConfig(
        graph=_load_graph(args.graph),
        ring_radii_sq=radii,
        constellation=_constellation(args.constellation),
        budget=args.budget,
        seed=args.seed,
        cap=args.cap,
        hill_climb=args.hill_climb,
    )
    result = search(cfg, workers=workers)
    save(result.best, out)
    lines = ["candidate,mpds"]
    lines += [f"{i},{v!r}" for i, v in result.trace]
    trace_out.write_text("\n".join(lines) + "\n")
    print(f"best mpds {result.best_mpds!r} after {cfg.budget} candidates; "
          f"wrote {out} and {trace_out}", file=sys.stderr)
    return 0


def cmd_analyze(args):
    workers = resolve_workers(args.workers)
    out = _check_out(args.out, args.force) if args.out else None
    books, s = _analysis_books(args)
    report = mpds(enumerate_superimposed(books, args.cap), workers=workers)
    doc = report.to_json_dict()
    if s is not None:
        doc["energy_distribution"] = [float(e) for e in energy_distribution(s)]
        doc["power_balanced"] = s.is_power_balanced()
        doc["violations"] = validate(s.graph)
    else:
        doc["energy_distribution"] = [
            float((np.abs(b) ** 2).sum() / books.M) for b in books.books
        ]
    _dump_json(doc, out)
    if out is not None:
        print(f"wrote {out}", file=sys.stderr)
    return 0


def cmd_bound(args):
    workers = resolve_workers(args.workers)
    out = _check_out(args.out, args.force)
    s = _load_lds_file(args.lds)
    c = _constellation(args.constellation)
    books = expand(s, c)
    grid = _parse_ebno_grid(args.ebno)
    lines = ["ebno_db,bound"]
    for db in grid:
        n0 = ebno_to_n0(db, s, c)
        value = aber_union_bound(books, n0, cap=args.cap, workers=workers)
        lines.append(f"{db!r},{value!r}")
    out.write_text("\n".join(lines) + "\n")
    print(f"wrote {out}", file=sys.stderr)
    return 0


def cmd_simulate(args):
    workers = resolve_workers(args.workers)
    out = _check_out(args.out, args.force)
    sidecar = _check_out(_sidecar_path(out), args.force)
    s = _load_lds_file(args.lds)
    c = _constellation(args.constellation)
    cfg = SimConfig(
        books=expand(s, c),
        channel=args.channel,
        ebno_grid_db=_parse_ebno_grid(args.ebno),
        mpa_iters=args.iters,
        min_errors=args.min_errors,
        max_blocks=args.max_blocks,
        seed=args.seed,
    )
    points = simulate(cfg, workers=workers)
    write_curve_csv(points, out)
    _dump_json({
        "command": "simulate",
        "lds": str(args.lds),
        "constellation": args.constellation,
        "channel": cfg.channel,
        "ebno_grid_db": list(cfg.ebno_grid_db),
        "mpa_iters": cfg.mpa_iters,
        "min_errors": cfg.min_errors,
        "max_blocks": cfg.max_blocks,
        "seed": cfg.seed,
    }, sidecar)
    print(f"wrote {out} and {sidecar}", file=sys.stderr)
    return 0


def cmd_detect(args):
    out = _check_out(args.out, args.force) if args.out else None
    path = Path(args.problem)
    if not path.exists():
        raise ValidationError(f"problem file not found: {path}")
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: malformed JSON ({exc})") from exc
    if ("lds" in doc) == ("codebooks" in doc):
        raise ValidationError(f"{path}: need exactly one of 'lds' or 'codebooks'")
    if "lds" in doc:
        spec = doc["lds"]
        s = _load_lds_file(spec) if isinstance(spec, str) else _load_lds(spec, str(path))
        books = expand(s, _constellation(doc.get("constellation", "qpsk")))
    else:
        spec = doc["codebooks"]
        if isinstance(spec, str):
            books = load(spec)
            if isinstance(books, LdsMatrix):
                raise ValidationError(f"{spec}: expected codebooks, got an LDS file")
        else:
            books = _load_codebooks(spec, str(path))
    if "y" not in doc or "h" not in doc or "N0" not in doc:
        raise ValidationError(f"{path}: required keys are y, h, N0")
    problem = DetectionProblem(
        y=_complex_vector(doc["y"], "y"),
        h=_complex_vector(doc["h"], "h"),
        books=books,
        N0=float(doc["N0"]),
    )
    post = mpa_detect(problem, iters=args.iters, max_log=args.max_log)
    _dump_json({
        "probabilities": [[float(p) for p in row] for row in post.probabilities],
        "symbols": [int(x) for x in post.symbols],
        "bits": [int(b) for b in post.bits],
    }, out)
    if out is not None:
        print(f"wrote {out}", file=sys.stderr)
    return 0


def _add_workers(p):
    p.add_argument("--workers", type=int, default=None,
                   help="worker processes (default: LDSFORGE_WORKERS or 1)")


def _add_force(p):
    p.add_argument("--force", action="store_true",
                   help="overwrite existing output files")


def _add_cap(p):
    p.add_argument("--cap", type=int, default=DEFAULT_CAP,
                   help="refuse to enumerate more than this many codewords")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ldsforge",
        description="Construct, analyze and simulate low-density signature sets "
                    "built from hexagonal lattice rings.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rings", help="list lattice rings by squared radius")
    p.add_argument("--max-radius-sq", type=int, required=True)
    p.set_defaults(func=cmd_rings)

    p = sub.add_parser("builtin", help="write a built-in signature set (s1 or s2)")
    p.add_argument("name")
    p.add_argument("--out", required=True)
    _add_force(p)
    p.set_defaults(func=cmd_builtin)

    p = sub.add_parser("construct", help="randomized search for a signature set")
    p.add_argument("--graph", default="paper",
                   help="'paper' for the built-in 4x6 graph, or a JSON graph file")
    p.add_argument("--rings-sq", required=True,
                   help="comma-separated squared ring radii, e.g. 1,3,7")
    p.add_argument("--budget", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--constellation", default="qpsk")
    p.add_argument("--hill-climb", action="store_true",
                   help="refine the best candidate by single-point swaps")
    p.add_argument("--out", required=True)
    _add_cap(p)
    _add_workers(p)
    _add_force(p)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("analyze", help="distance metrics of a signature or codebook set")
    p.add_argument("--lds")
    p.add_argument("--codebooks")
    p.add_argument("--constellation", default="qpsk")
    p.add_argument("--out", help="metrics JSON (default: standard output)")
    _add_cap(p)
    _add_workers(p)
    _add_force(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("bound", help="union bound on average bit error rate")
    p.add_argument("--lds", required=True)
    p.add_argument("--constellation", default="qpsk")
    p.add_argument("--ebno", required=True, help="dB grid as a:b:step")
    p.add_argument("--out", required=True)
    _add_cap(p)
    _add_workers(p)
    _add_force(p)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("simulate", help="Monte Carlo bit error rate curve")
    p.add_argument("--lds", required=True)
    p.add_argument("--constellation", default="qpsk")
    p.add_argument("--channel", required=True)
    p.add_argument("--ebno", required=True, help="dB grid as a:b:step")
    p.add_argument("--iters", type=int, default=8)
    p.add_argument("--min-errors", type=int, default=200)
    p.add_argument("--max-blocks", type=int, default=10 ** 6)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    _add_workers(p)
    _add_force(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("detect", help="run the detector on one received block")
    p.add_argument("--problem", required=True,
                   help="JSON with y, h, N0 and an inline or referenced lds/codebooks")
    p.add_argument("--iters", type=int, default=8)
    p.add_argument("--max-log", action="store_true")
    p.add_argument("--out", help="posteriors JSON (default: standard output)")
    _add_force(p)
    p.set_defaults(func=cmd_detect)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except LdsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # runtime failures: I/O, numerics, bugs
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
