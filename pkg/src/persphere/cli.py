"""Command-line interface: ``persphere {vectorize,dist,demo,bench,gen}``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import __version__
from ._kernels import default_workers
from .baselines import (LandscapeParams, SwParams, image_params_for, landscape_grid_for,
                        persistence_image, persistence_landscape, sliced_wasserstein_distance)
from .bench import run_bench, scaling_checks
from .data import (DiagramFormatError, gen_diagram_cloud, gen_two_class_functions,
                   read_diagram, read_manifest, serialize_diagram, sublevel_pd0, write_manifest)
from .demo import run_demo, run_pipeline
from .diagram import make_diagram, w1_distance
from .sphere import evaluate_ps, field_to_csv, field_to_json, lp_distance, make_grid, parse_grid_spec
from .weighting import Weighting
from .zonoid import hausdorff, lift_zonoid

log = logging.getLogger("persphere")

DEFAULT_SEED = 20251016
EXIT_OK, EXIT_DATA, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _grid(text: str):
    try:
        return parse_grid_spec(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _p_value(text: str) -> float:
    if text.lower() in ("inf", "infinity"):
        return math.inf
    p = float(text)
    if p < 1:
        raise argparse.ArgumentTypeError("p must be >= 1 or 'inf'")
    return p


def _positive_int(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return n


def _add_weighting(p: argparse.ArgumentParser):
    p.add_argument("--weighting", choices=["lambda", "arctan"], default="arctan")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--k", type=float, default=0.1)
    p.add_argument("--grid", type=_grid, default=(200, 100), metavar="NxM")


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--workers", type=_positive_int, default=None,
                   help="worker threads (default: $PERSPHERE_WORKERS or 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="persphere", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    vec = sub.add_parser("vectorize", help="write one feature file per input diagram")
    vec.add_argument("inputs", nargs="+", type=Path)
    vec.add_argument("--method", choices=["ps", "pi", "pl"], default="ps")
    vec.add_argument("--out", type=Path, required=True, help="output directory")
    vec.add_argument("--format", choices=["csv", "json"], default="csv")
    vec.add_argument("--scaled", action="store_true", help="multiply PS values by sqrt(area weight)")
    vec.add_argument("--pi-n-prime", type=_positive_int, default=10)
    vec.add_argument("--pi-m", type=_positive_int, default=1)
    vec.add_argument("--pi-n", type=_positive_int, default=1, help="persistence weight exponent")
    vec.add_argument("--pl-k", type=_positive_int, default=5)
    vec.add_argument("--pl-samples", type=_positive_int, default=100)
    _add_weighting(vec)
    _add_common(vec)

    dist = sub.add_parser("dist", help="pairwise distance matrix as CSV")
    dist.add_argument("inputs", nargs="+", type=Path)
    dist.add_argument("--metric", choices=["w1", "hausdorff", "lp", "sw"], default="w1")
    dist.add_argument("--p", type=_p_value, default=2.0, help="exponent for --metric lp")
    dist.add_argument("--refine", type=int, default=3, help="hausdorff refinement rounds")
    dist.add_argument("--sw-m", type=_positive_int, default=100)
    dist.add_argument("--out", type=Path, default=None)
    _add_weighting(dist)
    _add_common(dist)

    demo = sub.add_parser("demo", help="synthetic classification pipeline, JSON report")
    demo.add_argument("--manifest", type=Path, default=None,
                      help="dataset manifest instead of the synthetic data")
    demo.add_argument("--task", choices=["classification", "regression"], default="classification")
    demo.add_argument("--n-per-class", type=_positive_int, default=50)
    demo.add_argument("--noise", type=float, default=0.05)
    demo.add_argument("--folds", type=int, default=3)
    demo.add_argument("--out", type=Path, default=None)
    _add_weighting(demo)
    _add_common(demo)

    bench = sub.add_parser("bench", help="time persistence-sphere evaluation")
    bench.add_argument("--quick", action="store_true", help="small sizes only")
    bench.add_argument("--repeats", type=_positive_int, default=3)
    bench.add_argument("--out", type=Path, default=None)
    _add_common(bench)

    gen = sub.add_parser("gen", help="write synthetic diagrams and a manifest")
    gen.add_argument("kind", choices=["functions", "cloud"])
    gen.add_argument("--out", type=Path, required=True, help="output directory")
    gen.add_argument("--n", type=_positive_int, default=20)
    gen.add_argument("--noise", type=float, default=0.05)
    gen.add_argument("--template", type=Path, default=None, help="template diagram for 'cloud'")
    gen.add_argument("--jitter", type=float, default=0.1)
    _add_common(gen)
    return parser


def _weighting(args) -> Weighting:
    try:
        return Weighting(args.weighting, args.alpha, args.k)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _workers(args) -> int:
    return args.workers if args.workers is not None else default_workers()


def _commit(files: dict[Path, str]):
    """Write all files or none: stage to temporaries, then rename."""
    staged = []
    try:
        for path, text in files.items():
            fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(text)
            staged.append((tmp, path))
        for tmp, path in staged:
            os.replace(tmp, path)
    finally:
        for tmp, _ in staged:
            if os.path.exists(tmp):
                os.unlink(tmp)


def _write_or_print(path: Path | None, text: str):
    if path is None:
        sys.stdout.write(text)
    else:
        _commit({path: text})


def cmd_vectorize(args) -> int:
    w = _weighting(args)
    args.out.mkdir(parents=True, exist_ok=True)
    diagrams = [read_diagram(p) for p in args.inputs]
    header = {"method": args.method, "seed": args.seed}
    outputs: dict[Path, str] = {}
    if args.method == "ps":
        grid = make_grid(*args.grid)
        header.update(grid=list(args.grid), weighting=w.params(), scaled=args.scaled)
        for path, d in zip(args.inputs, diagrams):
            field = evaluate_ps(d, w, grid, workers=_workers(args))
            render = field_to_json if args.format == "json" else field_to_csv
            outputs[args.out / f"{path.stem}.ps.{args.format}"] = render(field, args.scaled, header)
    elif args.method == "pi":
        ip = image_params_for(diagrams, args.pi_n_prime, args.pi_m, args.pi_n)
        header.update(resolution=list(ip.resolution), sigma=ip.sigma, weight_exponent=ip.weight_exponent,
                      bounds=list(ip.bounds))
        be, pe = ip.edges()
        bc, pc = 0.5 * (be[:-1] + be[1:]), 0.5 * (pe[:-1] + pe[1:])
        pp, bb = np.meshgrid(pc, bc, indexing="ij")
        for path, d in zip(args.inputs, diagrams):
            vals = persistence_image(d, ip)
            outputs[args.out / f"{path.stem}.pi.{args.format}"] = _table(
                header, ["birth", "persistence", "value"], zip(bb.ravel(), pp.ravel(), vals), args.format)
    else:
        lp = LandscapeParams(args.pl_k, landscape_grid_for(diagrams, args.pl_samples))
        header.update(k_max=lp.k_max, grid_min=lp.grid[0], grid_max=lp.grid[-1], samples=len(lp.grid))
        for path, d in zip(args.inputs, diagrams):
            mat = persistence_landscape(d, lp)
            rows = ((k + 1, t, mat[k, i]) for k in range(lp.k_max) for i, t in enumerate(lp.grid))
            outputs[args.out / f"{path.stem}.pl.{args.format}"] = _table(
                header, ["k", "t", "value"], rows, args.format)
    _commit(outputs)
    log.info("wrote %d files to %s", len(outputs), args.out)
    return EXIT_OK


def _table(header: dict, columns, rows, fmt: str) -> str:
    rows = [list(r) for r in rows]
    if fmt == "json":
        return json.dumps({"parameters": header, "columns": columns,
                           "rows": [[float(v) for v in r] for r in rows]})
    buf = io.StringIO()
    for key, val in header.items():
        buf.write(f"# {key}: {json.dumps(val)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])
    return buf.getvalue()


def cmd_dist(args) -> int:
    if len(args.inputs) < 2:
        raise UsageError("dist needs at least 2 input diagrams")
    if args.refine < 0:
        raise UsageError("--refine must be >= 0")
    w = _weighting(args)
    diagrams = [read_diagram(p) for p in args.inputs]
    n = len(diagrams)
    mat = np.zeros((n, n))
    if args.metric == "w1":
        fn = w1_distance
    elif args.metric == "sw":
        params = SwParams(args.sw_m)
        fn = lambda a, b: sliced_wasserstein_distance(a, b, params)  # noqa: E731
    elif args.metric == "hausdorff":
        grid = make_grid(*args.grid)
        zs = {id(d): lift_zonoid(d, w) for d in diagrams}
        fn = lambda a, b: hausdorff(zs[id(a)], zs[id(b)], grid, args.refine, workers=_workers(args))  # noqa: E731
    else:
        grid = make_grid(*args.grid)
        fields = {id(d): evaluate_ps(d, w, grid, workers=_workers(args)) for d in diagrams}
        fn = lambda a, b: lp_distance(fields[id(a)], fields[id(b)], args.p)  # noqa: E731
    for i in range(n):
        for j in range(i + 1, n):
            mat[i, j] = mat[j, i] = fn(diagrams[i], diagrams[j])
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    names = [p.name for p in args.inputs]
    writer.writerow([""] + names)
    for name, row in zip(names, mat):
        writer.writerow([name] + [repr(float(v)) for v in row])
    _write_or_print(args.out, buf.getvalue())
    return EXIT_OK


def cmd_demo(args) -> int:
    w = _weighting(args)
    vec = dict(weighting=w, grid=args.grid, workers=_workers(args))
    if args.manifest is not None:
        data = read_manifest(args.manifest)
        report = run_pipeline(data, args.task, folds=args.folds, seed=args.seed, **vec)
        report["dataset"] = {"kind": "manifest", "path": str(args.manifest)}
    else:
        report = run_demo(args.seed, args.n_per_class, args.noise, folds=args.folds, **vec)
    _write_or_print(args.out, json.dumps(report, indent=2) + "\n")
    return EXIT_OK


def cmd_bench(args) -> int:
    if args.quick:
        rows = run_bench(sizes=(100, 1000), grids=((50, 25), (100, 50)), workers=(1, 2),
                         repeats=args.repeats, seed=args.seed)
    else:
        rows = run_bench(repeats=args.repeats, seed=args.seed)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n_points", "n_theta", "n_phi", "workers", "seconds", "identical"])
    for r in rows:
        writer.writerow([r.n_points, r.n_theta, r.n_phi, r.workers, f"{r.seconds:.6f}", int(r.identical)])
    if not args.quick:
        sc = scaling_checks(repeats=args.repeats, seed=args.seed)
        buf.write(f"# points_ratio: {sc['points_ratio']:.3f}\n")
        buf.write(f"# grid_ratio: {sc['grid_ratio']:.3f}\n")
        buf.write(f"# speedup_{sc['workers']}_workers: {sc['speedup']:.3f} (cpus: {os.cpu_count()})\n")
    _write_or_print(args.out, buf.getvalue())
    if not all(r.identical for r in rows):
        log.error("outputs differ across worker counts")
        return EXIT_DATA
    return EXIT_OK


def cmd_gen(args) -> int:
    args.out.mkdir(parents=True, exist_ok=True)
    files: dict[Path, str] = {}
    entries = []
    if args.kind == "functions":
        for i, (f, label) in enumerate(gen_two_class_functions(args.n, args.noise, args.seed)):
            name = f"fn_{i:04d}.csv"
            files[args.out / name] = serialize_diagram(sublevel_pd0(f))
            entries.append((name, label))
    else:
        if args.template is None:
            raise UsageError("'gen cloud' needs --template")
        template = read_diagram(args.template)
        for i, d in enumerate(gen_diagram_cloud(template, args.n, args.jitter, args.seed)):
            name = f"cloud_{i:04d}.csv"
            files[args.out / name] = serialize_diagram(d)
            entries.append((name, i))
    _commit(files)
    write_manifest(args.out / "manifest.json", entries)
    return EXIT_OK


COMMANDS = {"vectorize": cmd_vectorize, "dist": cmd_dist, "demo": cmd_demo,
            "bench": cmd_bench, "gen": cmd_gen}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with code 2 on usage errors
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.error(str(exc))
    except (DiagramFormatError, OSError, ValueError) as exc:
        print(f"persphere: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
