"""Command-line interface.

Exit codes: 0 success, 1 a verification criterion failed, 2 I/O error,
3 precondition or guard violation, 4 configuration could not be parsed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from .diameter import diameter_naive, diameter_pruned
from .errors import PreconditionError
from .montecarlo import EXPERIMENTS, ExperimentConfig, run_experiment
from .normalization import normalize
from .radial_models import PointCloud, model_from_dict, sample_points
from .rng import make_stream
from .verify import SUITES, run_suite, scorecard_json

EXIT_OK, EXIT_FAIL, EXIT_IO, EXIT_GUARD, EXIT_CONFIG = 0, 1, 2, 3, 4

_CONFIG_GUARDS = {"config"}


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _read_text(path):
    try:
        if path == "-":
            return sys.stdin.read()
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_IO) from exc


def _parse_json(text, what):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(f"malformed JSON in {what}: {exc}", EXIT_CONFIG) from exc


def _load_json_arg(value, what):
    """Inline JSON if it looks like an object, otherwise a file path."""
    text = value if value.lstrip().startswith("{") else _read_text(value)
    return _parse_json(text, what)


def _load_config(args):
    return _load_json_arg(args.config, "--config") if args.config else {}


def _model(args, config):
    spec = None
    if args.model:
        spec = _load_json_arg(args.model, "--model")
    elif "model" in config:
        spec = config["model"]
    if spec is None:
        raise CliError("a model is required (--model or 'model' in --config)", EXIT_CONFIG)
    return model_from_dict(spec)


def _emit(text, out):
    if not text.endswith("\n"):
        text += "\n"
    if out in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise CliError(f"cannot write {out}: {exc}", EXIT_IO) from exc


def points_to_csv(coords) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for row in np.atleast_2d(coords):
        w.writerow([f"{v:.17g}" for v in row])
    return buf.getvalue()


def points_from_csv(text) -> np.ndarray:
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    if not rows:
        raise CliError("no points in input", EXIT_IO)
    try:
        arr = np.array([[float(c) for c in r] for r in rows], dtype=float)
    except ValueError as exc:
        raise CliError(f"non-numeric point data: {exc}", EXIT_CONFIG) from exc
    return arr


def cmd_sample(args):
    config = _load_config(args)
    model = _model(args, config)
    n = args.n if args.n is not None else config.get("n")
    if n is None:
        raise CliError("--n is required", EXIT_CONFIG)
    pts = sample_points(model, int(n), make_stream(args.seed))
    if args.format == "json":
        _emit(json.dumps([[float(v) for v in row] for row in pts.coordinates]), args.out)
    else:
        _emit(points_to_csv(pts.coordinates), args.out)
    return EXIT_OK


def cmd_diameter(args):
    coords = points_from_csv(_read_text(args.input))
    fn = diameter_naive if args.naive else diameter_pruned
    res = fn(PointCloud(coords))
    _emit(json.dumps(res.to_dict(), sort_keys=True), args.out)
    return EXIT_OK


def cmd_normalize(args):
    config = _load_config(args)
    model = _model(args, config)
    n = args.n if args.n is not None else config.get("n")
    if n is None:
        raise CliError("--n is required", EXIT_CONFIG)
    out = normalize(model, int(n), lam=args.lam)
    _emit(json.dumps(out, indent=2, sort_keys=True), args.out)
    return EXIT_OK


def cmd_simulate(args):
    config = _load_config(args)
    kind = args.experiment or config.get("experiment")
    if kind is None:
        raise CliError("--experiment is required", EXIT_CONFIG)
    spec = dict(config)
    spec.pop("experiment", None)
    if args.model:
        spec["model"] = _load_json_arg(args.model, "--model")
    if args.n:
        spec["n_values"] = args.n
    if args.reps is not None:
        spec["replications"] = args.reps
    if args.lam is not None:
        spec["lam"] = args.lam
        spec.pop("lambda", None)
    if args.epsilon is not None:
        spec["epsilon"] = args.epsilon
    spec.setdefault("seed", args.seed)
    if args.seed_given:
        spec["seed"] = args.seed
    spec["threads"] = args.threads
    for key in ("n_values", "replications"):
        if key not in spec:
            raise CliError(f"missing '{key}' (flag or config)", EXIT_CONFIG)
    cfg = ExperimentConfig.from_dict(spec)
    report = run_experiment(kind, cfg)
    if args.format == "csv":
        _emit(report.samples_csv(), args.out)
    else:
        _emit(report.to_json(include_samples=args.samples), args.out)
    return EXIT_OK


def cmd_verify(args):
    card = run_suite(args.suite, seed=args.seed, threads=args.threads, n=args.n, reps=args.reps)
    _emit(scorecard_json(card), args.out)
    return EXIT_OK if card["passed"] else EXIT_FAIL


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="64-bit seed (default 0)")
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("--format", choices=("json", "csv"), default=None)
    common.add_argument("--config", default=None, help="JSON config file or inline object")

    parser = _Parser(prog="maxdist", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("sample", parents=[common], help="write sampled points as CSV")
    p.add_argument("--model")
    p.add_argument("--n", type=int)
    p.set_defaults(func=cmd_sample, default_format="csv")

    p = sub.add_parser("diameter", parents=[common], help="diameter of points read from CSV")
    p.add_argument("--input", default="-", help="CSV file (default stdin)")
    p.add_argument("--naive", action="store_true", help="use the all-pairs reference")
    p.set_defaults(func=cmd_diameter, default_format="json")

    p = sub.add_parser("normalize", parents=[common], help="normalizing constants as JSON")
    p.add_argument("--model")
    p.add_argument("--n", type=int)
    p.add_argument("--lambda", dest="lam", type=float, default=0.0)
    p.set_defaults(func=cmd_normalize, default_format="json")

    p = sub.add_parser("simulate", parents=[common], help="run a Monte Carlo experiment")
    p.add_argument("--experiment", choices=EXPERIMENTS)
    p.add_argument("--model")
    p.add_argument("--n", type=int, action="append")
    p.add_argument("--reps", type=int)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--samples", action="store_true", help="include raw standardized samples in JSON")
    p.set_defaults(func=cmd_simulate, default_format="json")

    p = sub.add_parser("verify", parents=[common], help="run an acceptance suite")
    p.add_argument("suite", choices=sorted(SUITES))
    p.add_argument("--n", type=int)
    p.add_argument("--reps", type=int)
    p.set_defaults(func=cmd_verify, default_format="json")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    args.seed_given = args.seed is not None
    if args.seed is None:
        args.seed = 0
    if args.format is None:
        args.format = args.default_format
    try:
        return args.func(args)
    except CliError as exc:
        print(f"maxdist: {exc}", file=sys.stderr)
        return exc.code
    except PreconditionError as exc:
        code = EXIT_CONFIG if exc.guard in _CONFIG_GUARDS else EXIT_GUARD
        print(f"maxdist: {exc.guard}: {exc}", file=sys.stderr)
        return code
    except OSError as exc:
        print(f"maxdist: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
